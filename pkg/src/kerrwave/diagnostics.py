"""Discrete energies, self-convergence errors, e.o.c. tables, energy audits."""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fem import FeSpace1D, assemble_deriv, l2_norm, prolong

log = logging.getLogger(__name__)


def _check(values, space, name):
    values = np.asarray(values, dtype=float)
    if values.shape != (space.dof_count,):
        raise ValueError(f"{name} has shape {values.shape}, expected ({space.dof_count},) for {space}")
    return values


def energy_eh(e, h, material, W, Q):
    """Discrete energy ``sum_x w_E(e) + w_M(h)`` with the spaces' nodal rules."""
    if not W.continuous or Q.continuous or W.mesh != Q.mesh:
        raise ValueError("energy_eh expects (continuous W_h, broken Q_h) on one mesh")
    e = _check(e, W, "e")
    h = _check(h, Q, "h")
    return float(np.dot(W.node_weights, material.w_E(e)) + np.dot(Q.node_weights, material.w_M(h)))


def curl_to_q(a, W, Q, material=None):
    """Nodal values on ``Q_h`` of ``nu0 d/dx a`` (exact: the derivative lies in ``Q_h``)."""
    nu0 = 1.0 if material is None else material.nu0
    G = assemble_deriv(W, Q)
    return nu0 * (G @ _check(a, W, "a")) / Q.node_weights


def energy_ea(e, a, material, W):
    """Discrete energy ``sum_x w_E(e) + nu0/2 |a_x|^2``."""
    if not W.continuous:
        raise ValueError("energy_ea expects the continuous space W_h")
    e = _check(e, W, "e")
    a = _check(a, W, "a")
    # a_x is P_{p-1} per element; the p-point Gauss rule is exact for its square
    Q = FeSpace1D(W.mesh, W.degree - 1, continuous=False)
    ax = curl_to_q(a, W, Q)
    return float(np.dot(W.node_weights, material.w_E(e)) + 0.5 * material.nu0 * np.dot(Q.node_weights, ax * ax))


def self_convergence_error(coarse, fine):
    """``max_n || e_coarse(t^n) - e_fine(t^n) ||`` measured on the fine mesh.

    ``fine`` may use the bisected mesh or the same mesh, and the step
    ``tau/2`` or ``tau``; the coarse time levels must be fine time levels.
    """
    Wc, Wf = coarse.space_e, fine.space_e
    ratio = coarse.tau / fine.tau
    stride = int(round(ratio))
    if abs(ratio - stride) > 1e-9 or stride < 1:
        raise ValueError(f"coarse step {coarse.tau} is not a multiple of fine step {fine.tau}")
    if (fine.steps != stride * coarse.steps
            or not np.allclose(fine.times[::stride], coarse.times, rtol=0, atol=1e-12)):
        raise ValueError("coarse time levels are not contained in the fine run")
    if not (Wc.same_as(Wf) or (Wf.mesh == Wc.mesh.refined() and Wf.degree == Wc.degree)):
        raise ValueError(f"incompatible spaces {Wc} and {Wf}")
    err = 0.0
    for n in range(coarse.steps + 1):
        diff = prolong(coarse.e[n], Wc, Wf) - fine.e[stride * n]
        err = max(err, l2_norm(Wf, diff))
    return err


@dataclass
class ConvergenceTable:
    """Errors and e.o.c. along a ladder of uniform halvings."""

    param_name: str
    params: list
    errors: list
    fixed: dict = field(default_factory=dict)

    @property
    def eocs(self):
        out = [math.nan]
        for a, b in zip(self.errors[:-1], self.errors[1:]):
            out.append(math.log2(a / b) if a > 0 and b > 0 else math.nan)
        return out

    def rows(self):
        return list(zip(self.params, self.errors, self.eocs))

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(f"{self.param_name},err,eoc\n")
            for param, err, eoc in self.rows():
                eoc_text = "" if math.isnan(eoc) else f"{eoc:.17g}"
                fh.write(f"{param:.17g},{err:.17g},{eoc_text}\n")

    def __str__(self):
        lines = [f"{self.param_name:>12} {'err':>14} {'eoc':>6}"]
        for param, err, eoc in self.rows():
            eoc_text = "---" if math.isnan(eoc) else f"{eoc:.2f}"
            lines.append(f"{param:>12.6g} {err:>14.6e} {eoc_text:>6}")
        return "\n".join(lines)


def run_trajectory(config):
    """Dispatch a single run on ``config.scheme``."""
    from .oracle import run_oracle
    from .solver_ea import run_ea
    from .solver_eh import run_eh

    return {"eh": run_eh, "ea": run_ea, "oracle": run_oracle}[config.scheme](config)


def ladder_configs(config, mode=None):
    """Configs of a refinement ladder including the extra finest run.

    ``ladder-h`` halves ``h`` and ``tau`` together (``tau = tau_per_h * h``);
    ``ladder-tau`` halves ``tau`` on the fixed mesh of ``config``.  Rung ``r``
    is compared against rung ``r+1``, so ``n`` ladder values need ``n+1`` runs.
    """
    mode = mode or config.mode
    if mode == "ladder-h":
        cells = list(config.ladder_cells)
        if len(cells) < 2:
            raise ValueError("ladder needs at least two rungs")
        cells.append(2 * cells[-1])
        return [config.replace(cells=c, tau=config.tau_per_h / c, mode="single").validate() for c in cells]
    if mode == "ladder-tau":
        taus = list(config.ladder_tau)
        if len(taus) < 2:
            raise ValueError("ladder needs at least two rungs")
        taus.append(taus[-1] / 2)
        return [config.replace(tau=t, mode="single").validate() for t in taus]
    raise ValueError(f"not a ladder mode: {mode!r}")


def _run_rung(args):
    index, config = args
    try:
        return run_trajectory(config)
    except Exception as exc:
        raise RuntimeError(f"ladder rung {index} ({config.cells} cells, tau={config.tau}) failed: {exc}") from exc


def eoc_study(config, mode=None, workers=None):
    """Run a refinement ladder and tabulate self-convergence errors."""
    mode = mode or config.mode
    configs = ladder_configs(config, mode)
    workers = workers or config.workers
    jobs = list(enumerate(configs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trajs = list(pool.map(_run_rung, jobs))
    else:
        trajs = [_run_rung(job) for job in jobs]
    errors = [self_convergence_error(c, f) for c, f in zip(trajs[:-1], trajs[1:])]
    if mode == "ladder-h":
        name, params = "h", [1.0 / c.cells for c in configs[:-1]]
        fixed = {"p": config.p, "k": config.k, "tau_per_h": config.tau_per_h}
    else:
        name, params = "tau", [c.tau for c in configs[:-1]]
        fixed = {"p": config.p, "k": config.k, "h": 1.0 / config.cells}
    fixed.update(scheme=config.scheme, chi3=config.chi3, T=config.T)
    table = ConvergenceTable(name, params, errors, fixed)
    log.info("%s ladder (%s):\n%s", mode, config.scheme, table)
    return table, trajs


@dataclass
class EnergyReport:
    times: np.ndarray
    values: np.ndarray
    kind: str
    max_drift: float
    monotone: bool

    def to_csv(self, path):
        e0 = self.values[0]
        drift = (self.values - e0) / e0 if e0 != 0 else self.values - e0
        data = np.column_stack([self.times, self.values, drift])
        np.savetxt(path, data, delimiter=",", fmt="%.17g", header="t,energy,drift", comments="")


def energy_audit(traj, kind=None, slack=1e-9):
    """Monotonicity (within ``slack * E(0)``) and max relative drift of the energies."""
    kind = kind or ("E" if traj.second_name == "h" else "H")
    values = np.asarray(traj.energies, dtype=float)
    e0 = values[0]
    if e0 != 0:
        drift = float(np.max(np.abs(values - e0)) / abs(e0))
    else:
        drift = float(np.max(np.abs(values)))
    monotone = bool(np.all(np.diff(values) <= slack * abs(e0)))
    return EnergyReport(times=np.asarray(traj.times), values=values, kind=kind, max_drift=drift, monotone=monotone)


def default_workers():
    return int(os.environ.get("KERRWAVE_WORKERS", "1"))
