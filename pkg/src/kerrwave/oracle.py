"""Implicit Runge-Kutta reference integrators for the semi-discrete systems.

These share the spatial assembly with the slab solvers but nothing of their
time discretization, so they serve as an independent check: in a linear
medium the dG(k) e-h scheme must reproduce Radau IIA with ``k+1`` stages and
the Petrov-Galerkin e-a scheme the Lobatto IIIA method of the same order.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import diagnostics
from .errors import SolverDivergedError
from .fem import assemble_deriv, assemble_lumped_mass, assemble_stiffness, interpolate
from .trajectory import Trajectory

_S6 = math.sqrt(6.0)


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int

    @property
    def stages(self):
        return len(self.b)

    def order_residuals(self):
        """Residuals of the order conditions up to ``order`` (through order 4)."""
        A, b, c = self.A, self.b, self.c
        out = {"row sums": np.max(np.abs(A.sum(axis=1) - c))}
        conds = {
            1: [(b.sum(), 1.0)],
            2: [(b @ c, 1 / 2)],
            3: [(b @ c**2, 1 / 3), (b @ A @ c, 1 / 6)],
            4: [(b @ c**3, 1 / 4), (b @ (c * (A @ c)), 1 / 8), (b @ A @ c**2, 1 / 12), (b @ A @ A @ c, 1 / 24)],
        }
        for q in range(1, min(self.order, 4) + 1):
            out[f"order {q}"] = max(abs(v - ref) for v, ref in conds[q])
        # single-sum quadrature conditions hold up to the full order
        for q in range(5, self.order + 1):
            out[f"order {q}"] = abs(b @ c ** (q - 1) - 1.0 / q)
        return out


def radau_iia(s):
    if s == 1:
        A, c = [[1.0]], [1.0]
    elif s == 2:
        A, c = [[5 / 12, -1 / 12], [3 / 4, 1 / 4]], [1 / 3, 1.0]
    elif s == 3:
        A = [
            [(88 - 7 * _S6) / 360, (296 - 169 * _S6) / 1800, (-2 + 3 * _S6) / 225],
            [(296 + 169 * _S6) / 1800, (88 + 7 * _S6) / 360, (-2 - 3 * _S6) / 225],
            [(16 - _S6) / 36, (16 + _S6) / 36, 1 / 9],
        ]
        c = [(4 - _S6) / 10, (4 + _S6) / 10, 1.0]
    else:
        raise ValueError(f"Radau IIA is tabulated for s = 1, 2, 3; got {s}")
    A = np.array(A)
    return ButcherTableau(f"Radau IIA({s})", A, A[-1].copy(), np.array(c), 2 * s - 1)


def lobatto_iiia(s):
    if s == 2:
        A, c = [[0.0, 0.0], [1 / 2, 1 / 2]], [0.0, 1.0]
    elif s == 3:
        A, c = [[0.0, 0.0, 0.0], [5 / 24, 1 / 3, -1 / 24], [1 / 6, 2 / 3, 1 / 6]], [0.0, 0.5, 1.0]
    else:
        raise ValueError(f"Lobatto IIIA is tabulated for s = 2, 3; got {s}")
    A = np.array(A)
    return ButcherTableau(f"Lobatto IIIA({s})", A, A[-1].copy(), np.array(c), 2 * s - 2)


def trapezoidal():
    return lobatto_iiia(2)


class SemiDiscreteSystem:
    """Method-of-lines ODE ``y' = f(y)`` for either formulation.

    ``eh``: ``y = (e, h)`` with ``M(e) e' = G^T h``, ``mu0 M_Q h' = -G e``.
    ``ea``: ``y = (e, a)`` with ``M(e) e' = K a``, ``a' = -e``.
    Here ``M(e)`` is the lumped mass weighted with ``d'(e)``.
    """

    def __init__(self, kind, material, W, Q=None):
        if kind not in ("eh", "ea"):
            raise ValueError(f"unknown system {kind!r}")
        self.kind, self.material, self.W, self.Q = kind, material, W, Q
        self.nw = W.dof_count
        if kind == "eh":
            self.G = assemble_deriv(W, Q).tocsr()
            self.GT = self.G.T.tocsr()
            self.mq = material.mu0 * Q.node_weights
            self.size = self.nw + Q.dof_count
        else:
            self.K = assemble_stiffness(W, material.nu0).tocsr()
            self.size = 2 * self.nw

    def split(self, y):
        return y[: self.nw], y[self.nw:]

    def rhs(self, y):
        e, other = self.split(y)
        mass = assemble_lumped_mass(self.W, self.material.d_prime(e))
        if self.kind == "eh":
            return np.concatenate([(self.GT @ other) / mass, -(self.G @ e) / self.mq])
        return np.concatenate([(self.K @ other) / mass, -e])

    def linear_operator(self):
        """Sparse matrix of ``f`` for a linear medium."""
        if not self.material.is_linear:
            raise ValueError("medium is nonlinear")
        mass = assemble_lumped_mass(self.W, self.material.d_prime(0.0))
        Minv = sp.diags(1.0 / mass)
        if self.kind == "eh":
            return sp.bmat([[None, Minv @ self.GT], [-sp.diags(1.0 / self.mq) @ self.G, None]]).tocsr()
        I = sp.identity(self.nw)
        return sp.bmat([[None, Minv @ self.K], [-I, None]]).tocsr()

    def energy(self, y):
        e, other = self.split(y)
        if self.kind == "eh":
            return diagnostics.energy_eh(e, other, self.material, self.W, self.Q)
        return diagnostics.energy_ea(e, other, self.material, self.W)


def semi_discrete_rhs(state, material, spaces, kind="eh"):
    """``f(y)`` of the semi-discrete system; ``spaces = (W, Q)``."""
    W, Q = spaces
    return SemiDiscreteSystem(kind, material, W, Q).rhs(np.asarray(state, dtype=float))


class IrkIntegrator:
    """Fixed-step implicit Runge-Kutta stepping for one system.

    Linear systems are solved directly (the stage matrix is factored once per
    step size); otherwise the stage values are found by fixed-point iteration.
    """

    def __init__(self, tableau, rhs, linear_op=None, tol=1e-13, max_iter=500):
        self.tableau, self.rhs, self.L = tableau, rhs, linear_op
        self.tol, self.max_iter = tol, max_iter
        self._lu = {}

    def _stage_lu(self, tau):
        if tau not in self._lu:
            s, n = self.tableau.stages, self.L.shape[0]
            mat = sp.identity(s * n) - tau * sp.kron(self.tableau.A, self.L)
            self._lu[tau] = splu(mat.tocsc())
        return self._lu[tau]

    def step(self, y, tau):
        tab = self.tableau
        s, n = tab.stages, len(y)
        if self.L is not None:
            ly = self.L @ y
            K = self._stage_lu(tau).solve(np.tile(ly, s)).reshape(s, n)
            return y + tau * (tab.b @ K)
        F = np.tile(self.rhs(y), (s, 1))
        for it in range(1, self.max_iter + 1):
            Y = y[None, :] + tau * (tab.A @ F)
            F_new = np.array([self.rhs(Yi) for Yi in Y])
            change = tau * np.max(np.abs(F_new - F))
            F = F_new
            if change < self.tol:
                return y + tau * (tab.b @ F)
            if not np.isfinite(change):
                break
        raise SolverDivergedError(f"{tab.name} stage iteration failed", change, it)


def irk_step(tableau, rhs, y, tau, tol=1e-13, linear_op=None):
    """One implicit RK step of ``y' = rhs(y)``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    return IrkIntegrator(tableau, rhs, linear_op, tol).step(np.asarray(y, dtype=float), tau)


def integrate(system, y0, tau, steps, tableau, substeps=1, tol=1e-13):
    """States at ``n * tau`` for ``n = 0..steps``, using ``substeps`` RK steps each."""
    linear_op = system.linear_operator() if system.material.is_linear else None
    irk = IrkIntegrator(tableau, system.rhs, linear_op, tol)
    out = np.empty((steps + 1, len(y0)))
    out[0] = y = np.asarray(y0, dtype=float)
    h = tau / substeps
    for n in range(1, steps + 1):
        for _ in range(substeps):
            y = irk.step(y, h)
        out[n] = y
    return out


def _trajectory(config, system, states, tau):
    W, Q = system.W, system.Q
    nw = W.dof_count
    second_space = Q if system.kind == "eh" else W
    return Trajectory(
        scheme="oracle",
        times=tau * np.arange(len(states)),
        e=states[:, :nw].copy(),
        second=states[:, nw:].copy(),
        energies=np.array([system.energy(y) for y in states]),
        space_e=W,
        space_second=second_space,
        second_name="h" if system.kind == "eh" else "a",
        tau=tau,
        config=config,
    )


def reference_solution(config, tau_ref=None, kind=None, stages=None):
    """Radau IIA reference run reported at the time levels of ``config``.

    By default ``tau_ref = config.tau / config.oracle_substeps`` with
    ``config.oracle_stages`` stages on the ``config.oracle_system`` system.
    """
    config.validate()
    kind = kind or config.oracle_system
    stages = stages or config.oracle_stages
    if tau_ref is None:
        substeps = config.oracle_substeps
    else:
        substeps = int(round(config.tau / tau_ref))
        if substeps < 1 or abs(config.tau / tau_ref - substeps) > 1e-9:
            raise ValueError(f"tau_ref={tau_ref!r} does not divide tau={config.tau!r}")
    material = config.material()
    W, Q = config.spaces()
    system = SemiDiscreteSystem(kind, material, W, Q)
    e0 = interpolate(W, config.initial_field())
    y0 = np.concatenate([e0, np.zeros(system.size - W.dof_count)])
    states = integrate(system, y0, config.tau, config.steps, radau_iia(stages), substeps, tol=1e-14)
    return _trajectory(config, system, states, config.tau)


def run_oracle(config):
    return reference_solution(config)
