"""Dissipative e-h scheme: mixed FE in space, dG(k) in time.

On each slab ``I^n`` both fields are polynomials of degree ``k`` in time,
represented on the ``k+1`` right Gauss-Radau points.  The 1D system reads

    d'(e) e_t = -h_x,   mu0 h_t = -e_x,   h = 0 at x in {0, 1},

with weak forms ``<d'(e) e_t, w> = <h, w_x>`` and ``<mu0 h_t, q> = -<e_x, q>``.
Upwind jumps couple a slab to the end values of the previous one.  The
nonlinear slab system is solved by fixed-point iteration with ``d'`` frozen
at the previous iterate.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import diagnostics
from ._slab import BandedSystem, FixedPointSettings, SlabPoly, coo_parts, node_block_pattern
from .errors import SingularMassError, SolverDivergedError
from .fem import assemble_deriv, interpolate
from .quadrature import gauss_legendre, gauss_radau_right, lagrange_tabulate
from .trajectory import Trajectory

log = logging.getLogger(__name__)


@dataclass
class EhState:
    e_end: np.ndarray
    h_end: np.ndarray
    energy: float
    t: float = 0.0
    index: int = 0
    slab_e: SlabPoly = None
    slab_h: SlabPoly = None
    iterations: int = 0


class EhStepper:
    """Precomputed slab operators for fixed spaces, material and order ``k``."""

    def __init__(self, W, Q, material, k, fp=FixedPointSettings()):
        self.W, self.Q, self.material, self.k, self.fp = W, Q, material, k, fp
        self.G = assemble_deriv(W, Q).tocsr()
        self.wm = W.node_weights
        self.wq = Q.node_weights
        self.nodes = 0.5 * (gauss_radau_right(k + 1) + 1.0)
        rule = gauss_legendre(2 * k + 3).mapped(0.0, 1.0)
        self.omega = rule.weights
        self.L, self.dL = lagrange_tabulate(self.nodes, rule.points)
        self.L0 = lagrange_tabulate(self.nodes, [0.0])[0][0]
        # time mass and dG time-derivative-plus-jump matrices, rows = tests
        self.Mt = np.einsum("q,qi,qj->ij", self.omega, self.L, self.L)
        self.Ct = np.einsum("q,qi,qj->ij", self.omega, self.L, self.dL) + np.outer(self.L0, self.L0)
        nw, nq = W.dof_count, Q.dof_count
        self.nw, self.nq = nw, nq
        kk = k + 1
        self._ee_rows, self._ee_cols = node_block_pattern(nw, kk, kk)
        self._hh = sp.kron(self.Ct, sp.diags(material.mu0 * self.wq))
        # banded order: dofs of both spaces sorted by x, temporal index fastest
        coords = np.concatenate([W.dof_coords, Q.dof_coords])
        kind = np.concatenate([np.zeros(nw), np.ones(nq)])
        dof_rank = np.empty(nw + nq, dtype=int)
        dof_rank[np.lexsort((kind, coords))] = np.arange(nw + nq)
        j = np.arange(kk)[:, None]
        self._rank = np.concatenate([
            (dof_rank[None, :nw] * kk + j).ravel(),
            (dof_rank[None, nw:] * kk + j).ravel(),
        ])
        self._tau = None
        self._linear_lu = None

    def _set_tau(self, tau):
        if tau != self._tau:
            self._tau = tau
            zero = sp.csr_matrix(((self.k + 1) * self.nw, (self.k + 1) * self.nw))
            const = sp.bmat([
                [zero, -tau * sp.kron(self.Mt, self.G.T)],
                [tau * sp.kron(self.Mt, self.G), self._hh],
            ])
            rows, cols, self._const_vals = coo_parts(const)
            self._system = BandedSystem(
                np.concatenate([rows, self._ee_rows]), np.concatenate([cols, self._ee_cols]), self._rank
            )
            self._linear_lu = None

    def _ee_blocks(self, dbar_q, dbar_0):
        b = np.einsum("q,qm,qi,qj->mij", self.omega, dbar_q, self.L, self.dL)
        b += dbar_0[:, None, None] * np.outer(self.L0, self.L0)[None, :, :]
        return b * self.wm[:, None, None]

    def _factor(self, dbar_q, dbar_0):
        if np.any(dbar_q <= 0) or np.any(dbar_0 <= 0):
            raise SingularMassError("incremental permittivity is not positive")
        vals = np.concatenate([self._const_vals, self._ee_blocks(dbar_q, dbar_0).ravel()])
        return self._system.factor(vals)

    def step(self, prev, tau):
        """Advance ``prev`` by one slab of length ``tau``."""
        self._set_tau(tau)
        k, nw, nq = self.k, self.nw, self.nq
        mat = self.material
        E = np.tile(prev.e_end, (k + 1, 1))
        H = np.tile(prev.h_end, (k + 1, 1))
        rhs_h = (mat.mu0 * self.wq)[None, :] * self.L0[:, None] * prev.h_end[None, :]

        linear = mat.is_linear
        iterations, change = 0, np.inf
        while True:
            iterations += 1
            if linear and self._linear_lu is not None:
                lu = self._linear_lu
                d0 = np.full(nw, mat.d_prime(0.0))
            else:
                dq = mat.d_prime(self.L @ E)
                d0 = mat.d_prime(self.L0 @ E)
                lu = self._factor(dq, d0)
                if linear:
                    self._linear_lu = lu
            rhs_e = (self.wm * d0)[None, :] * self.L0[:, None] * prev.e_end[None, :]
            x = lu.solve(np.concatenate([rhs_e.ravel(), rhs_h.ravel()]))
            E_new = x[: (k + 1) * nw].reshape(k + 1, nw)
            H_new = x[(k + 1) * nw:].reshape(k + 1, nq)
            change = max(np.max(np.abs(E_new - E)), np.max(np.abs(H_new - H), initial=0.0))
            E, H = E_new, H_new
            if linear or change < self.fp.tol:
                break
            if iterations >= self.fp.max_iter or not np.isfinite(change):
                raise SolverDivergedError(f"e-h slab {prev.index + 1} did not converge", change, iterations)
        log.debug("e-h slab %d: %d iterations, last change %.2e", prev.index + 1, iterations, change)

        t0 = prev.t
        e_end, h_end = E[-1].copy(), H[-1].copy()
        return EhState(
            e_end=e_end,
            h_end=h_end,
            energy=diagnostics.energy_eh(e_end, h_end, mat, self.W, self.Q),
            t=t0 + tau,
            index=prev.index + 1,
            slab_e=SlabPoly("e", E, self.nodes, t0, tau, prev.index + 1),
            slab_h=SlabPoly("h", H, self.nodes, t0, tau, prev.index + 1),
            iterations=iterations,
        )


def initial_state_eh(e0, h0, material, W, Q):
    return EhState(e_end=np.asarray(e0, float), h_end=np.asarray(h0, float),
                   energy=diagnostics.energy_eh(e0, h0, material, W, Q))


def step_eh(prev, tau, material, spaces, k, fp=FixedPointSettings()):
    """One dG(k) slab of the e-h scheme; see :class:`EhStepper`."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    W, Q = spaces
    return EhStepper(W, Q, material, k, fp).step(prev, tau)


def run_eh(config):
    """Run the e-h scheme for ``config.steps`` slabs from interpolated initial data."""
    config.validate()
    material = config.material()
    W, Q = config.spaces()
    stepper = EhStepper(W, Q, material, config.k, FixedPointSettings(config.tol, config.max_iter))
    state = initial_state_eh(interpolate(W, config.initial_field()), np.zeros(Q.dof_count), material, W, Q)
    N = config.steps
    es = np.empty((N + 1, W.dof_count))
    hs = np.empty((N + 1, Q.dof_count))
    energies = np.empty(N + 1)
    its = np.zeros(N, dtype=int)
    es[0], hs[0], energies[0] = state.e_end, state.h_end, state.energy
    for n in range(1, N + 1):
        state = stepper.step(state, config.tau)
        # time levels from the index, so t^n = n tau exactly
        state.t = n * config.tau
        es[n], hs[n], energies[n], its[n - 1] = state.e_end, state.h_end, state.energy, state.iterations
    return Trajectory(
        scheme="eh", times=config.tau * np.arange(N + 1), e=es, second=hs, energies=energies,
        space_e=W, space_second=Q, second_name="h", tau=config.tau, iterations=its, config=config,
    )
