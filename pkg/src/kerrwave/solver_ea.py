"""Energy-conserving e-a scheme: Petrov-Galerkin cG(k+1) in time.

With the vector potential ``a`` (``e = -a_t``, ``mu0 h = a_x``) both fields
live in the continuous space ``W_h``.  On each slab they are polynomials of
degree ``k+1`` in time on the ``k+2`` Gauss-Lobatto points, the first
coefficient being the previous end value (continuity in time).  The
equations are tested with Legendre polynomials of degree ``<= k``::

    -int <d'(e) a_t, w> = int <d'(e) e, w>
     int <d'(e) e_t, z> = int <nu0 a_x, z_x>

The conserved quantity is ``sum w_E(e) + nu0/2 |a_x|^2``.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import legendre as leg

from . import diagnostics
from ._slab import BandedSystem, FixedPointSettings, SlabPoly, coo_parts, node_block_pattern
from .errors import SingularMassError, SolverDivergedError
from .fem import FeSpace1D, assemble_stiffness, interpolate
from .quadrature import gauss_legendre, gauss_lobatto, lagrange_tabulate
from .trajectory import Trajectory

log = logging.getLogger(__name__)


@dataclass
class EaState:
    e_end: np.ndarray
    a_end: np.ndarray
    energy: float
    t: float = 0.0
    index: int = 0
    slab_e: SlabPoly = None
    slab_a: SlabPoly = None
    iterations: int = 0


def init_a0(h0, material, W):
    """Initial vector potential for a given initial magnetic field.

    Only ``h(0) = 0`` is supported, for which ``a0 = 0`` (gauge fixed by a
    zero mean value).
    """
    if h0 is not None and np.any(np.asarray(h0) != 0):
        raise NotImplementedError("a0 for a nonzero initial magnetic field is not supported")
    return np.zeros(W.dof_count)


class EaStepper:
    """Precomputed slab operators for the e-a scheme."""

    def __init__(self, W, material, k, fp=FixedPointSettings()):
        self.W, self.material, self.k, self.fp = W, material, k, fp
        self.K = assemble_stiffness(W, material.nu0).tocsr()
        self.wm = W.node_weights
        self.nodes = 0.5 * (gauss_lobatto(k + 2).points + 1.0)
        self.nodes[0], self.nodes[-1] = 0.0, 1.0
        rule = gauss_legendre(2 * k + 4).mapped(0.0, 1.0)
        self.omega = rule.weights
        self.L, self.dL = lagrange_tabulate(self.nodes, rule.points)
        self.Psi = leg.legvander(2.0 * rule.points - 1.0, k)
        # int psi_i L_j, unweighted; used by the curl-curl term
        self.Nt = np.einsum("q,qi,qj->ij", self.omega, self.Psi, self.L)
        nw = self.nw = W.dof_count
        kk = k + 1
        ee = node_block_pattern(nw, kk, kk)
        ae = node_block_pattern(nw, kk, kk, row_offset=kk * nw)
        aa = node_block_pattern(nw, kk, kk, row_offset=kk * nw, col_offset=kk * nw)
        self._var_rows = np.concatenate([ee[0], ae[0], aa[0]])
        self._var_cols = np.concatenate([ee[1], ae[1], aa[1]])
        # banded order: per W dof, the e coefficients then the a coefficients
        m = np.arange(nw)[None, :]
        j = np.arange(kk)[:, None]
        self._rank = np.concatenate([(m * 2 * kk + j).ravel(), (m * 2 * kk + kk + j).ravel()])
        self._tau = None
        self._linear_lu = None

    def _set_tau(self, tau):
        if tau != self._tau:
            self._tau = tau
            n = (self.k + 1) * self.nw
            zero = sp.csr_matrix((n, n))
            const = sp.bmat([[zero, -tau * sp.kron(self.Nt[:, 1:], self.K)], [zero, zero]])
            rows, cols, self._const_vals = coo_parts(const)
            self._system = BandedSystem(
                np.concatenate([rows, self._var_rows]), np.concatenate([cols, self._var_cols]), self._rank
            )
            self._linear_lu = None

    def _weighted(self, dbar, basis):
        """Per-node ``B[m, i, j] = sum_q omega_q dbar[q, m] psi_i(s_q) basis_j(s_q)``."""
        return np.einsum("q,qm,qi,qj->mij", self.omega, dbar, self.Psi, basis)

    def _time_matrices(self, dbar):
        if np.any(dbar <= 0):
            raise SingularMassError("incremental permittivity is not positive")
        P = self._weighted(dbar, self.dL) * self.wm[:, None, None]
        R = self._weighted(dbar, self.L) * self.wm[:, None, None]
        return P, R

    def step(self, prev, tau):
        """Advance ``prev`` by one slab of (signed) length ``tau``."""
        self._set_tau(tau)
        k, nw, mat = self.k, self.nw, self.material
        E = np.tile(prev.e_end, (k + 2, 1))
        A = np.tile(prev.a_end, (k + 2, 1))
        Ka_prev = self.K @ prev.a_end
        linear = mat.is_linear
        iterations, change = 0, np.inf
        while True:
            iterations += 1
            dbar = mat.d_prime(self.L @ E)
            P, R = self._time_matrices(dbar)
            if linear and self._linear_lu is not None:
                lu = self._linear_lu
            else:
                vals = np.concatenate([
                    self._const_vals,
                    P[:, :, 1:].ravel(),
                    tau * R[:, :, 1:].ravel(),
                    P[:, :, 1:].ravel(),
                ])
                lu = self._system.factor(vals)
                if linear:
                    self._linear_lu = lu
            rhs_e = -P[:, :, 0].T * prev.e_end[None, :] + tau * self.Nt[:, 0][:, None] * Ka_prev[None, :]
            rhs_a = -P[:, :, 0].T * prev.a_end[None, :] - tau * R[:, :, 0].T * prev.e_end[None, :]
            x = lu.solve(np.concatenate([rhs_e.ravel(), rhs_a.ravel()]))
            E_new = np.vstack([prev.e_end, x[: (k + 1) * nw].reshape(k + 1, nw)])
            A_new = np.vstack([prev.a_end, x[(k + 1) * nw:].reshape(k + 1, nw)])
            change = max(np.max(np.abs(E_new - E)), np.max(np.abs(A_new - A)))
            E, A = E_new, A_new
            if linear or change < self.fp.tol:
                break
            if iterations >= self.fp.max_iter or not np.isfinite(change):
                raise SolverDivergedError(f"e-a slab {prev.index + 1} did not converge", change, iterations)
        log.debug("e-a slab %d: %d iterations, last change %.2e", prev.index + 1, iterations, change)

        # the first rows are the previous end values themselves
        E[0], A[0] = prev.e_end, prev.a_end
        t0 = prev.t
        e_end, a_end = E[-1].copy(), A[-1].copy()
        return EaState(
            e_end=e_end,
            a_end=a_end,
            energy=diagnostics.energy_ea(e_end, a_end, mat, self.W),
            t=t0 + tau,
            index=prev.index + 1,
            slab_e=SlabPoly("e", E, self.nodes, t0, tau, prev.index + 1),
            slab_a=SlabPoly("a", A, self.nodes, t0, tau, prev.index + 1),
            iterations=iterations,
        )


def initial_state_ea(e0, a0, material, W):
    return EaState(e_end=np.asarray(e0, float), a_end=np.asarray(a0, float),
                   energy=diagnostics.energy_ea(e0, a0, material, W))


def step_ea(prev, tau, material, space, k, fp=FixedPointSettings()):
    """One Petrov-Galerkin slab of the e-a scheme; see :class:`EaStepper`."""
    if tau == 0:
        raise ValueError("tau must be nonzero")
    return EaStepper(space, material, k, fp).step(prev, tau)


def run_ea(config):
    """Run the e-a scheme for ``config.steps`` slabs; ``a(0) = h(0) = 0``."""
    config.validate()
    material = config.material()
    W, _ = config.spaces()
    stepper = EaStepper(W, material, config.k, FixedPointSettings(config.tol, config.max_iter))
    e0 = interpolate(W, config.initial_field())
    state = initial_state_ea(e0, init_a0(None, material, W), material, W)
    N = config.steps
    es = np.empty((N + 1, W.dof_count))
    As = np.empty((N + 1, W.dof_count))
    energies = np.empty(N + 1)
    its = np.zeros(N, dtype=int)
    es[0], As[0], energies[0] = state.e_end, state.a_end, state.energy
    for n in range(1, N + 1):
        state = stepper.step(state, config.tau)
        state.t = n * config.tau
        es[n], As[n], energies[n], its[n - 1] = state.e_end, state.a_end, state.energy, state.iterations
    return Trajectory(
        scheme="ea", times=config.tau * np.arange(N + 1), e=es, second=As, energies=energies,
        space_e=W, space_second=W, second_name="a", tau=config.tau, iterations=its, config=config,
    )


def magnetic_field(traj, n=-1):
    """``h = nu0 a_x`` at level ``n`` of an e-a trajectory, as ``Q_h`` nodal values."""
    W = traj.space_e
    Q = FeSpace1D(W.mesh, W.degree - 1, continuous=False)
    material = traj.config.material() if traj.config is not None else None
    return diagnostics.curl_to_q(traj.second[n], W, Q, material)
