"""Helpers shared by the space-time slab solvers."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg.lapack import dgbtrf, dgbtrs

from .quadrature import lagrange_tabulate


@dataclass(frozen=True)
class FixedPointSettings:
    tol: float = 1e-12
    max_iter: int = 200


@dataclass
class SlabPoly:
    """Time polynomial on one slab ``[t0, t0 + tau]`` in a nodal temporal basis.

    ``coeffs[j]`` is the spatial dof vector attached to the temporal node
    ``nodes[j]`` (a point of [0, 1]).
    """

    field: str
    coeffs: np.ndarray
    nodes: np.ndarray
    t0: float
    tau: float
    index: int

    @property
    def degree(self):
        return len(self.nodes) - 1

    def __call__(self, t):
        s = (np.atleast_1d(t) - self.t0) / self.tau
        vals, _ = lagrange_tabulate(self.nodes, s)
        out = vals @ self.coeffs
        return out[0] if np.ndim(t) == 0 else out


def node_block_pattern(n, r, c, row_offset=0, col_offset=0):
    """Row/column indices of per-node blocks ``B[m, i, j]`` in time-major order.

    With unknowns ordered as ``j * n + m`` (temporal index ``j``, spatial dof
    ``m``), an operator coupling temporal coefficients only at the same
    spatial dof is given by an array ``B[m, i, j]``; ``B.ravel()`` lines up
    with the returned index arrays.
    """
    m = np.arange(n)[:, None, None]
    i = np.arange(r)[None, :, None]
    j = np.arange(c)[None, None, :]
    rows = np.broadcast_to(row_offset + i * n + m, (n, r, c)).ravel()
    cols = np.broadcast_to(col_offset + j * n + m, (n, r, c)).ravel()
    return rows, cols


class BandedSystem:
    """Fixed sparsity layout solved as an equilibrated banded system.

    ``rows``/``cols`` list every structural entry once (constant and
    variable ones alike); ``rank[i]`` is the banded position of unknown
    ``i``.  Each :meth:`factor` call takes the matching value array, scales
    rows then columns to unit max-norm and runs LAPACK ``gbtrf``.  The
    scaling matters: slab systems mix mass-like entries of size ``h`` with
    couplings of size ``tau / h``.
    """

    def __init__(self, rows, cols, rank):
        self.n = len(rank)
        self.rank = np.asarray(rank)
        R, C = self.rank[rows], self.rank[cols]
        self.R, self.C = R, C
        self.lower = int(max(0, np.max(R - C)))
        self.upper = int(max(0, np.max(C - R)))
        self._ab_row = self.lower + self.upper + R - C
        self._rsort = np.argsort(R, kind="stable")
        self._rstart = np.searchsorted(R[self._rsort], np.arange(self.n))
        self._csort = np.argsort(C, kind="stable")
        self._cstart = np.searchsorted(C[self._csort], np.arange(self.n))

    def factor(self, vals):
        a = np.abs(vals)
        rs = 1.0 / np.maximum.reduceat(a[self._rsort], self._rstart)
        v = vals * rs[self.R]
        cs = 1.0 / np.maximum.reduceat(np.abs(v)[self._csort], self._cstart)
        v *= cs[self.C]
        ab = np.zeros((2 * self.lower + self.upper + 1, self.n), order="F")
        ab[self._ab_row, self.C] = v
        lu, piv, info = dgbtrf(ab, self.lower, self.upper, overwrite_ab=1)
        if info != 0:
            raise np.linalg.LinAlgError(f"singular slab system (gbtrf info={info})")
        return BandedLU(self, lu, piv, rs, cs)


class BandedLU:
    def __init__(self, system, lu, piv, rs, cs):
        self.system, self.lu, self.piv, self.rs, self.cs = system, lu, piv, rs, cs

    def solve(self, b):
        s = self.system
        bb = np.empty(s.n)
        bb[s.rank] = b
        y, info = dgbtrs(self.lu, s.lower, s.upper, self.rs * bb, self.piv)
        if info != 0:
            raise np.linalg.LinAlgError(f"gbtrs failed (info={info})")
        return (self.cs * y)[s.rank]


def coo_parts(mat):
    """Deduplicated ``(rows, cols, vals)`` of a sparse matrix."""
    coo = sp.coo_matrix(mat)
    coo.sum_duplicates()
    return coo.row, coo.col, coo.data
