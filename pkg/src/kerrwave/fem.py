"""Uniform 1D meshes, nodal Lagrange spaces and operator assembly.

The continuous space ``W_h`` (degree ``p``) puts its nodes at the
Gauss-Lobatto points of each element, so the Gauss-Lobatto product makes
every weighted mass matrix diagonal.  The discontinuous space ``Q_h``
(degree ``p-1``) uses the ``p`` Gauss-Legendre points per element: that rule
integrates products of two ``P_{p-1}`` functions exactly, hence its diagonal
mass coincides with the Gauss-Lobatto product on ``Q_h``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import SingularMassError
from .quadrature import gauss_legendre, gauss_lobatto, lagrange_tabulate


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of ``cells`` elements on (0, length)."""

    cells: int
    length: float = 1.0

    def __post_init__(self):
        if int(self.cells) != self.cells or self.cells < 1:
            raise ValueError(f"mesh needs a positive integer cell count, got {self.cells}")
        if not self.length > 0:
            raise ValueError("mesh length must be positive")

    @property
    def h(self):
        return self.length / self.cells

    @cached_property
    def nodes(self):
        return np.arange(self.cells + 1) * self.h

    def refined(self):
        return Mesh1D(2 * self.cells, self.length)


class FeSpace1D:
    """Nodal piecewise-polynomial space on a :class:`Mesh1D`.

    Parameters
    ----------
    mesh : Mesh1D
    degree : int
        Polynomial degree per element.
    continuous : bool
        ``True`` for the H^1-conforming space (Gauss-Lobatto nodes shared
        across element interfaces), ``False`` for the broken space
        (Gauss-Legendre nodes, element-local dofs).
    """

    def __init__(self, mesh, degree, continuous=True):
        if continuous and degree < 1:
            raise ValueError("continuous space needs degree >= 1")
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        self.mesh = mesh
        self.degree = int(degree)
        self.continuous = bool(continuous)
        nloc = self.degree + 1
        if self.continuous:
            self.rule = gauss_lobatto(nloc)
            M, p = mesh.cells, self.degree
            self.dof_map = np.arange(M)[:, None] * p + np.arange(nloc)[None, :]
            self.dof_count = M * p + 1
        else:
            self.rule = gauss_legendre(nloc)
            self.dof_map = np.arange(mesh.cells * nloc).reshape(mesh.cells, nloc)
            self.dof_count = mesh.cells * nloc
        self.ref_nodes = self.rule.points

    def __repr__(self):
        kind = "continuous" if self.continuous else "discontinuous"
        return f"FeSpace1D(cells={self.mesh.cells}, degree={self.degree}, {kind})"

    def same_as(self, other):
        return (
            self.mesh == other.mesh
            and self.degree == other.degree
            and self.continuous == other.continuous
        )

    @property
    def nloc(self):
        return self.degree + 1

    @cached_property
    def dof_coords(self):
        x = np.empty(self.dof_count)
        left = self.mesh.nodes[:-1, None]
        x[self.dof_map] = left + 0.5 * (self.ref_nodes[None, :] + 1.0) * self.mesh.h
        return x

    @cached_property
    def node_weights(self):
        """Diagonal of the unit-coefficient nodal quadrature (lumped mass)."""
        w = np.zeros(self.dof_count)
        np.add.at(w, self.dof_map, np.broadcast_to(0.5 * self.mesh.h * self.rule.weights, self.dof_map.shape))
        return w

    def tabulate(self, xi):
        """Local basis values and x-derivatives at reference points ``xi``."""
        vals, ders = lagrange_tabulate(self.ref_nodes, xi)
        return vals, ders * (2.0 / self.mesh.h)

    def locate(self, x):
        """Element index and reference coordinate of physical points."""
        x = np.asarray(x, dtype=float)
        h = self.mesh.h
        cell = np.clip(np.floor(x / h).astype(int), 0, self.mesh.cells - 1)
        xi = 2.0 * (x - cell * h) / h - 1.0
        return cell, xi

    def evaluate(self, values, x, derivative=False):
        """Point values (or x-derivatives) of the function with dofs ``values``."""
        cell, xi = self.locate(x)
        vals, ders = lagrange_tabulate(self.ref_nodes, xi)
        basis = ders * (2.0 / self.mesh.h) if derivative else vals
        local = np.asarray(values)[self.dof_map[cell]]
        return np.einsum("ij,ij->i", basis, local)


def _check_same_mesh(a, b):
    if a.mesh != b.mesh:
        raise ValueError(f"spaces live on different meshes: {a.mesh} vs {b.mesh}")


def assemble_lumped_mass(space, coeff=1.0):
    """Diagonal of ``<coeff u, v>_h`` for the space's nodal quadrature.

    ``coeff`` is a scalar or an array of nodal values.  Interface nodes of the
    continuous space collect the weights of both neighbouring elements.
    """
    coeff = np.broadcast_to(np.asarray(coeff, dtype=float), (space.dof_count,))
    if not np.all(coeff > 0):
        bad = int(np.argmin(coeff))
        raise SingularMassError(f"nonpositive mass coefficient {coeff[bad]!r} at dof {bad}")
    return space.node_weights * coeff


def _element_quadrature(trial, test, quadrature):
    if quadrature is None:
        quadrature = gauss_lobatto(max(trial.degree, test.degree) + 1)
    return quadrature


def assemble_deriv(trial, test, quadrature=None):
    """Sparse ``G[i, j] = <d/dx phi_j, psi_i>_h`` with ``phi`` from ``trial``.

    The default rule is Gauss-Lobatto with ``p+1`` points per element, ``p``
    being the larger of the two degrees.
    """
    _check_same_mesh(trial, test)
    q = _element_quadrature(trial, test, quadrature)
    _, dphi = trial.tabulate(q.points)
    psi, _ = test.tabulate(q.points)
    wq = 0.5 * trial.mesh.h * q.weights
    local = np.einsum("q,qi,qj->ij", wq, psi, dphi)
    return _scatter(local, test.dof_map, trial.dof_map, (test.dof_count, trial.dof_count))


def assemble_stiffness(space, coeff=1.0, quadrature=None):
    """Sparse ``K[i, j] = <coeff d/dx phi_j, d/dx phi_i>_h`` (constant ``coeff``)."""
    q = _element_quadrature(space, space, quadrature)
    _, dphi = space.tabulate(q.points)
    wq = 0.5 * space.mesh.h * q.weights
    local = coeff * np.einsum("q,qi,qj->ij", wq, dphi, dphi)
    return _scatter(local, space.dof_map, space.dof_map, (space.dof_count, space.dof_count))


def _scatter(local, rows_map, cols_map, shape):
    M = rows_map.shape[0]
    rows = np.repeat(rows_map[:, :, None], cols_map.shape[1], axis=2)
    cols = np.repeat(cols_map[:, None, :], rows_map.shape[1], axis=1)
    data = np.broadcast_to(local, (M,) + local.shape)
    mat = sp.coo_matrix((data.ravel(), (rows.ravel(), cols.ravel())), shape=shape).tocsr()
    mat.sum_duplicates()
    mat.eliminate_zeros()
    return mat


def interpolate(space, f):
    """Nodal interpolant of the callable ``f``."""
    return np.asarray(f(space.dof_coords), dtype=float) * np.ones(space.dof_count)


def prolong(values, coarse, fine):
    """Re-express a coarse-space function in the bisected fine space.

    The fine space must have the same degree and continuity on the uniformly
    bisected mesh (or be the same space, in which case ``values`` is copied).
    """
    if coarse.same_as(fine):
        return np.array(values, dtype=float)
    if (
        fine.mesh != coarse.mesh.refined()
        or fine.degree != coarse.degree
        or fine.continuous != coarse.continuous
    ):
        raise ValueError(f"cannot prolong {coarse} to {fine}")
    # fine nodes are interior to or on the boundary of coarse elements; for
    # shared coarse nodes both neighbours give the same value
    x = fine.dof_coords
    return coarse.evaluate(values, x)


def l2_norm(space, values, points_per_cell=None):
    """Discrete L2 norm using Gauss-Legendre quadrature on the space's mesh."""
    n = points_per_cell or space.degree + 2
    q = gauss_legendre(n)
    vals, _ = space.tabulate(q.points)
    local = np.asarray(values)[space.dof_map] @ vals.T
    wq = 0.5 * space.mesh.h * q.weights
    return float(np.sqrt(np.sum(local**2 * wq[None, :])))
