"""Quadrature rules and Lagrange bases on the reference interval [-1, 1]."""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as leg


@dataclass(frozen=True)
class QuadratureRule:
    """Points and weights of a one-dimensional rule.

    Rules are generated on ``[-1, 1]``; use :meth:`mapped` for other intervals.
    """

    points: np.ndarray
    weights: np.ndarray
    kind: str
    interval: tuple = (-1.0, 1.0)

    @property
    def size(self):
        return len(self.points)

    @property
    def exact_degree(self):
        n = self.size
        return 2 * n - 3 if self.kind == "gauss-lobatto" else 2 * n - 1

    def mapped(self, a, b):
        """Affine image of the rule on ``[a, b]``."""
        lo, hi = self.interval
        scale = (b - a) / (hi - lo)
        return QuadratureRule(
            points=a + (self.points - lo) * scale,
            weights=self.weights * scale,
            kind=self.kind,
            interval=(a, b),
        )

    def integrate(self, f):
        return float(np.dot(self.weights, f(self.points)))


def gauss_legendre(n):
    """Gauss-Legendre rule with ``n`` points, exact up to degree ``2n-1``."""
    if n < 1:
        raise ValueError(f"Gauss-Legendre rule needs n >= 1, got {n}")
    x, w = leg.leggauss(n)
    return QuadratureRule(points=x, weights=w, kind="gauss-legendre")


def gauss_lobatto(n):
    """Gauss-Lobatto rule with ``n`` points (both endpoints included).

    Interior nodes are the roots of P'_{n-1}, refined by a few Newton steps.
    Weights are ``2 / (n (n-1) P_{n-1}(x)^2)``; exact up to degree ``2n-3``.
    """
    if n < 2:
        raise ValueError(f"Gauss-Lobatto rule needs n >= 2, got {n}")
    c = np.zeros(n)
    c[-1] = 1.0  # P_{n-1}
    dc = leg.legder(c)
    ddc = leg.legder(dc)
    inner = np.sort(np.real(leg.legroots(dc))) if n > 2 else np.array([])
    for _ in range(3):
        if inner.size:
            inner = inner - leg.legval(inner, dc) / leg.legval(inner, ddc)
    x = np.concatenate(([-1.0], inner, [1.0]))
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 2.0 / (n * (n - 1) * leg.legval(x, c) ** 2)
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(points=x, weights=w, kind="gauss-lobatto")


def gauss_radau_right(n):
    """Right-sided Gauss-Radau points on [-1, 1] (roots of P_n - P_{n-1}).

    Only the nodes are returned; these are the Radau IIA abscissae after
    mapping to [0, 1].
    """
    if n < 1:
        raise ValueError(f"Radau rule needs n >= 1, got {n}")
    c = np.zeros(n + 1)
    c[n] = 1.0
    c[n - 1] -= 1.0
    x = np.sort(np.real(leg.legroots(c)))
    x[-1] = 1.0
    return x


def lagrange_tabulate(nodes, x):
    """Values and first derivatives of the Lagrange basis on ``nodes`` at ``x``.

    Returns two arrays of shape ``(len(x), len(nodes))``; column ``j`` holds
    the basis function that is one at ``nodes[j]``.
    """
    nodes = np.asarray(nodes, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(nodes)
    lo, hi = nodes.min(), nodes.max()
    if n == 1:
        return np.ones((len(x), 1)), np.zeros((len(x), 1))
    # Legendre Vandermonde on the nodes' bounding interval keeps this well conditioned.
    scale = 2.0 / (hi - lo)
    xi = lambda y: (y - lo) * scale - 1.0
    coef = np.linalg.inv(leg.legvander(xi(nodes), n - 1))
    vals = leg.legvander(xi(x), n - 1) @ coef
    dvan = np.stack([leg.legval(xi(x), leg.legder(np.eye(n)[m])) for m in range(n)], axis=1)
    ders = scale * (dvan @ coef)
    return vals, ders
