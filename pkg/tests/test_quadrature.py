import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrwave.quadrature import gauss_legendre, gauss_lobatto, gauss_radau_right, lagrange_tabulate


def monomial_integral(d):
    return 0.0 if d % 2 else 2.0 / (d + 1)


def test_lobatto_two_points_is_trapezoid():
    q = gauss_lobatto(2)
    np.testing.assert_allclose(q.points, [-1.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(q.weights, [1.0, 1.0], atol=1e-15)


def test_lobatto_three_points_is_simpson():
    q = gauss_lobatto(3)
    np.testing.assert_allclose(q.points, [-1.0, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(q.weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)


def test_lobatto_four_points_x4():
    assert abs(gauss_lobatto(4).integrate(lambda x: x**4) - 0.4) < 1e-14


def test_gauss_small_rules():
    q1 = gauss_legendre(1)
    assert q1.points[0] == 0.0 and q1.weights[0] == 2.0
    assert abs(q1.integrate(lambda x: 3 * x + 1) - 2.0) < 1e-15
    q2 = gauss_legendre(2)
    np.testing.assert_allclose(q2.points, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert abs(q2.integrate(lambda x: x**3 + x**2) - 2 / 3) < 1e-15
    assert abs(gauss_legendre(3).integrate(lambda x: x**5)) < 1e-15


@pytest.mark.parametrize("bad", [0, 1])
def test_lobatto_rejects_small_n(bad):
    with pytest.raises(ValueError):
        gauss_lobatto(bad)


def test_gauss_rejects_zero():
    with pytest.raises(ValueError):
        gauss_legendre(0)


@pytest.mark.parametrize("rule", [gauss_lobatto, gauss_legendre])
@pytest.mark.parametrize("n", range(2, 9))
def test_exact_up_to_guaranteed_degree(rule, n):
    q = rule(n)
    assert abs(q.weights.sum() - 2.0) < 1e-14
    assert np.all(q.weights > 0)
    np.testing.assert_allclose(q.points, -q.points[::-1], atol=1e-15)
    for d in range(q.exact_degree + 1):
        exact = monomial_integral(d)
        assert abs(q.integrate(lambda x: x**d) - exact) <= 1e-13 * max(1.0, abs(exact))
    # and not beyond
    d = q.exact_degree + 1
    assert abs(q.integrate(lambda x: x**d) - monomial_integral(d)) > 1e-6


def test_lobatto_contains_endpoints():
    for n in range(2, 8):
        q = gauss_lobatto(n)
        assert q.points[0] == -1.0 and q.points[-1] == 1.0


def test_mapped_rule():
    q = gauss_legendre(3).mapped(0.0, 0.5)
    assert abs(q.weights.sum() - 0.5) < 1e-15
    assert abs(q.integrate(lambda t: t**4) - 0.5**5 / 5) < 1e-16


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_radau_right_nodes(n):
    x = gauss_radau_right(n)
    assert x[-1] == 1.0
    # the interpolatory rule on these nodes is exact to degree 2n-2
    vals, _ = lagrange_tabulate(x, gauss_legendre(n + 1).points)
    w = gauss_legendre(n + 1).weights @ vals
    for d in range(2 * n - 1):
        assert abs(w @ x**d - monomial_integral(d)) < 1e-13


@given(st.integers(min_value=1, max_value=7), st.floats(min_value=-1, max_value=1))
def test_lagrange_basis_partition_of_unity(n, x):
    nodes = gauss_lobatto(n + 1).points
    vals, ders = lagrange_tabulate(nodes, [x])
    assert abs(vals.sum() - 1.0) < 1e-12
    assert abs(ders.sum()) < 1e-10


def test_lagrange_basis_is_nodal():
    nodes = gauss_lobatto(5).points
    vals, _ = lagrange_tabulate(nodes, nodes)
    np.testing.assert_allclose(vals, np.eye(5), atol=1e-13)
    # derivative of x^3 reproduced
    _, ders = lagrange_tabulate(nodes, [0.3])
    assert abs(ders[0] @ nodes**3 - 3 * 0.09) < 1e-12
