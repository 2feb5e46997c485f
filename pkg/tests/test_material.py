import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrwave.material import KerrMaterial, d_of_e, d_prime, w_E, w_M

S6 = KerrMaterial(eps0=1.0, mu0=1.0, chi1=1.0, chi3=0.1)
DELTA = 1e-5


def test_pointwise_values():
    assert d_of_e(S6, 0.0) == 0.0
    assert abs(d_of_e(S6, 1.0) - 1.1) < 1e-15
    assert d_of_e(KerrMaterial(chi3=0.0), 2.0) == 2.0
    assert d_prime(S6, 0.0) == 1.0
    assert abs(d_prime(S6, 1.0) - 1.3) < 1e-15
    assert w_E(S6, 0.0) == 0.0
    assert abs(w_E(S6, 1.0) - 0.575) < 1e-15
    assert w_M(S6, 0.0) == 0.0
    assert w_M(S6, 2.0) == 2.0


def test_nu0():
    m = KerrMaterial(mu0=4.0)
    assert m.nu0 * m.mu0 == 1.0


@pytest.mark.parametrize("e", [-2.0, -1.0, 0.5, 3.0])
def test_finite_difference_identities(e):
    fd = lambda f, x: (f(x + DELTA) - f(x - DELTA)) / (2 * DELTA)
    # central differences of a quartic: error ~ delta^2 * |f'''|
    assert abs(fd(S6.d, e) - S6.d_prime(e)) < 1e-8
    assert abs(fd(S6.w_E, e) - S6.d_prime(e) * e) < 1e-8
    assert abs(fd(S6.w_M, e) - S6.mu0 * e) < 1e-8


@given(st.floats(min_value=-20, max_value=20), st.floats(min_value=0, max_value=5))
def test_positivity_and_convexity_bounds(e, chi3):
    m = KerrMaterial(eps0=2.0, chi1=1.5, chi3=chi3)
    assert m.d_prime(e) >= m.eps0 * m.chi1
    assert m.w_E(e) == m.w_E(-e)
    assert m.w_E(e) >= 0.5 * m.eps0 * m.chi1 * e * e * (1 - 1e-15)


def test_linear_limit():
    m = KerrMaterial(eps0=2.0, chi1=3.0, chi3=0.0)
    e = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(m.d(e), 6.0 * e)
    np.testing.assert_allclose(m.d_prime(e), 6.0)
    assert m.is_linear and not S6.is_linear


@pytest.mark.parametrize("kwargs", [{"chi3": -0.1}, {"eps0": 0.0}, {"mu0": -1.0}, {"chi1": 0.0}])
def test_rejects_invalid_parameters(kwargs):
    with pytest.raises(ValueError):
        KerrMaterial(**kwargs)


def test_vectorized():
    e = np.array([0.0, 1.0])
    np.testing.assert_allclose(S6.w_E(e), [0.0, 0.575])
