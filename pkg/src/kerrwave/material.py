"""Constitutive laws of the medium.

Solvers only talk to the :class:`ConstitutiveLaw` interface; the Kerr law is
the one implementation shipped.  All functions act pointwise on scalars or
arrays (1D fields, so ``|e|^2 = e^2``).
"""

from dataclasses import dataclass


class ConstitutiveLaw:
    """Instantaneous electric law ``d(e)`` with linear magnetic law ``b = mu0 h``.

    Subclasses provide ``d``, ``d_prime`` and the electric energy density
    ``w_E``; energy conservation of the e-a scheme needs
    ``w_E'(e) == d_prime(e) * e``.
    """

    mu0 = 1.0

    @property
    def nu0(self):
        return 1.0 / self.mu0

    def d(self, e):
        raise NotImplementedError

    def d_prime(self, e):
        raise NotImplementedError

    def w_E(self, e):
        raise NotImplementedError

    def w_M(self, h):
        return 0.5 * self.mu0 * h * h

    @property
    def is_linear(self):
        return False


@dataclass(frozen=True)
class KerrMaterial(ConstitutiveLaw):
    """Kerr medium ``d(e) = eps0 (chi1 + chi3 e^2) e``."""

    eps0: float = 1.0
    mu0: float = 1.0
    chi1: float = 1.0
    chi3: float = 0.0

    def __post_init__(self):
        if not self.eps0 > 0 or not self.mu0 > 0:
            raise ValueError("eps0 and mu0 must be positive")
        if not self.chi1 > 0:
            raise ValueError("chi1 must be positive")
        if not self.chi3 >= 0:
            # the energy densities are only convex for chi3 >= 0
            raise ValueError(f"chi3 must be nonnegative, got {self.chi3}")

    @property
    def is_linear(self):
        return self.chi3 == 0

    def d(self, e):
        return self.eps0 * (self.chi1 + self.chi3 * e * e) * e

    def d_prime(self, e):
        return self.eps0 * (self.chi1 + 3.0 * self.chi3 * e * e)

    def w_E(self, e):
        e2 = e * e
        return 0.5 * self.eps0 * (self.chi1 * e2 + 1.5 * self.chi3 * e2 * e2)


def d_of_e(m, e):
    return m.d(e)


def d_prime(m, e):
    return m.d_prime(e)


def w_E(m, e):
    return m.w_E(e)


def w_M(m, h):
    return m.w_M(h)
