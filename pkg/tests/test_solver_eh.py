import dataclasses

import numpy as np
import pytest

from kerrwave._slab import FixedPointSettings
from kerrwave.errors import SolverDivergedError
from kerrwave.fem import interpolate
from kerrwave.material import KerrMaterial
from kerrwave.oracle import SemiDiscreteSystem, irk_step, radau_iia
from kerrwave.solver_eh import EhStepper, initial_state_eh, run_eh, step_eh

from .conftest import make_spaces


def pulse_state(W, Q, material):
    e0 = interpolate(W, lambda x: np.exp(-100 * x**2))
    return initial_state_eh(e0, np.zeros(Q.dof_count), material, W, Q)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_zero_data_stays_zero(k):
    W, Q = make_spaces(4, 2)
    mat = KerrMaterial(chi3=0.1)
    s = initial_state_eh(np.zeros(W.dof_count), np.zeros(Q.dof_count), mat, W, Q)
    out = step_eh(s, 0.1, mat, (W, Q), k)
    assert not out.e_end.any() and not out.h_end.any()
    assert not out.slab_e.coeffs.any()
    assert out.energy == 0.0


def test_k0_linear_is_implicit_euler():
    W, Q = make_spaces(8, 2)
    mat = KerrMaterial(chi3=0.0)
    s = pulse_state(W, Q, mat)
    out = step_eh(s, 0.02, mat, (W, Q), 0)
    system = SemiDiscreteSystem("eh", mat, W, Q)
    y = irk_step(radau_iia(1), system.rhs, np.concatenate([s.e_end, s.h_end]), 0.02,
                 linear_op=system.linear_operator())
    np.testing.assert_allclose(np.concatenate([out.e_end, out.h_end]), y, rtol=0, atol=1e-11)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_nonlinear_step_dissipates(k):
    W, Q = make_spaces(10, 3)
    mat = KerrMaterial(chi3=0.1)
    s = pulse_state(W, Q, mat)
    for _ in range(3):
        out = step_eh(s, 0.01, mat, (W, Q), k)
        assert out.energy <= s.energy + 1e-10 * s.energy
        s = out


def test_slab_end_value_matches_polynomial():
    W, Q = make_spaces(6, 2)
    mat = KerrMaterial(chi3=0.1)
    s = pulse_state(W, Q, mat)
    out = step_eh(s, 0.05, mat, (W, Q), 2)
    np.testing.assert_allclose(out.slab_e(out.t), out.e_end, atol=1e-13)
    np.testing.assert_allclose(out.slab_h(out.t), out.h_end, atol=1e-13)
    assert out.slab_e.degree == 2


def test_rejects_nonpositive_step():
    W, Q = make_spaces(2, 1)
    mat = KerrMaterial()
    s = pulse_state(W, Q, mat)
    with pytest.raises(ValueError):
        step_eh(s, 0.0, mat, (W, Q), 0)


def test_divergence_is_reported():
    W, Q = make_spaces(6, 2)
    mat = KerrMaterial(chi3=0.1)
    stepper = EhStepper(W, Q, mat, 1, FixedPointSettings(tol=1e-12, max_iter=2))
    with pytest.raises(SolverDivergedError) as info:
        stepper.step(pulse_state(W, Q, mat), 0.05)
    assert info.value.iterations == 2 and info.value.residual > 1e-12


def test_zero_steps(pulse_config):
    traj = run_eh(pulse_config.replace(scheme="eh", T=0.0, snapshots=(0.0,)))
    assert traj.steps == 0 and traj.e.shape[0] == 1
    assert traj.energies[0] > 0


def test_run_energy_monotone_and_deterministic(pulse_config):
    cfg = pulse_config.replace(scheme="eh", k=1)
    a, b = run_eh(cfg), run_eh(cfg)
    assert np.all(np.diff(a.energies) <= 1e-9 * a.energies[0])
    assert a.energies[-1] < a.energies[0]
    np.testing.assert_array_equal(a.e, b.e)
    np.testing.assert_array_equal(a.second, b.second)
    np.testing.assert_array_equal(a.times, 0.01 * np.arange(11))


def test_linear_pulse_translates():
    # a right-moving pulse e = g(x - t), h = g(x - t) keeps its shape
    from kerrwave.config import RunConfig

    cfg = RunConfig(scheme="eh", p=3, k=2, cells=100, tau=0.0025, T=0.3, chi3=0.0,
                    center=0.3, snapshots=(0.0, 0.3))
    W, Q = cfg.spaces()
    mat = cfg.material()
    g = lambda x: np.exp(-100 * (x - 0.3) ** 2)
    s = initial_state_eh(interpolate(W, g), interpolate(Q, g), mat, W, Q)
    stepper = EhStepper(W, Q, mat, 2)
    for _ in range(cfg.steps):
        s = stepper.step(s, cfg.tau)
    xs = np.linspace(0, 1, 401)
    assert np.max(np.abs(W.evaluate(s.e_end, xs) - g(xs - 0.3))) < 1e-3


def test_consistent_material_interface():
    # any ConstitutiveLaw works, here a dataclass variant of the Kerr law
    @dataclasses.dataclass(frozen=True)
    class Stiffer(KerrMaterial):
        pass

    W, Q = make_spaces(4, 2)
    mat = Stiffer(chi3=0.2)
    out = step_eh(pulse_state(W, Q, mat), 0.05, mat, (W, Q), 1)
    assert np.isfinite(out.energy)
