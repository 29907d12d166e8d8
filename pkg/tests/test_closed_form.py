import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suslov import closed_form as cf
from suslov.errors import ValidationError
from suslov.model import InertiaTensor, SuslovParams, params_from_inertia


def test_values_at_zero():
    params = params_from_inertia(InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4))
    assert cf.omega_general(0.0, params) == pytest.approx((params.c1 / 2, params.c2 / 2))
    assert cf.omega_special(0.0, 2.0, 1.5) == pytest.approx((0.0, -3.0))


def test_special_limits_and_parity():
    t = np.array([-40.0, 40.0])
    w1, w2 = cf.omega_special(t, 2.0, 1.5)
    np.testing.assert_allclose(w1, [-2.0, 2.0])
    np.testing.assert_allclose(w2, [0.0, 0.0], atol=1e-15)
    params = SuslovParams.special(3.0, 0.7)
    ts = np.linspace(0.1, 8, 20)
    a1, a2 = cf.omega_general(ts, params)
    b1, b2 = cf.omega_general(-ts, params)
    np.testing.assert_allclose(a1, -b1, atol=1e-15)
    np.testing.assert_allclose(a2, b2, atol=1e-15)


def test_no_overflow_far_out():
    w1, w2 = cf.omega_general(1e4, SuslovParams.special(1.0, 1.0))
    assert np.isfinite(w1) and np.isfinite(w2)


def test_special_form_needs_c_above_one():
    with pytest.raises(ValidationError):
        cf.omega_special(0.0, 1.0, 1.0)


def test_derivative_matches_finite_difference():
    params = params_from_inertia(InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4))
    ts = np.linspace(-5, 5, 21)
    h = 1e-6
    fd = (np.array(cf.omega_general(ts + h, params)) - np.array(cf.omega_general(ts - h, params))) / (2 * h)
    np.testing.assert_allclose(np.array(cf.omega_derivative(ts, params)), fd, atol=1e-8)


@settings(max_examples=20, deadline=None)
@given(p=st.floats(0.1, 10), d=st.floats(0.1, 5), t=st.floats(-30, 30))
def test_rescaled_energy_is_constant(p, d, t):
    params = SuslovParams.special(p, d)
    e = cf.energy_level(params, cf.EnergyForm.RescaledF1, t)
    assert e == pytest.approx(cf.expected_energy(params, cf.EnergyForm.RescaledF1), rel=1e-12)


def test_original_energy_needs_tensor():
    with pytest.raises(ValidationError):
        cf.energy_level(SuslovParams.special(1.0, 1.0))


def test_z_of_t():
    assert cf.z_of_t(0.0) == pytest.approx(1.0)
    assert cf.log_z_of_t(800.0) == pytest.approx(np.log(4) - 1600)
