import math

import numpy as np
import pytest

from suslov import closed_form as cf
from suslov.errors import StepSizeUnderflow, ValidationError
from suslov.integrator import (
    conservation_report,
    euler_poisson_rhs,
    integrate,
    integrate_poisson,
    make_rhs,
    simulate,
)
from suslov.model import BodyState, InertiaTensor, SuslovParams, inertia_from_p, params_from_inertia


def test_exponential_decay_matches_exact():
    tr = integrate(lambda t, y: -y, [1.0], 0.0, 5.0, rel_tol=1e-10, abs_tol=1e-12, t_eval=np.linspace(0, 5, 11))
    np.testing.assert_allclose(tr.y[:, 0], np.exp(-tr.t), rtol=1e-9)


def test_harmonic_oscillator_backwards():
    tr = integrate(lambda t, y: np.array([y[1], -y[0]]), [0.0, 1.0], 0.0, -3.0, t_eval=[-1.0, -2.0, -3.0])
    np.testing.assert_allclose(tr.y[:, 0], np.sin(tr.t), atol=1e-9)


def test_dense_output_is_fifth_order_accurate():
    tr = integrate(lambda t, y: np.array([math.cos(t)]), [0.0], 0.0, 10.0, rel_tol=1e-6, abs_tol=1e-9, t_eval=np.linspace(0, 10, 97))
    assert np.max(np.abs(tr.y[:, 0] - np.sin(tr.t))) < 1e-5


def test_step_size_underflow():
    with pytest.raises(StepSizeUnderflow):
        integrate(lambda t, y: y * y, [1.0], 0.0, 2.0)


def test_validation():
    with pytest.raises(ValidationError):
        integrate(lambda t, y: y, [1.0], 0.0, 0.0)
    with pytest.raises(ValidationError):
        integrate(lambda t, y: y, [1.0], 0.0, 1.0, rel_tol=1e-16)
    with pytest.raises(ValidationError):
        integrate(lambda t, y: y, [1.0], 0.0, 1.0, t_eval=[0.5, 0.2])


def test_equilibria_and_zero_gamma():
    I = InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4).normalized()
    # omega orthogonal to (I13, I23) is a fixed point of the Euler part
    x = BodyState(I.I23, -I.I13, 0.0, 0.0, 0.0)
    np.testing.assert_allclose(euler_poisson_rhs(x, I).as_array(), 0.0, atol=1e-15)


def test_special_and_general_fields_agree():
    rng = np.random.default_rng(3)
    for p in (1.0, 2.0, 3.5):
        I = inertia_from_p(p, 2.0, 1.0, 1.5)
        params = params_from_inertia(I)
        sp_ = SuslovParams.special(params.p, params.d)
        fg, fs = make_rhs(I), make_rhs(sp_)
        for _ in range(20):
            w = rng.normal(size=2)
            g = rng.normal(size=3)
            x = np.concatenate([w, g])
            u = fg(0.0, x)
            v = fs(0.0, x)
            # same Euler field up to a constant time rescaling
            k = u[0] / v[0] if abs(v[0]) > 1e-8 else u[1] / v[1]
            np.testing.assert_allclose(u[:2], k * v[:2], rtol=1e-9, atol=1e-12)


def test_closed_form_is_a_trajectory():
    params = SuslovParams.special(3.0, 0.8)
    w1, w2 = cf.omega_special(-4.0, params.a, params.c)
    ts = np.linspace(-4, 4, 17)
    tr = simulate(params, [w1, w2, 1.0, 0.0, 0.0], -4.0, 4.0, t_eval=ts)
    W1, W2 = cf.omega_special(ts, params.a, params.c)
    np.testing.assert_allclose(tr.y[:, 0], W1, atol=1e-9)
    np.testing.assert_allclose(tr.y[:, 1], W2, atol=1e-9)


def test_conservation_drift_bound():
    I = InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4).normalized()
    tr = simulate(I, [0.3, -0.2, 0.6, 0.0, 0.8], 0.0, 50.0)
    rep = conservation_report(tr)
    assert rep["F1"] < 100 * 1e-10
    assert rep["F2"] < 100 * 1e-10
    assert tr.stats.steps > 0 and np.all(np.diff(tr.t) > 0)


def test_poisson_energy_rescaling():
    params = SuslovParams.special(2.0, 1.0)
    a = integrate_poisson(params, [-1.0, 0.0, 0.0], -10.0, 10.0, t_eval=[10.0])
    b = integrate_poisson(params, [-1.0, 0.0, 0.0], -5.0, 5.0, t_eval=[5.0], energy_scale=2.0)
    np.testing.assert_allclose(a.y[-1], b.y[-1], atol=1e-8)


def test_csv_format():
    tr = simulate(SuslovParams.special(1.0, 1.0), [0.1, -1.0, 1.0, 0.0, 0.0], 0.0, 1.0, t_eval=[0.0, 0.5, 1.0])
    text = tr.to_csv()
    lines = text.split("\r\n")
    assert lines[0] == "t,omega1,omega2,gamma1,gamma2,gamma3,F1,F2"
    assert len(lines) == 5 and lines[-1] == ""
    assert float(lines[2].split(",")[0]) == 0.5
