import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suslov import scattering
from suslov.errors import HorizonTooShort, ValidationError
from suslov.hyper import limit_from_connection


@settings(max_examples=40, deadline=None)
@given(k=st.integers(0, 20), d=st.floats(0.05, 50))
def test_odd_p_gives_pi(k, d):
    assert scattering.delta_psi_formula(2 * k + 1, d).delta_psi == math.pi


@settings(max_examples=40, deadline=None)
@given(p=st.floats(0.01, 30), d=st.floats(0.05, 30))
def test_formula_range(p, d):
    r = scattering.delta_psi_formula(p, d)
    assert 0.0 <= r.delta_psi <= 2 * math.pi
    assert 0.0 <= r.folded <= math.pi


def test_even_p_limit():
    # p = 2: cos(pi) = -1, so cos(dpsi/2) = -sech(pi/d)
    d = 1.3
    r = scattering.delta_psi_formula(2, d)
    assert math.cos(r.delta_psi / 2) == pytest.approx(-1 / math.cosh(math.pi / d), rel=1e-14)


def test_large_argument_does_not_overflow():
    assert scattering.delta_psi_formula(2, 1e-3).delta_psi == pytest.approx(math.pi)


def test_limit_matches_connection_data():
    for p, d in ((2.0, 1.0), (0.7, 0.5), (3.3, 2.0)):
        assert scattering.limit_gamma1(p, d) == pytest.approx(limit_from_connection(p, d), abs=1e-9)


def test_numeric_matches_formula_and_branch():
    for p, d in ((2.0, 1.0), (1.0, 0.5), (2.7, 1.4)):
        a = scattering.delta_psi_numeric(p, d)
        b = scattering.delta_psi_numeric(p, d, sign_branch=1)
        f = scattering.delta_psi_formula(p, d)
        assert scattering.angles_agree(a, f, 1e-6)
        assert a.delta_psi == pytest.approx(b.delta_psi, abs=1e-8)
        assert a.lim_gamma1 == pytest.approx(f.lim_gamma1, abs=1e-7)


def test_validation():
    with pytest.raises(ValidationError):
        scattering.delta_psi_numeric(1.0, 1.0, T=10)
    with pytest.raises(ValidationError):
        scattering.delta_psi_numeric(1.0, 1.0, tol=1e-6)
    with pytest.raises(ValidationError):
        scattering.delta_psi_numeric(-1.0, 1.0)
    with pytest.raises(ValidationError):
        scattering.delta_psi_formula(1.0, 0.0)


def test_short_horizon_detected():
    # a slow rotation rate p/d leaves the tail far from its limit at T = 20
    with pytest.raises(HorizonTooShort):
        scattering.delta_psi_numeric(0.3, 3.0, T=20, tol=1e-12)


def test_to_dict():
    d = scattering.delta_psi_formula(2.0, 1.0).to_dict()
    assert d["method"] == "formula" and set(d) == {"delta_psi_rad", "folded_rad", "method", "residual", "p", "d"}
