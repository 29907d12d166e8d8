from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from suslov import integrals
from suslov.errors import DivisionObstruction, ParityError, ValidationError
from suslov.integrator import simulate
from suslov.model import SuslovParams

d = integrals.D_SYMBOL


def test_q_for_p1_is_one():
    Q = integrals.q_polynomial(1)
    assert Q.degree == 0 and sp.simplify(Q.to_sympy(*sp.symbols("w1 w2")) - 1) == 0


def test_q_for_p3():
    w1, w2 = sp.symbols("w1 w2")
    Q = integrals.q_polynomial(3).to_sympy(w1, w2)
    want = (d**2 + 1) * w1**2 + w2**2 - 4 * d**2 / (d**2 + 9) * w2**2
    assert sp.simplify(Q - want) == 0


@pytest.mark.parametrize("p", [1, 3, 5, 7, 9])
def test_q_is_even_in_both_variables(p):
    assert integrals.q_polynomial(p, Fraction(1, 3)).parity == (0, 0)


def test_p1_integral_is_reference_f3_over_d():
    w1, w2, g1, g2, g3 = sp.symbols("w1 w2 g1 g2 g3")
    E = integrals.build_extra_integral(1)
    F3 = E.P1.to_sympy(w1, w2) * g1 + E.P2.to_sympy(w1, w2) * g2 + E.P3.to_sympy(w1, w2) * g3
    reference = d * w1 * g1 + d / (d**2 + 1) * w2 * g2 - d**2 / (d**2 + 1) * w2 * g3
    assert sp.simplify(F3 - reference / d) == 0


def test_reference_p1_value():
    # the reference F3 at w = (1, 1), gamma = (1, 1, 1), d = 1 is 1
    E = integrals.build_extra_integral(1, 1.0)
    assert integrals.f3_evaluate(E, [1, 1, 1, 1, 1], 1.0) == pytest.approx(1.0)


@pytest.mark.parametrize("p", [1, 3, 5, 7, 9])
def test_degrees_and_parity(p):
    E = integrals.build_extra_integral(p, Fraction(1, 2))
    assert E.P1.degree == E.P2.degree == E.P3.degree == p
    assert E.P1.parity == (1, 0)


@pytest.mark.parametrize("p", [1, 3, 5])
@pytest.mark.parametrize("dv", [None, Fraction(1, 2), 0.7])
def test_pde_residual_zero(p, dv):
    E = integrals.build_extra_integral(p, dv)
    assert all(r.is_zero() for r in integrals.verify_pde_system(E))


def test_pde_sensitivity_control():
    E = integrals.build_extra_integral(5, 0.5)
    c = list(E.P1.c)
    c[1] = c[1] + 1e-3
    bad = integrals.ExtraIntegral(integrals.HomogeneousPoly2(tuple(c), E.field), E.P2, E.P3, E.p, E.d)
    assert not all(r.is_zero() for r in integrals.verify_pde_system(bad))


def test_exact_time_derivative_vanishes():
    for p in (1, 3, 5):
        assert integrals.f3_time_derivative(integrals.build_extra_integral(p)) == 0


def test_gamma_zero_gives_zero():
    E = integrals.build_extra_integral(3, 0.8)
    assert integrals.f3_evaluate(E, [0.4, -0.3, 0.0, 0.0, 0.0], 0.8) == 0.0


def test_symbolic_needs_numeric_d():
    with pytest.raises(ValidationError):
        integrals.f3_evaluate(integrals.build_extra_integral(3), [1, 1, 1, 1, 1])


def test_even_p_rejected():
    with pytest.raises(ParityError):
        integrals.build_extra_integral(4)


def test_division_obstruction():
    F = integrals.make_field(Fraction(1, 2))
    P = integrals.HomogeneousPoly2((F(1), F(0)), F)  # w2
    with pytest.raises(DivisionObstruction):
        P.div_w1()


@pytest.mark.parametrize("p", [3, 7])
def test_f3_conserved_along_trajectories(p):
    dv = 0.6
    E = integrals.build_extra_integral(p, dv)
    params = SuslovParams.special(p, dv)
    ts = np.linspace(0, 20, 201)
    tr = simulate(params, [0.7, -1.1, 0.36, 0.48, 0.8], 0.0, 20.0, rel_tol=1e-10, abs_tol=1e-12, t_eval=ts)
    f3 = integrals.f3_evaluate(E, tr.y, dv)
    assert np.max(np.abs(f3 - f3[0])) < 1e-8 * max(1.0, abs(f3[0]))


def test_jacobian_rank_three():
    rng = np.random.default_rng(11)
    E = integrals.build_extra_integral(5, 0.9)
    states = rng.normal(size=(20, 5))
    assert integrals.jacobian_rank(E, states, 0.9) == [3] * 20


@pytest.mark.parametrize("p", [1, 3, 5])
def test_third_order_check(p):
    chk = integrals.third_order_ode_check(p)
    assert chk.passed
    assert chk.z_equation_residual == 0


def test_third_order_ratio_p3():
    chk = integrals.third_order_ode_check(3, Fraction(1, 2))
    assert chk.residual == 0
    assert chk.ratio == sp.Rational(-5, 4)


def test_to_dict_has_tables():
    out = integrals.build_extra_integral(3, Fraction(1, 2)).to_dict()
    assert out["p"] == 3 and out["d"] == "1/2"
    assert all(set(row) == {"w1", "w2", "coeff"} for row in out["P1"])
