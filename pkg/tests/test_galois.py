from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suslov import galois
from suslov.errors import ChartSingularity, CoincidentSolutions, DegenerateC, NonResonant, ValidationError
from suslov.integrator import integrate_poisson
from suslov.model import SuslovParams


@settings(max_examples=50, deadline=None)
@given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(lambda v: 0.1 < np.linalg.norm(v)))
def test_stereographic_round_trip(v):
    g = np.array(v) / np.linalg.norm(v)
    if g[2] < -0.999 or np.hypot(g[0], g[1]) < 1e-6:
        return
    u1, u2 = galois.stereographic(g)
    np.testing.assert_allclose(galois.inverse_stereographic(u1, u2), g, atol=1e-9)
    np.testing.assert_allclose(galois.real_from_chart(u1), g, atol=1e-9)
    assert abs(u2 + 1 / np.conj(u1)) < 1e-9


def test_chart_singularities():
    with pytest.raises(ChartSingularity):
        galois.stereographic([0.0, 0.0, -1.0])
    with pytest.raises(ChartSingularity):
        galois.inverse_stereographic(0.5, 0.5)


def _poisson_solution(params, g0, ts):
    return integrate_poisson(params, g0, ts[0], ts[-1], rel_tol=1e-12, abs_tol=1e-13, t_eval=ts).y


def test_chart_coordinates_solve_the_riccati_equation():
    params = SuslovParams.special(2.0, 0.9)
    rc = galois.RiccatiCoeffs(params)
    ts = np.linspace(-2, 2, 4001)
    Y = _poisson_solution(params, [0.6, 0.0, 0.8], ts)
    u = np.array([galois.stereographic(y)[0] for y in Y])
    du = np.gradient(u, ts, edge_order=2)
    for i in range(100, 3900, 400):
        assert abs(du[i] - rc.riccati_rhs(ts[i], u[i])) < 1e-4 * max(1.0, abs(du[i]))


def test_linear_form_reproduces_riccati_solution():
    from suslov.integrator import integrate

    params = SuslovParams.special(2.0, 0.9)
    rc = galois.RiccatiCoeffs(params)
    ts = np.linspace(0.0, 1.5, 7)
    Y = _poisson_solution(params, [0.6, 0.0, 0.8], ts)
    u0 = galois.stereographic(Y[0])[0]
    # w(0) = 1, w'(0) = -C(0) u(0)
    wd0 = -rc.C(0.0) * u0
    tr = integrate(rc.linear_rhs(), [1.0, 0.0, wd0.real, wd0.imag], 0.0, 1.5, 1e-12, 1e-13, t_eval=ts)
    for t, y, g in zip(ts, tr.y, Y):
        u = rc.u_from_w(t, complex(y[0], y[1]), complex(y[2], y[3]))
        assert abs(u - galois.stereographic(g)[0]) < 1e-8


def test_general_riccati_solution_through_two_particular_ones():
    params = SuslovParams.special(1.5, 1.1)
    rc = galois.RiccatiCoeffs(params)
    ts = np.linspace(0.0, 1.0, 201)
    sols = [_poisson_solution(params, g, ts) for g in ([0.6, 0.0, 0.8], [0.0, 0.6, 0.8], [-0.6, 0.0, -0.8])]
    U = [np.array([galois.stereographic(y)[0] for y in Y]) for Y in sols]

    def interp(k):
        return lambda s: complex(np.interp(s, ts, U[k].real), np.interp(s, ts, U[k].imag))

    C0 = (U[2][0] - U[0][0]) / (U[2][0] - U[1][0])
    sample = ts[::50]
    got = galois.riccati_general_solution(interp(0), interp(1), rc.C, 0.0, sample, C0, rel_tol=1e-8, abs_tol=1e-10)
    np.testing.assert_allclose(got, U[2][::50], atol=1e-3)
    zero = galois.riccati_general_solution(interp(0), interp(1), rc.C, 0.0, sample, 0)
    np.testing.assert_allclose(zero, U[0][::50])
    with pytest.raises(CoincidentSolutions):
        galois.riccati_general_solution(interp(0), interp(0), rc.C, 0.0, sample, C0)


def test_tabulated_numerator_is_derived():
    assert galois.verify_tabulated_coefficients()


def test_degenerate_c():
    with pytest.raises(DegenerateC):
        galois.reduced_equation(2, 1)
    with pytest.raises(ValidationError):
        galois.reduced_equation(0, Fraction(5, 4))


def test_numerator_conjugate_symmetry():
    eq = galois.reduced_equation(3, Fraction(5, 4))
    P = eq.P_exact
    for i in range(9):
        a, b = P[i], P[8 - i]
        sign = 1 if i % 2 == 0 else -1
        assert a == sign * b or a == -sign * b


def test_r_of_z_matches_p_and_q():
    rng = np.random.default_rng(7)
    for p, c in ((2, Fraction(5, 4)), (2.5, 1.3)):
        eq = galois.reduced_equation(p, c)
        for _ in range(20):
            z = complex(*rng.uniform(-2, 2, 2))
            assert abs(eq.r_of_z(z) - eq.r_from_pq(z)) <= 1e-6 * max(1.0, abs(eq.r_of_z(z)))


def test_exponent_differences():
    eq = galois.reduced_equation(4, Fraction(5, 4))
    data = galois.singular_exponents(eq)
    deltas = [round(d.delta.real, 9) for d in data]
    assert deltas[1:5] == [4, 4, 2, 2]
    assert abs(data[0].delta.real) < 1e-12 and abs(data[5].delta.real) < 1e-12
    hi, lo = data[1].exponents
    assert (hi - lo).real == pytest.approx(4)
    # Fuchs relation for y'' = r y on the sphere: all exponents sum to 4
    assert sum(sum(d.exponents) for d in data).real == pytest.approx(4.0)


def test_log_test_independent_of_nterms():
    eq = galois.reduced_equation(6, Fraction(5, 4))
    a = galois.frobenius_log_test(eq, 1)
    b = galois.frobenius_log_test(eq, 1, nterms=a.delta + 20)
    assert a.logarithmic and b.logarithmic
    assert a.obstruction_value == b.obstruction_value
    with pytest.raises(ValidationError):
        galois.frobenius_log_test(eq, 1, nterms=a.delta + 2)


def test_log_test_float_mode_agrees_with_exact():
    for p in (2, 3, 4):
        eq = galois.reduced_equation(p, Fraction(5, 4))
        for i in (1, 2, 3, 4):
            ex = galois.frobenius_log_test(eq, i, exact=True)
            fl = galois.frobenius_log_test(eq, i, exact=False)
            assert ex.logarithmic == fl.logarithmic and ex.exact and not fl.exact


def test_log_test_independent_of_c():
    for p in (2, 3, 4):
        eq = galois.reduced_equation(p, Fraction(13, 5))
        flags = [galois.frobenius_log_test(eq, i).logarithmic for i in (1, 2, 3, 4)]
        assert flags == [p % 2 == 0, p % 2 == 0, False, False]


def test_non_resonant_point():
    eq = galois.reduced_equation(2, Fraction(5, 4))
    with pytest.raises(NonResonant):
        galois.frobenius_log_test(eq, 0)


def test_degree_bound_negative_p():
    assert galois.exponential_degree_bound(-2) == (-2, -4, -6)


def test_verdicts():
    assert galois.liouvillian_verdict(5).kind is galois.VerdictKind.Solvable_OddP
    assert galois.liouvillian_verdict(12).kind is galois.VerdictKind.Unknown
    ext = galois.liouvillian_verdict(12, extend=True)
    assert ext.kind is galois.VerdictKind.NotLiouvillian_EvenP and ext.extension
    d = galois.liouvillian_verdict(4).to_dict()
    assert d["verdict"] == "NotLiouvillian_EvenP" and d["certificates"]["admissible_degrees"] == []
