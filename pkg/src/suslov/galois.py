"""From the Poisson equations to a second-order linear equation, and the two
computable certificates about its solutions: logarithms at the resonant
singular points and the degree bound for exponential solutions."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Sequence

import mpmath
import numpy as np
import sympy as sp
from sympy.polys.domains import QQ, QQ_I

from .closed_form import omega_general
from .errors import ChartSingularity, CoincidentSolutions, DegenerateC, NonResonant, ValidationError
from .frobenius import LocalOperator, frobenius_series, poly_eval, taylor_shift
from .integrator import integrate
from .model import SuslovParams

DEFAULT_C = Fraction(5, 4)  # c^2 - 1 = (3/4)^2, so every singular point is Gaussian rational
VERIFIED_RANGE = 10
_MP_DPS = 50
_MP_ZERO = mpmath.mpf("1e-20")

# ------------------------------------------------------------- chart


def stereographic(gamma: Sequence[complex]) -> tuple[complex, complex]:
    g1, g2, g3 = (complex(v) for v in gamma)
    den1 = g1 - 1j * g2
    den2 = g3 + 1
    if abs(den1) < 1e-14 or abs(den2) < 1e-14:
        raise ChartSingularity("gamma outside the chart (gamma1 = i gamma2 or gamma3 = -1)")
    return (g3 + 1) / den1, -(g1 + 1j * g2) / den2


def inverse_stereographic(u1: complex, u2: complex) -> np.ndarray:
    den = u1 - u2
    if abs(den) < 1e-14:
        raise ChartSingularity("u1 = u2 has no preimage")
    return np.array([(1 - u1 * u2) / den, 1j * (1 + u1 * u2) / den, (u1 + u2) / den])


def real_from_chart(u: complex) -> np.ndarray:
    """Real unit vector with first chart coordinate u (second is -1/conj(u))."""
    g = inverse_stereographic(u, -1 / np.conj(u))
    return g.real


# ------------------------------------------------------------- Riccati / linear


@dataclass(frozen=True)
class RiccatiCoeffs:
    """u' = A + B u + C u^2 for either chart coordinate, and the linear form
    w'' - B1 w' - A1 w = 0 obtained with u = -w'/(C w)."""

    params: SuslovParams

    def omega(self, t):
        return omega_general(t, self.params)

    def A(self, t) -> complex:
        w1, w2 = self.omega(t)
        return 0.5 * (w2 - 1j * w1)

    def B(self, t) -> complex:
        return 0j  # -i*omega3 with omega3 = 0

    def C(self, t) -> complex:
        w1, w2 = self.omega(t)
        return 0.5 * (w2 + 1j * w1)

    def C_dot(self, t) -> complex:
        from .closed_form import omega_derivative

        dw1, dw2 = omega_derivative(t, self.params)
        return 0.5 * (dw2 + 1j * dw1)

    def A1(self, t) -> complex:
        return -self.A(t) * self.C(t)

    def B1(self, t) -> complex:
        return self.C_dot(t) / self.C(t) + self.B(t)

    def riccati_rhs(self, t, u):
        return self.A(t) + self.B(t) * u + self.C(t) * u * u

    def linear_rhs(self) -> Callable[[float, np.ndarray], np.ndarray]:
        """Real 4-vector (Re w, Im w, Re w', Im w') form of the linear equation."""

        def f(t, y):
            w = complex(y[0], y[1])
            wd = complex(y[2], y[3])
            wdd = self.B1(t) * wd + self.A1(t) * w
            return np.array([y[2], y[3], wdd.real, wdd.imag])

        return f

    def u_from_w(self, t, w, wd) -> complex:
        return -wd / (self.C(t) * w)


def riccati_general_solution(
    u0: Callable[[float], complex],
    u1: Callable[[float], complex],
    C: Callable[[float], complex],
    t0: float,
    t: Sequence[float],
    C0: complex,
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-13,
) -> np.ndarray:
    """Member of the one-parameter family through two particular solutions.

    (u - u0)/(u - u1) = C0 exp(int_{t0}^t C (u0 - u1) ds); the integral is
    computed with the adaptive integrator. ``t`` must be monotone away from t0.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    for s in ts:
        if abs(u0(s) - u1(s)) < 1e-14:
            raise CoincidentSolutions(f"particular solutions coincide at t = {s}")
    if C0 == 0:
        return np.array([u0(s) for s in ts], dtype=complex)

    def f(s, y):
        v = C(s) * (u0(s) - u1(s))
        return np.array([v.real, v.imag])

    out = np.empty(len(ts), dtype=complex)
    for direction in (1, -1):
        idx = [i for i, s in enumerate(ts) if (s - t0) * direction > 0]
        if not idx:
            continue
        sel = ts[idx]
        order = np.argsort(sel * direction)
        tend = sel[order[-1]]
        tr = integrate(f, np.zeros(2), t0, tend, rel_tol, abs_tol, t_eval=sel[order], labels=("re", "im"))
        for j, k in enumerate(order):
            out[idx[k]] = complex(tr.y[j, 0], tr.y[j, 1])
    for i, s in enumerate(ts):
        if s == t0:
            out[i] = 0
    K = C0 * np.exp(out)
    u0v = np.array([u0(s) for s in ts])
    u1v = np.array([u1(s) for s in ts])
    return (u0v - K * u1v) / (1 - K)


# ------------------------------------------------------------- reduced equation


def _tabulated_P(p, c, d2) -> list:
    I = sp.I
    return [
        d2 + p**2,
        -4 * I * c * (2 * d2 + p**2),
        -4 * (4 * d2 + p**2),
        -4 * I * c * ((4 * p**2 - 2) * d2 + p**2),
        -2 * ((-8 * d2 + 8 * (d2 + 2) * p**2 + 1) * d2 + 5 * p**2),
        4 * I * c * ((4 * p**2 - 2) * d2 + p**2),
        -4 * (4 * d2 + p**2),
        4 * I * c * (2 * d2 + p**2),
        d2 + p**2,
    ]


def _symbolic_pq(z, c, p):
    I = sp.I
    pz = (z**2 * (z**2 + 4 * I * c * z - 4) - 1) / (z * (z**2 + 1) * (z**2 + 2 * I * c * z - 1))
    qz = p**2 / (4 * (c**2 - 1)) / z**2 + p**2 / (z**2 + 1) ** 2
    return pz, qz


def _symbolic_Q(z, c):
    return 4 * (c**2 - 1) * z**2 * (z**2 + 1) ** 2 * (2 * c * z - sp.I * (z**2 - 1)) ** 2


@lru_cache(maxsize=1)
def verify_tabulated_coefficients() -> bool:
    """Derive r = p'/2 + p^2/4 - q symbolically and compare r*Q with the
    tabulated numerator coefficients (identically in c and p)."""
    z, c, p = sp.symbols("z c p")
    pz, qz = _symbolic_pq(z, c, p)
    r = sp.together(sp.diff(pz, z) / 2 + pz**2 / 4 - qz)
    num = sp.Poly(sp.expand(sp.cancel(r * _symbolic_Q(z, c))), z)
    got = num.all_coeffs()[::-1]
    want = _tabulated_P(p, c, c**2 - 1)
    if len(got) != len(want):
        return False
    return all(sp.expand(a - b) == 0 for a, b in zip(got, want))


def _qqi(v) -> Any:
    v = sp.nsimplify(v)
    re, im = sp.re(v), sp.im(v)
    return QQ_I(QQ(int(sp.fraction(re)[0]), int(sp.fraction(re)[1])), QQ(int(sp.fraction(im)[0]), int(sp.fraction(im)[1])))


def _mp(v):
    if isinstance(v, (Fraction, sp.Rational)):
        return mpmath.mpf(int(v.numerator)) / int(v.denominator)
    if isinstance(v, complex):
        return mpmath.mpc(v)
    return mpmath.mpf(v)


def _is_rational(v) -> bool:
    return isinstance(v, (int, Fraction, sp.Rational)) and not isinstance(v, bool)


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, m = q.numerator, q.denominator
    rn, rm = math.isqrt(n), math.isqrt(m)
    return Fraction(rn, rm) if rn * rn == n and rm * rm == m else None


@dataclass
class ReducedEquation:
    """y'' = r(z) y with r = P/Q, obtained from w'' + p(z) w' + q(z) w = 0."""

    p: Any
    c: Any
    P_mp: list  # mpmath coefficients (ascending)
    Q_mp: list
    P_exact: list | None = None  # QQ_I coefficients when c and p are rational
    Q_exact: list | None = None
    d_exact: Fraction | None = None

    @property
    def d(self) -> complex:
        with mpmath.workdps(_MP_DPS):
            return complex(mpmath.sqrt(_mp(self.c) ** 2 - 1))

    @property
    def exact(self) -> bool:
        return self.P_exact is not None

    def p_of_z(self, z: complex) -> complex:
        c = complex(self.c)
        return (z**2 * (z**2 + 4j * c * z - 4) - 1) / (z * (z**2 + 1) * (z**2 + 2j * c * z - 1))

    def q_of_z(self, z: complex) -> complex:
        c, p = complex(self.c), complex(self.p)
        return p**2 / (4 * (c**2 - 1)) / z**2 + p**2 / (z**2 + 1) ** 2

    def r_from_pq(self, z: complex, h: float = 1e-6) -> complex:
        """p'/2 + p^2/4 - q, with p' by a 4th-order central difference."""
        dp = (-self.p_of_z(z + 2 * h) + 8 * self.p_of_z(z + h) - 8 * self.p_of_z(z - h) + self.p_of_z(z - 2 * h)) / (12 * h)
        pz = self.p_of_z(z)
        return dp / 2 + pz * pz / 4 - self.q_of_z(z)

    def r_of_z(self, z: complex) -> complex:
        with mpmath.workdps(_MP_DPS):
            zz = mpmath.mpc(z)
            return complex(poly_eval(self.P_mp, zz) / poly_eval(self.Q_mp, zz))

    def singular_points(self) -> list:
        """Finite singular points s_0..s_4 (mpmath), then infinity."""
        with mpmath.workdps(_MP_DPS):
            c = _mp(self.c)
            d = mpmath.sqrt(c * c - 1)
            j = mpmath.mpc(0, 1)
            return [mpmath.mpc(0), j, -j, -j * (c + d), -j * (c - d), mpmath.inf]

    def exact_point(self, index: int):
        j = QQ_I(0, 1)
        if index == 0:
            return QQ_I(0, 0)
        if index == 1:
            return j
        if index == 2:
            return -j
        if index in (3, 4) and self.d_exact is not None:
            c = _qqi(sp.Rational(self.c))
            d = _qqi(sp.Rational(self.d_exact))
            return -j * (c + d) if index == 3 else -j * (c - d)
        return None


def reduced_equation(p, c, check: bool = True) -> ReducedEquation:
    """Reduced form of the second-order equation for the Poisson problem.

    Exact Gaussian-rational coefficients are kept when ``p`` and ``c`` are
    rational. With ``check`` the tabulated numerator is re-derived once.
    """
    if p == 0:
        raise ValidationError("p must be nonzero")
    if c in (1, -1) or (not _is_rational(c) and abs(abs(float(c)) - 1) < 1e-15):
        raise DegenerateC("c = +-1 makes d = 0")
    if check and not verify_tabulated_coefficients():
        raise ArithmeticError("tabulated coefficients disagree with the derivation")
    z = sp.Symbol("z")
    exact = _is_rational(p) and _is_rational(c)
    if exact:
        cs, ps = sp.Rational(Fraction(c)), sp.Rational(Fraction(p))
    else:
        cs, ps = sp.Float(float(c), 30), sp.Float(float(p), 30)
    Pcoef = [sp.expand(v) for v in _tabulated_P(ps, cs, cs**2 - 1)]
    Qcoef = sp.Poly(sp.expand(_symbolic_Q(z, cs)), z).all_coeffs()[::-1]
    with mpmath.workdps(_MP_DPS):
        P_mp = [mpmath.mpc(sp.re(v).evalf(_MP_DPS), sp.im(v).evalf(_MP_DPS)) for v in Pcoef]
        Q_mp = [mpmath.mpc(sp.re(v).evalf(_MP_DPS), sp.im(v).evalf(_MP_DPS)) for v in Qcoef]
    eq = ReducedEquation(p, c, P_mp, Q_mp)
    if exact:
        eq.P_exact = [_qqi(v) for v in Pcoef]
        eq.Q_exact = [_qqi(v) for v in Qcoef]
        eq.d_exact = _rational_sqrt(Fraction(c) ** 2 - 1)
    return eq


def _local_operator(eqn: ReducedEquation, index: int, exact: bool) -> LocalOperator:
    if exact:
        P, Q = eqn.P_exact, eqn.Q_exact
        zero = lambda v: not v  # noqa: E731
    else:
        P, Q = eqn.P_mp, eqn.Q_mp
        scale = max(abs(v) for v in Q)
        zero = lambda v: abs(v) <= _MP_ZERO * scale  # noqa: E731
    if index == 5:
        # z = 1/zeta, Y = zeta*y: zeta^2 Qrev Y'' - Prev Y = 0
        Pr = list(reversed(list(P) + [0 * P[0]] * (9 - len(P))))
        Qr = list(reversed(list(Q) + [0 * Q[0]] * (11 - len(Q))))
        a2 = [0 * Qr[0], 0 * Qr[0]] + Qr
        return LocalOperator([[-v for v in Pr], [0 * P[0]], a2], zero)
    s = eqn.exact_point(index) if exact else eqn.singular_points()[index]
    a2 = taylor_shift(Q, s)
    a0 = [-v for v in taylor_shift(P, s)]
    return LocalOperator([a0, [0 * a2[0]], a2], zero)


@dataclass(frozen=True)
class SingularPointData:
    index: int
    location: complex | str
    exponents: tuple[complex, complex]
    delta: complex
    logarithmic: bool | None


def _delta_mp(op: LocalOperator):
    """Exponent difference from the indicial polynomial q2 rho(rho-1) - P0."""
    q2 = op.coeff(2, 2 + op.shift)
    P0 = -op.coeff(0, op.shift)
    return mpmath.sqrt(1 + 4 * P0 / q2)


def singular_exponents(eqn: ReducedEquation, log_test: bool = True) -> list[SingularPointData]:
    out = []
    with mpmath.workdps(_MP_DPS):
        pts = eqn.singular_points()
        for i in range(6):
            op = _local_operator(eqn, i, exact=False)
            D = _delta_mp(op)
            e_hi, e_lo = (1 + D) / 2, (1 - D) / 2
            if i == 5:
                e_hi, e_lo = e_hi - 1, e_lo - 1  # y = Y/zeta
            log = None
            if log_test:
                try:
                    log = frobenius_log_test(eqn, i).logarithmic
                except NonResonant:
                    log = False
            loc = "inf" if i == 5 else complex(pts[i])
            out.append(SingularPointData(i, loc, (complex(e_hi), complex(e_lo)), complex(D), log))
    return out


@dataclass(frozen=True)
class LogTestResult:
    index: int
    delta: int
    logarithmic: bool
    obstruction_index: int | None
    exact: bool
    nterms: int
    obstruction_value: Any = None


def frobenius_log_test(eqn: ReducedEquation, index: int, nterms: int | None = None, exact: bool | None = None) -> LogTestResult:
    """Decide whether the local solutions at s_index involve a logarithm.

    The recursion is run at the smaller exponent (1 - Delta)/2; at order Delta
    the indicial factor vanishes and the series exists iff the right-hand side
    vanishes there too. Exact when the point and coefficients are Gaussian
    rational, otherwise 50-digit arithmetic with a 1e-20 zero threshold.
    """
    if not 0 <= index <= 5:
        raise ValidationError("index must be 0..5")
    can_exact = eqn.exact and (index in (0, 1, 2, 5) or eqn.d_exact is not None)
    if exact is None:
        exact = can_exact
    elif exact and not can_exact:
        raise ValidationError("exact arithmetic needs rational p, c (and rational d at s_3, s_4)")
    with mpmath.workdps(_MP_DPS):
        op = _local_operator(eqn, index, exact)
        q2 = op.coeff(2, 2 + op.shift)
        P0 = -op.coeff(0, op.shift)
        if exact:
            D2 = 1 + 4 * P0 / q2
            if D2.y or D2.x < 0:
                raise NonResonant(f"Delta^2 = {D2} is not a nonnegative rational")
            r = _rational_sqrt(Fraction(int(D2.x.numerator), int(D2.x.denominator)))
            if r is None or r.denominator != 1:
                raise NonResonant(f"Delta^2 = {D2} is not a perfect integer square")
            delta = int(r)
            rho = (1 - QQ_I(delta, 0)) / 2
        else:
            D = _delta_mp(op)
            n = int(mpmath.nint(D.real))
            if abs(D - n) > mpmath.mpf("1e-20") or n < 0:
                raise NonResonant(f"Delta = {complex(D)} is not a nonnegative integer")
            delta = n
            rho = (1 - mpmath.mpf(delta)) / 2
        if nterms is None:
            nterms = delta + 5
        if nterms < delta + 5:
            raise ValidationError("nterms must be at least Delta + 5")
        if delta == 0:
            return LogTestResult(index, 0, True, 0, exact, nterms)
        one = QQ_I(1, 0) if exact else mpmath.mpc(1)
        fs = frobenius_series(op, rho, nterms, c0=one)
        val = None
        for N, rhs, bad in fs.resonances:
            if N == delta:
                val = rhs if exact else complex(rhs)
        return LogTestResult(index, delta, fs.logarithmic, fs.obstruction_index, exact, nterms, val)


# ------------------------------------------------------------- certificates


def exponential_degree_bound(p: int, log_flags: dict[int, bool] | None = None) -> tuple[int, ...]:
    """Candidate degrees n of R in an exponential solution R * prod (z - s_i)^rho_i.

    Exponents are enumerated at all six points; only combinations giving a
    real integer n = -sum rho survive (this forces rho_0 + rho_5 = 0), and a
    logarithmic point admits only its larger exponent. Sorted descending.
    """
    p = int(p)
    if p == 0:
        raise ValidationError("p must be nonzero")
    if log_flags is None:
        eqn = reduced_equation(p, DEFAULT_C, check=False)
        log_flags = {i: frobenius_log_test(eqn, i).logarithmic for i in (1, 2, 3, 4)}
    kappa = 0.7853981  # any nonzero stand-in for p/d; it cancels in admissible sums
    deltas = [1j * kappa, abs(p), abs(p), 2, 2, 1j * kappa]
    choices = []
    for i, D in enumerate(deltas):
        hi, lo = (1 + D) / 2, (1 - D) / 2
        if i == 5:
            hi, lo = -hi, -lo
        if log_flags.get(i, False):
            choices.append([hi if i != 5 else lo])
        else:
            choices.append([hi, lo])
    found = set()
    for combo in itertools.product(*choices):
        n = -sum(combo)
        if abs(n.imag) < 1e-12 and abs(n.real - round(n.real)) < 1e-12:
            found.add(int(round(n.real)))
    return tuple(sorted(found, reverse=True))


class VerdictKind(str, enum.Enum):
    Solvable_OddP = "Solvable_OddP"
    NotLiouvillian_EvenP = "NotLiouvillian_EvenP"
    Unknown = "Unknown"


@dataclass(frozen=True)
class LiouvillianVerdict:
    p: int
    kind: VerdictKind
    certificates: dict = field(default_factory=dict)
    extension: bool = False  # computed beyond the verified range |p| <= 10

    def to_dict(self) -> dict:
        return {"p": self.p, "verdict": self.kind.value, "certificates": self.certificates, "extension": self.extension}


def liouvillian_verdict(p: int, extend: bool = False, c=DEFAULT_C) -> LiouvillianVerdict:
    """Verdict for the Poisson equations with integer p.

    Odd p: explicit meromorphic (hence Liouvillian) solutions exist. Even p:
    a logarithm at s_1 plus an empty set of nonnegative degrees rules out
    Liouvillian solutions. Outside |p| <= 10 the certificates are only
    computed when ``extend`` is set, and then flagged as an extension.
    """
    p = int(p)
    if p == 0:
        raise ValidationError("p must be nonzero")
    if p % 2 != 0:
        return LiouvillianVerdict(p, VerdictKind.Solvable_OddP, {"explicit_solutions": True})
    outside = abs(p) > VERIFIED_RANGE
    if outside and not extend:
        return LiouvillianVerdict(p, VerdictKind.Unknown, {"reason": f"|p| > {VERIFIED_RANGE}; rerun with extend"})
    eqn = reduced_equation(p, c, check=False)
    flags = {i: frobenius_log_test(eqn, i).logarithmic for i in (1, 2, 3, 4)}
    degrees = exponential_degree_bound(p, flags)
    admissible = [n for n in degrees if n >= 0]
    cert = {"log_flags": {f"s{i}": v for i, v in flags.items()}, "degree_candidates": list(degrees), "admissible_degrees": admissible}
    if flags[1] and flags[2] and not admissible:
        return LiouvillianVerdict(p, VerdictKind.NotLiouvillian_EvenP, cert, outside)
    return LiouvillianVerdict(p, VerdictKind.Unknown, cert, outside)
