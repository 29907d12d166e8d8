"""Generalized hypergeometric machinery for the special case I13 = 0.

Conventions: (a)_k = a(a+1)...(a+k-1); principal branch for complex powers;
z = 4/(e^t + e^-t)^2 and y = e^(2t), so that z = 4y/(1+y)^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

import numpy as np
from sympy.polys.domains import QQ, QQ_I

from .closed_form import log_z_of_t
from .errors import BranchPoint, NoConvergence, ParityError, PoleInDenominator, ResonantParameters, ValidationError
from .frobenius import LocalOperator, eval_series, frobenius_series, poly_eval, reflect, taylor_shift

MAX_TERMS = 10**6


def pochhammer(a, k: int):
    out = 1
    for i in range(k):
        out = out * (a + i)
    return out


def _is_nonpositive_integer(v, tol: float = 0.0) -> int | None:
    """Return -n if v equals the nonpositive integer -n, else None."""
    if isinstance(v, (Rational,)):
        return int(v) if v <= 0 and v == int(v) else None
    try:
        c = complex(v)
    except TypeError:
        return None
    if abs(c.imag) > tol:
        return None
    r = round(c.real)
    if r <= 0 and abs(c.real - r) <= tol:
        return int(r)
    return None


@dataclass(frozen=True)
class HGSpec:
    alphas: tuple
    betas: tuple

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        object.__setattr__(self, "betas", tuple(self.betas))
        for b in self.betas:
            if _is_nonpositive_integer(b) is not None:
                raise PoleInDenominator(f"denominator parameter {b!r} is a nonpositive integer")

    def truncation(self) -> int | None:
        """Degree of the terminating polynomial, or None."""
        degs = [-n for a in self.alphas if (n := _is_nonpositive_integer(a)) is not None]
        return min(degs) if degs else None

    def term_ratio(self, k: int, z):
        """term_{k+1}/term_k."""
        num = 1
        for a in self.alphas:
            num = num * (a + k)
        den = k + 1
        for b in self.betas:
            den = den * (b + k)
        return num * z / den


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    error: float
    terms: int


def series_terms(spec: HGSpec, z, n: int) -> list:
    """First n terms of the series; exact when parameters and z are exact."""
    out = [z**0 if not isinstance(z, (int, float, complex)) else 1]
    for k in range(n - 1):
        out.append(out[-1] * spec.term_ratio(k, z))
    return out


def series_coefficients(spec: HGSpec, n: int) -> list:
    """Coefficients (alpha)_k.../((beta)_k... k!) for k < n, in the parameters' field."""
    out: list = [1]
    for k in range(n - 1):
        out.append(out[-1] * spec.term_ratio(k, 1))
    return out


def pfq(spec: HGSpec, z: complex, tol: float = 1e-15, max_terms: int = MAX_TERMS) -> SeriesValue:
    """Sum of the Thomae series.

    Stops once three consecutive terms satisfy |term| < tol*|sum|; a
    terminating series is summed exactly. The error bound combines a geometric
    tail estimate with accumulated rounding.
    """
    z = complex(z)
    deg = spec.truncation()
    al = [complex(a) for a in spec.alphas]
    be = [complex(b) for b in spec.betas]
    eps = np.finfo(float).eps
    if deg is not None:
        term, s, big = 1 + 0j, 1 + 0j, 1.0
        for k in range(deg):
            r = 1 + 0j
            for a in al:
                r *= a + k
            den = k + 1 + 0j
            for b in be:
                den *= b + k
            term *= r * z / den
            s += term
            big = max(big, abs(term))
        return SeriesValue(s, 4 * (deg + 1) * eps * big, deg + 1)
    if abs(z) >= 1:
        raise NoConvergence(f"|z| = {abs(z)} >= 1 and the series does not terminate")
    term, s, big = 1 + 0j, 1 + 0j, 1.0
    small = 0
    k = 0
    ratio = abs(z)
    while k < max_terms:
        num = 1 + 0j
        for a in al:
            num *= a + k
        den = k + 1 + 0j
        for b in be:
            den *= b + k
        prev = term
        term = term * num * z / den
        s += term
        k += 1
        big = max(big, abs(term))
        if abs(prev) > 0:
            ratio = abs(term) / abs(prev)
        if abs(term) < tol * abs(s) or term == 0:
            small += 1
            if small >= 3:
                r = min(max(ratio, abs(z)), 0.999999)
                tail = abs(term) * r / (1 - r)
                return SeriesValue(s, tail + 4 * k * eps * big, k + 1)
        else:
            small = 0
    raise NoConvergence(f"no convergence within {max_terms} terms")


def hyp2f1(a, b, c, z, tol: float = 1e-15) -> complex:
    return pfq(HGSpec((a, b), (c,)), z, tol).value


def hyp2f1_derivative(a, b, c, z, tol: float = 1e-15) -> complex:
    """d/dz F(a,b;c;z) by term-wise differentiation."""
    return a * b / c * pfq(HGSpec((a + 1, b + 1), (c + 1,)), z, tol).value


# ------------------------------------------------------------- parameters


@dataclass(frozen=True)
class SuslovHGParams:
    p: float
    d: float
    alphas: tuple
    betas: tuple
    a_pm: tuple  # (a+, a-)
    b_pm: tuple
    c_pm: tuple
    alpha_pm: tuple
    beta_pm: tuple

    def spec(self) -> HGSpec:
        return HGSpec(self.alphas, self.betas)

    def branch(self, sign: int) -> tuple:
        i = 0 if sign > 0 else 1
        return self.a_pm[i], self.b_pm[i], self.c_pm[i]


def suslov_params(p: float, d: float) -> SuslovHGParams:
    if not d > 0:
        raise ValidationError("d must be positive")
    ip = 1j * p
    alphas = (0.5, (1 + p) / 2, (1 - p) / 2)
    betas = ((d - ip) / (2 * d), (d + ip) / (2 * d))
    a_pm = tuple((2 - p) / 2 + s * ip / (2 * d) for s in (1, -1))
    b_pm = ((1 - p) / 2, (1 - p) / 2)
    c_pm = tuple(1 + a - b for a, b in zip(a_pm, b_pm))
    alpha_pm = tuple((2 - p) / 4 + s * ip / (4 * d) for s in (1, -1))
    beta_pm = tuple((2 + p) / 4 + s * ip / (4 * d) for s in (1, -1))
    return SuslovHGParams(p, d, alphas, betas, a_pm, b_pm, c_pm, alpha_pm, beta_pm)


def _odd_positive(p) -> int:
    if isinstance(p, bool) or not float(p).is_integer() or int(p) < 1 or int(p) % 2 == 0:
        raise ParityError(f"odd positive integer p required, got {p!r}")
    return int(p)


def _exact(d) -> bool:
    return isinstance(d, (Fraction, int)) and not isinstance(d, bool)


# ------------------------------------------------------------- F1 family


def f1_series(p: float, d: float, z: complex, tol: float = 1e-15) -> complex:
    return pfq(suslov_params(p, d).spec(), z, tol).value


def f1_polynomial(p: int, d) -> list:
    """Ascending coefficients of the terminating F1 (odd p).

    Coefficient j is (2j-1)!!/(2j)!! * (-1)^j d^(2j) prod_{m<j}(p^2-(2m+1)^2)
    / prod_{m<j}((2m+1)^2 d^2 + p^2); exact Fractions when d is rational.
    """
    p = _odd_positive(p)
    d2 = Fraction(d) ** 2 if _exact(d) else float(d) ** 2
    coeffs = [Fraction(1) if _exact(d) else 1.0]
    term = coeffs[0]
    for j in range(1, (p - 1) // 2 + 1):
        m = j - 1
        term = term * Fraction(2 * j - 1, 2 * j) * (-d2) * (p * p - (2 * m + 1) ** 2) / ((2 * m + 1) ** 2 * d2 + p * p)
        coeffs.append(term)
    return coeffs


# ------------------------------------------------------------- transformations


def quadratic_transform(a, b, y, tol: float = 1e-15) -> tuple[complex, complex]:
    """Both sides of F(a/2, a/2+1/2-b; 1+a-b; 4y/(1+y)^2) = (1+y)^a F(a, b; 1+a-b; -y)."""
    y = complex(y)
    x = 4 * y / (1 + y) ** 2
    lhs = pfq(HGSpec((a / 2, a / 2 + 0.5 - b), (1 + a - b,)), x, tol).value
    rhs = (1 + y) ** a * pfq(HGSpec((a, b), (1 + a - b,)), -y, tol).value
    return lhs, rhs


def split_3f2(alpha, beta, x, tol: float = 1e-15) -> tuple[complex, complex]:
    """Both sides of 3F2(2a, 2b, a+b; 2a+2b-1, a+b+1/2; x) = F(a,b;g;x) F(a,b;g-1;x)."""
    g = alpha + beta + 0.5
    lhs = pfq(HGSpec((2 * alpha, 2 * beta, alpha + beta), (2 * alpha + 2 * beta - 1, alpha + beta + 0.5)), x, tol).value
    rhs = hyp2f1(alpha, beta, g, x, tol) * hyp2f1(alpha, beta, g - 1, x, tol)
    return lhs, rhs


def contiguous_lower_gamma(alpha, beta, gamma, z, tol: float = 1e-15) -> complex:
    """F(a, b; g-1; z) = F(a, b; g; z) + z F'(a, b; g; z)/(g - 1)."""
    if _is_nonpositive_integer(gamma) is not None or gamma == 1:
        raise PoleInDenominator("gamma must avoid 0, -1, -2, ... and 1")
    F = hyp2f1(alpha, beta, gamma, z, tol)
    dF = hyp2f1_derivative(alpha, beta, gamma, z, tol)
    return F + z * dF / (gamma - 1)


def _fhat_coefficients(f: list, p: int, d, sign: int, ip) -> list:
    """Coefficients of Fhat in powers of y from those of F(a,b;c;.)."""
    n = len(f)
    out = []
    for k in range(n):
        cur = -(d + sign * ip + 2 * d * k) * f[k]
        if k > 0:
            cur = cur - d * (p + 1 - 2 * k) * f[k - 1]
        out.append(cur if k % 2 == 0 else -cur)
    return out


def _imag_unit(d):
    return QQ_I(0, 1) if _exact(d) else 1j


def _to_field(v, d):
    if _exact(d):
        v = Fraction(v)
        return QQ_I(QQ(v.numerator, v.denominator), 0)
    return v


def branch_hypergeometric_coefficients(p: int, d, sign: int) -> list:
    """Coefficients f_k of F(a, b; c; x) for the branch, up to the truncation."""
    p = _odd_positive(p)
    n = (p - 1) // 2
    dd = _to_field(d, d)
    ip = _imag_unit(d) * p
    a = _to_field(Fraction(2 - p, 2) if _exact(d) else (2 - p) / 2, d) + sign * ip / (2 * dd)
    b = _to_field(Fraction(1 - p, 2) if _exact(d) else (1 - p) / 2, d)
    c = 1 + a - b
    f = [QQ_I(1, 0) if _exact(d) else 1 + 0j]
    for k in range(n):
        f.append(f[-1] * (a + k) * (b + k) / ((c + k) * (k + 1)))
    return f


def fhat_polynomial(p: int, d, sign: int) -> list:
    p = _odd_positive(p)
    f = branch_hypergeometric_coefficients(p, d, sign)
    g = _fhat_coefficients(f + [0 * f[0]], p, _to_field(d, d), sign, _imag_unit(d) * p)
    if g[-1] and not (not _exact(d) and abs(g[-1]) < 1e-12 * max(abs(x) for x in g)):
        raise ArithmeticError("top coefficient of Fhat does not vanish")
    return g[:-1]


def f23_polynomials(p: int, d, branch: int) -> list:
    """Ascending coefficients of P(y) = F(a,b;c;-y) * Fhat(a,b;c;-y), degree p-1.

    Exact Gaussian rationals when d is rational.
    """
    p = _odd_positive(p)
    f = branch_hypergeometric_coefficients(p, d, branch)
    Fy = [v if k % 2 == 0 else -v for k, v in enumerate(f)]
    g = fhat_polynomial(p, d, branch)
    from .frobenius import poly_mul

    return poly_mul(Fy, g)


def kappa(p, d, sign: int) -> complex:
    return 2 * d / ((d + sign * 1j * p) * (3 * d + sign * 1j * p))


def f23(p: float, d: float, y: complex, branch: int, tol: float = 1e-15) -> complex:
    """The split representation of F2 (branch +1) or F3 (branch -1) in y = e^(2t)."""
    y = complex(y)
    for bad in (0, 1, -1):
        if abs(y - bad) < 1e-14:
            raise BranchPoint(f"y = {bad} is a branch point")
    if y.real <= 0 and y.imag == 0:
        raise BranchPoint("y on the cut (-inf, 0]")
    prm = suslov_params(p, d)
    a, b, c = prm.branch(branch)
    F = pfq(HGSpec((a, b), (c,)), -y, tol).value
    # d/dy of F(-y); skipped when a*b = 0 (the shifted series need not terminate)
    dF = 0j if a * b == 0 else -a * b / c * pfq(HGSpec((a + 1, b + 1), (c + 1,)), -y, tol).value
    Fh = (d * (p - 1) * y - d - branch * 1j * p) * F - 2 * d * y * (y + 1) * dF
    s = (d + branch * 1j * p) / (2 * d)
    return kappa(p, d, branch) / ((1 + y) ** (p - 1) * (y - 1)) * cmath.exp(s * cmath.log(y)) * F * Fh


def f23_from_polynomial(p: int, d: float, y: complex, branch: int) -> complex:
    y = complex(y)
    P = [complex(v) if not hasattr(v, "x") else complex(float(v.x), float(v.y)) for v in f23_polynomials(p, d, branch)]
    s = (d + branch * 1j * p) / (2 * d)
    return kappa(p, d, branch) / ((1 + y) ** (p - 1) * (y - 1)) * cmath.exp(s * cmath.log(y)) * poly_eval(P, y)


# ------------------------------------------------------------- third-order equations


def time_coefficients(w1, w2, p: float, d: float) -> tuple:
    """a0..a3 of the third-order equation for gamma1(t) along the special closed form."""
    D = d * d + 1
    a0 = D * p * p * w1
    a1 = d * p * (2 * D * w1 * w1 - w2 * w2)
    a2 = D * w1 * ((d * d + p * p) * w1 * w1 + p * p * w2 * w2)
    a3 = -d * p * w2 * w2 * (D * w1 * w1 + w2 * w2)
    return a0, a1, a2, a3


def z_coefficients(z, p: float, d: float) -> tuple:
    """b1..b3 of the same equation written in z."""
    b1 = 2 / z + 1 / (z - 1)
    b2 = (-p * p * (z - 1) + d * d * (1 + z * (-6 - p * p * (z - 1) + 4 * z))) / (4 * d * d * (z - 1) ** 2 * z * z)
    b3 = (d * d + 1) * p * p / (8 * d * d * (z - 1) ** 2 * z * z)
    return b1, b2, b3


def canonical_operator(prm: SuslovHGParams) -> list[list[complex]]:
    """Polynomial coefficients (a0, a1, a2, a3) of the canonical 3F2 operator in z."""
    al = [complex(a) for a in prm.alphas]
    b1, b2 = (complex(b) for b in prm.betas)
    e1 = sum(al)
    e2 = al[0] * al[1] + al[1] * al[2] + al[0] * al[2]
    e3 = al[0] * al[1] * al[2]
    return [[-e3], [b1 * b2, -(1 + e1 + e2)], [0, 1 + b1 + b2, -(3 + e1)], [0, 0, 1, -1]]


def canonical_residual(u: Sequence[complex], z: complex, prm: SuslovHGParams) -> complex:
    """Residual of the canonical equation given (u, u', u'', u''') at z."""
    ops = canonical_operator(prm)
    return sum(poly_eval(ops[k], z) * u[k] for k in range(4))


# ------------------------------------------------------------- monodromy


@dataclass(frozen=True)
class MonodromySigmas:
    sigma1: complex
    sigma2: complex
    sigma3: complex
    prefactor: complex  # multiplies (sigma1 F1 + sigma2 F2 + sigma3 F3)

    def limit_gamma1(self) -> float:
        return float((1 + self.prefactor * self.sigma1).real)


def _sin_pi(x) -> complex:
    x = complex(x)
    if x.imag == 0 and float(x.real).is_integer():
        return 0j
    return cmath.sin(math.pi * x)


def monodromy_sigmas(prm: SuslovHGParams) -> MonodromySigmas:
    a1, a2, a3 = prm.alphas
    b1, b2 = prm.betas
    den1 = _sin_pi(b1) * _sin_pi(b2)
    d12 = _sin_pi(b1 - b2)
    if abs(den1) < 1e-12 or abs(d12) < 1e-12:
        raise ResonantParameters("sin(pi b1), sin(pi b2) or sin(pi (b1 - b2)) vanishes")
    s1 = _sin_pi(a1) * _sin_pi(a2) * _sin_pi(a3) / den1
    s2 = -_sin_pi(b1 - a1) * _sin_pi(b1 - a2) * _sin_pi(b1 - a3) / (_sin_pi(b1) * d12)
    s3 = -_sin_pi(b2 - a1) * _sin_pi(b2 - a2) * _sin_pi(b2 - a3) / (_sin_pi(b2 - b1) * _sin_pi(b2))
    pref = -2j * cmath.exp(1j * math.pi * complex(b1 + b2 - a1 - a2 - a3))
    return MonodromySigmas(s1, s2, s3, pref)


# ------------------------------------------------------------- boundary solution

_NTERMS = 160
_Z_SWITCH = 0.5
_T_SWITCH = math.acosh(math.sqrt(2.0))  # sech^2 = 1/2


@dataclass(frozen=True)
class BoundaryConnection:
    """Series data for gamma1 of the solution with gamma1(-inf) = -1.

    Near z = 0 the basis F1, F2, F3 is used; near z = 1 (w = 1 - z) a local
    basis A0, A1 (exponent 0) and B (exponent -1/2). ``kappa`` expresses F1
    in the local basis; ``m`` expresses the continuation past t = 0 in the
    z = 0 basis, so lim gamma1(+inf) = m[0].
    """

    p: float
    d: float
    zero_basis: tuple  # ((exponent, coeffs) x 3)
    one_basis: tuple
    kappa: tuple
    m: tuple


def _basis_derivs(basis, x, nder):
    return [eval_series(c, e, x, nder) for e, c in basis]


@lru_cache(maxsize=256)
def boundary_connection(p: float, d: float) -> BoundaryConnection:
    prm = suslov_params(p, d)
    ops = canonical_operator(prm)
    close = lambda v: abs(v) < 1e-11  # noqa: E731
    op0 = LocalOperator(ops, close)
    b1, b2 = prm.betas
    zero = []
    for e in (0.0, 1 - b1, 1 - b2):
        fs = frobenius_series(op0, complex(e), _NTERMS)
        zero.append((complex(e), fs.coeffs))
    ops1 = [[(-1) ** k * v for v in reflect(taylor_shift(ops[k], 1.0))] for k in range(4)]
    op1 = LocalOperator(ops1, close)
    A0 = frobenius_series(op1, 0j, _NTERMS)
    A1 = frobenius_series(op1, 0j, _NTERMS, c0=0j, free={1: 1 + 0j})
    B = frobenius_series(op1, -0.5 + 0j, _NTERMS)
    if A0.logarithmic or B.logarithmic:
        raise ResonantParameters("logarithmic local solution at z = 1")
    one = ((0j, A0.coeffs), (0j, A1.coeffs), (-0.5 + 0j, B.coeffs))
    z0 = _Z_SWITCH
    w0 = 1 - z0
    Z = _basis_derivs(zero, z0, 2)
    W = _basis_derivs(one, w0, 2)
    # z-derivatives of the w-basis carry (-1)^r
    M1 = np.array([[W[j][r] * (-1) ** r for j in range(3)] for r in range(3)])
    M0 = np.array([[Z[j][r] for j in range(3)] for r in range(3)])
    kap = np.linalg.solve(M1, np.array([Z[0][r] for r in range(3)]))
    v = np.array([(kap[0] * W[0][r] + kap[1] * W[1][r] - kap[2] * W[2][r]) * (-1) ** r for r in range(3)])
    m = np.linalg.solve(M0, v)
    return BoundaryConnection(p, d, tuple(zero), one, tuple(complex(k) for k in kap), tuple(complex(x) for x in m))


def _poly_series(coeffs, x):
    s = 0j
    for c in reversed(coeffs):
        s = s * x + c
    return s


def gamma1_boundary(t: float, p: float, d: float) -> float:
    """gamma1(t) of the Poisson solution with gamma(-inf) = (-1, 0, 0).

    For t < 0 this is tanh(t) F1(z); the continuation through t = 0 uses the
    local basis at z = 1, and for large t the z = 0 basis again.
    """
    t = float(t)
    if p == 0:
        return -1.0
    bc = boundary_connection(float(p), float(d))
    th = math.tanh(t)
    if t <= -_T_SWITCH:
        z = 1.0 / math.cosh(t) ** 2
        return (th * _poly_series(bc.zero_basis[0][1], z)).real
    if t < _T_SWITCH:
        w = th * th
        k0, k1, kB = bc.kappa
        A = k0 * _poly_series(bc.one_basis[0][1], w) + k1 * _poly_series(bc.one_basis[1][1], w)
        return (th * A - kB * _poly_series(bc.one_basis[2][1], w)).real
    logz = log_z_of_t(t)
    z = math.exp(logz)
    v = 0j
    for mi, (e, c) in zip(bc.m, bc.zero_basis):
        v += mi * cmath.exp(e * logz) * _poly_series(c, z)
    return (th * v).real


def limit_from_connection(p: float, d: float) -> float:
    """lim gamma1(+inf) read off the numerically computed connection."""
    if p == 0:
        return -1.0
    return boundary_connection(float(p), float(d)).m[0].real
