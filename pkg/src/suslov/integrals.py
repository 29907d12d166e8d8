"""The extra polynomial first integral F3 = P1 g1 + P2 g2 + P3 g3 for odd p.

Coefficients live in an exact field when possible: the rational function
field QQ(d) for symbolic d, QQ for rational d; floats otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
import sympy as sp
from sympy.polys.domains import QQ

from .errors import DivisionObstruction, ValidationError
from .hyper import _odd_positive
from .model import BodyState

D_SYMBOL = sp.Symbol("d", positive=True)


@dataclass(frozen=True)
class Field:
    """Coefficient arithmetic for a given d."""

    kind: str  # "symbolic", "rational" or "float"
    d: Any
    K: Any = None

    def __call__(self, v):
        if self.kind == "float":
            return float(v)
        if isinstance(v, Fraction):
            return self.K.convert(QQ(v.numerator, v.denominator))
        return self.K.convert(v)

    @property
    def exact(self) -> bool:
        return self.kind != "float"

    def is_zero(self, v, scale: float = 1.0) -> bool:
        if self.exact:
            return not v
        return abs(v) <= 1e-10 * max(1.0, scale)

    def to_float(self, v, d_value: float | None = None) -> float:
        if self.kind == "float":
            return float(v)
        if self.kind == "rational":
            return float(self.K.to_sympy(v))
        expr = self.K.to_sympy(v)
        return float(expr.subs(D_SYMBOL, d_value))

    def to_sympy(self, v):
        return sp.Float(v) if self.kind == "float" else self.K.to_sympy(v)


def make_field(d) -> Field:
    if d is None or isinstance(d, sp.Symbol):
        K = QQ.frac_field(D_SYMBOL)
        return Field("symbolic", K.convert(D_SYMBOL), K)
    if isinstance(d, (int, Fraction, sp.Rational)) and not isinstance(d, bool):
        f = Fraction(int(sp.Rational(d).p), int(sp.Rational(d).q)) if isinstance(d, sp.Rational) else Fraction(d)
        if f <= 0:
            raise ValidationError("d must be positive")
        return Field("rational", QQ(f.numerator, f.denominator), QQ)
    d = float(d)
    if not d > 0:
        raise ValidationError("d must be positive")
    return Field("float", d)


@dataclass(frozen=True)
class HomogeneousPoly2:
    """sum_i c[i] w1^i w2^(n-i), homogeneous of degree n = len(c) - 1."""

    c: tuple
    field: Field

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @staticmethod
    def zero(n: int, F: Field) -> "HomogeneousPoly2":
        return HomogeneousPoly2(tuple(F(0) for _ in range(n + 1)), F)

    def coeff(self, i1: int, i2: int):
        """Coefficient of w1^i1 w2^i2."""
        if i1 + i2 != self.degree or i1 < 0 or i2 < 0:
            return self.field(0)
        return self.c[i1]

    def __add__(self, o: "HomogeneousPoly2") -> "HomogeneousPoly2":
        if o.degree != self.degree:
            raise ValidationError("degrees differ")
        return HomogeneousPoly2(tuple(a + b for a, b in zip(self.c, o.c)), self.field)

    def __sub__(self, o: "HomogeneousPoly2") -> "HomogeneousPoly2":
        return self + o.scale(self.field(-1))

    def scale(self, s) -> "HomogeneousPoly2":
        return HomogeneousPoly2(tuple(s * a for a in self.c), self.field)

    def mul_w1(self) -> "HomogeneousPoly2":
        return HomogeneousPoly2((self.field(0),) + self.c, self.field)

    def mul_w2(self) -> "HomogeneousPoly2":
        return HomogeneousPoly2(self.c + (self.field(0),), self.field)

    def div_w1(self) -> "HomogeneousPoly2":
        if not self.field.is_zero(self.c[0], self.scale_hint()):
            raise DivisionObstruction("polynomial is not divisible by w1")
        return HomogeneousPoly2(self.c[1:], self.field)

    def d_w1(self) -> "HomogeneousPoly2":
        n = self.degree
        if n == 0:
            return HomogeneousPoly2((), self.field)
        return HomogeneousPoly2(tuple(i * self.c[i] for i in range(1, n + 1)), self.field)

    def d_w2(self) -> "HomogeneousPoly2":
        n = self.degree
        if n == 0:
            return HomogeneousPoly2((), self.field)
        return HomogeneousPoly2(tuple((n - i) * self.c[i] for i in range(n)), self.field)

    def is_zero(self) -> bool:
        s = self.scale_hint()
        return all(self.field.is_zero(v, s) for v in self.c)

    def scale_hint(self) -> float:
        if self.field.exact or not self.c:
            return 1.0
        return max(abs(v) for v in self.c)

    @property
    def parity(self) -> tuple[int | None, int | None]:
        """(parity in w1, parity in w2): 0 even, 1 odd, None mixed."""
        nz = [i for i, v in enumerate(self.c) if not self.field.is_zero(v, self.scale_hint())]
        if not nz:
            return 0, 0
        p1 = {i % 2 for i in nz}
        p2 = {(self.degree - i) % 2 for i in nz}
        return (p1.pop() if len(p1) == 1 else None, p2.pop() if len(p2) == 1 else None)

    def evaluate(self, w1, w2, d_value: float | None = None):
        cf = [self.field.to_float(v, d_value) for v in self.c]
        n = self.degree
        w1 = np.asarray(w1, dtype=float)
        w2 = np.asarray(w2, dtype=float)
        return sum(c * w1**i * w2 ** (n - i) for i, c in enumerate(cf)) if cf else 0.0 * w1

    def to_sympy(self, w1, w2):
        n = self.degree
        return sp.Add(*[self.field.to_sympy(v) * w1**i * w2 ** (n - i) for i, v in enumerate(self.c)])

    def to_table(self) -> list[dict]:
        """Nonzero coefficients as {"w1": i, "w2": j, "coeff": str}."""
        s = self.scale_hint()
        return [
            {"w1": i, "w2": self.degree - i, "coeff": str(self.field.to_sympy(v))}
            for i, v in enumerate(self.c)
            if not self.field.is_zero(v, s)
        ]


def _L(P: HomogeneousPoly2, F: Field) -> HomogeneousPoly2:
    """(1/(d^2+1)) dP/dw1 * w2 - dP/dw2 * w1; degree preserved."""
    D = F.d * F.d + 1
    a = P.d_w1().mul_w2().scale(1 / D) if P.degree else HomogeneousPoly2.zero(0, F)
    b = P.d_w2().mul_w1() if P.degree else HomogeneousPoly2.zero(0, F)
    return a - b


def f1_coefficients_in(p: int, F: Field) -> list:
    """Coefficients of the terminating F1(z) in the field F (see hyper.f1_polynomial)."""
    p = _odd_positive(p)
    d2 = F.d * F.d
    out = [F(1)]
    for j in range(1, (p - 1) // 2 + 1):
        m = j - 1
        out.append(out[-1] * F(Fraction(2 * j - 1, 2 * j)) * (-d2) * (p * p - (2 * m + 1) ** 2) / ((2 * m + 1) ** 2 * d2 + p * p))
    return out


def q_polynomial(p: int, d=None) -> HomogeneousPoly2:
    """Q = F1^n * F1hyp(w2^2/F1), n = (p-1)/2, F1 = (d^2+1) w1^2 + w2^2; degree p - 1."""
    p = _odd_positive(p)
    F = make_field(d)
    n = (p - 1) // 2
    f = f1_coefficients_in(p, F)
    D = F.d * F.d + 1
    deg = p - 1
    c = [F(0)] * (deg + 1)
    # f_j w2^(2j) ((d^2+1) w1^2 + w2^2)^(n-j)
    for j, fj in enumerate(f):
        m = n - j
        for k in range(m + 1):
            # C(m,k) (D w1^2)^k (w2^2)^(m-k) * w2^(2j)
            i1 = 2 * k
            c[i1] = c[i1] + fj * math.comb(m, k) * D**k
    return HomogeneousPoly2(tuple(c), F)


@dataclass(frozen=True)
class ExtraIntegral:
    P1: HomogeneousPoly2
    P2: HomogeneousPoly2
    P3: HomogeneousPoly2
    p: int
    d: Any

    @property
    def field(self) -> Field:
        return self.P1.field

    def to_dict(self) -> dict:
        return {"p": self.p, "d": str(self.d), "P1": self.P1.to_table(), "P2": self.P2.to_table(), "P3": self.P3.to_table()}


def build_extra_integral(p: int, d=None) -> ExtraIntegral:
    """P1 = w1 Q, P3 = -(d/p) L(P1), P2 = (w2/w1)(P1 - (d/p) L(P3)).

    L(P) = (1/(d^2+1)) dP/dw1 w2 - dP/dw2 w1 is (p/d) times the derivative
    along the Euler flow; the division by w1 is exact.
    """
    p = _odd_positive(p)
    F = make_field(d)
    Q = q_polynomial(p, d)
    P1 = Q.mul_w1()
    k = F.d / p
    P3 = _L(P1, F).scale(-k)
    P2 = (P1 - _L(P3, F).scale(k)).mul_w2().div_w1()
    return ExtraIntegral(P1, P2, P3, p, d)


def verify_pde_system(E: ExtraIntegral) -> list[HomogeneousPoly2]:
    """Residuals of the three linear PDEs (all zero for a first integral)."""
    F = E.field
    k = F.d / E.p
    r1 = _L(E.P1, F).scale(k) + E.P3
    r2 = _L(E.P2, F).scale(k).mul_w2() - E.P3.mul_w1()
    r3 = _L(E.P3, F).scale(k).mul_w2() + E.P2.mul_w1() - E.P1.mul_w2()
    return [r1, r2, r3]


def f3_evaluate(E: ExtraIntegral, x: BodyState | Sequence[float] | np.ndarray, d_value: float | None = None):
    """P1 g1 + P2 g2 + P3 g3; ``x`` is a state or an (..., 5) array."""
    if isinstance(x, BodyState):
        x = x.as_array()
    x = np.asarray(x, dtype=float)
    w1, w2, g1, g2, g3 = (x[..., i] for i in range(5))
    if d_value is None and E.field.kind == "symbolic":
        raise ValidationError("numeric d needed to evaluate a symbolic integral")
    return E.P1.evaluate(w1, w2, d_value) * g1 + E.P2.evaluate(w1, w2, d_value) * g2 + E.P3.evaluate(w1, w2, d_value) * g3


def f3_time_derivative(E: ExtraIntegral):
    """dF3/dt along the Euler-Poisson vector field, expanded with sympy."""
    w1, w2, g1, g2, g3 = sp.symbols("w1 w2 g1 g2 g3")
    F = E.field
    d = F.to_sympy(F.d)
    p = E.p
    F3 = E.P1.to_sympy(w1, w2) * g1 + E.P2.to_sympy(w1, w2) * g2 + E.P3.to_sympy(w1, w2) * g3
    field = {
        w1: d / (p * (d**2 + 1)) * w2**2,
        w2: -(d / p) * w1 * w2,
        g1: -w2 * g3,
        g2: w1 * g3,
        g3: w2 * g1 - w1 * g2,
    }
    expr = sum(sp.diff(F3, v) * rhs for v, rhs in field.items())
    return sp.expand(sp.cancel(sp.together(expr)))


def jacobian_rank(E: ExtraIntegral, states: np.ndarray, d_value: float, h: float = 1e-6, threshold: float = 1e-8) -> list[int]:
    """Numeric rank of d(F1, F2, F3)/dx at each state (central differences)."""
    D = d_value**2 + 1

    def funcs(x):
        return np.array([D * x[0] ** 2 + x[1] ** 2, x[2] ** 2 + x[3] ** 2 + x[4] ** 2, float(f3_evaluate(E, x, d_value))])

    ranks = []
    for x in np.atleast_2d(states):
        J = np.empty((3, 5))
        for j in range(5):
            e = np.zeros(5)
            e[j] = h
            J[:, j] = (funcs(x + e) - funcs(x - e)) / (2 * h)
        s = np.linalg.svd(J, compute_uv=False)
        ranks.append(int(np.sum(s > threshold * max(1.0, s[0]))))
    return ranks


# ------------------------------------------------------------- third-order equation


def _syfint_q(w, d, p):
    D = 1 + d**2
    q1 = 1 / w - 3 * (p - 2) * w / (D + w**2)
    q2 = (d**2 * w**2 * (-D * (5 * p - 4) + (p - 1) * (3 * p - 8) * w**2) + D**2 * (1 + w**2) * p**2) / (d**2 * w**2 * (D + w**2) ** 2)
    q3 = -(d**2 * p * (D**2 - 4 * D * (p - 1) * w**2 + (3 + (p - 4) * p) * w**4) - D**2 * (d**2 - (p - 1) * (1 + w**2)) * p**2) / (
        d**2 * w * (D + w**2) ** 3
    )
    return q1, q2, q3


def _z_b(z, d, p):
    b1 = 2 / z + (2 + 3 * p) / (2 * (z - 1))
    b2 = (d**2 * (1 + (p**2 - 6 - 8 * p) * z + (4 + 3 * p * (2 + p) - p**2) * z**2) - p**2 * (z - 1)) / (4 * d**2 * (z - 1) ** 2 * z**2)
    b3 = (p**2 * (-1 + p + z - p * z) + d**2 * (p**2 * (z - 1) - 4 * p**2 * z + p**3 * z**2 + p * (1 + (2 - p**2 * (z - 1)) * z))) / (
        8 * d**2 * (z - 1) ** 3 * z**2
    )
    return b1, b2, b3


@dataclass(frozen=True)
class ThirdOrderCheck:
    p: int
    residual: Any  # sympy expression, 0 when the equation holds identically
    v_coefficients: list  # ascending in z
    f1_coefficients: list
    ratio: Any  # v = ratio * F1hyp when proportional, else None
    z_equation_residual: Any

    @property
    def passed(self) -> bool:
        return self.residual == 0 and self.ratio is not None


def third_order_ode_check(p: int, d=None) -> ThirdOrderCheck:
    """Substitute the dehomogenized P1 into the third-order equation for p1(w).

    Also rewrites p1 in z = w^2/(w^2+d^2+1), strips (z-1)^((1-p)/2) to get
    v(z), and compares v with the terminating F1 coefficients.
    """
    p = _odd_positive(p)
    F = make_field(d)
    w, z = sp.symbols("w z")
    ds = F.to_sympy(F.d)
    P1 = build_extra_integral(p, d).P1
    p1 = P1.to_sympy(sp.Integer(1), w)
    q1, q2, q3 = _syfint_q(w, ds, p)
    expr = sp.diff(p1, w, 3) + q1 * sp.diff(p1, w, 2) + q2 * sp.diff(p1, w) + q3 * p1
    residual = sp.simplify(sp.cancel(sp.together(expr)))
    # w^2 = (d^2+1) z/(1-z); p1 is even in w
    n = (p - 1) // 2
    pw = sp.Poly(p1, w)
    D = ds**2 + 1
    v = sp.Integer(0)
    for (k,), c in pw.terms():
        j = k // 2
        v += c * D**j * z**j * (1 - z) ** (n - j)
    v = sp.expand((-1) ** n * v)
    vc = sp.Poly(v, z).all_coeffs()[::-1]
    fc = [F.to_sympy(x) for x in f1_coefficients_in(p, F)]
    ratio = sp.cancel(vc[0] / fc[0]) if vc and fc[0] != 0 else None
    if ratio is not None and (len(vc) != len(fc) or any(sp.cancel(a - ratio * b) != 0 for a, b in zip(vc, fc))):
        ratio = None
    # the same function in z, through the z-form of the equation (b1..b3)
    pz = (z - 1) ** sp.Rational(1 - p, 2) * v
    b1, b2, b3 = _z_b(z, ds, p)
    zexpr = sp.diff(pz, z, 3) + b1 * sp.diff(pz, z, 2) + b2 * sp.diff(pz, z) + b3 * pz
    zres = sp.simplify(sp.cancel(sp.together(zexpr / (z - 1) ** sp.Rational(1 - p, 2))))
    return ThirdOrderCheck(p, residual, vc, fc, ratio, zres)
