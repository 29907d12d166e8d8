"""Explicit meromorphic solutions of the Poisson equations for odd p.

Every component is stored as a quasi-rational function of x = e^t,

    e^(mu t) * N(x) / (1 + x^2)^m,

which is closed under d/dt, so derivatives are exact and the completion
gamma1 -> (gamma1, gamma2, gamma3) needs no finite differences.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import PoleHit, UnsupportedP, ValidationError
from .hyper import _odd_positive, f1_polynomial, f23_polynomials


def _to_complex(v) -> complex:
    if hasattr(v, "x") and hasattr(v, "y"):  # QQ_I element
        return complex(float(v.x), float(v.y))
    return complex(v)


# ------------------------------------------------------------- quasi-rational functions


@dataclass(frozen=True)
class QuasiRational:
    """exp(mu*t) * N(e^t) / (1 + e^(2t))^m with ascending complex coefficients N."""

    mu: complex
    N: tuple
    m: int

    @staticmethod
    def make(mu, N, m) -> "QuasiRational":
        N = np.trim_zeros(np.asarray(N, dtype=complex), "b")
        return QuasiRational(complex(mu), tuple(N if len(N) else [0j]), int(m))

    @property
    def coeffs(self) -> np.ndarray:
        return np.asarray(self.N, dtype=complex)

    def derivative(self) -> "QuasiRational":
        # d/dt = x d/dx on N, and (1+x^2)^-m contributes -2m x^2/(1+x^2)
        N = self.coeffs
        xNp = npoly.polymulx(npoly.polyder(N)) if len(N) > 1 else np.zeros(1, complex)
        top = npoly.polyadd(self.mu * N, xNp)
        out = npoly.polysub(npoly.polymul(top, [1, 0, 1]), 2 * self.m * npoly.polymulx(npoly.polymulx(N)))
        return QuasiRational.make(self.mu, out, self.m + 1)

    def scale(self, s) -> "QuasiRational":
        return QuasiRational.make(self.mu, complex(s) * self.coeffs, self.m)

    def shift_mu(self, k: int) -> "QuasiRational":
        """Multiply by x^k, k >= 0 folded into N, k < 0 folded into mu."""
        if k >= 0:
            return QuasiRational.make(self.mu, np.concatenate([np.zeros(k, complex), self.coeffs]), self.m)
        return QuasiRational.make(self.mu + k, self.coeffs, self.m)

    def raise_m(self, k: int) -> "QuasiRational":
        N = self.coeffs
        for _ in range(k):
            N = npoly.polymul(N, [1, 0, 1])
        return QuasiRational.make(self.mu, N, self.m + k)

    def __add__(self, other: "QuasiRational") -> "QuasiRational":
        a, b = self, other
        dmu = b.mu - a.mu
        k = round(dmu.real)
        if abs(dmu - k) > 1e-12:
            raise ValidationError("exponential rates differ by a non-integer")
        if k > 0:
            b = QuasiRational.make(a.mu, np.concatenate([np.zeros(k, complex), b.coeffs]), b.m)
        elif k < 0:
            a = QuasiRational.make(b.mu, np.concatenate([np.zeros(-k, complex), a.coeffs]), a.m)
        m = max(a.m, b.m)
        a, b = a.raise_m(m - a.m), b.raise_m(m - b.m)
        return QuasiRational.make(a.mu, npoly.polyadd(a.coeffs, b.coeffs), m)

    def __neg__(self) -> "QuasiRational":
        return self.scale(-1)

    def __sub__(self, other: "QuasiRational") -> "QuasiRational":
        return self + (-other)

    def divide(self, divisor: Sequence[complex], rtol: float = 1e-9) -> "QuasiRational":
        """Exact polynomial division of N; the remainder must vanish."""
        N = self.coeffs
        D = np.trim_zeros(np.asarray(divisor, dtype=complex), "b")
        q, r = npoly.polydiv(N, D)
        scale = max(1.0, float(np.abs(N).max()))
        if len(r) and float(np.abs(r).max()) > rtol * scale:
            raise ArithmeticError(f"non-exact division, remainder {np.abs(r).max():.3e}")
        if D[0] != 0 and len(q) > 1:
            # long division from the top smears rounding into the low
            # coefficients, which dominate as t -> -inf; redo the low half
            # as a power-series division so exact zeros stay exact
            low = np.zeros(len(q), complex)
            for k in range(len(q)):
                acc = N[k] - sum(D[j] * low[k - j] for j in range(1, min(k, len(D) - 1) + 1))
                low[k] = acc / D[0]
            half = len(q) // 2
            q = np.concatenate([low[:half], q[half:]])
        return QuasiRational.make(self.mu, q, self.m)

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        N = self.coeffs
        deg = len(N) - 1
        pos = t.real > 0
        # for Re t > 0 rewrite in e^-t to keep every power bounded
        u = np.exp(np.where(pos, -t, t))
        direct = npoly.polyval(u, N) / (1 + u * u) ** self.m
        rev = npoly.polyval(u, N[::-1]) / (1 + u * u) ** self.m * u ** (2 * self.m - deg)
        val = np.where(pos, rev, direct) * np.exp(self.mu * t)
        return val[()] if val.ndim == 0 else val


def _check_pole(t) -> None:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    k = np.round((t.imag - math.pi / 2) / math.pi)
    dist = np.abs(t - 1j * (math.pi / 2 + k * math.pi))
    if np.any(dist < 1e-12):
        raise PoleHit("t is a pole (i pi/2 mod i pi)")


# ------------------------------------------------------------- gamma1 forms


class FormKind(str, enum.Enum):
    Symmetric = "Symmetric"
    RotatingPlus = "Rotating+"
    RotatingMinus = "Rotating-"


@dataclass(frozen=True)
class Gamma1Form:
    kind: FormKind
    coefficients: tuple
    p: int
    d: object

    @property
    def sign(self) -> int:
        return {FormKind.Symmetric: 0, FormKind.RotatingPlus: 1, FormKind.RotatingMinus: -1}[self.kind]

    def quasi_rational(self) -> QuasiRational:
        p = self.p
        coeffs = [_to_complex(v) for v in self.coefficients]
        if self.kind is FormKind.Symmetric:
            # (x^2 - 1)(1 + x^2)^(p-1) * sum a_k (x^2/(1+x^2)^2)^k
            acc = np.zeros(1, complex)
            for k, a in enumerate(coeffs):
                term = np.zeros(2 * k + 1, complex)
                term[-1] = a
                term = npoly.polymul(term, npoly.polypow([1, 0, 1], p - 1 - 2 * k))
                acc = npoly.polyadd(acc, term)
            return QuasiRational.make(0, npoly.polymul([-1, 0, 1], acc), p)
        # x * P(x^2) with phase e^(sign*i*p*t/d)
        N = np.zeros(2 * len(coeffs), complex)
        N[1::2] = coeffs
        return QuasiRational.make(self.sign * 1j * p / float(self.d), N, p)


def ak_coefficients(p: int, d) -> list:
    """a_k with gamma1 = (x^2-1)/(x^2+1) * sum a_k x^(2k)/(1+x^2)^(2k); a_k = 4^k f_k."""
    return [4**k * v for k, v in enumerate(f1_polynomial(p, d))]


def bk_coefficients(p: int, d, sign: int = 1) -> list:
    """Coefficients in y = e^(2t) of the degree p-1 product polynomial of the rotating form."""
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    return f23_polynomials(p, d, sign)


def gamma1_form(p: int, d, kind: FormKind | str = FormKind.Symmetric) -> Gamma1Form:
    kind = FormKind(kind)
    p = _odd_positive(p)
    if kind is FormKind.Symmetric:
        return Gamma1Form(kind, tuple(ak_coefficients(p, d)), p, d)
    sign = 1 if kind is FormKind.RotatingPlus else -1
    return Gamma1Form(kind, tuple(bk_coefficients(p, d, sign)), p, d)


def gamma1_eval(form: Gamma1Form, t):
    _check_pole(t)
    return form.quasi_rational()(t)


# ------------------------------------------------------------- completion


@dataclass(frozen=True)
class CompletedSolution:
    """A complex solution of the Poisson equations as three quasi-rational components."""

    components: tuple[QuasiRational, QuasiRational, QuasiRational]

    def __call__(self, t) -> np.ndarray:
        return np.array([c(t) for c in self.components])

    def derivative(self, t) -> np.ndarray:
        return np.array([c.derivative()(t) for c in self.components])


def complete_gamma(gamma1: QuasiRational, p: float, d: float) -> CompletedSolution:
    """gamma3 = -gamma1'/omega2 and gamma2 = (omega2 gamma1 - gamma3')/omega1 along
    omega = (a tanh t, -a c sech t), a = p/d, c = sqrt(d^2+1).

    The division by omega1 is carried out as exact polynomial division by x^2 - 1,
    so t = 0 needs no separate limit.
    """
    a = p / d
    c = math.sqrt(d * d + 1)
    g1d = gamma1.derivative()
    # -1/omega2 = (1 + x^2)/(2 a c x)
    g3 = QuasiRational.make(g1d.mu - 1, g1d.coeffs / (2 * a * c), g1d.m - 1)
    # omega2 * gamma1 = -2 a c x gamma1/(1+x^2)
    w2g1 = QuasiRational.make(gamma1.mu + 1, -2 * a * c * gamma1.coeffs, gamma1.m + 1)
    num = w2g1 - g3.derivative()
    # 1/omega1 = (1 + x^2)/(a (x^2 - 1))
    g2 = QuasiRational.make(num.mu, num.coeffs / a, num.m - 1).divide([-1, 0, 1])
    return CompletedSolution((gamma1, g2, g3))


def poisson_residual(sol: Callable, dsol: Callable, t, p: float, d: float) -> float:
    """max |gamma' - gamma x omega| over the sample times (omega3 = 0)."""
    from .closed_form import omega_special

    t = np.asarray(t, dtype=float)
    w1, w2 = omega_special(t, p / d, math.sqrt(d * d + 1))
    g = sol(t)
    dg = dsol(t)
    rhs = np.array([-w2 * g[2], w1 * g[2], w2 * g[0] - w1 * g[1]])
    return float(np.abs(dg - rhs).max())


@dataclass(frozen=True)
class SolutionTriple:
    """Three real solutions gamma^(1), gamma^(2), gamma^(3), each a 3-vector of t."""

    p: int
    d: float
    branch: int
    symmetric: CompletedSolution
    rotating: CompletedSolution
    lam: complex

    def __call__(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        z = self.lam * self.rotating(t)
        return np.real(self.symmetric(t)), np.real(z), np.imag(z)

    def derivative(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        z = self.lam * self.rotating.derivative(t)
        return np.real(self.symmetric.derivative(t)), np.real(z), np.imag(z)

    @property
    def handedness(self) -> int:
        return 1 if np.linalg.det(np.array(self(0.0))) > 0 else -1


def solution_triple(p: int, d: float, branch: int = 1) -> SolutionTriple:
    """Orthonormal real triple from the Symmetric form and one rotating form.

    gamma^(2) = Re(lam*Gamma) and gamma^(3) = Im(lam*Gamma), where Gamma is the
    completed Rotating+ (branch 1) or Rotating- (branch -1) solution and lam
    fixes gamma^(2)(0) = e1. Branch 1 gives a right-handed triple, branch -1
    its mirror.
    """
    p = _odd_positive(p)
    d = float(d)
    if not d > 0:
        raise ValidationError("d must be positive")
    if branch not in (1, -1):
        raise ValidationError("branch must be +1 or -1")
    kind = FormKind.RotatingPlus if branch == 1 else FormKind.RotatingMinus
    sym = complete_gamma(gamma1_form(p, d).quasi_rational(), p, d)
    rot = complete_gamma(gamma1_form(p, d, kind).quasi_rational(), p, d)
    G0 = rot(0.0)
    if abs(G0[0]) < 1e-300:
        raise ArithmeticError("rotating solution has gamma1(0) = 0")
    # Gamma is isotropic, so Re and Im parts are orthogonal with equal norms
    half = math.sqrt(float(np.real(np.vdot(G0, G0))) / 2)
    lam = np.conj(G0[0]) / abs(G0[0]) / half
    return SolutionTriple(p, d, branch, sym, rot, complex(lam))


# ------------------------------------------------------------- closed-form fixtures


def _sech(t):
    e = np.exp(-np.abs(t))
    return 2 * e / (1 + e * e)


def _fixture1(t, d):
    s = math.sqrt(1 + d * d)
    T = t / d
    th, sh = np.tanh(t), _sech(t)
    c, si = np.cos(T), np.sin(T)
    g1 = np.array([th, -sh / s, d * sh / s])
    g2 = np.array([c * sh, (c * th - d * si) / s, -(d * c * th + si) / s])
    g3 = np.array([si * sh, (si * th + d * c) / s, -(d * si * th - c) / s])
    return g1, g2, g3


def _fixture3(t, d):
    # plain transcription; finite for |t| below about 100
    d2 = d * d
    al = 1 / (math.sqrt(d2 + 1) * (d2 + 9))
    th, sh = np.tanh(t), _sech(t)
    g1 = al * np.array([
        math.sqrt(d2 + 1) * (9 + d2 - 4 * d2 * sh**2) * th,
        (4 * d2 * sh**2 - 9 * (d2 + 1)) * sh,
        d * (3 * (d2 + 1) - 4 * d2 * sh**2) * sh,
    ])
    E = np.exp(2 * t)
    T = 3 * t / d
    c, s = np.cos(T), np.sin(T)
    ch2, sh1, ch1 = np.cosh(2 * t), np.sinh(t), np.cosh(t)
    w1 = np.exp(t) / (E + 1) ** 3
    w3 = np.exp(3 * t) / (E + 1) ** 3
    A = d2 * (3 - 10 * E + 3 * E * E) - 9 * (1 + E) ** 2
    B = 12 * d * (E * E - 1)
    g2 = al * np.array([
        -2 * math.sqrt(d2 + 1) * w1 * (A * c + B * s),
        4 * w3 * (d * ((d2 - 15) * ch2 + 9 + d2) * ch1 * s + ((9 - 7 * d2) * ch2 + 9 + d2) * sh1 * c),
        4 * w3 * (((7 * d2 - 9) * ch2 - 9 - 17 * d2) * ch1 * s + d * ((d2 - 15) * ch2 - 15 - 7 * d2) * sh1 * c),
    ])
    g3 = al * np.array([
        2 * math.sqrt(d2 + 1) * w1 * (A * s - B * c),
        4 * w3 * (d * ((d2 - 15) * ch2 + 9 + d2) * ch1 * c + ((7 * d2 - 9) * ch2 - 9 - d2) * sh1 * s),
        -4 * w3 * (((9 - 7 * d2) * ch2 + 9 + 17 * d2) * ch1 * c + d * ((d2 - 15) * ch2 - 15 - 7 * d2) * sh1 * s),
    ])
    return g1, g2, g3


def fixture(p: int, d: float, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The closed-form real triples for p = 1 and p = 3 in trigonometric/hyperbolic form."""
    if p == 1:
        return _fixture1(np.asarray(t, dtype=float), float(d))
    if p == 3:
        return _fixture3(np.asarray(t, dtype=float), float(d))
    raise UnsupportedP(f"closed-form fixtures exist for p = 1 and p = 3 only, got {p}")


def gram_matrix(solutions: Sequence, t=None) -> np.ndarray:
    """Inner products <gamma^(i), gamma^(j)>; ``solutions`` are vectors or callables of t."""
    vecs = [np.asarray(s(t) if callable(s) else s, dtype=float) for s in solutions]
    n = len(vecs)
    return np.array([[float(np.dot(vecs[i], vecs[j])) for j in range(n)] for i in range(n)])


# ------------------------------------------------------------- asymptotic phases


def _rotation_angle(block: np.ndarray) -> float:
    return math.atan2(block[1, 0] - block[0, 1], block[0, 0] + block[1, 1])


def phase_shift(triple_at: Callable[[float], Sequence[np.ndarray]], p: float, d: float, T: float = 40.0) -> float:
    """Angle between the limiting spatial rotations at t -> -inf and t -> +inf.

    Rows gamma^(i) form the rotation matrix R(t). Near +inf its lower block
    is Rot(a t + psi+); near -inf it is Rot(a t + psi-) after undoing the
    constant half-turn about the body axis e3 (first column of the block
    negated). Returns arccos(cos(psi+ - psi-)) in [0, pi].
    """
    a = p / d
    Rp = np.array(triple_at(T))
    Rm = np.array(triple_at(-T))
    psi_p = _rotation_angle(Rp[1:, 1:]) - a * T
    Bm = Rm[1:, 1:] * np.array([-1.0, 1.0])
    psi_m = _rotation_angle(Bm) + a * T
    return math.acos(max(-1.0, min(1.0, math.cos(psi_p - psi_m))))
