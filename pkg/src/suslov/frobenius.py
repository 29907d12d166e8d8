"""Frobenius series at a regular singular point of a linear ODE with
polynomial coefficients.

The operator is sum_k a_k(x) y^(k) with each a_k given by its ascending
coefficient list. Arithmetic is generic: coefficients may be Python complex,
mpmath numbers or exact sympy domain elements (e.g. QQ_I), as long as they
mix with ints.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

Coeffs = Sequence[Any]


def poly_mul(p: Coeffs, q: Coeffs) -> list:
    if not p or not q:
        return []
    out = [0 * p[0]] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def poly_add(p: Coeffs, q: Coeffs) -> list:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def poly_scale(p: Coeffs, s) -> list:
    return [s * a for a in p]


def poly_pow(p: Coeffs, n: int) -> list:
    out: list = [1]
    for _ in range(n):
        out = poly_mul(out, p)
    return out


def poly_eval(p: Coeffs, x):
    acc = 0 * x
    for a in reversed(p):
        acc = acc * x + a
    return acc


def taylor_shift(coeffs: Coeffs, s) -> list:
    """Coefficients of P(s + x) in powers of x."""
    a = list(coeffs)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] = a[j] + s * a[j + 1]
    return a


def reflect(coeffs: Coeffs) -> list:
    """Coefficients of P(-x)."""
    return [a if i % 2 == 0 else -a for i, a in enumerate(coeffs)]


def falling(v, k: int):
    out = 1
    for i in range(k):
        out = out * (v - i)
    return out


@dataclass
class LocalOperator:
    """sum_k a_k(x) d^k/dx^k at x = 0; ``a[k]`` ascending coefficients."""

    a: list[list]
    is_zero: Callable[[Any], bool] = field(default=lambda v: not v)

    def __post_init__(self):
        self.order = len(self.a) - 1
        best = None
        for k, ak in enumerate(self.a):
            for i, v in enumerate(ak):
                if not self.is_zero(v):
                    best = i - k if best is None else min(best, i - k)
                    break
        if best is None:
            raise ValueError("zero operator")
        self.shift = best
        self.span = max(len(ak) - k for k, ak in enumerate(self.a)) - self.shift

    def coeff(self, k: int, i: int):
        ak = self.a[k]
        return ak[i] if 0 <= i < len(ak) else 0

    def indicial(self, rho):
        m = self.shift
        return sum((self.coeff(k, k + m) * falling(rho, k) for k in range(self.order + 1)), 0 * rho)

    def indicial_coefficients(self) -> list:
        """Ascending coefficients of the indicial polynomial in rho."""
        m = self.shift
        out: list = [0]
        for k in range(self.order + 1):
            ff: list = [1]
            for i in range(k):
                ff = poly_mul(ff, [-i, 1])
            out = poly_add(out, poly_scale(ff, self.coeff(k, k + m)))
        return out

    def is_regular_singular(self) -> bool:
        return not self.is_zero(self.coeff(self.order, self.order + self.shift))


@dataclass
class FrobeniusSeries:
    exponent: Any
    coeffs: list
    resonances: list = field(default_factory=list)  # (index, rhs, logarithmic)
    logarithmic: bool = False
    obstruction_index: int | None = None


def frobenius_series(
    op: LocalOperator,
    rho,
    nterms: int,
    c0=1,
    free: dict[int, Any] | None = None,
) -> FrobeniusSeries:
    """Coefficients c_0..c_{nterms-1} of sum c_j x^(j+rho).

    At a resonance (indicial root at rho + N) the compatibility of the right
    hand side is checked with ``op.is_zero``; a failure marks the series as
    logarithmic and c_N is set to zero so the recursion can continue.
    """
    free = free or {}
    m = op.shift
    n = op.order
    cs = [c0 * 1]
    res = FrobeniusSeries(rho, cs)
    span = op.span
    for N in range(1, nterms):
        acc = 0 * cs[0]
        for j in range(max(0, N - span), N):
            cj = cs[j]
            if op.is_zero(cj):
                continue
            tot = 0
            for k in range(n + 1):
                a = op.coeff(k, k + m + N - j)
                if a:
                    tot = tot + a * falling(rho + j, k)
            acc = acc + cj * tot
        rhs = -acc
        lead = op.indicial(rho + N)
        if op.is_zero(lead):
            ok = op.is_zero(rhs)
            res.resonances.append((N, rhs, not ok))
            if not ok and not res.logarithmic:
                res.logarithmic = True
                res.obstruction_index = N
            cs.append(free.get(N, 0 * cs[0]))
        else:
            cs.append(rhs / lead)
    return res


def eval_series(coeffs: Sequence[complex], rho: complex, x: complex, nder: int = 0, log_x: complex | None = None) -> list[complex]:
    """Value and first ``nder`` x-derivatives of sum c_j x^(j+rho) (principal power)."""
    if log_x is None:
        log_x = cmath.log(x)
    out = []
    for r in range(nder + 1):
        s = 0j
        xp = 1.0 + 0j
        for j, c in enumerate(coeffs):
            if c != 0:
                s += c * falling(j + rho, r) * xp
            xp *= x
        out.append(s * cmath.exp((rho - r) * log_x))
    return out
