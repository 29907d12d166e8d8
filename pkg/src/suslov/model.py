"""Inertia data, derived dynamical parameters, the swap symmetry and the
meromorphicity classifier for the Suslov problem with constraint vector e3."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import mpmath
import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateAxis, DegenerateBalance, InvalidShape, ValidationError

INTEGER_TOL = 1e-9
DET_TOL = 1e-12
_KEYS = ("I11", "I22", "I33", "I13", "I23")


@dataclass(frozen=True)
class InertiaTensor:
    """Symmetric inertia tensor with I12 = 0.

    ``rescaling`` records the uniform factor applied to reach det = 1 (1.0 when
    the tensor was given already normalized or was never normalized).
    """

    I11: float
    I22: float
    I33: float
    I13: float = 0.0
    I23: float = 0.0
    rescaling: float = field(default=1.0, compare=False)

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.I11, 0.0, self.I13], [0.0, self.I22, self.I23], [self.I13, self.I23, self.I33]]
        )

    def det(self) -> float:
        return self.I11 * (self.I22 * self.I33 - self.I23**2) - self.I13**2 * self.I22

    def normalized(self) -> InertiaTensor:
        """Uniformly rescaled copy with det = 1."""
        det = self.det()
        if not det > 0:
            raise ValidationError(f"cannot normalize a tensor with det = {det!r}")
        s = det ** (-1.0 / 3.0)
        return InertiaTensor(
            self.I11 * s, self.I22 * s, self.I33 * s, self.I13 * s, self.I23 * s,
            rescaling=self.rescaling * s,
        )

    def to_dict(self) -> dict[str, float]:
        return {k: float(getattr(self, k)) for k in _KEYS}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> InertiaTensor:
        if not isinstance(data, Mapping):
            raise ValidationError("tensor must be a JSON object")
        missing = [k for k in ("I11", "I22", "I33") if k not in data]
        if missing:
            raise ValidationError(f"missing tensor entries: {', '.join(missing)}")
        unknown = sorted(set(data) - set(_KEYS))
        if unknown:
            raise ValidationError(f"unknown tensor entries: {', '.join(unknown)}")
        vals = {}
        for k in _KEYS:
            v = data.get(k, 0.0)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"{k} must be a finite number")
            vals[k] = float(v)
        return cls(**vals)


@dataclass(frozen=True)
class InertiaDiagnostics:
    passed: bool
    violations: tuple[str, ...]
    det_deviation: float
    physical: bool  # principal moments satisfy the triangle inequalities


def validate_inertia(I: InertiaTensor) -> InertiaDiagnostics:
    violations = []
    if not I.I11 > 0:
        violations.append("I11 > 0")
    if not I.I22 > 0:
        violations.append("I22 > 0")
    if not I.I11 * (I.I22 * I.I33 - I.I23**2) - I.I13**2 * I.I22 > 0:
        violations.append("I11*(I22*I33 - I23^2) - I13^2*I22 > 0")
    dev = abs(I.det() - 1.0)
    if not dev <= DET_TOL:
        violations.append("det = 1")
    physical = False
    if not violations or violations == ["det = 1"]:
        lam = np.linalg.eigvalsh(I.matrix())
        physical = bool(np.all(lam > 0) and lam[2] <= lam[0] + lam[1])
    return InertiaDiagnostics(not violations, tuple(violations), dev, physical)


def _positive_definite(I: InertiaTensor) -> bool:
    d = validate_inertia(I)
    return all(v == "det = 1" for v in d.violations)


def _prepared(I: InertiaTensor) -> InertiaTensor:
    if not _positive_definite(I):
        raise ValidationError(f"tensor is not positive definite: {validate_inertia(I).violations}")
    if abs(I.det() - 1.0) > DET_TOL:
        return I.normalized()
    return I


@dataclass(frozen=True)
class BodyState:
    omega1: float
    omega2: float
    gamma1: float
    gamma2: float
    gamma3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.omega1, self.omega2, self.gamma1, self.gamma2, self.gamma3], dtype=float)

    @classmethod
    def from_array(cls, x) -> BodyState:
        return cls(*(float(v) for v in x))


@dataclass(frozen=True)
class SuslovParams:
    """Parameters of the heteroclinic closed form.

    ``c``, ``d`` and ``p`` are only defined in the special case I13 = 0 with
    I11 > I22; otherwise they are ``None``.
    """

    a: float
    b: float
    c1: float
    c2: float
    sign_branch: int = -1
    c: float | None = None
    d: float | None = None
    p: float | None = None
    inertia: InertiaTensor | None = None

    @classmethod
    def special(cls, p: float, d: float, sign_branch: int = -1) -> SuslovParams:
        """Special case I13 = 0 parameterized by (p, d), with a = p/d."""
        if not d > 0:
            raise ValidationError("d must be positive")
        a = p / d
        c = math.sqrt(d * d + 1.0)
        return cls(a=a, b=0.0, c1=0.0, c2=2.0 * sign_branch * c * a, sign_branch=sign_branch, c=c, d=d, p=p)


def params_from_inertia(I: InertiaTensor, sign_branch: int | None = None) -> SuslovParams:
    """Closed-form parameters for a positive definite tensor (normalized on the fly).

    By default the branch with c2 < 0 is taken (c2 = 0 when I23 = 0, then -1).
    """
    I = _prepared(I)
    if I.I13 == 0.0 and I.I23 == 0.0:
        raise DegenerateAxis("I13 = I23 = 0: the constraint vector is a principal axis, all motions are equilibria")
    S = I.I13**2 * I.I22 + I.I23**2 * I.I11
    a = I.I23 / S
    b = -I.I13 / S
    c1u = 2.0 * I.I13 / S * math.sqrt(I.I22 / I.I11)
    c2u = 2.0 * I.I23 / S * math.sqrt(I.I11 / I.I22)
    if sign_branch is None:
        sign_branch = -1 if c2u >= 0 else 1
    if sign_branch not in (1, -1):
        raise ValidationError("sign_branch must be +1 or -1")
    c = d = p = None
    if I.I13 == 0.0:
        if math.isclose(I.I11, I.I22, rel_tol=1e-12):
            raise DegenerateBalance("I11 = I22 with I13 = 0 gives d = 0")
        c = math.sqrt(I.I11 / I.I22)
        if c > 1.0:
            d = math.sqrt(c * c - 1.0)
            a_sp = (I.I22 * I.I33 - I.I23**2) / I.I23
            p = d * a_sp
    return SuslovParams(a, b, sign_branch * c1u, sign_branch * c2u, sign_branch, c, d, p, I)


def inertia_from_p(p: float, I11: float, I22: float, I33: float, branch: int = -1) -> InertiaTensor:
    """Tensor with I13 = 0 whose special-case parameter equals ``p``.

    The shape (I11, I22, I33) is rescaled uniformly by a factor s chosen so the
    completed tensor has det = 1; s is stored in ``rescaling``. The plus branch
    gives I22*I33 - I23^2 < 0, so it is returned un-normalized (s = 1).
    """
    if not (p > 0 and I11 > I22 > 0 and I33 + I22 > I11):
        raise InvalidShape("need p > 0, I11 > I22 > 0 and I33 + I22 > I11")
    if branch not in (1, -1):
        raise ValidationError("branch must be +1 or -1")

    def x_of(s: float) -> float:
        i11, i22, i33 = s * I11, s * I22, s * I33
        k = i11 - i22
        return i22 / (2 * k) * (p * p + 2 * i33 * k + branch * p * math.sqrt(p * p + 4 * i33 * k))

    def log_det(u: float) -> float:
        s = math.exp(u)
        return math.log(s * I11 * (s * s * I22 * I33 - x_of(s)))

    if branch == 1:
        X = x_of(1.0)
        return InertiaTensor(I11, I22, I33, 0.0, math.sqrt(X))
    lo, hi = -1.0, 1.0
    while log_det(lo) > 0:
        lo *= 2
    while log_det(hi) < 0:
        hi *= 2
    u = brentq(log_det, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    s = math.exp(u)
    return InertiaTensor(s * I11, s * I22, s * I33, 0.0, math.sqrt(x_of(s)), rescaling=s)


def apply_swap_symmetry(x):
    """(w1, w2) -> (-w2, -w1), (g1, g2, g3) -> (g2, g1, g3); I11 <-> I22, I13 <-> I23."""
    if isinstance(x, BodyState):
        return BodyState(-x.omega2, -x.omega1, x.gamma2, x.gamma1, x.gamma3)
    if isinstance(x, InertiaTensor):
        return replace(x, I11=x.I22, I22=x.I11, I13=x.I23, I23=x.I13)
    raise TypeError(f"cannot apply the swap symmetry to {type(x).__name__}")


class Case(str, enum.Enum):
    Case1_I13zero = "Case1_I13zero"
    Case2_I23zero = "Case2_I23zero"
    NonMeromorphic = "NonMeromorphic"
    Degenerate_I11eqI22 = "Degenerate_I11eqI22"
    Degenerate_Axis = "Degenerate_Axis"


@dataclass(frozen=True)
class MeromorphicityVerdict:
    case: Case
    p_value: float
    p_is_integer: bool
    p_parity: str  # "odd", "even" or "none"
    p_squared: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "case": self.case.value,
            "p": None if math.isnan(self.p_value) else self.p_value,
            "p_squared": self.p_squared,
            "p_is_integer": self.p_is_integer,
            "p_parity": self.p_parity,
        }


def _normalized_mp(I: InertiaTensor):
    with mpmath.workdps(60):
        v = [mpmath.mpf(getattr(I, k)) for k in _KEYS]
        i11, i22, i33, i13, i23 = v
        det = i11 * (i22 * i33 - i23**2) - i13**2 * i22
        s = det ** (mpmath.mpf(-1) / 3)
        return [x * s for x in v]


def _p_squared_mp(I: InertiaTensor):
    """p^2 for both cases (I13 = 0 or I23 = 0), in 60-digit arithmetic."""
    with mpmath.workdps(60):
        i11, i22, i33, i13, i23 = _normalized_mp(I)
        return (i11 - i22) * (i11 * i23**2 - i22 * i13**2) / (i11 * i22 * (i11 * i22 * i33 - 1) ** 2)


def meromorphicity_class(I: InertiaTensor) -> MeromorphicityVerdict:
    if not _positive_definite(I):
        raise ValidationError(f"tensor is not positive definite: {validate_inertia(I).violations}")
    nan = float("nan")
    if I.I13 == 0.0 and I.I23 == 0.0:
        return MeromorphicityVerdict(Case.Degenerate_Axis, nan, False, "none", 0.0)
    if math.isclose(I.I11, I.I22, rel_tol=1e-12):
        return MeromorphicityVerdict(Case.Degenerate_I11eqI22, nan, False, "none", 0.0)
    p2 = _p_squared_mp(I)
    if I.I13 == 0.0:
        case = Case.Case1_I13zero
    elif I.I23 == 0.0:
        # the reduced ratio (I11-I22)/(I11 I22 (I11 I22 I33-1)) changes sign
        # here, but the full expression above is already +p^2
        case = Case.Case2_I23zero
    else:
        return MeromorphicityVerdict(Case.NonMeromorphic, nan, False, "none", float(p2))
    if p2 <= 0:
        return MeromorphicityVerdict(Case.NonMeromorphic, nan, False, "none", float(p2))
    with mpmath.workdps(60):
        p = mpmath.sqrt(p2)
        n = int(mpmath.nint(p))
        is_int = n != 0 and abs(p - n) <= INTEGER_TOL
    if not is_int:
        return MeromorphicityVerdict(Case.NonMeromorphic, float(p), False, "none", float(p2))
    return MeromorphicityVerdict(case, float(p), True, "even" if n % 2 == 0 else "odd", float(p2))


def _vector_field_jacobian(I: InertiaTensor, x: np.ndarray) -> np.ndarray:
    i11, i22, i13, i23 = I.I11, I.I22, I.I13, I.I23
    w1, w2, g1, g2, g3 = x
    L = i13 * w1 + i23 * w2
    J = np.zeros((5, 5), dtype=complex)
    J[0, 0] = i22 * i13 * w2
    J[0, 1] = i22 * (i23 * w2 + L)
    J[1, 0] = -i11 * (i13 * w1 + L)
    J[1, 1] = -i11 * i23 * w1
    J[2, 1], J[2, 4] = -g3, -w2
    J[3, 0], J[3, 4] = g3, w1
    J[4, 0], J[4, 1], J[4, 2], J[4, 3] = -g2, g1, w2, -w1
    return J


def kovalevskaya_balance(I: InertiaTensor, conjugate: bool = False) -> np.ndarray:
    """Balance x = d/t of the quadratic field, i.e. F(d) = -d, with gamma = 0."""
    I = _prepared(I)
    r = math.sqrt(I.I11 * I.I22)
    w1 = 1.0 / (I.I11 * I.I23 + 1j * I.I13 * r)
    w2 = -1.0 / (I.I13 * I.I22 - 1j * I.I23 * r)
    d = np.array([w1, w2, 0, 0, 0], dtype=complex)
    return d.conj() if conjugate else d


def kovalevskaya_lambda_squared(I: InertiaTensor) -> complex:
    I = _prepared(I)
    num = (I.I11 - I.I22) * (math.sqrt(I.I11) * I.I23 - 1j * I.I13 * math.sqrt(I.I22)) ** 2
    return num / (I.I11 * I.I22 * (I.I11 * I.I22 * I.I33 - 1.0) ** 2)


def kovalevskaya_spectrum(I: InertiaTensor, conjugate: bool = False) -> np.ndarray:
    """Eigenvalues of K = DF(d) + Id at the balance, sorted by (real, imag)."""
    I = _prepared(I)
    if math.isclose(I.I11, I.I22, rel_tol=1e-12) and I.I13 * I.I23 == 0.0:
        raise ValidationError("Kovalevskaya matrix requires I11 != I22 or I13*I23 != 0")
    d = kovalevskaya_balance(I, conjugate)
    K = _vector_field_jacobian(I, d) + np.eye(5)
    return np.sort_complex(np.linalg.eigvals(K))


def residue_matrix(params: SuslovParams) -> np.ndarray:
    """Residue at t0 = i*pi/2 of the Poisson matrix along the closed form."""
    a, b, c1, c2 = params.a, params.b, params.c1, params.c2
    return np.array(
        [
            [0, 0, -b + 0.5j * c2],
            [0, 0, a - 0.5j * c1],
            [b - 0.5j * c2, -a + 0.5j * c1, 0],
        ],
        dtype=complex,
    )


def residue_eigenvalues(params: SuslovParams) -> tuple[complex, complex, complex]:
    a, b, c1, c2 = params.a, params.b, params.c1, params.c2
    rho = 0.5 * np.sqrt(complex(c1 * c1 + c2 * c2 - 4 * (a * a + b * b), 4 * (a * c1 + b * c2)))
    return 0j, complex(rho), complex(-rho)
