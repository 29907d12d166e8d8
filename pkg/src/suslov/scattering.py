"""Scattering angle between the limiting rotation axes of the heteroclinic motion."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import HorizonTooShort, ValidationError
from .integrator import integrate_poisson
from .model import SuslovParams


class Method(str, enum.Enum):
    Formula = "formula"
    Numerical = "numerical"


@dataclass(frozen=True)
class ScatteringResult:
    delta_psi: float
    method: Method
    p: float
    d: float
    residual: float | None = None
    lim_gamma1: float | None = None

    @property
    def folded(self) -> float:
        """The angle between the two axes, in [0, pi]."""
        x = self.delta_psi % (2 * math.pi)
        return min(x, 2 * math.pi - x)

    def to_dict(self) -> dict:
        return {
            "delta_psi_rad": self.delta_psi,
            "folded_rad": self.folded,
            "method": self.method.value,
            "residual": self.residual,
            "p": self.p,
            "d": self.d,
        }


def cos_half_pi(p: float) -> float:
    """cos(pi p / 2), exact for integer p."""
    if float(p).is_integer():
        return (1.0, 0.0, -1.0, 0.0)[int(p) % 4]
    return math.cos(math.pi * p / 2)


def _ratio(p: float, d: float) -> float:
    if not d > 0:
        raise ValidationError("d must be positive")
    x = math.pi * abs(p) / (2 * d)
    if x > 700:
        return 0.0
    return cos_half_pi(p) / math.cosh(x)


def delta_psi_formula(p: float, d: float) -> ScatteringResult:
    """cos(dpsi/2) = cos(pi p/2)/cosh(pi p/(2d)); dpsi in [0, 2 pi]."""
    r = max(-1.0, min(1.0, _ratio(p, d)))
    return ScatteringResult(2 * math.acos(r), Method.Formula, p, d, lim_gamma1=limit_gamma1(p, d))


def limit_gamma1(p: float, d: float) -> float:
    """lim gamma1 at +inf for the solution leaving (-1, 0, 0): 1 - 2 cos^2(pi p/2)/cosh^2(pi p/(2d))."""
    r = _ratio(p, d)
    return 1.0 - 2.0 * r * r


def delta_psi_numeric(
    p: float,
    d: float,
    T: float = 40.0,
    tol: float = 1e-8,
    energy_scale: float = 1.0,
    sign_branch: int = -1,
    samples: int = 256,
) -> ScatteringResult:
    """Integrate the Poisson equations from gamma(-T) = (-1, 0, 0) through
    one rotation period 2 pi/(A a) past +T.

    The limit of gamma1 is the mean over that final period; the residual is
    the peak-to-peak variation of gamma1 over it.
    """
    if T < 20:
        raise ValidationError("horizon T must be at least 20")
    if not tol <= 1e-8:
        raise ValidationError("tol must be at most 1e-8")
    if not p > 0:
        raise ValidationError("the numerical route needs p > 0")
    if not energy_scale > 0:
        raise ValidationError("energy_scale must be positive")
    params = SuslovParams.special(p, d, sign_branch)
    A = energy_scale
    period = 2 * math.pi / (A * abs(params.a))
    t_end = T + period
    t_tail = np.linspace(T, t_end, samples + 1)
    rel = min(1e-10, max(tol / 100, 1e-12))
    tr = integrate_poisson(params, [-1.0, 0.0, 0.0], -T, t_end, rel, max(rel * 1e-2, 1e-13), t_eval=t_tail, energy_scale=A)
    g1 = tr.y[:, 0]
    lim = float(np.mean(g1[:-1]))  # uniform grid over one full period
    residual = float(g1.max() - g1.min())
    if residual > 10 * tol:
        raise HorizonTooShort(f"tail variation {residual:.2e} exceeds 10*tol; increase T")
    # atan2 with the transverse radius stays well conditioned near dpsi = pi
    radius = float(np.mean(np.hypot(tr.y[:-1, 1], tr.y[:-1, 2])))
    dpsi = math.atan2(radius, -lim)
    return ScatteringResult(dpsi, Method.Numerical, p, d, residual, lim)


def angles_agree(a: ScatteringResult, b: ScatteringResult, tol: float = 1e-4) -> bool:
    """Compare as angles between axes, i.e. modulo the reflection dpsi -> 2 pi - dpsi."""
    return abs(a.folded - b.folded) <= tol
