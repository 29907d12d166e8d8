"""Closed-form heteroclinic solutions of the Euler equations and their energy."""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import ValidationError
from .model import SuslovParams


class EnergyForm(enum.Enum):
    OriginalF1 = "original"  # I11*w1^2 + I22*w2^2 with the body tensor
    RescaledF1 = "rescaled"  # (d^2+1)*w1^2 + w2^2 in the special case


def _sech(t):
    # 1/cosh without overflow for large |t|
    e = np.exp(-np.abs(t))
    return 2.0 * e / (1.0 + e * e)


def omega_general(t, params: SuslovParams):
    """(w1, w2) = ((a*sinh t + c1/2)/cosh t, (b*sinh t + c2/2)/cosh t); accepts arrays."""
    t = np.asarray(t, dtype=float)
    th, sh = np.tanh(t), _sech(t)
    w1 = params.a * th + 0.5 * params.c1 * sh
    w2 = params.b * th + 0.5 * params.c2 * sh
    if w1.ndim == 0:
        return float(w1), float(w2)
    return w1, w2


def omega_special(t, a: float, c: float):
    """w1 = a*tanh t, w2 = -a*c*sech t."""
    if not c > 1:
        raise ValidationError("the special form needs c > 1")
    t = np.asarray(t, dtype=float)
    w1 = a * np.tanh(t)
    w2 = -a * c * _sech(t)
    if w1.ndim == 0:
        return float(w1), float(w2)
    return w1, w2


def omega_derivative(t, params: SuslovParams):
    """Analytic d/dt of :func:`omega_general`."""
    t = np.asarray(t, dtype=float)
    th, sh = np.tanh(t), _sech(t)
    dw1 = params.a * sh * sh - 0.5 * params.c1 * sh * th
    dw2 = params.b * sh * sh - 0.5 * params.c2 * sh * th
    if dw1.ndim == 0:
        return float(dw1), float(dw2)
    return dw1, dw2


def energy_level(params: SuslovParams, form: EnergyForm = EnergyForm.OriginalF1, t: float = 0.0) -> float:
    """Energy evaluated on the closed form at time ``t`` (constant in ``t``)."""
    w1, w2 = omega_general(t, params)
    if form is EnergyForm.OriginalF1:
        if params.inertia is None:
            raise ValidationError("OriginalF1 needs parameters built from an inertia tensor")
        I = params.inertia
        return I.I11 * w1 * w1 + I.I22 * w2 * w2
    if params.d is None:
        raise ValidationError("RescaledF1 is defined in the special case only")
    return (params.d**2 + 1.0) * w1 * w1 + w2 * w2


def expected_energy(params: SuslovParams, form: EnergyForm = EnergyForm.OriginalF1) -> float:
    """The fixed level: 1/(I13^2 I22 + I23^2 I11), or a^2 c^2 after rescaling."""
    if form is EnergyForm.OriginalF1:
        I = params.inertia
        if I is None:
            raise ValidationError("OriginalF1 needs parameters built from an inertia tensor")
        return 1.0 / (I.I13**2 * I.I22 + I.I23**2 * I.I11)
    if params.c is None:
        raise ValidationError("RescaledF1 is defined in the special case only")
    return params.a**2 * params.c**2


def z_of_t(t):
    """z = 4/(e^t + e^-t)^2 = sech^2 t."""
    s = _sech(np.asarray(t, dtype=float))
    return s * s


def log_z_of_t(t: float) -> float:
    return math.log(4.0) - 2.0 * float(np.logaddexp(t, -t))
