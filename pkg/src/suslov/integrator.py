"""Adaptive Dormand-Prince 5(4) integration of the Euler-Poisson system.

The stepper is hand-written rather than borrowed from scipy so that the step
controller, dense output and statistics are fully under our control and the
conservation checks exercise a known scheme.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .closed_form import omega_general
from .errors import StepSizeUnderflow, ValidationError
from .model import BodyState, InertiaTensor, SuslovParams

# Dormand-Prince tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# continuous extension of order 4
_D = (
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799, -10690763975 / 1880347072,
    701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423,
)

STATE_LABELS = ("omega1", "omega2", "gamma1", "gamma2", "gamma3")


@dataclass
class StepStats:
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0
    rel_tol: float = 0.0
    abs_tol: float = 0.0


@dataclass
class Trajectory:
    """Samples of a solution, plus derived columns (F1, F2, ...)."""

    t: np.ndarray
    y: np.ndarray
    labels: tuple[str, ...]
    columns: dict[str, np.ndarray] = field(default_factory=dict)
    stats: StepStats = field(default_factory=StepStats)

    def state(self, i: int) -> BodyState:
        return BodyState.from_array(self.y[i])

    def to_csv(self, stream=None) -> str:
        """RFC-4180 CSV with header; floats in 17 significant digits."""
        buf = stream if stream is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        names = list(self.columns)
        w.writerow(["t", *self.labels, *names])
        for i in range(len(self.t)):
            row = [self.t[i], *self.y[i], *(self.columns[n][i] for n in names)]
            w.writerow([format(float(v), ".17g") for v in row])
        return buf.getvalue() if stream is None else ""


def _check_tolerances(rel_tol: float, abs_tol: float) -> None:
    for name, v in (("rel_tol", rel_tol), ("abs_tol", abs_tol)):
        if not 1e-14 < v < 1e-2:
            raise ValidationError(f"{name} must lie in (1e-14, 1e-2), got {v!r}")


def _initial_step(f, t0, y0, f0, direction, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = f(t0 + direction * h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    x0,
    t0: float,
    t1: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    t_eval: Sequence[float] | None = None,
    invariants: Mapping[str, Callable[[np.ndarray], np.ndarray]] | None = None,
    labels: Sequence[str] | None = None,
    project_sphere: bool = False,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Integrate y' = rhs(t, y) from t0 to t1 (either direction).

    Samples are the accepted step points unless ``t_eval`` is given, in which
    case the continuous extension is used. ``project_sphere`` renormalizes
    components 2..4 (gamma) to unit length after each step.
    """
    if t1 == t0:
        raise ValidationError("t1 must differ from t0")
    _check_tolerances(rel_tol, abs_tol)
    y = np.array(x0.as_array() if isinstance(x0, BodyState) else x0, dtype=float)
    if labels is None:
        labels = STATE_LABELS if y.size == 5 else tuple(f"y{i}" for i in range(y.size))
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    hmin = 1e-14 * span
    stats = StepStats(rel_tol=rel_tol, abs_tol=abs_tol)

    if t_eval is not None:
        te = np.asarray(t_eval, dtype=float)
        if np.any((te - t0) * direction < -1e-12 * span) or np.any((te - t1) * direction > 1e-12 * span):
            raise ValidationError("t_eval outside the integration interval")
        if np.any(np.diff(te) * direction <= 0):
            raise ValidationError("t_eval must be strictly monotone in the integration direction")
    else:
        te = None

    ts, ys = [t0], [y.copy()]
    if te is not None:
        ts, ys = [], []
        ie = 0
        while ie < len(te) and te[ie] == t0:
            ts.append(t0)
            ys.append(y.copy())
            ie += 1

    t = t0
    k1 = rhs(t, y)
    stats.evaluations += 1
    h = _initial_step(rhs, t0, y, k1, direction, rel_tol, abs_tol, span)
    stats.evaluations += 1
    err_prev = 1e-4
    a, c, e, dd = _A, _C, _E, _D
    while (t1 - t) * direction > 0:
        if stats.steps + stats.rejected >= max_steps:
            raise StepSizeUnderflow(f"step budget of {max_steps} exhausted at t = {t}")
        if h < hmin:
            raise StepSizeUnderflow(f"step size {h:.3e} below 1e-14*|t1-t0| at t = {t}")
        last = h >= abs(t1 - t)
        if last:
            h = abs(t1 - t)
        hs = direction * h
        k = [k1]
        for s in range(1, 7):
            acc = y.copy()
            for j, aj in enumerate(a[s]):
                if aj:
                    acc += hs * aj * k[j]
            if s == 6:
                y_new = acc
            k.append(rhs(t + c[s] * hs, acc))
        stats.evaluations += 6
        err_vec = hs * sum(ei * ki for ei, ki in zip(e, k) if ei)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            t_new = t1 if last else t + hs
            if te is not None:
                while ie < len(te) and (te[ie] - t_new) * direction <= 0:
                    theta = (te[ie] - t) / hs
                    ts.append(float(te[ie]))
                    ys.append(_dense(y, y_new, k, hs, theta, dd))
                    ie += 1
            if project_sphere:
                g = y_new[2:5]
                y_new[2:5] = g / np.linalg.norm(g)
            t, y, k1 = t_new, y_new, k[6]
            stats.steps += 1
            if te is None:
                ts.append(t)
                ys.append(y.copy())
            err = max(err, 1e-10)
            fac = 0.9 * err ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            h = h * min(5.0, max(0.2, fac))
            err_prev = err
        else:
            stats.rejected += 1
            h = h * max(0.2, 0.9 * err ** (-0.2))
    if te is not None:
        while ie < len(te):
            ts.append(float(te[ie]))
            ys.append(y.copy())
            ie += 1
    Y = np.array(ys)
    traj = Trajectory(np.array(ts), Y, tuple(labels), stats=stats)
    for name, fn in (invariants or {}).items():
        traj.columns[name] = np.asarray(fn(Y), dtype=float)
    return traj


def _dense(y0, y1, k, h, theta, dd):
    r2 = y1 - y0
    r3 = h * k[0] - r2
    r4 = r2 - h * k[6] - r3
    r5 = h * sum(di * ki for di, ki in zip(dd, k) if di)
    t1 = 1.0 - theta
    return y0 + theta * (r2 + t1 * (r3 + theta * (r4 + t1 * r5)))


# ---------------------------------------------------------------- systems


def euler_poisson_rhs(x, I: InertiaTensor | SuslovParams):
    """Time derivative of a state for the full system.

    A tensor selects the general Euler equations; special-case parameters
    (with ``p`` and ``d``) select the rescaled system with the + sign.
    """
    arr = x.as_array() if isinstance(x, BodyState) else np.asarray(x, dtype=float)
    out = make_rhs(I)(0.0, arr)
    return BodyState.from_array(out) if isinstance(x, BodyState) else out


def make_rhs(I: InertiaTensor | SuslovParams) -> Callable[[float, np.ndarray], np.ndarray]:
    if isinstance(I, SuslovParams) and I.p is not None and I.d is not None:
        d, p = I.d, I.p
        k1 = d / (p * (d * d + 1.0))
        k2 = d / p

        def f(t, y):
            w1, w2, g1, g2, g3 = y
            return np.array([k1 * w2 * w2, -k2 * w1 * w2, -w2 * g3, w1 * g3, w2 * g1 - w1 * g2])

        return f
    if isinstance(I, SuslovParams):
        if I.inertia is None:
            raise ValidationError("parameters carry neither (p, d) nor an inertia tensor")
        I = I.inertia
    i11, i22, i13, i23 = I.I11, I.I22, I.I13, I.I23

    def g(t, y):
        w1, w2, g1, g2, g3 = y
        L = i13 * w1 + i23 * w2
        return np.array([i22 * L * w2, -i11 * L * w1, -w2 * g3, w1 * g3, w2 * g1 - w1 * g2])

    return g


def poisson_rhs_timedep(t: float, gamma, params: SuslovParams) -> np.ndarray:
    w1, w2 = omega_general(t, params)
    g1, g2, g3 = gamma
    return np.array([-w2 * g3, w1 * g3, w2 * g1 - w1 * g2])


def energy_function(I: InertiaTensor | SuslovParams) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(I, SuslovParams) and I.d is not None and I.p is not None:
        k = I.d**2 + 1.0
        return lambda Y: k * np.atleast_2d(Y)[:, 0] ** 2 + np.atleast_2d(Y)[:, 1] ** 2
    T = I.inertia if isinstance(I, SuslovParams) else I
    return lambda Y: T.I11 * np.atleast_2d(Y)[:, 0] ** 2 + T.I22 * np.atleast_2d(Y)[:, 1] ** 2


def geometric_integral(Y: np.ndarray) -> np.ndarray:
    Y = np.atleast_2d(Y)
    return np.sum(Y[:, 2:5] ** 2, axis=1)


def simulate(
    I: InertiaTensor | SuslovParams,
    x0,
    t0: float,
    t1: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    t_eval=None,
    extra: Mapping[str, Callable[[np.ndarray], np.ndarray]] | None = None,
    project_sphere: bool = False,
) -> Trajectory:
    """Euler-Poisson run with F1, F2 (and any ``extra``) columns attached."""
    inv = {"F1": energy_function(I), "F2": geometric_integral}
    inv.update(extra or {})
    return integrate(make_rhs(I), x0, t0, t1, rel_tol, abs_tol, t_eval, inv, project_sphere=project_sphere)


def integrate_poisson(
    params: SuslovParams,
    gamma0,
    t0: float,
    t1: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    t_eval=None,
    energy_scale: float = 1.0,
) -> Trajectory:
    """Poisson equations along the closed-form omega (optionally A*omega(A*t))."""
    A = energy_scale

    def f(t, g):
        w1, w2 = omega_general(A * t, params)
        w1, w2 = A * w1, A * w2
        return np.array([-w2 * g[2], w1 * g[2], w2 * g[0] - w1 * g[1]])

    return integrate(
        f, np.asarray(gamma0, dtype=float), t0, t1, rel_tol, abs_tol, t_eval,
        {"F2": lambda Y: np.sum(np.atleast_2d(Y) ** 2, axis=1)}, labels=("gamma1", "gamma2", "gamma3"),
    )


def conservation_report(traj: Trajectory, integrals: Mapping[str, Callable[[np.ndarray], np.ndarray]] | None = None) -> dict[str, float]:
    """Max |F(x(t)) - F(x(t0))| per integral; defaults to the stored columns."""
    if len(traj.t) == 0:
        raise ValidationError("empty trajectory")
    out = {}
    if integrals is None:
        cols = traj.columns
    else:
        cols = {n: np.asarray(fn(traj.y), dtype=float) for n, fn in integrals.items()}
    for name, v in cols.items():
        v = np.broadcast_to(v, traj.t.shape)
        out[name] = float(np.max(np.abs(v - v[0])))
    return out
