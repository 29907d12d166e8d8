"""Command-line front end: classify, simulate, angle, solutions, integrals, galois, sweep.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import DivisionObstruction, NumericalError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


@dataclass
class RunConfig:
    """One run; JSON config files use these keys, command-line flags override them."""

    command: str = ""
    tensor: dict | None = None
    p: float | None = None
    d: float | None = None
    t0: float = 0.0
    t1: float = 10.0
    samples: int = 101
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    output: str | None = None
    format: str = "json"
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command in ("simulate",) and (self.tensor is None) == (self.p is None or self.d is None):
            raise ValidationError("give exactly one of a tensor or (p, d)")
        if not 1e-14 < self.rel_tol < 1e-2 or not 1e-14 < self.abs_tol < 1e-2:
            raise ValidationError("tolerances must lie in (1e-14, 1e-2)")
        if self.samples < 2:
            raise ValidationError("samples must be at least 2")
        if self.format not in ("json", "csv"):
            raise ValidationError("format must be json or csv")


# ------------------------------------------------------------- output helpers


def _jsonable(v: Any):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, Fraction):
        return str(v)
    if hasattr(v, "value") and hasattr(v, "name"):  # enums
        return v.value
    return v


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format(float(v), ".17g") if isinstance(v, (float, np.floating, int)) and not isinstance(v, bool) else v for v in r])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _number(s: str):
    """Parse '0.5', '1/2' or '3'; rationals stay exact."""
    s = s.strip()
    if "/" in s:
        return Fraction(s)
    try:
        return int(s)
    except ValueError:
        return float(s)


def _times(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.t0, cfg.t1, cfg.samples)


def _load_tensor(path: str):
    from .model import InertiaTensor

    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed JSON in {path}: {e}") from e
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from e
    if not isinstance(data, dict):
        raise ValidationError("tensor file must hold a JSON object")
    return InertiaTensor.from_dict(data.get("tensor", data))


# ------------------------------------------------------------- commands


def cmd_classify(cfg: RunConfig) -> str:
    from .model import InertiaTensor, meromorphicity_class, validate_inertia

    if cfg.tensor is None:
        raise ValidationError("classify needs a tensor")
    I = InertiaTensor.from_dict(cfg.tensor)
    verdict = meromorphicity_class(I)
    diag = validate_inertia(I)
    return dumps({"verdict": verdict.to_dict(), "diagnostics": {"passed": diag.passed, "violations": list(diag.violations), "physical": diag.physical}})


def _initial_state(cfg: RunConfig, params) -> np.ndarray:
    from .closed_form import omega_general
    from .meromorphic import fixture

    ex = cfg.extra
    if ex.get("x0") is not None:
        x0 = np.asarray(ex["x0"], dtype=float)
        if x0.shape != (5,):
            raise ValidationError("x0 needs five numbers: omega1 omega2 gamma1 gamma2 gamma3")
        return x0
    k = int(ex.get("fixture", 1))
    if k not in (1, 2, 3):
        raise ValidationError("fixture index must be 1, 2 or 3")
    w1, w2 = omega_general(cfg.t0, params)
    g = fixture(int(params.p), params.d, cfg.t0)[k - 1]
    return np.array([w1, w2, *g])


def cmd_simulate(cfg: RunConfig) -> str:
    from .integrator import simulate
    from .model import InertiaTensor, SuslovParams, params_from_inertia

    if cfg.tensor is not None:
        I = InertiaTensor.from_dict(cfg.tensor)
        params = params_from_inertia(I)
        system = I.normalized()
        if cfg.extra.get("x0") is None:
            raise ValidationError("simulate with a tensor needs --x0")
        x0 = _initial_state(cfg, params)
    else:
        params = SuslovParams.special(float(cfg.p), float(cfg.d))
        system = params
        x0 = _initial_state(cfg, params)
    tr = simulate(system, x0, cfg.t0, cfg.t1, cfg.rel_tol, cfg.abs_tol, t_eval=_times(cfg))
    if cfg.format == "csv":
        return tr.to_csv()
    return dumps({"t": tr.t, "labels": list(tr.labels), "y": tr.y, "columns": tr.columns, "steps": tr.stats.steps})


def cmd_angle(cfg: RunConfig) -> str:
    from .scattering import delta_psi_formula, delta_psi_numeric

    p, d = float(cfg.p), float(cfg.d)
    ex = cfg.extra
    if ex.get("numeric"):
        r = delta_psi_numeric(p, d, T=float(ex.get("T") or 40.0), tol=float(ex.get("tol") or 1e-8), energy_scale=float(ex.get("energy_scale") or 1.0))
    else:
        r = delta_psi_formula(p, d)
    return dumps(r.to_dict())


def cmd_solutions(cfg: RunConfig) -> str:
    from .meromorphic import gram_matrix, poisson_residual, solution_triple

    p = int(cfg.p)
    if p != cfg.p or p > 21:
        raise ValidationError("solutions needs an odd integer p <= 21")
    d = float(cfg.d)
    branch = int(cfg.extra.get("branch") or 1)
    tr = solution_triple(p, d, branch)
    if cfg.extra.get("gram"):
        at = float(cfg.extra.get("at") if cfg.extra.get("at") is not None else 0.7)
        G = gram_matrix(list(tr(at)))
        ts = _times(cfg)
        res = max(poisson_residual(lambda t, k=k: tr(t)[k], lambda t, k=k: tr.derivative(t)[k], ts, p, d) for k in range(3))
        return dumps({"p": p, "d": d, "t": at, "gram": G, "max_deviation": float(np.abs(G - np.eye(3)).max()), "poisson_residual": res})
    ts = _times(cfg)
    g = tr(ts)
    header = ["t"] + [f"gamma{i}_{j}" for i in (1, 2, 3) for j in (1, 2, 3)]
    rows = [[t, *(g[i][j][n] for i in range(3) for j in range(3))] for n, t in enumerate(ts)]
    if cfg.format == "csv":
        return _csv(header, rows)
    return dumps({"header": header, "rows": rows})


def cmd_integrals(cfg: RunConfig) -> str:
    from .integrals import build_extra_integral, verify_pde_system

    d = cfg.d
    if isinstance(d, str):
        d = None if d == "symbolic" else _number(d)
    E = build_extra_integral(int(cfg.p), d)
    out = E.to_dict()
    out["pde_residual_zero"] = [r.is_zero() for r in verify_pde_system(E)]
    return dumps(out)


def cmd_galois(cfg: RunConfig) -> str:
    from .galois import DEFAULT_C, exponential_degree_bound, frobenius_log_test, liouvillian_verdict, reduced_equation, singular_exponents

    p = int(cfg.p)
    if p != cfg.p:
        raise ValidationError("galois needs an integer p")
    ex = cfg.extra
    c = ex.get("c")
    c = DEFAULT_C if c is None else (_number(c) if isinstance(c, str) else c)
    verdict = liouvillian_verdict(p, extend=bool(ex.get("extend")), c=c)
    eqn = reduced_equation(p, c)
    points = []
    for s in singular_exponents(eqn, log_test=False):
        entry = {"index": s.index, "location": s.location, "exponents": list(s.exponents), "delta": s.delta}
        try:
            lt = frobenius_log_test(eqn, s.index)
            entry.update({"logarithmic": lt.logarithmic, "exact": lt.exact})
        except ValidationError:
            entry["logarithmic"] = None
        points.append(entry)
    return dumps({"verdict": verdict.to_dict(), "degree_candidates": list(exponential_degree_bound(p)), "singular_points": points, "c": str(c)})


# ------------------------------------------------------------- sweep


def _sweep_angle(args):
    from .scattering import delta_psi_formula, delta_psi_numeric

    p, d, numeric = args
    f = delta_psi_formula(p, d)
    row = [p, d, f.delta_psi, f.folded]
    if numeric:
        n = delta_psi_numeric(p, d)
        row += [n.delta_psi, abs(n.folded - f.folded)]
    return row


def _sweep_galois(args):
    from .galois import liouvillian_verdict

    (p,) = args
    v = liouvillian_verdict(p, extend=True)
    return [p, v.kind.value, int(v.extension)]


def worker_count() -> int:
    cap = os.environ.get("SUSLOV_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as e:
            raise ValidationError("SUSLOV_THREADS must be an integer") from e
    return n


def cmd_sweep(cfg: RunConfig) -> str:
    ex = cfg.extra
    kind = ex.get("kind", "angle")
    ps = [_number(s) for s in str(ex.get("p_list", "1,2,3")).split(",")]
    if kind == "angle":
        ds = [float(_number(s)) for s in str(ex.get("d_list", "0.5,1")).split(",")]
        jobs = [(float(p), d, bool(ex.get("numeric"))) for p in ps for d in ds]
        fn, header = _sweep_angle, ["p", "d", "delta_psi_formula", "folded"] + (["delta_psi_numeric", "abs_diff"] if ex.get("numeric") else [])
    elif kind == "galois":
        jobs = [(int(p),) for p in ps]
        fn, header = _sweep_galois, ["p", "verdict", "extension"]
    else:
        raise ValidationError("sweep kind must be angle or galois")
    n = min(worker_count(), len(jobs))
    if n <= 1:
        rows = [fn(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(fn, jobs))  # map keeps input order
    if cfg.format == "csv":
        return _csv(header, rows)
    return dumps({"header": header, "rows": rows})


COMMANDS = {
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "angle": cmd_angle,
    "solutions": cmd_solutions,
    "integrals": cmd_integrals,
    "galois": cmd_galois,
    "sweep": cmd_sweep,
}


# ------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="suslov", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp_, pd: bool = True, window: bool = False):
        sp_.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
        sp_.add_argument("--out", dest="output", help="output path (default stdout)")
        sp_.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
        if pd:
            sp_.add_argument("--p", type=float, help="parameter p")
            sp_.add_argument("--d", type=float, help="parameter d > 0")
        if window:
            sp_.add_argument("--t0", type=float, help="start time (default 0)")
            sp_.add_argument("--t1", type=float, help="end time (default 10); t1 < t0 integrates backward")
            sp_.add_argument("--samples", type=int, help="number of output times (default 101)")
            sp_.add_argument("--rel-tol", dest="rel_tol", type=float, help="relative tolerance (default 1e-10)")
            sp_.add_argument("--abs-tol", dest="abs_tol", type=float, help="absolute tolerance (default 1e-12)")

    s = sub.add_parser("classify", help="meromorphicity verdict for an inertia tensor")
    common(s, pd=False)
    s.add_argument("--tensor", help="JSON file with I11, I22, I33, I13, I23")

    s = sub.add_parser("simulate", help="integrate the Euler-Poisson equations")
    common(s, window=True)
    s.add_argument("--tensor", help="JSON tensor file (instead of --p/--d)")
    s.add_argument("--x0", type=float, nargs=5, help="initial omega1 omega2 gamma1 gamma2 gamma3")
    s.add_argument("--fixture", type=int, help="start on the closed form with gamma^(k)(t0), k in 1..3 (p in {1, 3})")

    s = sub.add_parser("angle", help="scattering angle")
    common(s)
    s.add_argument("--numeric", action="store_true", help="integrate instead of using the formula")
    s.add_argument("--T", type=float, help="horizon for --numeric (default 40)")
    s.add_argument("--tol", type=float, help="tail tolerance for --numeric (default 1e-8)")
    s.add_argument("--energy-scale", dest="energy_scale", type=float, help="time rescaling A of omega (default 1)")

    s = sub.add_parser("solutions", help="explicit real solution triples for odd p")
    common(s, window=True)
    s.add_argument("--gram", action="store_true", help="report the Gram matrix instead of samples")
    s.add_argument("--at", type=float, help="time for --gram (default 0.7)")
    s.add_argument("--branch", type=int, choices=(1, -1), help="rotating branch used for gamma^(2), gamma^(3) (default 1)")

    s = sub.add_parser("integrals", help="coefficients of the extra first integral")
    common(s, pd=False)
    s.add_argument("--p", type=int, help="odd p")
    s.add_argument("--d", help="d as a rational ('1/2'), float, or 'symbolic' (default)")

    s = sub.add_parser("galois", help="logarithm test, degree bound and Liouvillian verdict")
    common(s, pd=False)
    s.add_argument("--p", type=int, help="nonzero integer p")
    s.add_argument("--c", help="c for the reduced equation (default 5/4)")
    s.add_argument("--extend", action="store_true", help="compute certificates beyond |p| = 10")

    s = sub.add_parser("sweep", help="parameter sweep over a worker pool (SUSLOV_THREADS caps workers)")
    common(s, pd=False)
    s.add_argument("--kind", choices=("angle", "galois"), help="what to sweep (default angle)")
    s.add_argument("--p-list", dest="p_list", help="comma-separated p values")
    s.add_argument("--d-list", dest="d_list", help="comma-separated d values (angle)")
    s.add_argument("--numeric", action="store_true", help="add the numerical angle (angle)")
    return ap


_CONFIG_KEYS = {f.name for f in fields(RunConfig)} - {"extra", "command"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    raw = vars(ns).copy()
    if raw.get("config"):
        try:
            with open(raw["config"]) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValidationError(f"malformed config: {e}") from e
        except OSError as e:
            raise ValidationError(f"cannot read config: {e}") from e
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")
        for k, v in data.items():
            if k in _CONFIG_KEYS:
                setattr(cfg, k, v)
            elif k != "command":
                cfg.extra[k] = v
    for k, v in raw.items():
        if k in ("command", "config") or v is None or v is False:
            continue
        if k == "tensor":
            cfg.tensor = _load_tensor(v).to_dict()
        elif k in _CONFIG_KEYS:
            setattr(cfg, k, v)
        else:
            cfg.extra[k] = v
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) and EXIT_VALIDATION
    try:
        cfg = config_from_args(ns)
        if cfg.command not in ("classify", "sweep", "integrals", "galois") and (cfg.p is None or cfg.d is None) and cfg.tensor is None:
            raise ValidationError(f"{cfg.command} needs --p and --d")
        if cfg.command in ("integrals", "galois") and cfg.p is None:
            raise ValidationError(f"{cfg.command} needs --p")
        text = COMMANDS[cfg.command](cfg)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, DivisionObstruction) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(text, cfg)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
