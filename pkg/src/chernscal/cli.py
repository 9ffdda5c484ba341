"""Command-line front end.

Exit codes: 0 success, 1 malformed input, 2 non-positive (A, B), 3 singular
boundary system, 4 positivity failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import calabi_solver as cs
from . import ruled_geometry as rg
from .frame_calculus import LieAlgebraModel, ModelError, scalars
from .models import BUILTIN, builtin
from .toric_futaki import (AffineWeight, Polytope, PolytopeError, WeightError, futaki,
                           solve_interval)

DATA_DIR = Path(__file__).parent / "data"

EXIT_OK, EXIT_INPUT, EXIT_NONPOSITIVE, EXIT_SINGULAR, EXIT_POSITIVITY = range(5)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output_path: Path | None = None
    format: str = "json"
    grid: int = 101
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.grid < 17:
            raise InputError("--grid must be at least 17")
        if not self.tolerance > 0:
            raise InputError("--tol must be positive")
        if self.format not in ("json", "csv"):
            raise InputError(f"unknown format {self.format!r}")


# -- output --------------------------------------------------------------------

def _plain(obj):
    """Convert numpy scalars and arrays into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dumps_json(payload) -> str:
    """Deterministic JSON; floats use Python's shortest round-trip repr."""
    return json.dumps(_plain(payload), indent=2, ensure_ascii=False) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def samples_csv(result: dict) -> str:
    """CSV of the solve-ruled grid samples, numbers as '.17g'."""
    geo = result["geometry"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "f", "ideal", "H"])
    for (x, f), (_, ideal), (_, h) in zip(geo["f_samples"], geo["ideal_samples"],
                                          geo["H_samples"]):
        w.writerow([format(v, ".17g") for v in (x, f, ideal, h)])
    return buf.getvalue()


# -- solve-ruled / scan-c ------------------------------------------------------

def _num(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a number: {text!r}") from None


def params_from_args(args) -> cs.RuledParams:
    has_lam = args.lam is not None
    has_ab = args.a is not None or args.b is not None
    if has_lam and has_ab:
        raise InputError("give either --lambda or --a/--b, not both")
    c = _num(args.c) if getattr(args, "c", None) is not None else Fraction(1)
    try:
        if has_lam:
            return cs.RuledParams.from_lambda(args.m, _num(args.p), c, _num(args.lam))
        if args.a is None or args.b is None:
            raise InputError("--a and --b must be given together (or use --lambda)")
        return cs.RuledParams(args.m, _num(args.p), c, _num(args.a), _num(args.b))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def run_solve_ruled(params: cs.RuledParams, grid: int) -> tuple[dict, int]:
    result: dict = {"command": "solve-ruled", "params": params.to_dict()}
    try:
        sol = cs.assemble_and_solve(params)
    except cs.SingularSystem as exc:
        result["status"] = "singular-system"
        result["message"] = str(exc)
        return result, EXIT_SINGULAR
    except cs.NonPositiveAB as exc:
        result["status"] = "non-positive-AB"
        result["message"] = str(exc)
        if exc.solution is not None:
            result["solution"] = cs.solution_to_dict(exc.solution)
        return result, EXIT_NONPOSITIVE
    sol.positivity = cs.certify_positivity(sol, params)
    result["solution"] = cs.solution_to_dict(sol)
    if sol.positivity.mode == "failed":
        result["status"] = "positivity-failed"
        return result, EXIT_POSITIVITY
    profile = rg.fiber_profile(sol, params)
    curv = rg.conformal_scalar(profile, params, sol)
    fc = rg.fundamental_constant(profile, params, sol.B)
    result["geometry"] = rg.geometry_to_dict(profile, curv, fc, params, grid)
    result["status"] = "accepted"
    return result, EXIT_OK


def cmd_solve_ruled(args) -> int:
    cfg = RunConfig("solve-ruled", output_path=args.out, format=args.format, grid=args.grid)
    params = params_from_args(args)
    result, code = run_solve_ruled(params, cfg.grid)
    if cfg.format == "csv" and "geometry" in result:
        _emit(samples_csv(result), cfg.output_path)
    else:
        _emit(dumps_json(result), cfg.output_path)
    return code


def cmd_scan_c(args) -> int:
    params = params_from_args(args)
    lo, hi = float(_num(args.c_min)), float(_num(args.c_max))
    try:
        scan = cs.scan_threshold(params, (lo, hi), probes=args.probes)
    except cs.NoAcceptableC as exc:
        _emit(dumps_json({"command": "scan-c", "status": "no-acceptable-c",
                          "message": str(exc)}), args.out)
        return EXIT_POSITIVITY
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(dumps_json({"command": "scan-c", "status": "ok", "params": params.to_dict(),
                      "c_star": scan.c_star, "refined": scan.refined,
                      "grid": scan.grid, "verdicts": scan.verdicts}), args.out)
    return EXIT_OK


# -- frame-check ----------------------------------------------------------------

def resolve_model(name: str) -> LieAlgebraModel:
    path = Path(name)
    if not path.exists():
        path = DATA_DIR / "models" / f"{name}.json"
    if path.exists():
        try:
            return LieAlgebraModel.load(path)
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            if isinstance(exc, ModelError):
                raise
            raise InputError(f"malformed model file {path}: {exc}") from None
    if name in BUILTIN:
        model = builtin(name)
        model.validate()
        return model
    raise InputError(f"unknown model {name!r}")


def frame_report(model: LieAlgebraModel) -> dict:
    rep = scalars(model)
    nm = rep.norms
    out = rep.to_dict()
    out["gaps"] = {
        "2s-sg": 2 * rep.s - rep.sg,
        "sH-2s": rep.sH - 2 * rep.s,
        "N2": nm["N"],
        "dcF2/6": nm["dcF"] / 6,
        "2dcF2/3": 2 * nm["dcF"] / 3,
    }
    return out


def cmd_frame_check(args) -> int:
    try:
        model = resolve_model(args.model)
    except ModelError as exc:
        raise InputError(str(exc)) from None
    report = frame_report(model)
    worst = max(report["residuals"].values())
    report["tolerance"] = args.tol
    report["status"] = "ok" if worst <= args.tol else "residual-exceeded"
    _emit(dumps_json(report), args.out)
    return EXIT_OK if worst <= args.tol else EXIT_POSITIVITY


# -- futaki / interval-solve ------------------------------------------------------------

def _resolve_data(kind: str, name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = DATA_DIR / kind / (name if name.endswith(".json") else f"{name}.json")
    if bundled.exists():
        return bundled
    raise InputError(f"cannot find {kind[:-1]} {name!r}")


def cmd_futaki(args) -> int:
    try:
        poly = Polytope.load(_resolve_data("polytopes", args.polytope))
        weight = AffineWeight.load(_resolve_data("weights", args.weight))
        if weight.n == 0:
            weight = AffineWeight((0,) * poly.n, weight.a_const)
        report = futaki(poly, weight)
    except (PolytopeError, WeightError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from None
    _emit(dumps_json({"command": "futaki", "polytope": poly.name, "weight": weight.to_json(),
                      **report.to_dict()}), args.out)
    return EXIT_OK


def cmd_interval_solve(args) -> int:
    try:
        weight = AffineWeight((_num(args.a),), _num(args.b))
        sol = solve_interval(weight)
        from .toric_futaki import interval
        report = futaki(interval(), weight)
    except (WeightError, PolytopeError) as exc:
        raise InputError(str(exc)) from None
    _emit(dumps_json({"command": "interval-solve", **sol.to_dict(),
                      "futaki": report.to_dict()}), args.out)
    return EXIT_OK


# -- plot -------------------------------------------------------------------------

SVG_W, SVG_H, MARGIN = 640, 420, 56


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo if hi > lo else 1.0
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * span:
        ticks.append(round(t, 10))
        t += step
    return ticks


def render_svg(f_samples, ideal_samples, title: str = "") -> str:
    fx = np.array(f_samples, dtype=float)
    ix = np.array(ideal_samples, dtype=float)
    ys = np.concatenate([fx[:, 1], ix[:, 1]])
    y0, y1 = min(0.0, float(ys.min())), float(ys.max())
    y1 = y1 if y1 > y0 else y0 + 1.0
    y1 = y0 + 1.05 * (y1 - y0)

    def px(x):
        return MARGIN + (x - 0.0) / 1.0 * (SVG_W - 2 * MARGIN)

    def py(y):
        return SVG_H - MARGIN - (y - y0) / (y1 - y0) * (SVG_H - 2 * MARGIN)

    def polyline(pts, style):
        coords = " ".join(f"{px(x):.3f},{py(y):.3f}" for x, y in pts)
        return f'  <polyline fill="none" {style} points="{coords}"/>'

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_W}" '
        f'height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">',
        f'  <rect x="0" y="0" width="{SVG_W}" height="{SVG_H}" fill="white"/>',
        f'  <line x1="{px(0):.3f}" y1="{py(y0):.3f}" x2="{px(1):.3f}" y2="{py(y0):.3f}" '
        'stroke="black"/>',
        f'  <line x1="{px(0):.3f}" y1="{py(y0):.3f}" x2="{px(0):.3f}" y2="{py(y1):.3f}" '
        'stroke="black"/>',
    ]
    for t in _nice_ticks(0.0, 1.0, 4):
        lines.append(f'  <line x1="{px(t):.3f}" y1="{py(y0):.3f}" x2="{px(t):.3f}" '
                     f'y2="{py(y0) + 5:.3f}" stroke="black"/>')
        lines.append(f'  <text x="{px(t):.3f}" y="{py(y0) + 20:.3f}" font-size="12" '
                     f'text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y0, y1, 5):
        lines.append(f'  <line x1="{px(0) - 5:.3f}" y1="{py(t):.3f}" x2="{px(0):.3f}" '
                     f'y2="{py(t):.3f}" stroke="black"/>')
        lines.append(f'  <text x="{px(0) - 8:.3f}" y="{py(t) + 4:.3f}" font-size="12" '
                     f'text-anchor="end">{t:g}</text>')
    lines.append(polyline(ix, 'stroke="gray" stroke-width="1.5" stroke-dasharray="6,4"'))
    lines.append(polyline(fx, 'stroke="black" stroke-width="2"'))
    if title:
        lines.append(f'  <text x="{SVG_W / 2:.3f}" y="{MARGIN / 2:.3f}" font-size="14" '
                     f'text-anchor="middle">{title}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cmd_plot(args) -> int:
    try:
        data = json.loads(Path(args.input).read_text())
        geo = data["geometry"]
        f_samples, ideal = geo["f_samples"], geo["ideal_samples"]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"input is not a solve-ruled result: {exc}") from None
    if len(f_samples) < 2 or len(f_samples) != len(ideal):
        raise InputError("sample grid is empty or inconsistent")
    p = data.get("params", {})
    title = f"m={p.get('m')}, p={p.get('p')}, c={p.get('c')}" if p else ""
    atomic_write(Path(args.out), render_svg(f_samples, ideal, title))
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------

def _ruled_flags(sp, need_c: bool = True):
    sp.add_argument("--m", type=int, required=True, help="real dimension of the base (even, >= 4)")
    sp.add_argument("--p", required=True)
    if need_c:
        sp.add_argument("--c", required=True)
    sp.add_argument("--lambda", dest="lam")
    sp.add_argument("--a")
    sp.add_argument("--b")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="chernscal", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve-ruled", help="solve the ruled-manifold boundary problem")
    _ruled_flags(sp)
    sp.add_argument("--grid", type=int, default=101)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_solve_ruled)

    sp = sub.add_parser("scan-c", help="smallest accepted c on a probe grid")
    _ruled_flags(sp, need_c=False)
    sp.add_argument("--c-min", required=True)
    sp.add_argument("--c-max", required=True)
    sp.add_argument("--probes", type=int, default=40)
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_scan_c, c=None)

    sp = sub.add_parser("frame-check", help="curvature identities on a Lie algebra model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_frame_check)

    sp = sub.add_parser("futaki", help="Futaki invariant of a weighted polytope")
    sp.add_argument("--polytope", required=True)
    sp.add_argument("--weight", required=True)
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_futaki)

    sp = sub.add_parser("interval-solve", help="closed-form solution on the interval")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_interval_solve)

    sp = sub.add_parser("plot", help="SVG of a solve-ruled result")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
