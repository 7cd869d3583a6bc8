"""JSON command-line front end.

A request is ``{"command": ..., "params": {...}, "seed": ..., "tol": ...}``
and a response is ``{"status": "ok" | "error", "payload": ..., "diagnostics": [...]}``.
Requests come from ``--params`` with a positional command, from a single
JSON document on stdin, or one per line on stdin with ``--jobs N``.

Exit codes: 0 when every job succeeded, 2 on a validation error (bad JSON,
unknown command, bad parameters), 3 on an internal failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np

from . import analysis, gadgets, hopmetric, layer_core
from .exact import sqrt_text, to_fraction
from .layer_core import LayerPoint, LayerSpec, Tolerance
from .svg import render_svg

__all__ = ["JobRequest", "JobResult", "run", "main", "COMMANDS"]

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 2, 3


class ParamError(ValueError):
    """Request parameters failed validation."""


@dataclass
class JobRequest:
    command: str
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None
    tol: Optional[float] = None


@dataclass
class JobResult:
    status: str
    payload: Optional[dict] = None
    diagnostics: list = field(default_factory=list)
    code: Optional[str] = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"status": self.status, "diagnostics": list(self.diagnostics)}
        if self.status == "ok":
            out["payload"] = self.payload
        else:
            out["code"] = self.code
        return out

    @property
    def exit_code(self) -> int:
        if self.status == "ok":
            return EXIT_OK
        return EXIT_INTERNAL if self.code == "E_INTERNAL" else EXIT_INVALID


# ---------------------------------------------------------------- serialization

def _num(x):
    """Decimal with 12 significant digits; integers stay integers."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def _vec(v) -> list:
    return [_num(t) for t in np.asarray(v, dtype=float).ravel()]


def _pts(pts) -> list:
    return [_vec(p.coords) for p in pts]


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


# ---------------------------------------------------------------- parameter schema

# type name -> (JSON schema fragment, checker)
_TYPES: dict[str, tuple[dict, Callable[[Any], bool]]] = {
    "number": ({"type": "number"},
               lambda v: isinstance(v, (int, float)) and not isinstance(v, bool)),
    "width": ({"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?\d+(/\d+|\.\d*)?\s*$"}]},
              lambda v: (isinstance(v, (int, float)) and not isinstance(v, bool)) or isinstance(v, str)),
    "integer": ({"type": "integer"}, lambda v: isinstance(v, int) and not isinstance(v, bool)),
    "vector": ({"type": "array", "items": {"type": "number"}},
               lambda v: isinstance(v, list) and all(_TYPES["number"][1](t) for t in v)),
    "points": ({"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
               lambda v: isinstance(v, list) and all(_TYPES["vector"][1](t) for t in v)),
    "string": ({"type": "string"}, lambda v: isinstance(v, str)),
    "boolean": ({"type": "boolean"}, lambda v: isinstance(v, bool)),
}

_LAYER = {"n": ("integer", 1), "m": ("integer", 1), "p": ("number", 2.0), "eps": ("width", None)}


def _layer_params(**extra):
    return {**_LAYER, **extra}


# name -> (type, default); default None means required
SCHEMAS: dict[str, dict[str, tuple[str, Any]]] = {
    "dist": _layer_params(a=("vector", None), b=("vector", None),
                          far_threshold=("number", 0), near_budget=("integer", 8)),
    "path": _layer_params(a=("vector", None), b=("vector", None),
                          far_threshold=("number", 0), near_budget=("integer", 8)),
    "midpoints": _layer_params(n=("integer", 2), x=("vector", None), y=("vector", None)),
    "comb": {"N": ("integer", None), "M": ("integer", None), "eps": ("width", None)},
    "modified-comb": {"N": ("integer", None), "M": ("integer", None), "eps": ("width", None),
                      "side": ("string", "bottom")},
    "sandwich": {"m_s": ("integer", None), "eps": ("width", None),
                 "shift": ("vector", [0.0, 0.0]), "cols": ("integer", 8)},
    "signature": {"eps": ("width", None)},
    "distinguish": {"eps1": ("width", None), "eps2": ("width", None)},
    "width-witness": _layer_params(n=("integer", 2)),
    "verify-gamma-omega": {"eps": ("width", None), "x1": ("vector", []), "x2": ("vector", []),
                           "y": ("vector", []), "count": ("integer", 0)},
    "verify-gamma-hat": _layer_params(n=("integer", 2), xs=("points", []), y=("vector", []),
                                      count=("integer", 0)),
    "cycle": {"k": ("integer", None), "eps": ("width", 0), "min_width": ("boolean", False)},
    "render": {"object": ("string", None), "eps": ("width", None), "N": ("integer", 0),
               "M": ("integer", 0), "m_s": ("integer", 0), "cols": ("integer", 3),
               "k": ("integer", 3), "a": ("vector", []), "b": ("vector", [])},
}


def json_schemas() -> dict:
    """JSON Schema of the ``params`` object of every command."""
    out = {}
    for cmd, spec in sorted(SCHEMAS.items()):
        props = {name: dict(_TYPES[t][0]) for name, (t, _) in spec.items()}
        required = sorted(name for name, (_, d) in spec.items() if d is None)
        out[cmd] = {"type": "object", "properties": props, "required": required,
                    "additionalProperties": False}
    return {"request": {"type": "object", "required": ["command"],
                        "properties": {"command": {"enum": sorted(SCHEMAS)},
                                       "params": {"type": "object"},
                                       "seed": {"type": "integer"},
                                       "tol": {"type": "number"}}},
            "params": out}


def _validate(cmd: str, params: dict) -> dict:
    spec = SCHEMAS[cmd]
    unknown = sorted(set(params) - set(spec))
    if unknown:
        raise ParamError(f"unknown parameter(s) for {cmd}: {', '.join(unknown)}")
    out = {}
    for name, (t, default) in spec.items():
        if name not in params:
            if default is None:
                raise ParamError(f"{cmd}: missing required parameter {name!r}")
            out[name] = default
            continue
        if not _TYPES[t][1](params[name]):
            raise ParamError(f"{cmd}: parameter {name!r} must be of type {t}")
        out[name] = params[name]
    return out


# ---------------------------------------------------------------- handlers

def _spec(P) -> LayerSpec:
    try:
        return LayerSpec(P["n"], P["m"], P["p"], float(to_fraction(P["eps"])))
    except (ValueError, TypeError) as exc:
        raise ParamError(str(exc)) from exc


def _point(spec: LayerSpec, v, tol) -> LayerPoint:
    try:
        return spec.from_coords(v, tol)
    except ValueError as exc:
        raise ParamError(str(exc)) from exc


def _hopcfg(P, req, tol) -> hopmetric.HopConfig:
    return hopmetric.HopConfig(far_threshold=P["far_threshold"] or None,
                               near_budget=P["near_budget"], seed=req.seed or 0, tol=tol)


def _dist(P, req, tol, out):
    spec = _spec(P)
    a, b = _point(spec, P["a"], tol), _point(spec, P["b"], tol)
    iv = hopmetric.hop_distance(a, b, spec, _hopcfg(P, req, tol))
    return {"lower": iv.lower, "upper": iv.upper, "exact": iv.exact,
            "lp_distance": _num(layer_core.lp_dist(a, b, spec)),
            "far_threshold": _num(_hopcfg(P, req, tol).threshold(spec))}


def _path(P, req, tol, out):
    spec = _spec(P)
    a, b = _point(spec, P["a"], tol), _point(spec, P["b"], tol)
    iv = hopmetric.hop_distance(a, b, spec, _hopcfg(P, req, tol))
    if iv.witness is None:
        return {"found": False, "lower": iv.lower}
    if out:
        render_svg(iv.witness, out, spec.eps)
    return {"found": True, "edges": iv.witness.edges, "exact": iv.exact,
            "vertices": _pts(iv.witness.vertices)}


def _midpoints(P, req, tol, out):
    spec = _spec(P)
    x, y = _point(spec, P["x"], tol), _point(spec, P["y"], tol)
    res = layer_core.unit_equidistant_pair(x, y, spec, tol)
    return {"kind": res.kind, "points": _pts(res.points)}


def _comb(P, req, tol, out):
    N, M, eps = P["N"], P["M"], P["eps"]
    ok = gadgets.comb_exists(N, M, eps)
    res = {"exists": ok, "min_width": _num(gadgets.comb_min_width(N, M)),
           "threshold": sqrt_text(N, M)}
    if ok:
        comb = gadgets.build_extreme_comb(N, M, eps)
        rep = gadgets.validate_comb(comb, LayerSpec.strip(float(to_fraction(eps))), tol)
        res.update(valid=rep.valid, regime_note=rep.regime_note, a=_pts(comb.a),
                   b=_pts(comb.b), c=_pts(comb.c))
        if out:
            render_svg(comb, out, float(to_fraction(eps)))
    return res


def _modified_comb(P, req, tol, out):
    N, M, eps = P["N"], P["M"], P["eps"]
    ok = gadgets.modified_comb_exists(N, M, eps)
    res = {"exists": ok, "min_fractional_width": _num(gadgets.comb_min_width(N, M))}
    if ok:
        comb = gadgets.build_modified_comb(N, M, eps, P["side"])
        rep = gadgets.validate_modified_comb(comb, eps, tol)
        res.update(valid=rep.valid, a=_pts(comb.a), b=_pts(comb.b), c=_pts(comb.c))
        if out:
            render_svg(comb, out, float(to_fraction(eps)))
    return res


def _sandwich(P, req, tol, out):
    fits = gadgets.sandwich_fits(P["m_s"], P["eps"])
    res = {"fits": fits}
    if fits:
        s = gadgets.build_sandwich(P["m_s"], P["eps"], P["shift"], P["cols"])
        res.update(points=_pts(s.points()), border=_pts(gadgets.border_points(s)))
        if out:
            render_svg(s, out, float(to_fraction(P["eps"])))
    return res


def _signature(P, req, tol, out):
    sig = analysis.width_signature(P["eps"])
    frac = sig.exact - sig.integer_part
    return {"integer_part": sig.integer_part, "fractional_part": _num(sig.fractional_part),
            "fractional_part_exact": _frac(frac), "eps_exact": _frac(sig.exact)}


def _distinguish(P, req, tol, out):
    w = analysis.distinguish(P["eps1"], P["eps2"])
    res = {"kind": w.kind, "present_in": w.present_in, **w.params}
    if w.threshold is not None:
        res.update(threshold=w.threshold_text, threshold_value=_num(w.threshold))
    if w.note:
        res["note"] = w.note
    return res


def _width_witness(P, req, tol, out):
    spec = _spec(P)
    t = analysis.width_witness(spec, tol)
    return {"k": t.k, "delta": _num(t.delta), "x": _vec(t.x.coords), "y": _vec(t.y.coords),
            "z": _vec(t.z.coords), "recovered_eps": _num(analysis.recover_width(t, spec))}


def _rng(req) -> np.random.Generator:
    return np.random.default_rng(req.seed or 0)


def _verify_gamma_omega(P, req, tol, out):
    eps = float(to_fraction(P["eps"]))
    spec = LayerSpec.strip(eps)
    if P["x1"]:
        pts = [_point(spec, P[k], tol) for k in ("x1", "x2", "y")]
        om, ga = analysis.omega_check(*pts), analysis.gamma_check(*pts, spec)
        return {"omega": om, "gamma": ga, "agree": om == ga}
    if P["count"] < 1:
        raise ParamError("give x1, x2, y or a positive count")
    rng = _rng(req)
    agree = 0
    for _ in range(P["count"]):
        pts = [LayerPoint([rng.uniform(-3, 3)], [rng.uniform(0, eps)]) for _ in range(3)]
        agree += analysis.omega_check(*pts) == analysis.gamma_check(*pts, spec)
    return {"samples": P["count"], "agree": agree}


def _verify_gamma_hat(P, req, tol, out):
    spec = _spec(P)
    if P["xs"]:
        xs = [_point(spec, v, tol) for v in P["xs"]]
        y = _point(spec, P["y"], tol)
        v = analysis.gamma_hat_check(xs, y, spec)
        return {"omega": v.omega, "gamma": v.gamma, "samples": v.samples,
                "max_radius": _num(v.max_radius)}
    if P["count"] < 1:
        raise ParamError("give xs and y or a positive count")
    rng = _rng(req)
    agree = 0
    for _ in range(P["count"]):
        pts = [LayerPoint(rng.uniform(-3, 3, spec.n), rng.uniform(0, spec.eps, spec.m))
               for _ in range(spec.n + 2)]
        agree += analysis.gamma_hat_check(pts[:-1], pts[-1], spec).agree
    return {"samples": P["count"], "agree": agree}


def _cycle(P, req, tol, out):
    cfg = gadgets.CycleConfig(seed=req.seed or 0, tol=tol)
    if P["min_width"]:
        return {"k": P["k"], "min_width": _num(gadgets.odd_cycle_min_width(P["k"], cfg))}
    eps = float(to_fraction(P["eps"]))
    if eps <= 0:
        raise ParamError("cycle needs eps > 0 unless min_width is true")
    emb = gadgets.cycle_embeds(P["k"], eps, cfg)
    if emb is None:
        return {"found": False}
    if out:
        render_svg(emb, out)
    return {"found": True, "vertices": _pts(emb.vertices)}


def _render(P, req, tol, out):
    eps = float(to_fraction(P["eps"]))
    kind = P["object"]
    if kind == "comb":
        obj = gadgets.build_extreme_comb(P["N"], P["M"], P["eps"])
    elif kind == "modified-comb":
        obj = gadgets.build_modified_comb(P["N"], P["M"], P["eps"])
    elif kind == "sandwich":
        obj = gadgets.build_sandwich(P["m_s"], P["eps"], cols=P["cols"])
    elif kind == "cycle":
        obj = gadgets.cycle_embeds(P["k"], eps, gadgets.CycleConfig(seed=req.seed or 0))
        if obj is None:
            raise ParamError(f"no {P['k']}-cycle found at width {eps}")
    elif kind == "path":
        spec = LayerSpec.strip(eps)
        iv = hopmetric.hop_distance(_point(spec, P["a"], tol), _point(spec, P["b"], tol), spec)
        if iv.witness is None:
            raise ParamError("no witness path found for this pair")
        obj = iv.witness
    else:
        raise ParamError("object must be one of comb, modified-comb, sandwich, cycle, path")
    svg = render_svg(obj, out, eps)
    return {"written": out, "bytes": len(svg.encode())} if out else {"svg": svg}


COMMANDS: dict[str, Callable] = {
    "dist": _dist, "path": _path, "midpoints": _midpoints, "comb": _comb,
    "modified-comb": _modified_comb, "sandwich": _sandwich, "signature": _signature,
    "distinguish": _distinguish, "width-witness": _width_witness,
    "verify-gamma-omega": _verify_gamma_omega, "verify-gamma-hat": _verify_gamma_hat,
    "cycle": _cycle, "render": _render,
}


def _error(code: str, msg: str) -> JobResult:
    return JobResult("error", None, [f"{code}: {msg}"], code)


def run(request: JobRequest, out: Optional[str] = None) -> JobResult:
    """Dispatch one request; never raises."""
    if request.command not in COMMANDS:
        return _error("E_COMMAND", f"unknown command {request.command!r}")
    if not isinstance(request.params, dict):
        return _error("E_PARAM", "params must be a JSON object")
    try:
        params = _validate(request.command, request.params)
        tol = Tolerance(abs_tol=request.tol) if request.tol is not None else layer_core.DEFAULT_TOL
        payload = COMMANDS[request.command](params, request, tol, out)
    except (ParamError, ValueError, TypeError, layer_core.DimensionError) as exc:
        return _error("E_PARAM", str(exc))
    except Exception as exc:  # noqa: BLE001 - reported as an internal failure
        return _error("E_INTERNAL", f"{type(exc).__name__}: {exc}")
    diags = []
    floats = [k for k, (t, _) in SCHEMAS[request.command].items()
              if t == "width" and isinstance(params.get(k), float)]
    if floats:
        diags.append(f"note: float width(s) {', '.join(floats)} read via their shortest decimal form; "
                     "pass 'num/den' strings for exact comparisons")
    return JobResult("ok", payload, diags)


def parse_request(text: str, seed=None, tol=None) -> JobRequest | JobResult:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        return _error("E_JSON", f"malformed JSON: {exc}")
    if not isinstance(obj, dict) or not isinstance(obj.get("command"), str):
        return _error("E_JSON", "request must be an object with a string 'command'")
    s = obj.get("seed", seed)
    t = obj.get("tol", tol)
    if s is not None and (not isinstance(s, int) or isinstance(s, bool)):
        return _error("E_PARAM", "seed must be an integer")
    if t is not None and (not isinstance(t, (int, float)) or isinstance(t, bool) or t <= 0):
        return _error("E_PARAM", "tol must be a positive number")
    return JobRequest(obj["command"], obj.get("params", {}), s, t)


def _dump(res: JobResult) -> str:
    return json.dumps(res.to_json(), sort_keys=True, allow_nan=False)


def _run_line(args) -> str:
    text, seed, tol = args
    req = parse_request(text, seed, tol)
    res = req if isinstance(req, JobResult) else run(req)
    return _dump(res)


def main(argv: Optional[list] = None) -> int:
    ap = argparse.ArgumentParser(prog="unitlayers", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", help="command name; omit to read a JSON request from stdin")
    ap.add_argument("--params", default=None, help="JSON object of command parameters")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--tol", type=float, default=None, help="absolute tolerance override")
    ap.add_argument("--jobs", type=int, default=None,
                    help="batch mode: one JSON request per stdin line, N worker processes")
    ap.add_argument("--out", default=None, help="SVG output path for drawable results")
    ap.add_argument("--schema", action="store_true", help="print JSON schemas and exit")
    args = ap.parse_args(argv)

    if args.schema:
        print(json.dumps(json_schemas(), sort_keys=True, indent=2))
        return EXIT_OK

    if args.jobs is not None:
        if args.jobs < 1:
            ap.error("--jobs must be positive")
        lines = [ln for ln in sys.stdin.read().splitlines() if ln.strip()]
        # per-line seed streams derived from --seed unless a request sets its own
        base = np.random.SeedSequence(args.seed or 0)
        seeds = [int(s.generate_state(1)[0]) for s in base.spawn(len(lines))]
        work = [(ln, sd, args.tol) for ln, sd in zip(lines, seeds)]
        if args.jobs == 1:
            outs = [_run_line(w) for w in work]
        else:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                outs = list(ex.map(_run_line, work))
        code = EXIT_OK
        for o in outs:
            print(o)
            r = json.loads(o)
            if r["status"] != "ok":
                code = max(code, EXIT_INTERNAL if r.get("code") == "E_INTERNAL" else EXIT_INVALID)
        return code

    if args.command is not None:
        text = '{"command": %s, "params": %s}' % (json.dumps(args.command), args.params or "{}")
    else:
        text = sys.stdin.read()
    req = parse_request(text, args.seed, args.tol)
    res = req if isinstance(req, JobResult) else run(req, args.out)
    print(_dump(res))
    return res.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
