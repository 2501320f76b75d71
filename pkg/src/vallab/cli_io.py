"""JSON formats for bodies and functions, canonical serialization, and the CLI."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
import weakref

import numpy as np

from . import affine_sa as asa
from . import dehn as dh
from . import fconv_core as fc
from . import fval as fv
from . import geom_core as gc
from . import intrinsic as iv
from .errors import PrecisionTooLow, Unsupported, ValidationError, ParseError, VallabError

DEFAULT_SEED = 0
_SPECS = weakref.WeakKeyDictionary()


# -------------------------------------------------------------- canonical JSON


def canonical(obj):
    """Byte-stable JSON: sorted keys, no spaces, reals with 17 significant digits."""
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return "%.17g" % x
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{canonical(v)}" for k, v in sorted(obj.items())) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(canonical(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _load(text, path="$"):
    if isinstance(text, (dict, list)):
        return text
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc


def _get(d, key, path, kind=None, default=...):
    if key not in d:
        if default is ...:
            raise ParseError(f"{path}.{key}", "missing field")
        return default
    v = d[key]
    if kind == "real":
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"{path}.{key}", "expected a number")
        return float(v)
    if kind == "int":
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(f"{path}.{key}", "expected an integer")
        return v
    if kind == "vector":
        return _vector(v, f"{path}.{key}")
    if kind == "matrix":
        return _matrix(v, f"{path}.{key}")
    return v


def _vector(v, path):
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        raise ParseError(path, "expected a list of numbers")
    return [float(x) for x in v]


def _matrix(v, path):
    if not isinstance(v, list) or not v:
        raise ParseError(path, "expected a nonempty list of points")
    rows = [_vector(r, f"{path}[{i}]") for i, r in enumerate(v)]
    if len({len(r) for r in rows}) != 1:
        raise ParseError(path, "points have different dimensions")
    return rows


def _check_dim(d, n, path):
    if "dim" in d and _get(d, "dim", path, "int") != n:
        raise ParseError(f"{path}.dim", f"declared {d['dim']} but data has dimension {n}")


# ---------------------------------------------------------------------- bodies

BODY_KINDS = ("vertices", "box", "simplex", "regular_polygon", "ellipse", "ball_poly")


def body_spec(d, path="$"):
    """Canonical form of a body specification (defaults filled in)."""
    d = _load(d, path)
    if not isinstance(d, dict):
        raise ParseError(path, "expected an object")
    kind = _get(d, "kind", path)
    if kind not in BODY_KINDS:
        raise ParseError(f"{path}.kind", f"unknown kind {kind!r}")
    if kind in ("vertices", "simplex"):
        pts = _get(d, "points", path, "matrix")
        n = len(pts[0])
        _check_dim(d, n, path)
        return {"kind": kind, "dim": n, "points": pts}
    if kind == "box":
        sides = _get(d, "sides", path, "vector")
        n = len(sides)
        _check_dim(d, n, path)
        lower = _get(d, "lower", path, "vector", [0.0] * n)
        if len(lower) != n:
            raise ParseError(f"{path}.lower", "length differs from sides")
        return {"kind": kind, "dim": n, "lower": lower, "sides": sides}
    if kind == "regular_polygon":
        _check_dim(d, 2, path)
        return {"kind": kind, "dim": 2, "k": _get(d, "k", path, "int"),
                "radius": _get(d, "radius", path, "real", 1.0),
                "center": _get(d, "center", path, "vector", [0.0, 0.0]),
                "phase": _get(d, "phase", path, "real", 0.0)}
    if kind == "ellipse":
        _check_dim(d, 2, path)
        return {"kind": kind, "dim": 2, "a": _get(d, "a", path, "real"), "b": _get(d, "b", path, "real"),
                "center": _get(d, "center", path, "vector", [0.0, 0.0])}
    n = _get(d, "dim", path, "int")
    return {"kind": kind, "dim": n, "radius": _get(d, "radius", path, "real", 1.0),
            "k": _get(d, "k", path, "int", 256),
            "center": _get(d, "center", path, "vector", [0.0] * n)}


def _build_body(s):
    kind = s["kind"]
    if kind == "vertices":
        return gc.hull(s["points"])
    if kind == "simplex":
        return gc.simplex(s["points"])
    if kind == "box":
        return gc.box(s["lower"], s["sides"])
    if kind == "regular_polygon":
        return gc.regular_polygon(s["k"], s["radius"], tuple(s["center"]), s["phase"])
    if kind == "ellipse":
        return asa.ellipse(s["a"], s["b"], tuple(s["center"]))
    return gc.ball_polytope(s["dim"], s["radius"], s["k"], s["center"]).polytope


def parse_body(text):
    """Polytope or SmoothBody2 from JSON text (or an already decoded object)."""
    s = body_spec(text)
    obj = _build_body(s)
    _SPECS[obj] = s
    return obj


def serialize_body(obj):
    s = _SPECS.get(obj)
    if s is None:
        if isinstance(obj, gc.Polytope):
            s = {"kind": "vertices", "dim": obj.dim, "points": obj.vertices.tolist()}
        else:
            raise ValidationError("serialize_body", "body was not created from a specification")
    return canonical(s)


# ------------------------------------------------------------------ functions

FUNC_KINDS = ("cells", "max_affine", "gauge", "indicator", "linear_indicator", "radial_quadratic")


def func_spec(d, path="$"):
    d = _load(d, path)
    if not isinstance(d, dict):
        raise ParseError(path, "expected an object")
    kind = _get(d, "kind", path)
    if kind not in FUNC_KINDS:
        raise ParseError(f"{path}.kind", f"unknown kind {kind!r}")
    if kind in ("gauge", "indicator"):
        b = body_spec(_get(d, "body", path), f"{path}.body")
        return {"kind": kind, "dim": b["dim"], "body": b}
    if kind == "linear_indicator":
        b = body_spec(_get(d, "body", path), f"{path}.body")
        y = _get(d, "y", path, "vector")
        if len(y) != b["dim"]:
            raise ParseError(f"{path}.y", "dimension differs from body")
        return {"kind": kind, "dim": b["dim"], "y": y, "body": b}
    if kind == "radial_quadratic":
        return {"kind": kind, "dim": _get(d, "dim", path, "int"), "c": _get(d, "c", path, "real", 1.0)}
    if kind == "max_affine":
        pieces = _get(d, "pieces", path)
        if not isinstance(pieces, list) or not pieces:
            raise ParseError(f"{path}.pieces", "expected a nonempty list")
        out = [{"slope": _get(p, "slope", f"{path}.pieces[{i}]", "vector"),
                "offset": _get(p, "offset", f"{path}.pieces[{i}]", "real")} for i, p in enumerate(pieces)]
        n = len(out[0]["slope"])
        if any(len(p["slope"]) != n for p in out):
            raise ParseError(f"{path}.pieces", "slopes have different dimensions")
        _check_dim(d, n, path)
        return {"kind": kind, "dim": n, "pieces": out, "as_primal": bool(_get(d, "as_primal", path, None, False))}
    cells = _get(d, "cells", path)
    if not isinstance(cells, list) or not cells:
        raise ParseError(f"{path}.cells", "expected a nonempty list")
    out = []
    for i, c in enumerate(cells):
        p = f"{path}.cells[{i}]"
        cell = {"vertices": _get(c, "vertices", p, "matrix"), "slope": _get(c, "slope", p, "vector"),
                "offset": _get(c, "offset", p, "real")}
        if "rays" in c:
            cell["rays"] = _get(c, "rays", p, "matrix")
        out.append(cell)
    n = len(out[0]["slope"])
    _check_dim(d, n, path)
    return {"kind": kind, "dim": n, "cells": out, "full_domain": bool(_get(d, "full_domain", path, None, False))}


def _build_func(s):
    kind = s["kind"]
    if kind == "gauge":
        return fc.gauge(_build_body(s["body"]))
    if kind == "indicator":
        return fc.indicator(_build_body(s["body"]))
    if kind == "linear_indicator":
        return fc.linear_plus_indicator(s["y"], _build_body(s["body"]))
    if kind == "radial_quadratic":
        return fc.RadialQuadratic(s["dim"], s["c"])
    if kind == "max_affine":
        v = fc.MaxAffineFunc([p["slope"] for p in s["pieces"]], [p["offset"] for p in s["pieces"]])
        if s["as_primal"]:
            fc.coercivity_witness(v)
            return fc.max_affine_cells(v)
        return v
    cells = tuple(fc.make_cell(c["vertices"], c["slope"], c["offset"], c.get("rays")) for c in s["cells"])
    u = fc.PolyhedralFunc(cells, s["dim"], s["full_domain"])
    _validate_cells(u)
    return u


def _validate_cells(u):
    """Values agree where cells meet, and u is coercive."""
    for i, c in enumerate(u.cells):
        for j, e in enumerate(u.cells):
            if j <= i:
                continue
            shared = c.vertices[e.contains(c.vertices)]
            if len(shared) and np.max(np.abs(c.value(shared) - e.value(shared))) > 1e-10:
                raise ValidationError("PolyhedralFunc", f"cells {i} and {j} disagree on their common face")
    fc.coercivity_witness(u)


def parse_function(text):
    s = func_spec(text)
    obj = _build_func(s)
    _SPECS[obj] = s
    return obj


def serialize_function(obj):
    s = _SPECS.get(obj)
    if s is None:
        if isinstance(obj, fc.MaxAffineFunc):
            s = {"kind": "max_affine", "dim": obj.dim, "as_primal": False,
                 "pieces": [{"slope": y.tolist(), "offset": float(c)} for y, c in obj.pieces]}
        elif isinstance(obj, fc.PolyhedralFunc):
            cells = []
            for c in obj.cells:
                cell = {"vertices": c.vertices.tolist(), "slope": c.slope.tolist(), "offset": c.offset}
                if len(c.rays):
                    cell["rays"] = c.rays.tolist()
                cells.append(cell)
            s = {"kind": "cells", "dim": obj.dim, "cells": cells, "full_domain": obj.full_domain}
        else:
            raise ValidationError("serialize_function", "unsupported object")
    return canonical(s)


def parse_density(text, path="$"):
    d = _load(text, path)
    kind = _get(d, "kind", path)
    if kind == "on_halfline":
        return fv.DensityFunc.halfline(_get(d, "breakpoints", path, "vector"), _get(d, "values", path, "vector"))
    if kind == "on_Rn":
        axes = [_vector(a, f"{path}.axes[{i}]") for i, a in enumerate(_get(d, "axes", path))]
        return fv.DensityFunc.grid(axes, np.asarray(_get(d, "values", path), dtype=float))
    if kind == "tent":
        center = np.asarray(_get(d, "center", path, "vector"))
        radius = _get(d, "radius", path, "real")
        res = _get(d, "resolution", path, "int", 41)
        axes = [np.linspace(c - radius, c + radius, res) for c in center]
        return fv.DensityFunc.tabulate(
            lambda Y: np.maximum(0.0, 1.0 - np.max(np.abs(Y - center), axis=1) / radius), axes)
    raise ParseError(f"{path}.kind", f"unknown density kind {kind!r}")


# ---------------------------------------------------------------------- reports


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    return x


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("VALLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError("VALLAB_SEED", f"not an integer: {env!r}") from exc
    return DEFAULT_SEED


def _digest(command, args, files):
    payload = {"command": command,
               "args": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "csv")},
               "files": {k: _read(p) for k, p in files.items()}}
    return hashlib.sha256(canonical(_jsonable(payload)).encode()).hexdigest()


class Report(dict):
    pass


# ----------------------------------------------------------------- subcommands


def _cmd_intrinsic(args):
    P = parse_body(_read(args.body))
    return {"intrinsic_volumes": list(iv.intrinsic_volumes(P).values)}, {}, {}


def _cmd_steiner(args):
    P = parse_body(_read(args.body))
    r = args.radius
    ball = gc.ball_polytope(P.dim, r, args.ball_k)
    exact = iv.steiner_volume(P, r)
    sums = gc.volume(gc.minkowski_sum(P, ball.polytope))
    bound = iv.steiner_error_bound(P, r, ball)
    res = {"steiner_volume": exact, "parallel_volume": iv.parallel_volume(P, r), "polytope_sum_volume": sums,
           "error_bound": bound}
    return res, {"polytope_sum": abs(exact - sums) - bound}, {"error_bound": bound}


def _cmd_decompose(args):
    S = gc.simplex(json.loads(_read(args.simplex))["points"]) if args.simplex else gc.simplex(np.eye(args.dim + 1, args.dim, -1))
    if args.m is not None:
        pieces = iv.cylinder_decomposition(S, args.m)
        total = sum(p.multiplicity * p.volume for p in pieces)
        target = args.m ** S.dim * gc.volume(S)
        res = {"kind": "cylinder", "m": args.m, "pieces": [
            {"label": list(p.label), "multiplicity": p.multiplicity, "volume": p.volume} for p in pieces],
            "total_volume": total, "target_volume": target}
        return res, {"volume": abs(total - target)}, {"volume": 1e-12}
    pieces = iv.canonical_simplex_decomposition(S, args.t)
    total = sum(p.volume for p in pieces)
    res = {"kind": "canonical", "t": args.t,
           "pieces": [{"label": list(p.label), "volume": p.volume} for p in pieces],
           "total_volume": total, "target_volume": gc.volume(S)}
    return res, {"volume": abs(total - gc.volume(S))}, {"volume": 1e-12}


def _verdict_exit(kind):
    return 3 if kind == "Unknown" else 0


def _cmd_dehn(args):
    A, B = parse_body(_read(args.a)), parse_body(_read(args.b))
    sa = dh.dehn_symbol(A, args.precision, args.height)
    sb = dh.dehn_symbol(B, args.precision, args.height)
    v = dh.symbol_equal(sa, sb, args.height, args.precision)
    res = {"verdict": v.kind, "height_bound": v.height_bound, "precision": v.precision,
           "symbol_a": sa.float_terms(), "symbol_b": sb.float_terms(), "certificate": v.certificate,
           "volume_a": gc.volume(A), "volume_b": gc.volume(B)}
    return res, {}, {"height_bound": args.height}, _verdict_exit(v.kind)


def _cmd_hilbert3(args):
    r = dh.hilbert3_report(volume=args.volume, height_bound=args.height, precision=args.precision)
    res = {"verdict": r.verdict.kind, "height_bound": r.verdict.height_bound, "precision": r.verdict.precision,
           "cube_volume": r.cube_volume, "tetra_volume": r.tetra_volume,
           "cube_symbol": r.cube_symbol.float_terms(), "tetra_symbol": r.tetra_symbol.float_terms()}
    return res, {"volume": abs(r.cube_volume - r.tetra_volume)}, {"volume": 1e-12}, _verdict_exit(r.verdict.kind)


def _cmd_affinelength(args):
    K = parse_body(_read(args.body))
    if not isinstance(K, asa.SmoothBody2):
        if isinstance(K, gc.Polytope) and K.dim == 2:
            K = asa.polygon_body(K.vertices)
        else:
            raise Unsupported("affine length of planar bodies")
    r = asa.affine_length_subdivision(K, args.depth)
    res = {"estimate": r.estimate, "trace": list(r.trace)}
    resid = {"monotone": max([b - a for a, b in zip(r.trace, r.trace[1:])], default=0.0)}
    if K.smooth:
        res["smooth_quadrature"] = asa.affine_surface_area_smooth(K, 512)
        resid["agreement"] = abs(r.estimate - res["smooth_quadrature"])
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["level", "triangles", "estimate"])
            for k, e in enumerate(r.trace):
                w.writerow([k, 4 * 2**k, "%.17g" % e])
    return res, resid, {"monotone": 1e-12, "agreement": 1e-4}


def _cmd_kinematic(args):
    K, L = parse_body(_read(args.k)), parse_body(_read(args.l))
    seed = _seed(args)
    est = iv.kinematic_integral_mc(K, L, args.samples, seed=seed)
    target = iv.kinematic_target(K, L)
    res = {"estimate": est.estimate, "stderr": est.stderr, "target": target, "hits": est.hits,
           "samples": est.samples}
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["samples", "estimate"])
            for n_done, e in est.trace:
                w.writerow([int(n_done), "%.17g" % e])
    return res, {"abs_error": abs(est.estimate - target)}, {"sigma": 3.0}


def _valuation(name, zeta_path):
    if name == "exp_min":
        return fv.EXP_MIN
    if name == "exp_integral":
        return fv.EXP_INTEGRAL
    if name == "grad":
        if not zeta_path:
            raise ValidationError("grad", "--zeta is required")
        return fv.grad_family(parse_density(_read(zeta_path)))
    raise ValidationError("valuation", f"unknown valuation {name!r}")


def _cmd_fval(args):
    u = parse_function(_read(args.function))
    if args.valuation == "functional_intrinsic":
        alpha = parse_density(_read(args.alpha))
        r = fv.functional_intrinsic(u, alpha, args.radii)
        return {"values": list(r.values), "coefficients": list(r.coefficients)}, {"fit": r.residual}, {}
    Z = _valuation(args.valuation, args.zeta)
    return {"value": Z(u)}, {}, {}


def _cmd_decompose_fval(args):
    u = parse_function(_read(args.function))
    Z = _valuation(args.valuation, args.zeta)
    r = fv.epi_homog_components(Z, u)
    return ({"components": list(r.components), "value": Z(u), "non_polynomial": r.non_polynomial},
            {"sum": abs(sum(r.components) - Z(u)), "reconstruction": r.residual}, {"reconstruction": 1e-6})


def random_split_pairs(count, seed, pieces=8):
    """Split pairs of random planar piecewise-affine functions, half with indicator splits."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        v = fc.MaxAffineFunc(rng.normal(size=(pieces, 2)), rng.normal(size=pieces))
        w = fc.conjugate(v)
        c = rng.normal(size=2) * 0.3
        nrm = rng.normal(size=2)
        nrm /= np.linalg.norm(nrm)
        alpha = None if len(out) % 2 == 0 else float(rng.uniform(0.5, 3.0))
        try:
            out.append(fc.split_pair(w, nrm, float(nrm @ c), alpha))
        except VallabError:
            continue
    return out


def _cmd_check(args):
    Z = _valuation(args.valuation, args.zeta)
    seed = _seed(args)
    if args.pairs != "split":
        raise ValidationError("check", f"unknown pair family {args.pairs!r}")
    res = [fv.function_valuation_check(Z, p.u, p.v).residual for p in random_split_pairs(args.count, seed)]
    worst = max(res)
    return ({"pairs": args.count, "max_residual": worst, "passed": worst < args.tol},
            {"valuation": worst}, {"valuation": args.tol})


# -------------------------------------------------------------------- parser


def build_parser():
    p = argparse.ArgumentParser(prog="vallab", description="Valuations on convex bodies and convex functions.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("intrinsic", help="intrinsic volumes of a polytope")
    s.add_argument("--body", required=True)
    s.set_defaults(func=_cmd_intrinsic)

    s = sub.add_parser("steiner", help="parallel-body volume against the Steiner polynomial")
    s.add_argument("--body", required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--ball-k", type=int, default=256)
    s.set_defaults(func=_cmd_steiner)

    s = sub.add_parser("decompose", help="canonical or cylinder decomposition of a simplex")
    s.add_argument("--simplex")
    s.add_argument("--dim", type=int, default=2)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--t", type=float)
    g.add_argument("--m", type=int)
    s.set_defaults(func=_cmd_decompose)

    for name, fn in (("dehn", _cmd_dehn), ("hilbert3", _cmd_hilbert3)):
        s = sub.add_parser(name, help="Dehn invariant comparison" if name == "dehn" else "cube against tetrahedron")
        if name == "dehn":
            s.add_argument("--a", required=True)
            s.add_argument("--b", required=True)
        else:
            s.add_argument("--volume", type=float, default=1.0)
        s.add_argument("--height", type=int, default=dh.DEFAULT_HEIGHT)
        s.add_argument("--precision", type=int, default=dh.DEFAULT_PRECISION)
        s.set_defaults(func=fn)

    s = sub.add_parser("affinelength", help="support-triangle subdivision of a planar body")
    s.add_argument("--body", required=True)
    s.add_argument("--depth", type=int, default=12)
    s.add_argument("--csv")
    s.set_defaults(func=_cmd_affinelength)

    s = sub.add_parser("kinematic", help="Monte Carlo principal kinematic integral")
    s.add_argument("--k", required=True)
    s.add_argument("--l", required=True)
    s.add_argument("--samples", type=int, default=10**6)
    s.add_argument("--seed", type=int)
    s.add_argument("--csv")
    s.set_defaults(func=_cmd_kinematic)

    s = sub.add_parser("fval", help="evaluate a function valuation")
    s.add_argument("--function", required=True)
    s.add_argument("--valuation", required=True,
                   choices=["exp_min", "exp_integral", "grad", "functional_intrinsic"])
    s.add_argument("--zeta")
    s.add_argument("--alpha")
    s.add_argument("--radii", type=float, nargs="+", default=[0.0, 0.5, 1.0, 1.5])
    s.set_defaults(func=_cmd_fval)

    s = sub.add_parser("decompose-fval", help="epi-homogeneous components")
    s.add_argument("--function", required=True)
    s.add_argument("--valuation", required=True, choices=["exp_min", "exp_integral", "grad"])
    s.add_argument("--zeta")
    s.set_defaults(func=_cmd_decompose_fval)

    s = sub.add_parser("check", help="valuation identity on random split pairs")
    s.add_argument("--valuation", required=True, choices=["exp_min", "exp_integral", "grad"])
    s.add_argument("--pairs", default="split")
    s.add_argument("--zeta")
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=_cmd_check)
    return p


_FILE_ARGS = ("body", "simplex", "a", "b", "k", "l", "function", "zeta", "alpha")


def run(argv):
    """Execute a command; returns (report, exit code)."""
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    report = Report(command=args.command, seeds={}, tolerances={}, residuals={}, results={})
    code = 0
    try:
        files = {k: getattr(args, k) for k in _FILE_ARGS if getattr(args, k, None)}
        report["inputs_digest"] = _digest(args.command, args, files)
        out = args.func(args)
        results, resid, tols = out[:3]
        code = out[3] if len(out) > 3 else 0
        report["results"] = _jsonable(results)
        report["residuals"] = _jsonable(resid)
        report["tolerances"] = _jsonable(tols)
        if args.command in ("kinematic", "check"):
            report["seeds"] = {"seed": _seed(args)}
    except (ValidationError, OSError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if hasattr(exc, "direction"):
            report["error"]["direction"] = _jsonable(np.asarray(exc.direction, dtype=float))
        if hasattr(exc, "path"):
            report["error"]["path"] = exc.path
        code = 2
    except (Unsupported, PrecisionTooLow) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 3
    report["wall_time"] = time.perf_counter() - start
    return report, code


def main(argv=None):
    report, code = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(canonical(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
