"""Command-line front end for transforms, classification and diagnostics.

Subcommands
-----------
transform   coefficient decay profiles at the requested points (CSV/JSON)
classify    boundary-point verdicts with exponents and limits
curvature   2D curvature estimates or 3D needle beta-sweeps
frame       admissibility constants, frame-bound estimates, ray dumps
demo        bundled 2D scene exercising every verdict class

All outputs are deterministic: floats are printed with fixed formats,
JSON keys are sorted, and nothing depends on wall clock or worker count.
Outputs are accumulated in memory and only written once the whole
command has succeeded, so failed runs leave no partial files.

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import functools
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import classify, frames, regions, transform2d, transform3d
from .generators import (GeneratorConfigError, default_generator_2d,
                         default_generator_3d, load_generator)
from .quadrature import QuadratureError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_CONFIG_ERRORS = (regions.SceneError, GeneratorConfigError,
                  FileNotFoundError, IsADirectoryError)
_NUMERIC_ERRORS = (QuadratureError, classify.CurvatureRangeError,
                   classify.IllConditionedShearError, frames.FrameError)


class CliConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Argument parsing helpers
# ---------------------------------------------------------------------------

def _parse_points(spec, dim):
    """Inline "x,y;x,y" / "@file.json" holding a list of coordinate lists."""
    if spec is None:
        raise CliConfigError("no points given (use --points)")
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            rows = json.load(fh)
    else:
        rows = [[float(c) for c in chunk.split(",")]
                for chunk in spec.split(";") if chunk.strip()]
    pts = [tuple(float(c) for c in row) for row in rows]
    if not pts:
        raise CliConfigError("empty points list")
    for p in pts:
        if len(p) != dim:
            raise CliConfigError("point %r does not match scene dimension %d"
                                 % (p, dim))
    return pts


def _parse_scales(spec, default_range):
    """"jmin:jmax" (dyadic 2^-j ladder) or explicit "a1,a2,..."."""
    if spec is None:
        lo, hi = default_range
        return tuple(2.0 ** -j for j in range(lo, hi + 1))
    if ":" in spec:
        lo, hi = (int(tok) for tok in spec.split(":"))
        return tuple(2.0 ** -j for j in range(lo, hi + 1))
    return tuple(float(tok) for tok in spec.split(","))


def _parse_shear_grid(spec):
    if spec is None:
        return None
    if ":" in spec:
        lo, hi, n = spec.split(":")
        return tuple(float(s) for s in np.linspace(float(lo), float(hi),
                                                   int(n)))
    return tuple(float(tok) for tok in spec.split(","))


def _load_region(args):
    if args.scene is None:
        raise CliConfigError("no scene given (use --scene)")
    scene = regions.load_scene(args.scene)
    if not scene:
        raise CliConfigError("scene contains no regions")
    name = args.region
    if name is None:
        if len(scene) > 1:
            raise CliConfigError("scene has several regions; pick one with "
                                 "--region (%s)" % ", ".join(sorted(scene)))
        name = next(iter(scene))
    if name not in scene:
        raise CliConfigError("region %r not in scene (%s)"
                             % (name, ", ".join(sorted(scene))))
    return name, scene[name]


def _generator(args, dim):
    if args.generator is not None:
        gen = load_generator(args.generator)
        if gen.dim != dim:
            raise CliConfigError("generator dimension %d does not match "
                                 "scene dimension %d" % (gen.dim, dim))
        return gen
    return default_generator_2d() if dim == 2 else default_generator_3d()


def _emit(outputs, args):
    """Write accumulated (filename, text) pairs, or stream to stdout."""
    if args.out is None:
        for _, text in outputs:
            sys.stdout.write(text)
        return
    os.makedirs(args.out, exist_ok=True)
    for fname, text in outputs:
        with open(os.path.join(args.out, fname), "w") as fh:
            fh.write(text)


def _pmap(fn, items, workers):
    if workers <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _json_dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2,
                      allow_nan=True, default=float) + "\n"


# ---------------------------------------------------------------------------
# transform
# ---------------------------------------------------------------------------

def _profile_point_2d(region, gen, scales, shear, cone, policy, p):
    return transform2d.decay_profile2d(region, gen, p, scales, shear=shear,
                                       cone=cone, policy=policy)


def _profile_point_3d(region, gen, scales, shear, pyramid, policy, p):
    return transform3d.decay_profile3d(region, gen, p, scales, shear=shear,
                                       pyramid=pyramid, policy=policy)


def cmd_transform(args):
    _, region = _load_region(args)
    gen = _generator(args, region.dim)
    scales = _parse_scales(args.scales, (4, 9) if region.dim == 2 else (3, 7))
    pts = _parse_points(args.points, region.dim)
    if region.dim == 2:
        fn = functools.partial(_profile_point_2d, region, gen, scales,
                               args.shear, args.cone, args.policy)
        profiles = _pmap(fn, pts, args.workers)
        csv = transform2d.profile_csv(profiles)
    else:
        shear = (args.shear, args.shear2)
        fn = functools.partial(_profile_point_3d, region, gen, scales,
                               shear, args.pyramid, args.policy)
        profiles = _pmap(fn, pts, args.workers)
        csv = transform3d.profile_csv_3d(profiles)
    if args.format == "json":
        rows = []
        for line in csv.strip().split("\n")[1:]:
            rows.append(line.split(","))
        header = csv.split("\n", 1)[0].split(",")
        doc = [dict(zip(header, row)) for row in rows]
        return [("transform.json", _json_dumps(doc))]
    return [("transform.csv", csv)]


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def _classify_point(region, gen, config, p):
    if region.dim == 2:
        return classify.classify2d(region, gen, p, config)
    return classify.classify3d(region, gen, p, config)


def _classification_rows(pts, results):
    buf = io.StringIO()
    dim = len(pts[0])
    buf.write(("px,py,pz" if dim == 3 else "px,py")
              + ",verdict,cone,pyramid,s_star,exponent,limit,reason\n")
    for p, res in zip(pts, results):
        s_star = "" if res.s_star is None else (
            "%.6g" % res.s_star if np.isscalar(res.s_star)
            else "(%.6g %.6g)" % tuple(res.s_star))
        buf.write("%s,%s,%s,%s,%s,%s,%s,%s\n" % (
            ",".join("%.10g" % c for c in p), res.verdict,
            res.cone or "", res.pyramid or "", s_star,
            "" if res.exponent is None else "%.6g" % res.exponent,
            "" if res.limit is None else "%.6e" % res.limit,
            res.reason.replace(",", ";")))
    return buf.getvalue()


def cmd_classify(args):
    _, region = _load_region(args)
    gen = _generator(args, region.dim)
    pts = _parse_points(args.points, region.dim)
    overrides = {}
    grid = _parse_shear_grid(args.shear_grid)
    if grid is not None:
        overrides["shear_grid"] = grid
    if args.scales is not None:
        overrides["scales"] = _parse_scales(args.scales, (0, 0))
    config = (classify.default_config2d(gen, **overrides) if region.dim == 2
              else classify.default_config3d(gen, **overrides))
    fn = functools.partial(_classify_point, region, gen, config)
    results = _pmap(fn, pts, args.workers)
    outputs = [("classify.csv", _classification_rows(pts, results))]
    if args.format == "json":
        doc = [{"point": list(p), "verdict": r.verdict, "cone": r.cone,
                "pyramid": r.pyramid,
                "s_star": (r.s_star if r.s_star is None or
                           np.isscalar(r.s_star) else list(r.s_star)),
                "exponent": r.exponent, "limit": r.limit, "reason": r.reason}
               for p, r in zip(pts, results)]
        outputs = [("classify.json", _json_dumps(doc))]
    return outputs


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def _curvature_point_2d(region, gen, shear, p):
    if shear is None:
        res = classify.classify2d(region, gen, p)
        if res.s_star is None:
            raise classify.CurvatureRangeError(
                "point %r classified %s: no aligned shear for curvature"
                % (p, res.verdict))
        s_star, cone = float(res.s_star), res.cone or "h"
    else:
        s_star, cone = shear, "h"
    kappa = classify.estimate_curvature2d(region, gen, p, s_star, cone=cone)
    return s_star, kappa


def cmd_curvature(args):
    _, region = _load_region(args)
    gen = _generator(args, region.dim)
    pts = _parse_points(args.points, region.dim)
    buf = io.StringIO()
    if region.dim == 2:
        fn = functools.partial(_curvature_point_2d, region, gen, args.shear)
        rows = _pmap(fn, pts, args.workers)
        buf.write("px,py,s_star,kappa\n")
        for p, (s_star, kappa) in zip(pts, rows):
            buf.write("%.10g,%.10g,%.10g,%.10g\n" % (p[0], p[1], s_star,
                                                     kappa))
    else:
        table = classify.build_needle_table(gen)
        shear = (args.shear or 0.0, args.shear2)
        betas = [k * math.pi / args.beta_sweep
                 for k in range(args.beta_sweep + 1)]
        buf.write("px,py,pz,beta,kappa\n")
        for p in pts:
            for beta in betas:
                kappa = classify.directional_curvature3d(
                    region, gen, p, shear, beta, table=table)
                buf.write("%.10g,%.10g,%.10g,%.10g,%.10g\n"
                          % (p[0], p[1], p[2], beta, kappa))
    return [("curvature.csv", buf.getvalue())]


# ---------------------------------------------------------------------------
# frame
# ---------------------------------------------------------------------------

def cmd_frame(args):
    gen = (load_generator(args.generator) if args.generator is not None
           else default_generator_3d())
    cfg = frames.FrameConfig()
    outputs = []
    if gen.dim == 2:
        report = {"dimension": 2, "admissibility": frames.admissibility_2d(gen)}
    else:
        c_direct = frames.admissibility_3d(gen)
        c_group = frames.admissibility_3d_group(gen)
        lower, upper, field = frames.frame_bounds(gen, cfg)
        rng = np.random.default_rng(args.seed)
        sample = rng.uniform(-16.0, 16.0, size=(200, 3))
        negatives = outside_nonzero = 0
        for xi in sample:
            val = frames.delta_multiplier(gen, xi, cfg)
            if val < 0:
                negatives += 1
            if not frames.in_pyramid(xi, cfg) and val != 0.0:
                outside_nonzero += 1
        report = {
            "dimension": 3,
            "admissibility_direct": c_direct,
            "admissibility_group": c_group,
            "admissibility_rel_gap": abs(c_group / c_direct - 1.0),
            "frame_lower": lower,
            "frame_upper": upper,
            "grid_points": int(len(field.values)),
            "pyramid": {"u": cfg.u, "v": cfg.v, "w": cfg.w,
                        "gamma": cfg.gamma, "xi": cfg.xi},
            "random_check": {"seed": args.seed, "samples": len(sample),
                             "negative_delta": negatives,
                             "nonzero_outside_pyramid": outside_nonzero},
            "warnings": ([] if lower > 0 else
                         ["frame lower bound estimate not positive"]),
        }
        if args.ray is not None:
            direction = np.array([float(t) for t in args.ray.split(",")])
            buf = io.StringIO()
            buf.write("t,xi1,xi2,xi3,delta,window\n")
            for t in np.geomspace(1.0, 128.0, 25):
                xi = t * direction
                d = frames.delta_multiplier(gen, xi, cfg)
                w = frames.window_spectrum(gen, xi, cfg, cpsi=c_direct)
                buf.write("%.10g,%.10g,%.10g,%.10g,%.12e,%.12e\n"
                          % (t, xi[0], xi[1], xi[2], d, w))
            outputs.append(("frame_ray.csv", buf.getvalue()))
    outputs.insert(0, ("frame.json", _json_dumps(report)))
    return outputs


# ---------------------------------------------------------------------------
# demo
# ---------------------------------------------------------------------------

_DEMO_SCENE = {
    "disk": {"type": "disk", "center": (0.0, 0.0), "radius": 1.0},
    "square": {"type": "polygon",
               "vertices": ((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0),
                            (-1.0, 1.0))},
    "tangent_corner": {"type": "graph", "g_minus": (0.0, 0.0, -1.0),
                       "g_plus": (0.0, 0.0, 1.0)},
}

_DEMO_POINTS = {
    "disk": [(1.0, 0.0)],
    "square": [(1.0, 1.0), (1.0, 0.3), (0.0, 0.0)],
    "tangent_corner": [(0.0, 0.0)],
}


def cmd_demo(args):
    gen = default_generator_2d()
    buf = io.StringIO()
    buf.write("region,px,py,verdict,s_star,exponent,limit\n")
    for name in sorted(_DEMO_SCENE):
        region = regions.region_from_dict(dict(_DEMO_SCENE[name]))
        for p in _DEMO_POINTS[name]:
            res = classify.classify2d(region, gen, p)
            buf.write("%s,%.10g,%.10g,%s,%s,%s,%s\n" % (
                name, p[0], p[1], res.verdict,
                "" if res.s_star is None else "%.6g" % res.s_star,
                "" if res.exponent is None else "%.6g" % res.exponent,
                "" if res.limit is None else "%.6e" % res.limit))
    return [("demo.csv", buf.getvalue())]


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="shearedge",
        description="Edge detection and classification with compactly "
                    "supported shearlet-type transforms")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scene", help="scene JSON path")
        p.add_argument("--region", help="region name within the scene")
        p.add_argument("--generator", help="generator config JSON path")
        p.add_argument("--points", help="inline 'x,y;x,y' or @file.json")
        p.add_argument("--scales", help="'jmin:jmax' dyadic ladder or "
                                        "comma-separated scales")
        p.add_argument("--shear-grid", dest="shear_grid",
                       help="'lo:hi:n' or comma-separated shears")
        p.add_argument("--out", help="output directory (default: stdout)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=int, default=2026)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("transform", help="decay profiles at points")
    common(p)
    p.add_argument("--shear", type=float, default=0.0)
    p.add_argument("--shear2", type=float, default=0.0,
                   help="second shear component (3D)")
    p.add_argument("--cone", choices=("h", "v"), default="h")
    p.add_argument("--pyramid", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--policy", choices=("fixed", "track"), default="fixed")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("classify", help="boundary-point verdicts")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("curvature", help="curvature estimates")
    common(p)
    p.add_argument("--shear", type=float, default=None,
                   help="aligned shear (default: classify first)")
    p.add_argument("--shear2", type=float, default=0.0)
    p.add_argument("--beta-sweep", dest="beta_sweep", type=int, default=8,
                   help="number of needle angles over [0, pi] (3D)")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("frame", help="frame and admissibility diagnostics")
    common(p)
    p.add_argument("--ray", help="comma-separated ray direction for a "
                                 "Delta dump, e.g. '1,0.2,0.2'")
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("demo", help="bundled 2D classification demo")
    common(p)
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        outputs = args.func(args)
    except (CliConfigError,) + _CONFIG_ERRORS as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print("numerical error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    _emit(outputs, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
