"""Command-line entry point: ``adsmax <command> [options]``.

Exit codes: 0 success, 1 validation failure (bad input or a failed check),
2 numerical non-convergence.  Errors are reported as one JSON object on
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, config
from . import acceptance, ads, asymptotics as asy, crowns, export, frame as fr, quadratic as qd, vortex as vx

EXIT_OK, EXIT_VALIDATION, EXIT_NONCONVERGENCE = 0, 1, 2

_MATRIX2 = {"type": "array", "minItems": 2, "maxItems": 2,
            "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "tolerances": {"type": "object", "additionalProperties": _POSITIVE,
                       "propertyNames": {"enum": ["null", "form", "reality", "cauchy", "newton"]}},
        "seed": {"type": "integer"},
        "grid": {"type": "array", "items": {"type": "integer", "minimum": 3}, "minItems": 2, "maxItems": 2},
        "extent": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "solver_tol": _POSITIVE,
        "step": _POSITIVE,
        "problem": {"enum": ["flat", "pole", "decay"]},
        "pole_model": {"type": "object", "required": ["order", "coeffs"],
                       "properties": {"order": {"type": "integer", "minimum": 3},
                                      "coeffs": {"type": "array"}, "radius": _POSITIVE}},
        "path": {"type": "array", "minItems": 1,
                 "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}},
        "thetas": {"type": "array", "items": {"type": "number"}},
        "holonomy": {"type": "object", "required": ["left", "right"],
                     "properties": {"left": _MATRIX2, "right": _MATRIX2}},
        "crown": {"type": "object"},
        "outputs": {"type": "object"},
    },
}


class ValidationFailure(Exception):
    pass


def _load_config(path):
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationFailure(f"cannot read config {path}: {exc}") from exc
    jsonschema.validate(cfg, CONFIG_SCHEMA)
    return cfg


def _threads():
    raw = os.environ.get("ADSMAX_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValidationFailure(f"ADSMAX_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ValidationFailure("ADSMAX_THREADS must be a positive integer")
    return n


def _emit(args, name, text):
    """Write ``text`` to ``<out>/<name>``, or to stdout without ``--out``."""
    if args.out is None:
        sys.stdout.write(text)
        return None
    return export.write_text(Path(args.out) / name, text)


def _csv_text(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else f"{float(v):.12g}" for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Commands


def cmd_horo(args, cfg):
    if args.tmax <= 0 or args.samples < 2:
        raise ValidationFailure("--tmax must be positive and --samples at least 2")
    rows = []
    for t in np.linspace(0.0, args.tmax, args.samples):
        w = t * np.exp(1j * args.theta) + 1j * args.y
        s = fr.horospherical_embedding(w)
        rows.append([t, w.real, w.imag, *s])
    vec, _ = fr.horospherical_limit(args.theta, args.y)
    vec = vec / np.max(np.abs(vec))
    rows.append(["limit", "", "", *vec])
    _emit(args, "horo.csv", _csv_text(("t", "re_w", "im_w", "s0", "s1", "s2", "s3"), rows))
    return EXIT_OK


def _grid(cfg, default_extent, default_grid):
    x0, x1, y0, y1 = cfg.get("extent", default_extent)
    nx, ny = cfg.get("grid", default_grid)
    if not (x1 > x0 and y1 > y0):
        raise ValidationFailure("extent must be [x0, x1, y0, y1] with x1 > x0 and y1 > y0")
    return vx.GridDomain(x0, x1, y0, y1, nx, ny)


def cmd_solve(args, cfg):
    problem = args.problem or cfg.get("problem", "decay")
    tol = cfg.get("solver_tol", args.tol or 1e-10)
    sub = sup = None
    if problem == "pole":
        model = qd.PoleModel.from_dict(cfg["pole_model"]) if "pole_model" in cfg else None
        n = cfg.get("grid", [120, 120])[0]
        pp = vx.pole_model_problem(model, n=n)
        _, _, sup = vx.tune_supersolution(pp.domain, pp.z, pp.weight, pp.curvature, pp.density)
        _, _, sub = vx.tune_subsolution(pp.domain, pp.density, pp.q_abs, pp.weight, pp.curvature)
        field_ = vx.solve(pp.domain, pp.weight, pp.curvature, pp.density, sub=sub, sup=sup, tol=tol)
        weight, curvature, density = pp.weight, pp.curvature, pp.density
    else:
        if problem == "flat":
            dom = _grid(cfg, (-2.0, 2.0, 0.0, 2.0), (81, 41))
            boundary = 0.0
        else:
            dom = _grid(cfg, (-8.0, 8.0, 0.0, 8.0), (401, 201))
            boundary = acceptance.far_edge_data
        field_ = vx.solve(dom, boundary=boundary, tol=tol)
        weight, curvature, density = 1.0, 0.0, 1.0
    res = vx.pde_residual(field_.values, field_.domain, weight, curvature, density)
    rows = export.field_rows(field_, sub, sup, res)
    report = field_.report()
    report["problem"] = problem
    if problem == "decay":
        report["decay_slope"] = vx.decay_slope(field_, np.pi / 2)
    if args.out is None:
        sys.stdout.write(export.dumps_json(report) + "\n")
    else:
        export.write_csv(Path(args.out) / "field.csv", export.FIELD_HEADER, rows)
        export.write_json(Path(args.out) / "solve_report.json", report)
    return EXIT_OK


def _parse_path(args, cfg):
    if args.path:
        try:
            pts = [complex(p.replace(" ", "")) for p in args.path.split(";")]
        except ValueError as exc:
            raise ValidationFailure(f"bad --path {args.path!r}: use 'a+bj;c+dj;...'") from exc
    elif "path" in cfg:
        pts = [complex(a, b) for a, b in cfg["path"]]
    else:
        pts = [0j, 2 + 1j]
    return pts


def cmd_integrate(args, cfg):
    pts = _parse_path(args, cfg)
    jet = acceptance.decaying_jet() if args.jet == "radial" else fr.ZeroJet()
    step = cfg.get("step", args.step)
    if step <= 0:
        raise ValidationFailure("step must be positive")
    ff = fr.integrate_frame(pts, jet=jet, step=step)
    emb = fr.extract_embedding(ff, jet=jet)
    keep = slice(None, None, max(1, args.stride))
    rows = [[s, w.real, w.imag, *sig, d]
            for s, w, sig, d in zip(ff.s[keep], ff.w[keep], emb.sigma[keep], ff.unitarity_drift[keep])]
    report = {"path": [[p.real, p.imag] for p in pts], "jet": args.jet, "step": step,
              "steps_halved": ff.steps_halved, "samples": len(ff.s),
              "max_unitarity_drift": float(np.max(ff.unitarity_drift)),
              "max_reality_drift": float(np.max(ff.reality_drift)),
              "metric_residual": emb.metric_residual, "second_form_residual": emb.second_form_residual,
              "final_frame_real": ff.F[-1].real.tolist()}
    if args.out is None:
        sys.stdout.write(export.dumps_json(report) + "\n")
    else:
        export.write_csv(Path(args.out) / "path.csv", export.PATH_HEADER, rows)
        export.write_json(Path(args.out) / "integration_report.json", report)
    return EXIT_OK


def cmd_limits(args, cfg):
    thetas = args.theta or cfg.get("thetas") or [np.pi / 12, np.pi / 2, 11 * np.pi / 12]
    for th in thetas:
        asy.interval_of(th)
    jet = None if args.jet == "zero" else acceptance.decaying_jet()
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        lims = list(pool.map(lambda th: asy.ray_limit(th, args.y, jet), thetas))
    out = {"limits": [lim.to_dict() for lim in lims]}
    by_tag = {lim.interval: lim.L for lim in lims}
    trans = {}
    for side, a in (("plus", asy.J_PLUS), ("minus", asy.J_MINUS)):
        if a in by_tag and asy.J_ZERO in by_tag:
            mu, resid = asy.unipotent_factor(by_tag[a], by_tag[asy.J_ZERO], side)
            trans[side] = {"mu": complex(mu), "residual": resid}
    out["transitions"] = trans
    _emit(args, "limits.json", export.dumps_json(out) + "\n")
    return EXIT_OK


def _holonomy(cfg, rng):
    if "holonomy" in cfg:
        return ads.isometry_from_pair(np.array(cfg["holonomy"]["left"], dtype=float),
                                      np.array(cfg["holonomy"]["right"], dtype=float))
    return ads.isometry_from_pair(ads.hyperbolic_pair_sample(rng), ads.hyperbolic_pair_sample(rng))


def cmd_end(args, cfg):
    if not args.synthetic:
        raise ValidationFailure("only synthetic per-chart limits are supported; pass --synthetic")
    if args.n < 3:
        raise ValidationFailure("pole order n must be at least 3")
    rng = np.random.default_rng(args.seed)
    end = asy.synthetic_end(args.n, holonomy=_holonomy(cfg, rng), seed=args.seed)
    desc = end.to_dict()
    desc["equivariance_residual"] = asy.equivariance_residual(end)
    if args.out is None:
        sys.stdout.write(export.dumps_json(desc) + "\n")
    else:
        export.write_json(Path(args.out) / "end.json", desc)
        export.write_text(Path(args.out) / "end.svg", export.end_svg(end))
    return EXIT_OK


def cmd_curve(args, cfg):
    if "crown" in cfg:
        rec = cfg["crown"]
        data = (crowns.CrownEndData.from_dict(rec) if "theta" in rec
                else crowns.crown_from_parameters(rec["left"], rec["right"]))
    else:
        rng = np.random.default_rng(args.seed)
        data = acceptance.sample_crown(args.k, rng)
    if args.shift:
        data = crowns.relabel(data, args.shift, diagonal=not args.non_diagonal)
    f = crowns.build_completion(data)
    curve = crowns.curve_from_completion(f)
    desc = {"crown": data.to_dict(),
            "breakpoints": f.breakpoints, "values": f.values,
            "vertices": curve.vertices, "foliation": curve.labels}
    if args.out is None:
        sys.stdout.write(export.dumps_json(desc) + "\n")
    else:
        export.write_json(Path(args.out) / "curve.json", desc)
        export.write_text(Path(args.out) / "curve.svg", export.curve_svg(curve))
    return EXIT_OK


def cmd_check(args, cfg):
    results = acceptance.run_suite(args.suite)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.key:<8} {r.title}")
        for name in r.failures:
            print(f"      failed: {name}")
    if args.out is not None:
        export.write_json(Path(args.out) / "check.json",
                          [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results])
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory (default: write to stdout)")
    common.add_argument("--tol", type=float, help="Cauchy / solver tolerance override")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="adsmax", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"adsmax {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("horo", parents=[common], help="horospherical surface along a ray")
    h.add_argument("--tmax", type=float, default=10.0)
    h.add_argument("--theta", type=float, default=0.0)
    h.add_argument("--y", type=float, default=0.0)
    h.add_argument("--samples", type=int, default=101)
    h.set_defaults(func=cmd_horo)

    s = sub.add_parser("solve", parents=[common], help="vortex equation on a model domain")
    s.add_argument("--problem", choices=["flat", "pole", "decay"])
    s.set_defaults(func=cmd_solve)

    i = sub.add_parser("integrate", parents=[common], help="frame field along a polyline")
    i.add_argument("--path", help="vertices 'a+bj;c+dj;...'")
    i.add_argument("--jet", choices=["zero", "radial"], default="zero")
    i.add_argument("--step", type=float, default=1e-3)
    i.add_argument("--stride", type=int, default=10, help="keep every k-th sample in the CSV")
    i.set_defaults(func=cmd_integrate)

    lm = sub.add_parser("limits", parents=[common], help="osculating ray limits")
    lm.add_argument("--theta", type=float, action="append")
    lm.add_argument("--y", type=float, default=0.0)
    lm.add_argument("--jet", choices=["zero", "radial"], default="radial")
    lm.set_defaults(func=cmd_limits)

    e = sub.add_parser("end", parents=[common], help="light-like polygonal end")
    e.add_argument("--n", type=int, required=True, help="pole order")
    e.add_argument("--synthetic", action="store_true", help="use synthetic per-chart limits")
    e.set_defaults(func=cmd_end)

    c = sub.add_parser("curve", parents=[common], help="completion function of one crown end")
    c.add_argument("--k", type=int, default=2, help="number of cusps for random crown data")
    c.add_argument("--shift", type=int, default=0)
    c.add_argument("--non-diagonal", action="store_true")
    c.set_defaults(func=cmd_curve)

    ch = sub.add_parser("check", parents=[common], help="acceptance suite")
    ch.add_argument("--suite", default="all",
                    choices=["trivial", "acceptance", "all", *acceptance.CRITERIA])
    ch.set_defaults(func=cmd_check)
    return p


def _fail(code, kind, exc):
    payload = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    resid = getattr(exc, "residual", None)
    if resid is None:
        resid = getattr(exc, "gap", None)
    if resid is not None:
        payload["residual"] = float(resid)
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if "tolerances" in cfg:
            config.set_tolerances(**cfg["tolerances"])
        if args.tol is not None:
            config.set_tolerances(cauchy=args.tol)
        if "seed" in cfg and args.seed == 0:
            args.seed = cfg["seed"]
        _threads()
        return args.func(args, cfg)
    except (vx.ConvergenceError, asy.LimitError, qd.ChartError) as exc:
        return _fail(EXIT_NONCONVERGENCE, "non-convergence", exc)
    except (ValidationFailure, jsonschema.ValidationError, ValueError, KeyError) as exc:
        return _fail(EXIT_VALIDATION, "validation", exc)
    finally:
        config.reset()


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
