"""CSV, JSON and SVG writers for fields, paths, ends and boundary curves."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .ads import factors_to_torus, null_to_torus

TWO_PI = 2 * np.pi


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "value") and hasattr(obj, "name"):
        return obj.value
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(obj) + "\n")
    return path


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{float(v):.12g}" if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def field_rows(field, sub=None, sup=None, residual=None):
    """Rows ``(x, y, v, sub, super, residual)`` of a solved conformal-factor field."""
    d = field.domain
    X, Y = np.meshgrid(d.x, d.y, indexing="ij")
    nan = np.full(d.shape, np.nan)
    cols = [X, Y, field.values, nan if sub is None else sub, nan if sup is None else sup,
            nan if residual is None else residual]
    return np.column_stack([np.asarray(c).ravel() for c in cols])


FIELD_HEADER = ("x", "y", "v", "sub", "super", "residual")
PATH_HEADER = ("t", "re_w", "im_w", "s0", "s1", "s2", "s3", "drift")


# ---------------------------------------------------------------------------
# SVG


def _split_seams(pts):
    """Split a polyline of torus angles wherever it wraps across the ``2pi`` seams."""
    pts = np.asarray(pts) % TWO_PI
    lines, cur = [], [pts[0]]
    for p, q in zip(pts[:-1], pts[1:]):
        if np.max(np.abs(q - p)) > np.pi:
            lines.append(cur)
            cur = [q]
        else:
            cur.append(q)
    lines.append(cur)
    return lines


def torus_svg(polylines, points=(), size=400, title=""):
    """Plot on the unrolled ``[0, 2pi)^2`` square (theta right, theta' up)."""
    s = size / TWO_PI

    def xy(p):
        return p[0] * s, size - p[1] * s

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>')
    # null directions: light grey lines at +-45 degrees
    for c in np.linspace(-size, size, 9):
        out.append(f'<line x1="{c:.2f}" y1="{size:.2f}" x2="{c + size:.2f}" y2="0" '
                   'stroke="#ddd" stroke-width="0.5"/>')
        out.append(f'<line x1="{c:.2f}" y1="0" x2="{c + size:.2f}" y2="{size:.2f}" '
                   'stroke="#ddd" stroke-width="0.5"/>')
    for line in polylines:
        if len(line) < 2:
            continue
        pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(xy, line))
        out.append(f'<polyline points="{pts}" fill="none" stroke="navy" stroke-width="1.5"/>')
    for p in points:
        x, y = xy(np.asarray(p) % TWO_PI)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2.5" fill="crimson"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def end_svg(end, size=400):
    verts = np.array([null_to_torus(v) for v in end.vertex_vectors()])
    return torus_svg(_split_seams(verts), verts, size, f"light-like polygonal end, n = {end.n}")


def curve_svg(curve, size=400):
    pts = np.array([factors_to_torus(a, b) for a, b in curve.vertices])
    return torus_svg(_split_seams(pts), pts, size, "completion function graph")


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
