"""Completion functions of light-like polygonal ends and their boundary curves.

Boundary points are handled in unwrapped factor coordinates ``(alpha, beta)``:
``alpha`` is the left factor (constant along left-foliation segments) and
``beta`` the right factor.  One crown end is described by a hyperbolic pair
``(A, B)`` and fundamental angles ``theta_0 < ... < theta_{k-1}`` (left) and
``theta'_0 < ... < theta'_{k-1}`` (right), each lying on the counterclockwise
arc from the repelling to the attracting fixed point.  Indices extend to all
of ``Z`` by ``theta_{i+k} = A theta_i``.

The completion function is the left-closed step function with
``f = theta'_i`` on ``[theta_i, theta_{i+1})``; its graph with the vertical
jumps is a staircase whose vertices are ``(theta_i, theta'_{i-1})`` and
``(theta_i, theta'_i)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .ads import BoundaryPoint, CausalClass, causal_class, factors_to_torus, isometry_from_pair, torus_to_null
from .asymptotics import arc_of, mobius_unwrapped, positive_trace


class CrownDataError(ValueError):
    """Invalid crown end data (ordering or hyperbolicity)."""


def _lift_into(angles, start, length):
    out = []
    for a in angles:
        k = np.floor((a - start) / np.pi)
        b = a - k * np.pi
        if not start < b < start + length:
            raise CrownDataError(f"angle {a} is not inside the arc ({start}, {start + length})")
        out.append(float(b))
    return out


def _orbit(mat, fund, arc, i):
    """``i``-th element of the equivariant extension of ``fund`` (unwrapped)."""
    k = len(fund)
    m, r = divmod(i, k)
    start, length = arc
    x = fund[r]
    step = positive_trace(mat) if m >= 0 else np.linalg.inv(positive_trace(mat))
    for _ in range(abs(m)):
        x = mobius_unwrapped(step, x, start, length)
    return float(x)


@dataclass(frozen=True)
class CrownEndData:
    left: np.ndarray
    right: np.ndarray
    theta_fund: tuple
    theta_prime_fund: tuple
    label_offset: int = 0
    left_arc: tuple = field(init=False, repr=False)
    right_arc: tuple = field(init=False, repr=False)

    def __post_init__(self):
        A = positive_trace(self.left)
        B = positive_trace(self.right)
        for name, m in (("left", A), ("right", B)):
            if m.shape != (2, 2) or abs(np.linalg.det(m) - 1) > 1e-9:
                raise CrownDataError(f"{name} matrix must be in SL(2,R)")
            if abs(np.trace(m)) <= 2:
                raise CrownDataError(f"{name} matrix is not hyperbolic")
        if len(self.theta_fund) != len(self.theta_prime_fund) or not self.theta_fund:
            raise CrownDataError("angle lists must be nonempty and of equal length")
        la, ra = arc_of(A), arc_of(B)
        th = _lift_into(self.theta_fund, *la)
        tp = _lift_into(self.theta_prime_fund, *ra)
        for name, seq, mat, arc in (("theta", th, A, la), ("theta'", tp, B, ra)):
            if np.any(np.diff(seq) <= 0):
                raise CrownDataError(f"{name} angles must increase along the arc")
            if mobius_unwrapped(mat, seq[0], *arc) <= seq[-1]:
                raise CrownDataError(f"equivariant extension of {name} is not ordered")
        object.__setattr__(self, "left", A)
        object.__setattr__(self, "right", B)
        object.__setattr__(self, "theta_fund", tuple(th))
        object.__setattr__(self, "theta_prime_fund", tuple(tp))
        object.__setattr__(self, "left_arc", la)
        object.__setattr__(self, "right_arc", ra)

    @property
    def k(self):
        return len(self.theta_fund)

    def theta(self, i):
        return _orbit(self.left, self.theta_fund, self.left_arc, i)

    def theta_prime(self, i):
        return _orbit(self.right, self.theta_prime_fund, self.right_arc, i)

    @property
    def holonomy(self):
        return isometry_from_pair(self.left, self.right)

    def to_dict(self):
        return {"left": self.left.tolist(), "right": self.right.tolist(),
                "theta": list(self.theta_fund), "theta_prime": list(self.theta_prime_fund),
                "label_offset": self.label_offset}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["left"], dtype=float), np.array(d["right"], dtype=float),
                   tuple(d["theta"]), tuple(d["theta_prime"]), int(d.get("label_offset", 0)))

    def to_json(self):
        return json.dumps(self.to_dict())


def relabel(data: CrownEndData, shift: int, diagonal=True) -> CrownEndData:
    """Shift the cusp labels by ``shift``; only the left list when ``diagonal`` is False."""
    k = data.k
    th = [data.theta(shift + j) for j in range(k)]
    tp = [data.theta_prime(shift + j) for j in range(k)] if diagonal else list(data.theta_prime_fund)
    return CrownEndData(data.left, data.right, tuple(th), tuple(tp), data.label_offset + shift)


# ---------------------------------------------------------------------------
# Completion function


@dataclass(frozen=True)
class CompletionFunction:
    data: CrownEndData
    breakpoints: np.ndarray      # theta_i for i in the window
    values: np.ndarray           # theta'_i for the same i
    indices: np.ndarray
    endpoints: tuple             # ((c-, c'-), (c+, c'+)) unwrapped

    def __call__(self, alpha):
        return np.vectorize(self._eval, otypes=[float])(alpha)

    def _eval(self, alpha):
        d = self.data
        (cm, cpm), (cp, cpp) = self.endpoints
        if abs(alpha - cm) <= 1e-15:
            return cpm
        if abs(alpha - cp) <= 1e-15:
            return cpp
        if not cm < alpha < cp:
            raise ValueError("argument outside the arc of the crown")
        k = d.k
        # locate the fundamental window containing alpha
        m = 0
        while alpha < d.theta(m * k):
            m -= 1
            if m < -2000:
                return cpm
        while alpha >= d.theta((m + 1) * k):
            m += 1
            if m > 2000:
                return cpp
        i = m * k
        while i + 1 < (m + 1) * k and alpha >= d.theta(i + 1):
            i += 1
        return d.theta_prime(i)


def build_completion(data: CrownEndData, window=2) -> CompletionFunction:
    """Left-closed step function with jumps exactly at the ``theta_i``."""
    k = data.k
    idx = np.arange(-window * k, (window + 1) * k)
    bps = np.array([data.theta(i) for i in idx])
    vals = np.array([data.theta_prime(i) for i in idx])
    ls, ll = data.left_arc
    rs, rl = data.right_arc
    return CompletionFunction(data, bps, vals, idx, ((ls, rs), (ls + ll, rs + rl)))


# ---------------------------------------------------------------------------
# Boundary curves


@dataclass(frozen=True)
class BoundaryCurve:
    vertices: np.ndarray     # (m, 2) unwrapped (alpha, beta)
    labels: list             # label of segment vertices[j] -> vertices[j+1]
    endpoints: tuple
    k: int
    zero_index: int = 0      # position of the vertex (theta_0, theta'_{-1})

    @property
    def fundamental_factors(self):
        """The ``2k`` vertices ``(theta_i, theta'_{i-1}), (theta_i, theta'_i)`` for ``0 <= i < k``."""
        return self.vertices[self.zero_index:self.zero_index + 2 * self.k]

    def null_vectors(self, which=None):
        v = self.vertices if which is None else which
        return np.array([torus_to_null(*factors_to_torus(a, b)) for a, b in v])

    def boundary_points(self, which=None):
        v = self.vertices if which is None else which
        return [BoundaryPoint.from_factors(a, b) for a, b in v]

    def sample(self, per_segment=20):
        s = np.linspace(0, 1, per_segment, endpoint=False)[:, None]
        pts = [(1 - s) * a + s * b for a, b in zip(self.vertices[:-1], self.vertices[1:])]
        pts.append(self.vertices[-1:])
        return np.concatenate(pts)


def curve_from_completion(f: CompletionFunction) -> BoundaryCurve:
    """Staircase graph of ``f`` with its light-like vertical jumps."""
    d = f.data
    verts, labels = [], []
    zero = None
    for i in f.indices:
        if i == 0:
            zero = len(verts)
        verts.append((d.theta(i), d.theta_prime(i - 1)))
        verts.append((d.theta(i), d.theta_prime(i)))
        labels.extend(["L", "R"])
    labels = labels[:-1]
    return BoundaryCurve(np.array(verts), labels, f.endpoints, d.k, zero)


def _point_segment_distance(p, a, b):
    ab = b - a
    den = float(ab @ ab)
    t = 0.0 if den == 0 else float(np.clip((p - a) @ ab / den, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def _clip_polyline(verts, lo, hi, slack=1e-12):
    """Portion of a staircase with ``lo <= alpha <= hi`` (segments cut at the bounds).

    Vertical segments within ``slack`` of a bound are kept, so that the same
    vertex computed along two label orbits is not dropped by round-off.
    """
    out = []
    for a, b in zip(verts[:-1], verts[1:]):
        a0, b0 = a[0], b[0]
        if max(a0, b0) < lo - slack or min(a0, b0) > hi + slack:
            continue
        if a0 == b0:
            out.append((a, b))
            continue
        t0 = (max(lo, min(a0, b0)) - a0) / (b0 - a0)
        t1 = (min(hi, max(a0, b0)) - a0) / (b0 - a0)
        t0, t1 = sorted((t0, t1))
        out.append((a + t0 * (b - a), a + t1 * (b - a)))
    return out


def _directed(segs_a, segs_b, per_segment):
    worst = 0.0
    for a, b in segs_a:
        for t in np.linspace(0, 1, per_segment):
            p = a + t * (b - a)
            dist = min(_point_segment_distance(p, c, e) for c, e in segs_b)
            worst = max(worst, dist)
    return worst


def curve_distance(c1: BoundaryCurve, c2: BoundaryCurve, lo=None, hi=None, per_segment=8):
    """Hausdorff distance of two staircases restricted to a common alpha range."""
    lo = max(c1.vertices[0, 0], c2.vertices[0, 0]) if lo is None else lo
    hi = min(c1.vertices[-1, 0], c2.vertices[-1, 0]) if hi is None else hi
    s1 = _clip_polyline(c1.vertices, lo, hi)
    s2 = _clip_polyline(c2.vertices, lo, hi)
    if not s1 or not s2:
        raise ValueError("curves have no common range")
    return max(_directed(s1, s2, per_segment), _directed(s2, s1, per_segment))


def curves_equal(c1, c2, tol=1e-9, **kw):
    return curve_distance(c1, c2, **kw) <= tol


def curve_causal_scan(curve: BoundaryCurve, pairs=2000, seed=0, per_segment=10):
    rng = np.random.default_rng(seed)
    pts = curve.sample(per_segment)
    bps = [BoundaryPoint.from_factors(a, b) for a, b in pts]
    counts = {c: 0 for c in CausalClass}
    done = 0
    while done < pairs:
        i, j = rng.integers(0, len(pts), size=2)
        if np.allclose(pts[i], pts[j], atol=1e-14):
            continue
        counts[causal_class(bps[i], bps[j])] += 1
        done += 1
    return counts


# ---------------------------------------------------------------------------
# Crown parameter records


def hyperbolic_from_axis(length, axis_angle):
    """SL(2,R) translation of the given length along an axis rotated by ``axis_angle``."""
    c, s = np.cos(axis_angle), np.sin(axis_angle)
    rot = np.array([[c, -s], [s, c]])
    return rot @ np.diag([np.exp(length / 2), np.exp(-length / 2)]) @ rot.T


def _cusp_angles(length, offset, weights, axis_angle):
    w = np.asarray(weights, dtype=float)
    if w.size == 0 or np.any(w <= 0):
        raise CrownDataError("cusp weights must be positive")
    frac = np.concatenate([[0.0], np.cumsum(w)[:-1]]) / w.sum()
    x = -np.exp(offset + length * frac)           # negative reals on the ccw arc
    ang = np.arctan2(np.ones_like(x), x) + axis_angle
    return ang


def crown_from_parameters(left: dict, right: dict) -> CrownEndData:
    """Crown end data from per-factor records ``{length, offset, weights, axis}``.

    A record describes a crown with ``len(weights)`` cusps: the boundary
    geodesic has translation length ``length`` along an axis rotated by
    ``axis``, and the lifted cusps sit at ``-exp(offset + length c_j)`` on the
    real line of the upper half-plane, ``c_j`` the normalised cumulative
    weights.
    """
    recs = []
    for rec in (left, right):
        ln = float(rec["length"])
        if ln <= 0:
            raise CrownDataError("boundary length must be positive")
        axis = float(rec.get("axis", 0.0))
        mat = hyperbolic_from_axis(ln, axis)
        recs.append((mat, _cusp_angles(ln, float(rec.get("offset", 0.0)), rec["weights"], axis)))
    (A, th), (B, tp) = recs
    if len(th) != len(tp):
        raise CrownDataError("left and right crowns need the same number of cusps")
    return CrownEndData(A, B, tuple(th), tuple(tp))
