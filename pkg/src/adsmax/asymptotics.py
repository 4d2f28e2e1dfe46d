"""Osculating map, ray limits and the light-like polygonal ends at a pole.

The osculating map ``G = F F0^{-1}`` compares a frame with the horospherical
frame.  In a natural coordinate (``q = 1``) it obeys

    dG = G F0 Theta F0^{-1},   Theta = (U - U0) dw + (V - V0) dwbar,

and ``R^{-1} Theta R`` has a sparse closed form in ``4 sinh^2(phi/2)``,
``2 sinh(phi)`` and ``Im(phi_w dw)``.  Conjugating by the diagonal factor of
``F0`` entrywise keeps the generator accurate even where ``F0`` itself is
huge, so ``G`` is integrated directly and ``F0`` is never inverted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import config
from .ads import (
    BoundaryPoint,
    CausalClass,
    IsometryPair,
    causal_class,
    fixed_points,
    hyperbolic_pair_sample,
    in_so22,
    isometry_from_pair,
    limit_fixed_pair,
    projective_distance,
    to_matrix,
)
from .frame import A0, A0_INV, R, R_INV, horospherical_frame_inv

J_PLUS, J_ZERO, J_MINUS = "J+", "J0", "J-"

REFERENCE_VECTORS = {
    J_PLUS: np.array([1.0, 0.0, 1.0, 0.0]),
    J_ZERO: np.array([0.0, 1.0, 0.0, 1.0]),
    J_MINUS: np.array([-1.0, 0.0, 1.0, 0.0]),
}

# (X - I) patterns of the two unipotent transitions, in 0-based indices
_PATTERNS = {
    "plus": [(0, 3), (1, 2)],
    "minus": [(1, 0), (2, 3)],
}


class LimitError(RuntimeError):
    """A ray limit could not be certified (unstable ray or no Cauchy behaviour)."""

    def __init__(self, message, gap=np.nan):
        super().__init__(message)
        self.gap = gap


# ---------------------------------------------------------------------------
# Osculating map


def osculate(F, w, tol=None):
    """``G = F F0(w)^{-1}`` using the closed-form inverse; returns a real matrix."""
    tol = config.get().reality if tol is None else tol
    G = np.asarray(F) @ horospherical_frame_inv(w)
    scale = max(1.0, float(np.max(np.abs(G))))
    imag = float(np.max(np.abs(G.imag))) / scale
    if imag > tol:
        raise ValueError(f"osculating map is not real (imaginary part {imag:.3e})")
    G = G.real
    if not in_so22(G, tol=max(tol, config.get().form)):
        raise ValueError("osculating map does not preserve the (2,2) form")
    return G


def osculating_generator(w, dw, jet):
    """Real 4x4 matrix ``F0 Theta F0^{-1}`` at ``w`` for the direction ``dw`` (q = 1)."""
    phi, phi_w = jet(w)
    s = 4 * np.sinh(phi / 2) ** 2
    d = 2 * np.sinh(phi)
    a = 1j * np.imag(phi_w * dw)
    ex, ey = dw.real, dw.imag
    cp = 0.5j * d * (ex + ey)
    cm = 0.5j * d * (ex - ey)
    n = np.array([
        [s * ex, a - cp, 0, a + cm],
        [a + cp, s * ey, a + cm, 0],
        [0, a - cm, -s * ex, a + cp],
        [a - cm, 0, a - cp, -s * ey],
    ], dtype=complex)
    e = np.array([2 * w.real, 2 * w.imag, -2 * w.real, -2 * w.imag])
    expo = e[:, None] - e[None, :]
    # entries vanish structurally where the exponent would overflow
    n = n * np.exp(np.minimum(np.where(n != 0, expo, 0.0), 700.0))
    return (A0 @ R @ n @ R_INV @ A0_INV).real


def integrate_osculating(path, jet, G_init=None, t_eval=None, rtol=1e-11, atol=1e-13):
    """Integrate ``G`` along a polyline.

    ``t_eval`` are arc-length values along the polyline at which ``G`` is
    returned; the final value is always returned last.
    """
    pts = np.asarray(path, dtype=complex).ravel()
    G = np.eye(4) if G_init is None else np.array(G_init, dtype=float)
    lengths = np.abs(np.diff(pts))
    t_eval = np.array([] if t_eval is None else t_eval, dtype=float)
    out = []
    s0 = 0.0
    for w0, w1, ln in zip(pts[:-1], pts[1:], lengths):
        if ln == 0:
            continue
        dw = (w1 - w0) / ln

        def rhs(t, g, w0=w0, dw=dw):
            return (g.reshape(4, 4) @ osculating_generator(w0 + dw * t, dw, jet)).ravel()

        local = t_eval[(t_eval > s0) & (t_eval <= s0 + ln)] - s0
        sol = solve_ivp(rhs, (0.0, ln), G.ravel(), method="DOP853", rtol=rtol, atol=atol,
                        t_eval=local if local.size else None)
        if not sol.success:
            raise LimitError(f"osculating integration failed: {sol.message}")
        if local.size:
            out.extend(sol.y[:, k].reshape(4, 4) for k in range(local.size))
        G = sol.y[:, -1].reshape(4, 4)
        s0 += ln
    return out, G


# ---------------------------------------------------------------------------
# Ray limits


def interval_of(theta, tol=1e-9):
    """Interval tag of a ray direction; rejects the unstable directions."""
    if theta < -tol or theta > np.pi + tol:
        raise ValueError("ray direction must lie in [0, pi] in a natural chart")
    if abs(theta - np.pi / 4) <= tol or abs(theta - 3 * np.pi / 4) <= tol:
        raise ValueError(f"direction {theta} is unstable")
    if theta < np.pi / 4:
        return J_PLUS
    if theta < 3 * np.pi / 4:
        return J_ZERO
    return J_MINUS


@dataclass(frozen=True)
class OsculatingLimit:
    interval: str
    L: np.ndarray
    cauchy_gap: float
    theta: float = np.nan
    offset: float = np.nan
    t_final: float = np.nan
    gaps: tuple = field(default=(), repr=False)

    def to_dict(self):
        return {"interval": self.interval, "L": self.L.tolist(), "cauchy_gap": self.cauchy_gap,
                "theta": self.theta, "offset": self.offset, "t_final": self.t_final}


def ray_limit(theta, y=0.0, jet=None, base=1j, t0=1.0, growth=1.5, tol=None, t_max=400.0):
    """Limit of ``G`` along ``gamma(t) = e^{i theta} t + i y``.

    ``G`` is normalised to the identity at ``base``, reached by a straight
    segment to ``iy``.  ``G`` is sampled at ``t0, 1.5 t0, 2.25 t0, ...``
    until two successive samples differ by less than ``tol`` (sup norm).
    """
    tol = config.get().cauchy if tol is None else tol
    tag = interval_of(theta)
    if jet is None:
        return OsculatingLimit(tag, np.eye(4), 0.0, theta, y, 0.0, ())
    start = 1j * y
    G0 = np.eye(4)
    if abs(start - base) > 0:
        _, G0 = integrate_osculating([base, start], jet)
    ts = [t0]
    while ts[-1] * growth <= t_max:
        ts.append(ts[-1] * growth)
    direction = np.exp(1j * theta)
    samples, _ = integrate_osculating([start, start + direction * ts[-1]], jet, G0, t_eval=ts)
    gaps = []
    for k in range(1, len(samples)):
        gap = float(np.max(np.abs(samples[k] - samples[k - 1])))
        gaps.append(gap)
        if gap < tol:
            return OsculatingLimit(tag, samples[k], gap, theta, y, ts[k], tuple(gaps))
    raise LimitError(f"no Cauchy behaviour along theta={theta:.4f} up to t={ts[-1]:.1f}",
                     gaps[-1] if gaps else np.nan)


def ray_limit_sequence(theta, y=0.0, jet=None, base=1j, ts=(1.0, 2.0, 4.0, 8.0)):
    """Values of ``G`` at the given ray parameters (for rate fits)."""
    start = 1j * y
    G0 = np.eye(4)
    if jet is None:
        return [np.eye(4) for _ in ts]
    if abs(start - base) > 0:
        _, G0 = integrate_osculating([base, start], jet)
    samples, _ = integrate_osculating([start, start + np.exp(1j * theta) * max(ts)], jet, G0,
                                      t_eval=list(ts))
    return samples


def convergence_rate(theta):
    """Predicted exponential rate ``2 sqrt2 - c(theta)`` of ``G`` along a ray.

    ``c(theta)`` is the largest growth exponent of ``F0 (.) F0^{-1}`` along the
    ray, i.e. the maximum over the active entries of ``d_i - d_j`` with
    ``d = 2 (cos, sin, -cos, -sin)``.  It peaks at ``2 sqrt2`` on the unstable
    directions.
    """
    c, s = np.cos(theta), np.sin(theta)
    d = 2 * np.array([c, s, -c, -s])
    active = [(0, 1), (0, 3), (1, 0), (1, 2), (2, 1), (2, 3), (3, 0), (3, 2)]
    return 2 * np.sqrt(2) - max(d[i] - d[j] for i, j in active)


# ---------------------------------------------------------------------------
# Unipotent transitions and limit points


def transition_matrix(L_a, L_b):
    """``X = R^{-1} A0^{-1} L_a^{-1} L_b A0 R``."""
    return R_INV @ A0_INV @ np.linalg.solve(L_a, L_b) @ A0 @ R


def unipotent_factor(L_a, L_b, side="plus"):
    """Fit ``X ~ I + mu P`` with the pattern ``P`` of the given side.

    Returns ``(mu, residual)`` where the residual is the largest entry of
    ``X - I - mu P``.
    """
    if side not in _PATTERNS:
        raise ValueError("side must be 'plus' or 'minus'")
    X = transition_matrix(L_a, L_b)
    idx = _PATTERNS[side]
    mu = np.mean([X[i, j] for i, j in idx])
    P = np.zeros((4, 4), dtype=complex)
    for i, j in idx:
        P[i, j] = 1.0
    resid = float(np.max(np.abs(X - np.eye(4) - mu * P)))
    mu = complex(mu)
    return (mu.real if abs(mu.imag) <= 1e-12 * max(1.0, abs(mu)) else mu), resid


def limit_point(L, interval) -> BoundaryPoint:
    """Boundary point ``L v`` for the reference null vector of the interval."""
    v = np.asarray(L) @ REFERENCE_VECTORS[interval]
    return BoundaryPoint.from_null(v)


def limit_vector(L, interval):
    return np.asarray(L) @ REFERENCE_VECTORS[interval]


# ---------------------------------------------------------------------------
# Polygonal ends


@dataclass
class PolygonalEnd:
    n: int
    fundamental_vectors: np.ndarray      # (2(n-2), 4) null vectors, consistent lifts
    holonomy: IsometryPair
    foliation_labels: list
    shared_vertex_gap: float = 0.0
    closure_gap: float = 0.0
    window: int = 2

    @property
    def fundamental_vertices(self):
        return [BoundaryPoint.from_null(v) for v in self.fundamental_vectors]

    @property
    def k(self):
        return len(self.fundamental_vectors)

    def vertex_vector(self, i):
        """Null vector of vertex ``i`` (any integer), using holonomy equivariance."""
        m, r = divmod(i, self.k)
        g = self.holonomy.power(m).rep4 if m else np.eye(4)
        return g @ self.fundamental_vectors[r]

    def vertex_vectors(self, window=None):
        window = self.window if window is None else window
        return np.array([self.vertex_vector(i) for i in range(-window * self.k, (window + 1) * self.k + 1)])

    def sample_points(self, per_segment=20, window=None):
        """Null vectors sampled along all segments of the windowed chain."""
        vs = self.vertex_vectors(window)
        pts = []
        s = np.linspace(0, 1, per_segment, endpoint=False)
        for a, b in zip(vs[:-1], vs[1:]):
            a = a / np.linalg.norm(a)
            b = b / np.linalg.norm(b)
            pts.append((1 - s)[:, None] * a + s[:, None] * b)
        pts.append(vs[-1:] / np.linalg.norm(vs[-1]))
        return np.concatenate(pts)

    def to_dict(self):
        return {
            "n": self.n,
            "vertices": [p.as_list() for p in self.fundamental_vertices],
            "foliation": list(self.foliation_labels),
            "holonomy": self.holonomy.to_dict(),
            "shared_vertex_gap": self.shared_vertex_gap,
            "closure_gap": self.closure_gap,
        }


def _ray_gap(u, v):
    """Distance between the positive rays of two vectors."""
    return float(np.linalg.norm(u / np.linalg.norm(u) - v / np.linalg.norm(v)))


def segment_label(u, v, tol=1e-7):
    """``"L"`` if the left factor is constant along ``[u, v]``, ``"R"`` if the right one is."""
    mu, mv = to_matrix(u), to_matrix(v)
    # rank-one matrices a b^T: equal column spaces <=> same left factor
    left_same = abs(np.linalg.det(np.column_stack([_dominant_col(mu), _dominant_col(mv)])))
    right_same = abs(np.linalg.det(np.column_stack([_dominant_row(mu), _dominant_row(mv)])))
    if left_same <= tol and right_same > tol:
        return "L"
    if right_same <= tol and left_same > tol:
        return "R"
    raise ValueError("segment is not light-like along a single ruling")


def _dominant_col(m):
    c = m[:, int(np.argmax(np.linalg.norm(m, axis=0)))]
    return c / np.linalg.norm(c)


def _dominant_row(m):
    r = m[int(np.argmax(np.linalg.norm(m, axis=1))), :]
    return r / np.linalg.norm(r)


def positive_trace(a):
    a = np.asarray(a, dtype=float)
    return -a if np.trace(a) < 0 else a


def assemble_end(n, holonomy: IsometryPair, chart_limits, tol=1e-6, window=2) -> PolygonalEnd:
    """Chain the per-chart vees into a holonomy-equivariant light-like polygon.

    ``chart_limits`` holds one ``L_{k,0}`` per natural chart (``n - 2`` of
    them).  Chart ``k`` contributes the vee ``L_{k,0} {[1,0,1,0], [0,1,0,1],
    [-1,0,1,0]}``; the last vertex of a vee must coincide with the first of
    the next one, and the last vee must end at the holonomy image of the
    first vertex.
    """
    if int(n) != n or n < 3:
        raise ValueError("pole order must be an integer >= 3")
    Ls = [np.asarray(L, dtype=float) for L in chart_limits]
    if len(Ls) != n - 2:
        raise ValueError(f"expected {n - 2} chart limits, got {len(Ls)}")
    for L in Ls:
        if not in_so22(L, tol=1e-8):
            raise ValueError("chart limit is not in SO0(2,2)")
    vees = [[L @ REFERENCE_VECTORS[t] for t in (J_PLUS, J_ZERO, J_MINUS)] for L in Ls]
    shared = 0.0
    for a, b in zip(vees[:-1], vees[1:]):
        shared = max(shared, _ray_gap(a[2], b[0]))
    closure = _ray_gap(vees[-1][2], holonomy.rep4 @ vees[0][0])
    if shared > tol:
        raise ValueError(f"consecutive vees do not share an extreme vertex (gap {shared:.3e})")
    if closure > tol:
        raise ValueError(f"holonomy does not close the chain (gap {closure:.3e})")
    verts = []
    for v in vees:
        verts.extend([v[0], v[1]])
    verts = np.array(verts)
    nxt = np.vstack([verts[1:], (holonomy.rep4 @ verts[0])[None, :]])
    labels = [segment_label(a, b) for a, b in zip(verts, nxt)]
    return PolygonalEnd(int(n), verts, holonomy, labels, shared, closure, window)


def achronality_scan(end: PolygonalEnd, pairs=10_000, seed=0, per_segment=20):
    """Causal classes of random pairs of sampled points on the end (counts by class)."""
    rng = np.random.default_rng(seed)
    pts = end.sample_points(per_segment)
    bps = [BoundaryPoint.from_null(p) for p in pts]
    counts = {c: 0 for c in CausalClass}
    done = 0
    while done < pairs:
        i, j = rng.integers(0, len(bps), size=2)
        if i == j or projective_distance(pts[i], pts[j]) < 1e-12:
            continue
        counts[causal_class(bps[i], bps[j])] += 1
        done += 1
    return counts


def equivariance_residual(end: PolygonalEnd):
    """Max ray distance between vertex ``i + 2(n-2)`` and the holonomy image of vertex ``i``."""
    k = end.k
    worst = 0.0
    for i in range(-end.window * k, end.window * k):
        worst = max(worst, _ray_gap(end.vertex_vector(i + k), end.holonomy.rep4 @ end.vertex_vector(i)))
    return worst


def accumulation_gaps(end: PolygonalEnd, iterations=30):
    """Projective distances of ``hol^{+-N}`` images of the vertices to ``x^{++}``, ``x^{--}``."""
    fp = limit_fixed_pair(end.holonomy.left, end.holonomy.right)
    fwd = end.holonomy.power(iterations).rep4
    bwd = end.holonomy.power(-iterations).rep4
    plus = max(projective_distance(fwd @ v, fp["++"].null_rep) for v in end.fundamental_vectors)
    minus = max(projective_distance(bwd @ v, fp["--"].null_rep) for v in end.fundamental_vectors)
    return plus, minus


# ---------------------------------------------------------------------------
# Synthetic per-chart limits


def _unit(a):
    return np.array([np.cos(a), np.sin(a)])


def arc_of(a):
    """Counterclockwise arc ``(start, length)`` from the repelling to the attracting point."""
    att, rep = fixed_points_positive(a)
    length = (att - rep) % np.pi
    return rep, length


def fixed_points_positive(a):
    return fixed_points(positive_trace(a))


def mobius_unwrapped(a, alpha, start, length):
    """Möbius image of an arc angle, lifted back into ``[start, start + length]``."""
    v = positive_trace(a) @ _unit(alpha)
    ang = np.arctan2(v[1], v[0])
    k = np.round((start + length / 2 - ang) / np.pi)
    return ang + k * np.pi


def _pair_through(a0, a1, s):
    """SL(2) matrix sending direction 0 to ``a0`` and pi/2 to ``a1`` with positive scales."""
    delta = a1 - a0
    if not 0 < delta < np.pi:
        raise ValueError("consecutive arc angles must increase by less than pi")
    return np.column_stack([s * _unit(a0), _unit(a1) / (s * np.sin(delta))])


def synthetic_chart_limits(n, holonomy: IsometryPair, rng=None, alphas=None, betas=None):
    """Per-chart ``L_{k,0}`` realising a staircase between the holonomy fixed points.

    The fundamental angles are drawn (or taken) in ``[x, A x)`` for a base
    point ``x`` of each factor arc; ``L_{k,0}`` is the isometry sending the
    reference vee to the ``k``-th step of the staircase.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    k = n - 2
    A, B = positive_trace(holonomy.left), positive_trace(holonomy.right)

    def angles(mat, given):
        start, length = arc_of(mat)
        if given is not None:
            base = np.asarray(given, dtype=float)
        else:
            x0 = start + length * rng.uniform(0.3, 0.7)
            x1 = mobius_unwrapped(mat, x0, start, length)
            base = np.sort(x0 + (x1 - x0) * np.concatenate([[0.0], np.sort(rng.uniform(0.05, 0.95, k - 1))]))
        nxt = mobius_unwrapped(mat, base[0], start, length)
        return np.concatenate([base, [nxt]])

    al = angles(A, alphas)
    be = angles(B, betas)
    Ls = []
    for j in range(k):
        a = _pair_through(al[j], al[j + 1], rng.uniform(0.5, 2.0))
        b = _pair_through(be[j], be[j + 1], rng.uniform(0.5, 2.0))
        Ls.append(isometry_from_pair(a, b).rep4)
    return Ls


def synthetic_end(n, holonomy=None, seed=0, window=2):
    rng = np.random.default_rng(seed)
    if holonomy is None:
        holonomy = isometry_from_pair(hyperbolic_pair_sample(rng), hyperbolic_pair_sample(rng))
    hol = isometry_from_pair(positive_trace(holonomy.left), positive_trace(holonomy.right))
    Ls = synthetic_chart_limits(n, hol, rng)
    return assemble_end(n, hol, Ls, window=window)

