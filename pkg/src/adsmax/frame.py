"""Moving frames of maximal embeddings and the horospherical reference surface.

A frame ``F`` is a 4x4 complex matrix whose columns are ``(v1, v2, N, sigma)``
with ``v1 = sigma_w / e^phi`` and ``v2 = sigma_wbar / e^phi``.  It evolves by
the right action ``dF = F (U dw + V dwbar)`` where ``(U, V)`` are the connection
coefficients returned by :func:`connection_at`.  With ``phi = 0, q = 1`` the
closed form is ``F0(w) = A0 R D(w) R^{-1}`` with
``D(w) = diag(e^{2 Re w}, e^{2 Im w}, e^{-2 Re w}, e^{-2 Im w})``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .ads import bilinear_form

H = np.diag([1.0, 1.0, -1.0, -1.0])

U0 = np.zeros((4, 4))
V0 = np.zeros((4, 4))
for _i, _j in [(0, 3), (1, 2), (2, 0), (3, 1)]:
    U0[_i, _j] = 1.0
for _i, _j in [(0, 2), (1, 3), (2, 1), (3, 0)]:
    V0[_i, _j] = 1.0

A0 = np.array([
    [1, 1, 0, 0],
    [-1j, 1j, 0, 0],
    [0, 0, 1, 1],
    [0, 0, -1, 1],
], dtype=complex) / np.sqrt(2)
A0_INV = np.linalg.inv(A0)


def compute_diagonalizer(sample=1.0 + 0.37j):
    """Constant unitary R with R^-1 (U0 w + V0 wbar) R = diag(2x, 2y, -2x, -2y).

    Obtained from the eigenbasis at a generic sample point (the point must
    have ``|Re w| != |Im w|`` so that the spectrum is simple).  Each column
    is normalised and phase-fixed so that its first nonzero entry is real
    and positive.
    """
    x, y = sample.real, sample.imag
    if min(abs(x), abs(y), abs(abs(x) - abs(y))) < 1e-3:
        raise ValueError("sample point gives a degenerate spectrum")
    m = U0 * sample + V0 * np.conj(sample)
    evals, evecs = np.linalg.eigh(m)
    r = np.empty((4, 4), dtype=complex)
    for k, target in enumerate([2 * x, 2 * y, -2 * x, -2 * y]):
        col = evecs[:, int(np.argmin(np.abs(evals - target)))]
        col = col / np.linalg.norm(col)
        lead = col[np.flatnonzero(np.abs(col) > 1e-12)[0]]
        r[:, k] = col * abs(lead) / lead
    return r


R = compute_diagonalizer()
R_INV = R.conj().T


def _diag_exponents(w):
    return np.array([2 * w.real, 2 * w.imag, -2 * w.real, -2 * w.imag])


def horospherical_frame(w):
    return A0 @ (R * np.exp(_diag_exponents(w))) @ R_INV


def horospherical_frame_inv(w):
    """Closed-form inverse of ``F0(w)`` (negated exponents, no numerical inversion)."""
    return (R * np.exp(-_diag_exponents(w))) @ R_INV @ A0_INV


def horospherical_embedding(w):
    """The horospherical maximal surface ``sigma0(w)`` on the quadric."""
    x, y = 2 * np.real(w), 2 * np.imag(w)
    return np.array([np.sinh(x), np.sinh(y), np.cosh(x), np.cosh(y)]) / np.sqrt(2)


def connection_at(phi, phi_w, q, phi_wbar=None):
    """Connection coefficients ``(U, V)`` of ``dw`` and ``dwbar`` at one point."""
    if phi_wbar is None:
        phi_wbar = np.conj(phi_w)
    ep, em = np.exp(phi), np.exp(-phi)
    qb = np.conj(q)
    u = np.array([
        [phi_w, 0, 0, ep],
        [0, -phi_w, q * em, 0],
        [q * em, 0, 0, 0],
        [0, ep, 0, 0],
    ], dtype=complex)
    v = np.array([
        [-phi_wbar, 0, em * qb, 0],
        [0, phi_wbar, 0, ep],
        [0, em * qb, 0, 0],
        [ep, 0, 0, 0],
    ], dtype=complex)
    return u, v


@dataclass(frozen=True)
class ConnectionSample:
    U: np.ndarray
    V: np.ndarray


# ---------------------------------------------------------------------------
# Log-density jets: callables w -> (phi, phi_w)


class ZeroJet:
    def __call__(self, w):
        return 0.0, 0.0j


class RadialJet:
    """``phi(w) = profile(|w - center|)`` for a radial profile with derivative."""

    def __init__(self, profile, center=0j):
        self.profile = profile
        self.center = complex(center)

    def __call__(self, w):
        z = w - self.center
        r = abs(z)
        val, der = self.profile(r)
        return float(val), 0.5 * der * np.conj(z) / r


class GridJet:
    """Bilinear interpolation of a grid field and its centred-difference gradient."""

    def __init__(self, x, y, values):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.v = np.asarray(values, dtype=float)
        if self.v.shape != (self.x.size, self.y.size):
            raise ValueError("values must have shape (len(x), len(y))")
        self.hx = self.x[1] - self.x[0]
        self.hy = self.y[1] - self.y[0]
        self.vx = np.gradient(self.v, self.hx, axis=0, edge_order=2)
        self.vy = np.gradient(self.v, self.hy, axis=1, edge_order=2)

    def _interp(self, field, w):
        fx = (w.real - self.x[0]) / self.hx
        fy = (w.imag - self.y[0]) / self.hy
        if not (0 <= fx <= self.x.size - 1 and 0 <= fy <= self.y.size - 1):
            raise ValueError(f"point {w} lies outside the grid")
        i = min(int(fx), self.x.size - 2)
        j = min(int(fy), self.y.size - 2)
        tx, ty = fx - i, fy - j
        return ((1 - tx) * (1 - ty) * field[i, j] + tx * (1 - ty) * field[i + 1, j]
                + (1 - tx) * ty * field[i, j + 1] + tx * ty * field[i + 1, j + 1])

    def __call__(self, w):
        val = self._interp(self.v, w)
        gx = self._interp(self.vx, w)
        gy = self._interp(self.vy, w)
        return float(val), 0.5 * (gx - 1j * gy)


def _const_one(w):
    return 1.0 + 0j


# ---------------------------------------------------------------------------
# Flatness


def _d1_4th(f, k, h, axis):
    """Fourth-order centred first derivative of a sampled field at index k."""
    take = (lambda o: f[k[0] + o, k[1]]) if axis == 0 else (lambda o: f[k[0], k[1] + o])
    return (-take(2) + 8 * take(1) - 8 * take(-1) + take(-2)) / (12 * h)


def flatness_residual(phi, q_func, index, h, origin=0j):
    """Max-entry norm of the curvature ``U_wbar - V_w + [V, U]`` at a grid node.

    ``phi`` is a 2-D array on a uniform grid of spacing ``h`` (axis 0 = Re w,
    axis 1 = Im w) whose node ``(0, 0)`` sits at ``origin``.  Derivatives use
    fourth-order centred differences, so the node needs four neighbours in
    every direction.
    """
    phi = np.asarray(phi, dtype=float)
    i, j = index
    if i < 4 or j < 4 or i > phi.shape[0] - 5 or j > phi.shape[1] - 5:
        raise ValueError("stencil exits the grid")

    def conn(a, b):
        px = _d1_4th(phi, (a, b), h, 0)
        py = _d1_4th(phi, (a, b), h, 1)
        return connection_at(phi[a, b], 0.5 * (px - 1j * py), q_func(origin + h * (a + 1j * b)))

    def grad(which, axis):
        coeff = {2: -1.0, 1: 8.0, -1: -8.0, -2: 1.0}
        acc = 0
        for o in coeff:
            a, b = (i + o, j) if axis == 0 else (i, j + o)
            acc = acc + coeff[o] * conn(a, b)[which]
        return acc / (12 * h)

    u, v = conn(i, j)
    u_wbar = 0.5 * (grad(0, 0) + 1j * grad(0, 1))
    v_w = 0.5 * (grad(1, 0) - 1j * grad(1, 1))
    curv = u_wbar - v_w + (v @ u - u @ v)
    return float(np.max(np.abs(curv)))


# ---------------------------------------------------------------------------
# Frame integration


@dataclass(frozen=True)
class FrameField:
    s: np.ndarray            # arc-length parameter of each sample
    w: np.ndarray            # complex path points
    F: np.ndarray            # frames, shape (n, 4, 4)
    unitarity_drift: np.ndarray
    reality_drift: np.ndarray
    steps_halved: int = 0


def _rhs(F, w, dw, jet, q_func):
    phi, phi_w = jet(w)
    u, v = connection_at(phi, phi_w, q_func(w))
    return F @ (u * dw + v * np.conj(dw))


def unitarity_drift(F):
    scale = max(1.0, float(np.max(np.abs(F))) ** 2)
    return float(np.max(np.abs(F.conj().T @ H @ F - H))) / scale


def reality_drift(F):
    scale = max(1.0, float(np.max(np.abs(F))))
    return float(np.max(np.abs(F[:, 2:].imag))) / scale


def _rk4_segment(F, w0, w1, n, jet, q_func):
    dw = (w1 - w0) / n
    out = []
    w = w0
    for _ in range(n):
        k1 = _rhs(F, w, dw, jet, q_func)
        k2 = _rhs(F + 0.5 * k1, w + 0.5 * dw, dw, jet, q_func)
        k3 = _rhs(F + 0.5 * k2, w + 0.5 * dw, dw, jet, q_func)
        k4 = _rhs(F + k3, w + dw, dw, jet, q_func)
        F = F + (k1 + 2 * k2 + 2 * k3 + k4) / 6
        w = w + dw
        out.append((w, F))
    return out


def integrate_frame(path, jet=None, q_func=None, F_init=None, step=1e-3,
                    drift_budget=1e-7, max_halvings=6):
    """Integrate ``dF = F (U dw + V dwbar)`` along a polyline by classical RK4.

    ``path`` is a sequence of complex vertices.  The step is halved on a
    segment whenever the unitarity drift accumulated over that segment
    exceeds ``drift_budget`` per unit length.
    """
    jet = jet or ZeroJet()
    q_func = q_func or _const_one
    pts = np.asarray(path, dtype=complex).ravel()
    if pts.size < 1:
        raise ValueError("path needs at least one vertex")
    F = horospherical_frame(pts[0]) if F_init is None else np.array(F_init, dtype=complex)
    ss, ws, Fs = [0.0], [pts[0]], [F]
    s = 0.0
    halved = 0
    for w0, w1 in zip(pts[:-1], pts[1:]):
        length = abs(w1 - w0)
        if length == 0:
            continue
        h = step
        base = unitarity_drift(F)
        for attempt in range(max_halvings + 1):
            n = max(1, int(np.ceil(length / h)))
            seg = _rk4_segment(F, w0, w1, n, jet, q_func)
            growth = unitarity_drift(seg[-1][1]) - base
            if growth <= drift_budget * max(length, 1.0) or attempt == max_halvings:
                break
            h /= 2
            halved += 1
        for k, (w, Fk) in enumerate(seg, start=1):
            ss.append(s + length * k / n)
            ws.append(w)
            Fs.append(Fk)
        s += length
        F = seg[-1][1]
    Fs = np.array(Fs)
    return FrameField(
        s=np.array(ss),
        w=np.array(ws),
        F=Fs,
        unitarity_drift=np.array([unitarity_drift(f) for f in Fs]),
        reality_drift=np.array([reality_drift(f) for f in Fs]),
        steps_halved=halved,
    )


@dataclass(frozen=True)
class Embedding:
    sigma: np.ndarray
    normal: np.ndarray
    metric_residual: float
    second_form_residual: float


def extract_embedding(frame: FrameField, jet=None, q_func=None, tol=None, check_tol=1e-5):
    """Embedding ``sigma`` (4th column) and normal ``N`` (3rd column) along a path.

    Verifies by finite differences along the path that
    ``<sigma', sigma'> = 2 e^{2 phi} |w'|^2`` (the induced metric) and
    ``<N', sigma'> = 2 Re(q w'^2)`` (the second fundamental form).
    """
    tol = config.get().reality if tol is None else tol
    jet = jet or ZeroJet()
    q_func = q_func or _const_one
    drift = float(np.max(frame.reality_drift))
    if drift > tol:
        raise ValueError(f"frame reality drift {drift:.3e} exceeds {tol:.1e}")
    sigma = frame.F[:, :, 3].real
    normal = frame.F[:, :, 2].real
    metric_res, form_res = 0.0, 0.0
    n = len(frame.s)
    for k in range(1, n - 1):
        ds = frame.s[k + 1] - frame.s[k - 1]
        dw = frame.w[k + 1] - frame.w[k - 1]
        if ds <= 0 or abs(abs(dw) - ds) > 1e-9 * max(1.0, ds):
            continue  # skip polyline corners
        wp = dw / ds
        dsig = (sigma[k + 1] - sigma[k - 1]) / ds
        dn = (normal[k + 1] - normal[k - 1]) / ds
        phi, _ = jet(frame.w[k])
        scale = max(1.0, float(np.dot(sigma[k], sigma[k])))
        metric = bilinear_form(dsig, dsig) - 2 * np.exp(2 * phi) * abs(wp) ** 2
        second = bilinear_form(dn, dsig) - 2 * np.real(q_func(frame.w[k]) * wp * wp)
        metric_res = max(metric_res, abs(metric) / scale)
        form_res = max(form_res, abs(second) / scale)
    if check_tol is not None and max(metric_res, form_res) > check_tol:
        raise ValueError(
            f"embedding checks failed: metric {metric_res:.3e}, second form {form_res:.3e}")
    return Embedding(sigma, normal, metric_res, form_res)


def recover_q(frame: FrameField):
    """Least-squares estimate of a constant ``q`` from ``<N', sigma'> = 2 Re(q w'^2)``."""
    sigma = frame.F[:, :, 3].real
    normal = frame.F[:, :, 2].real
    rows, rhs = [], []
    for k in range(1, len(frame.s) - 1):
        ds = frame.s[k + 1] - frame.s[k - 1]
        dw = frame.w[k + 1] - frame.w[k - 1]
        if ds <= 0 or abs(abs(dw) - ds) > 1e-9 * max(1.0, ds):
            continue
        wp2 = (dw / ds) ** 2
        dsig = (sigma[k + 1] - sigma[k - 1]) / ds
        dn = (normal[k + 1] - normal[k - 1]) / ds
        scale = 1.0 / max(1.0, float(np.dot(sigma[k], sigma[k])))
        # 2 Re(q wp2) = 2 (qr wr - qi wi)
        rows.append([2 * wp2.real * scale, -2 * wp2.imag * scale])
        rhs.append(bilinear_form(dn, dsig) * scale)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return complex(sol[0], sol[1])


# ---------------------------------------------------------------------------
# Disk model


def to_disk_model(sigma):
    """Invert ``(z, w) -> (2z/(1-|z|^2), (1+|z|^2)/(1-|z|^2) w)`` on the quadric."""
    x = np.asarray(sigma, dtype=float)
    rho = np.hypot(x[2], x[3])
    mod2 = (rho - 1) / (rho + 1)
    z = complex(x[0], x[1]) * (1 - mod2) / 2
    return z, complex(x[2], x[3]) / rho


def from_disk_model(z, w):
    m = abs(z) ** 2
    a = 2 * z / (1 - m)
    b = (1 + m) / (1 - m) * w
    return np.array([a.real, a.imag, b.real, b.imag])


# ---------------------------------------------------------------------------
# Boundary of the horospherical surface


# (lower, upper, vector) for the open direction intervals; the light-like
# segments at the odd multiples of pi/4 are handled by ``horospherical_segment``.
HOROSPHERICAL_LIMITS = (
    (-np.pi / 4, np.pi / 4, (1.0, 0.0, 1.0, 0.0)),
    (np.pi / 4, 3 * np.pi / 4, (0.0, 1.0, 0.0, 1.0)),
    (3 * np.pi / 4, 5 * np.pi / 4, (-1.0, 0.0, 1.0, 0.0)),
    (5 * np.pi / 4, 7 * np.pi / 4, (0.0, -1.0, 0.0, 1.0)),
)


def horospherical_segment(j, s):
    """Point ``s > 0`` of the light-like segment at direction ``(2j + 1) pi / 4``."""
    return np.array([(1.0, s, 1.0, s), (-s, 1.0, s, 1.0), (-1.0, -s, 1.0, s), (s, -1.0, s, 1.0)][j % 4])


def horospherical_ray_point(theta, y=0.0, t=12.0):
    """Unit-normalised frame image of ``t e^{i theta} + i y`` (last column of ``F0``)."""
    v = horospherical_frame(t * np.exp(1j * theta) + 1j * y)[:, 3]
    if np.max(np.abs(v.imag)) > 1e-8 * np.max(np.abs(v)):
        raise ValueError("horospherical frame column is not real")
    v = v.real
    return v / np.linalg.norm(v)


def ray_angle(u, v):
    """Angle between the positive rays of ``u`` and ``v``."""
    u = np.asarray(u, dtype=float) / np.linalg.norm(u)
    v = np.asarray(v, dtype=float) / np.linalg.norm(v)
    return float(2 * np.arcsin(min(1.0, np.linalg.norm(u - v) / 2)))


def horospherical_limit(theta, y=0.0, t_probe=40.0):
    """Projective limit of ``sigma0(t e^{i theta} + i y)`` as ``t -> infinity``.

    Open direction intervals give the tabulated vertex; along the odd
    multiples of ``pi/4`` the limit is a point of a light-like segment whose
    parameter ``s`` is read off from the ray at ``t_probe``.
    Returns ``(vector, s)`` with ``s = nan`` off the segments.
    """
    th = float(np.mod(theta + np.pi / 4, 2 * np.pi) - np.pi / 4)
    for lo, hi, vec in HOROSPHERICAL_LIMITS:
        if lo + 1e-12 < th < hi - 1e-12:
            return np.array(vec), np.nan
    j = int(np.round((th - np.pi / 4) / (np.pi / 2))) % 4
    p = horospherical_ray_point(theta, y, t_probe)
    a = horospherical_segment(j, 0.0)
    b = horospherical_segment(j, 1.0) - a
    coef, *_ = np.linalg.lstsq(np.column_stack([a, b]), p, rcond=None)
    s = float(coef[1] / coef[0])
    return horospherical_segment(j, s), s
