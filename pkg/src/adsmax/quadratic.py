"""Meromorphic quadratic differentials near a pole and their natural charts.

A :class:`PoleModel` stores the principal part
``q(z) = a_n z^-n + ... + a_2 z^-2`` on a punctured disc of radius ``r``.
Natural charts ``Phi_k`` are maps from the upper half-plane with
``Phi_k^* q = d omega^2``.  They are written in closed form for the adapted
normal forms

* odd ``n``:  ``q = z^-n dz^2``
* even ``n = 2m``: ``q = (z^-m + A z^-1)^2 dz^2``

up to a rescaling ``z -> c z`` which absorbs the leading coefficient.
Models whose lower coefficients do not fit these normal forms are rejected by
:func:`adapted_form`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class ChartError(RuntimeError):
    """Raised when a chart cannot be evaluated (Newton failure, bad constants)."""


@dataclass(frozen=True)
class PoleModel:
    order: int
    coeffs: tuple          # (a_n, a_{n-1}, ..., a_2)
    radius: float = 1.0

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 3:
            raise ValueError("pole order must be an integer >= 3")
        c = tuple(complex(a) for a in self.coeffs)
        if len(c) != self.order - 1:
            raise ValueError(f"expected {self.order - 1} coefficients a_n..a_2, got {len(c)}")
        if c[0] == 0:
            raise ValueError("leading coefficient a_n must be nonzero")
        if not self.radius > 0:
            raise ValueError("chart radius must be positive")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_charts(self) -> int:
        return self.order - 2

    @classmethod
    def normal_form(cls, order, A=0.0, radius=1.0):
        """Model already in adapted form (``A`` is ignored for odd orders)."""
        c = np.zeros(order - 1, dtype=complex)
        c[0] = 1.0
        if order % 2 == 0:
            m = order // 2
            c[order - (m + 1)] += 2 * A   # coefficient of z^-(m+1)
            c[order - 2] += A * A         # coefficient of z^-2
        return cls(order, tuple(c), radius)

    def to_dict(self):
        return {"order": self.order, "coeffs": [[a.real, a.imag] for a in self.coeffs],
                "radius": self.radius}

    @classmethod
    def from_dict(cls, d):
        coeffs = [complex(re, im) for re, im in d["coeffs"]]
        return cls(int(d["order"]), tuple(coeffs), float(d.get("radius", 1.0)))

    def to_json(self):
        return json.dumps(self.to_dict())


def eval_q(model: PoleModel, z):
    """Coefficient function ``q(z)`` of the principal part."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("q is singular at the pole z = 0")
    n = model.order
    acc = np.zeros_like(z)
    for j, a in enumerate(model.coeffs):
        acc = acc + a * z ** (-(n - j))
    return acc if acc.ndim else complex(acc)


def flat_density(model: PoleModel, z):
    """Density ``|q(z)|`` of the flat metric ``|q| = |q(z)| |dz|^2``."""
    return np.abs(eval_q(model, z))


def density_lower_bound(model: PoleModel, radius=None, samples=400):
    """Sampled estimate of ``inf |q(z)| |z|^2`` over ``0 < |z| < radius``."""
    radius = model.radius if radius is None else radius
    rs = radius * np.linspace(1e-3, 1.0, samples)
    ts = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    z = rs[:, None] * np.exp(1j * ts[None, :])
    return float(np.min(flat_density(model, z) * np.abs(z) ** 2))


def adapted_form(model: PoleModel, tol=1e-10):
    """Return ``(c, A)`` with ``z = c w`` turning the model into normal form.

    Raises ``ValueError`` when the lower-order coefficients are not of the
    normal-form pattern (a general coordinate change is not attempted).
    """
    n = model.order
    a = np.array(model.coeffs)
    # a_n c^{2-n} = 1
    c = complex(a[0]) ** (1.0 / (n - 2))
    scale = max(1.0, float(np.max(np.abs(a))))
    if n % 2 == 1:
        if np.max(np.abs(a[1:]), initial=0.0) > tol * scale:
            raise ValueError("odd-order model is not in normal form z^-n")
        return c, 0.0
    m = n // 2
    i_mid = n - (m + 1)
    rest = np.delete(a, [0, i_mid, n - 2])
    if rest.size and np.max(np.abs(rest)) > tol * scale:
        raise ValueError("even-order model is not of the form (z^-m + A z^-1)^2")
    A = a[i_mid] * c ** (1 - m) / 2
    if abs(a[n - 2] - a[i_mid] ** 2 / (4 * a[0])) > tol * scale:
        raise ValueError("even-order model: a_2 must equal a_{m+1}^2 / (4 a_n)")
    return c, complex(A)


# ---------------------------------------------------------------------------
# Natural charts


def _log_upper(z):
    """Logarithm with branch cut along the negative imaginary axis."""
    z = np.asarray(z, dtype=complex)
    ang = np.angle(z)
    ang = np.where(ang < -np.pi / 2, ang + 2 * np.pi, ang)
    return np.log(np.abs(z)) + 1j * ang


def path_constant(eps):
    """Path-length distortion ``lambda(eps)`` of the widened half-plane."""
    return 1.0 / np.cos(eps)


@dataclass(frozen=True)
class NaturalChart:
    model: PoleModel
    index: int
    B: float
    C: complex = 0j
    D: float = 0.0
    epsilon: float = 0.0
    scale: complex = 1.0 + 0j     # z = scale * w, w the adapted coordinate
    parity: str = field(init=False)

    def __post_init__(self):
        if not 1 <= self.index <= self.model.n_charts:
            raise ValueError(f"chart index must lie in 1..{self.model.n_charts}")
        if self.B <= 0:
            raise ValueError("B must be positive")
        object.__setattr__(self, "parity", "odd" if self.model.order % 2 else "even")

    def to_dict(self):
        return {"index": self.index, "parity": self.parity, "B": self.B,
                "C": [self.C.real, self.C.imag], "D": self.D, "epsilon": self.epsilon}


def _psi(chart: NaturalChart, zeta_shifted):
    """``Psi_k`` in the adapted coordinate: ``zeta_shifted = omega + iB``."""
    n = chart.model.order
    c0 = ((n - 2) / 2) ** (-2.0 / (n - 2))
    return c0 * np.exp(-2.0 / (n - 2) * _log_upper(zeta_shifted)
                       + 2j * np.pi * chart.index / (n - 2))


def _F(chart, om):
    return om + chart.C * _log_upper(om + 1j * chart.B)


def _F_inverse(chart: NaturalChart, target, tol=1e-12, max_iter=50):
    """Newton inversion of ``F(om) = om + C log(om + iB)`` from ``target - iD``."""
    om = np.asarray(target - 1j * chart.D, dtype=complex).copy()
    for _ in range(max_iter):
        res = _F(chart, om) - target
        step = res / (1 + chart.C / (om + 1j * chart.B))
        om = om - step
        if np.max(np.abs(step), initial=0.0) <= tol * max(1.0, float(np.max(np.abs(om)))):
            if np.max(np.abs(_F(chart, om) - target)) <= 1e3 * tol * max(1.0, float(np.max(np.abs(target)))):
                return om
    raise ChartError("Newton inversion of F did not converge; enlarge B and D")


def natural_chart_map(chart: NaturalChart, omega):
    """``Phi_k(omega)`` in the original pole coordinate ``z``."""
    omega = np.asarray(omega, dtype=complex)
    if np.any(omega.imag <= 0):
        raise ValueError("natural charts are defined on Im(omega) > 0")
    if chart.parity == "odd":
        w = _psi(chart, omega + 1j * chart.B)
    else:
        pre = _F_inverse(chart, omega + 1j * chart.D)
        w = _psi(chart, pre + 1j * chart.B)
    z = chart.scale * w
    return z if z.ndim else complex(z)


def _zeta_of(chart: NaturalChart, z):
    """Preimage ``zeta = omega' + iB`` of ``z`` under ``Psi_k``.

    Among the branches of ``w^{-(n-2)/2}`` the one whose argument is closest
    to ``pi/2`` (the centre of the chart) is chosen.
    """
    n = chart.model.order
    w = np.asarray(z, dtype=complex) / chart.scale
    c0 = ((n - 2) / 2) ** (-2.0 / (n - 2))
    rel = np.log(np.abs(w) / c0)
    base = np.angle(w) - 2 * np.pi * chart.index / (n - 2)
    best_arg = best_gap = None
    for j in range(-n, n + 1):
        arg_zeta = -(n - 2) / 2 * (base + 2 * np.pi * j)
        gap = np.abs(arg_zeta - np.pi / 2)
        if best_arg is None:
            best_arg, best_gap = arg_zeta, gap
        else:
            best_arg = np.where(gap < best_gap, arg_zeta, best_arg)
            best_gap = np.minimum(gap, best_gap)
    return np.exp(-(n - 2) / 2 * rel + 1j * best_arg)


def chart_inverse(chart: NaturalChart, z):
    """Inverse of :func:`natural_chart_map` on the widened sector of the chart.

    The returned ``omega`` may have slightly negative imaginary part for
    points just outside the chart image.
    """
    om = _zeta_of(chart, z) - 1j * chart.B
    if chart.parity == "even":
        om = _F(chart, om) - 1j * chart.D
    return om if om.ndim else complex(om)


def _chart_ok(chart: NaturalChart, r, samples):
    try:
        z = natural_chart_map(chart, samples)
    except ChartError:
        return False
    if not np.all(np.abs(z) < r):
        return False
    if chart.parity == "even":
        pre = _F_inverse(chart, samples + 1j * chart.D)
        ang = np.angle(pre)
        ang = np.where(ang < -np.pi / 2, ang + 2 * np.pi, ang)
        if np.any(ang <= -chart.epsilon) or np.any(ang >= np.pi + chart.epsilon):
            return False
    return True


def chart_samples(extent=50.0, count=24):
    """Sample grid of the upper half-plane used when tuning constants."""
    xs = np.concatenate([-np.geomspace(1e-3, extent, count)[::-1], [0.0], np.geomspace(1e-3, extent, count)])
    ys = np.geomspace(1e-4, extent, count)
    return (xs[:, None] + 1j * ys[None, :]).ravel()


def make_chart(model: PoleModel, index: int, epsilon=0.1, B=None, D=None, samples=None,
               max_doublings=40) -> NaturalChart:
    """Natural chart ``Phi_index`` with auto-tuned constants.

    ``B`` (and for even orders ``D``) start from heuristic values and are
    doubled until the containment and injectivity checks pass on ``samples``.
    """
    scale, A = adapted_form(model)
    n = model.order
    r = model.radius / abs(scale)    # radius in the adapted coordinate
    c0 = ((n - 2) / 2) ** (-2.0 / (n - 2))
    samples = chart_samples() if samples is None else np.asarray(samples, dtype=complex)
    if n % 2 == 1:
        B0 = (c0 / r) ** ((n - 2) / 2) / np.cos(epsilon) * 1.01 if B is None else B
        chart = NaturalChart(model, index, B0, epsilon=epsilon, scale=scale)
        for _ in range(max_doublings):
            if _chart_ok(chart, r, samples):
                return chart
            chart = NaturalChart(model, index, chart.B * 2, epsilon=epsilon, scale=scale)
        raise ChartError("could not tune B for the odd chart")
    m = n // 2
    C = (-1) ** index * A / (m - 1)
    lam = path_constant(epsilon)
    # |C / (om + iB)| < 1/lambda on the widened half-plane needs B cos(eps) > |C| lambda
    b_min = max(abs(C) * lam / np.cos(epsilon), (c0 / r) ** ((n - 2) / 2) / np.cos(epsilon))
    B0 = 1.01 * b_min + 1e-3 if B is None else B
    D0 = abs(C) * (abs(np.log(B0)) + np.pi) + 1.0 if D is None else D
    chart = NaturalChart(model, index, B0, complex(C), D0, epsilon, scale)
    for _ in range(max_doublings):
        if _chart_ok(chart, r, samples):
            return chart
        chart = NaturalChart(model, index, chart.B * 2, chart.C, chart.D * 2 + abs(C) * np.log(2),
                             epsilon, scale)
    raise ChartError("could not tune B and D for the even chart")


def make_charts(model: PoleModel, **kw):
    return [make_chart(model, k, **kw) for k in range(1, model.n_charts + 1)]


def pullback_residual(chart: NaturalChart, omegas, h=1e-4):
    """Max of ``|Phi'(omega)^2 q(Phi(omega)) - 1|`` with centred-difference derivatives."""
    omegas = np.asarray(omegas, dtype=complex)
    d = (natural_chart_map(chart, omegas + h) - natural_chart_map(chart, omegas - h)) / (2 * h)
    val = d * d * eval_q(chart.model, natural_chart_map(chart, omegas))
    return float(np.max(np.abs(val - 1)))


def chart_transition(chart_a: NaturalChart, chart_b: NaturalChart, omegas):
    """Fit the transition ``omega_a = s omega_b + c`` (s = +-1) on sample points.

    ``omegas`` are points of chart ``b`` near the boundary it shares with
    chart ``a``.  Returns ``(s, c, residual)``.
    """
    omegas = np.asarray(omegas, dtype=complex)
    z = natural_chart_map(chart_b, omegas)
    om_a = chart_inverse(chart_a, z)
    best = None
    for s in (1.0, -1.0):
        c = np.mean(om_a - s * omegas)
        res = float(np.max(np.abs(om_a - s * omegas - c)))
        if best is None or res < best[2]:
            best = (s, complex(c), res)
    return best


def in_widened_image(chart: NaturalChart, z):
    """Whether ``z`` lies in ``Psi_k(H_eps + iB)`` (the widened chart image)."""
    pre = _zeta_of(chart, z) - 1j * chart.B
    ang = np.angle(pre)
    ang = np.where(ang < -np.pi / 2, ang + 2 * np.pi, ang)
    return (ang > -chart.epsilon) & (ang < np.pi + chart.epsilon)


def coverage_radius(charts):
    """Radius below which the widened chart images are guaranteed to overlap.

    A point of the widened domain with modulus above ``b / sin(eps)`` has a
    neighbourhood of angular size ``eps`` inside it, so beyond the effective
    shift ``b`` consecutive sectors overlap.
    """
    out = np.inf
    for ch in charts:
        n = ch.model.order
        c0 = ((n - 2) / 2) ** (-2.0 / (n - 2))
        shift = ch.B + ch.D + abs(ch.C) * (np.pi + abs(np.log(ch.B)))
        big = 2 * shift / np.sin(ch.epsilon)
        out = min(out, abs(ch.scale) * c0 * big ** (-2.0 / (n - 2)))
    return float(out)


def covers_annulus(charts, radius, samples=60, widened=True):
    """Fraction of sampled points of ``{0 < |z| < radius}`` covered by the charts.

    With ``widened=True`` coverage is tested against ``Psi_k(H_eps + iB)``;
    otherwise against the closures of the strict images ``Phi_k(H)``, which
    leave thin slivers along the shared boundary rays.
    """
    rs = radius * np.linspace(0.05, 0.95, samples)
    ts = np.linspace(0, 2 * np.pi, 2 * samples, endpoint=False)
    z = (rs[:, None] * np.exp(1j * ts[None, :])).ravel()
    hit = np.zeros(z.size, dtype=bool)
    for ch in charts:
        if widened:
            hit |= in_widened_image(ch, z)
        else:
            om = chart_inverse(ch, z)
            hit |= om.imag >= -1e-9 * np.maximum(1.0, np.abs(om))
    return float(np.mean(hit))


# ---------------------------------------------------------------------------
# Dimension counts


def qd_space_dims(euler_char: int, pole_orders):
    """Real dimension ``d = 3|chi| + 2 sum n_i`` and the exact-orders split ``(d - N, N)``."""
    orders = [int(k) for k in pole_orders]
    d = 3 * abs(int(euler_char)) + 2 * sum(orders)
    return d, (d - len(orders), len(orders))


def crowned_teich_dim(genus: int, cusp_counts):
    """Dimension ``6 tau - 6 + sum (m_i + 3)`` of crowned Teichmuller space."""
    counts = [int(m) for m in cusp_counts]
    if genus < 1 or not counts or min(counts) < 1:
        raise ValueError("need genus >= 1 and at least one crown with m_i >= 1")
    return 6 * int(genus) - 6 + sum(m + 3 for m in counts)

