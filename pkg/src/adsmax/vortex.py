"""Finite-difference solver for the vortex equation and its comparison functions.

The equation solved on a rectangle of a conformal coordinate is

    1/2 Delta_g u = e^{2u} - e^{-2u} W + 1/2 K

with ``g = rho |dz|^2`` (so ``Delta_g = Delta / rho``), ``W = ||q||_g^2`` and
``K = K_g``.  In a natural coordinate of ``q`` the background is flat,
``W = 1`` and ``K = 0``.  Dirichlet data is imposed on the rectangle edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.special import k0, k1

from .quadratic import PoleModel, eval_q


class ConvergenceError(RuntimeError):
    """Newton or fixed-point iteration failed to reach the requested residual."""

    def __init__(self, message, residual=np.nan):
        super().__init__(message)
        self.residual = residual


# ---------------------------------------------------------------------------
# Grids


@dataclass(frozen=True)
class GridDomain:
    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("need at least 3 nodes in each direction")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("empty rectangle")

    @classmethod
    def with_spacing(cls, x0, x1, y0, y1, h):
        if h <= 0:
            raise ValueError("spacing must be positive")
        nx = int(round((x1 - x0) / h)) + 1
        ny = int(round((y1 - y0) / h)) + 1
        return cls(x0, x0 + (nx - 1) * h, y0, y0 + (ny - 1) * h, nx, ny)

    @property
    def x(self):
        return np.linspace(self.x0, self.x1, self.nx)

    @property
    def y(self):
        return np.linspace(self.y0, self.y1, self.ny)

    @property
    def hx(self):
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self):
        return (self.y1 - self.y0) / (self.ny - 1)

    @property
    def h(self):
        return max(self.hx, self.hy)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def points(self):
        """Complex node coordinates, axis 0 = real part."""
        return self.x[:, None] + 1j * self.y[None, :]

    @property
    def interior(self):
        m = np.zeros(self.shape, dtype=bool)
        m[1:-1, 1:-1] = True
        return m

    def sample(self, f):
        """Evaluate a scalar, array or callable of the complex node points."""
        if callable(f):
            return np.broadcast_to(np.asarray(f(self.points), dtype=float), self.shape).copy()
        return np.broadcast_to(np.asarray(f, dtype=float), self.shape).copy()


def laplacian(u, domain: GridDomain):
    """5-point Laplacian on interior nodes (boundary entries set to 0)."""
    out = np.zeros_like(u)
    hx2, hy2 = domain.hx ** 2, domain.hy ** 2
    out[1:-1, 1:-1] = ((u[2:, 1:-1] - 2 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / hx2
                       + (u[1:-1, 2:] - 2 * u[1:-1, 1:-1] + u[1:-1, :-2]) / hy2)
    return out


def _interior_laplacian_matrix(domain: GridDomain):
    mx, my = domain.nx - 2, domain.ny - 2
    dx = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(mx, mx)) / domain.hx ** 2
    dy = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(my, my)) / domain.hy ** 2
    return (sp.kron(dx, sp.identity(my)) + sp.kron(sp.identity(mx), dy)).tocsc()


def nonlinearity(u, weight, curvature):
    """``F(x, u) = e^{2u} - e^{-2u} W + K / 2``."""
    return np.exp(2 * u) - np.exp(-2 * u) * weight + 0.5 * curvature


def pde_residual(u, domain, weight=1.0, curvature=0.0, density=1.0):
    """Nodewise ``1/2 Delta_g u - F(x, u)``; zero on boundary nodes."""
    w = domain.sample(weight)
    k = domain.sample(curvature)
    rho = domain.sample(density)
    r = 0.5 * laplacian(u, domain) / rho - nonlinearity(u, w, k)
    r[~domain.interior] = 0.0
    return r


# ---------------------------------------------------------------------------
# Solution record


@dataclass
class ConformalFactorField:
    domain: GridDomain
    values: np.ndarray
    residual: float
    sub: np.ndarray | None = None
    sup: np.ndarray | None = None
    iterations: int = 0
    history: list = field(default_factory=list)

    @property
    def bracket_violations(self) -> int:
        bad = np.zeros(self.domain.shape, dtype=bool)
        if self.sub is not None:
            bad |= self.values < self.sub
        if self.sup is not None:
            bad |= self.values > self.sup
        return int(np.count_nonzero(bad))

    def report(self):
        return {
            "grid": [self.domain.nx, self.domain.ny],
            "iterations": self.iterations,
            "residual": self.residual,
            "residual_history": list(self.history),
            "bracket_violations": self.bracket_violations,
        }


# ---------------------------------------------------------------------------
# Newton solver


def _boundary_data(domain, boundary):
    u = np.zeros(domain.shape)
    b = domain.sample(boundary)
    mask = ~domain.interior
    u[mask] = b[mask]
    return u


def solve(domain: GridDomain, weight=1.0, curvature=0.0, density=1.0, boundary=0.0,
          initial=None, sub=None, sup=None, tol=1e-8, max_iter=60) -> ConformalFactorField:
    """Damped Newton solve of the discrete vortex equation with Dirichlet data.

    ``weight``, ``curvature``, ``density`` and ``boundary`` may be scalars,
    node arrays or callables of the complex node points.  The Jacobian
    ``1/2 L / rho - diag(F_u)`` is an M-matrix since ``F_u > 0``, so each
    Newton step is a sparse direct solve.  The step is halved until the
    residual decreases.
    """
    w = domain.sample(weight)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weight must be finite and nonnegative")
    k = domain.sample(curvature)
    rho = domain.sample(density)
    if np.any(rho <= 0):
        raise ValueError("metric density must be positive")
    u = _boundary_data(domain, boundary)
    if not np.all(np.isfinite(u)):
        raise ValueError("boundary data must be finite")
    inner = domain.interior
    if initial is not None:
        u[inner] = domain.sample(initial)[inner]
    lap = _interior_laplacian_matrix(domain)
    half_over_rho = sp.diags(0.5 / rho[1:-1, 1:-1].ravel())
    A = (half_over_rho @ lap).tocsc()

    def resid(v):
        return pde_residual(v, domain, w, k, rho)

    r = resid(u)
    norm = float(np.max(np.abs(r)))
    history = [norm]
    it = 0
    while norm > tol:
        if it >= max_iter:
            raise ConvergenceError(f"Newton did not converge, residual {norm:.3e}", norm)
        ui = u[1:-1, 1:-1]
        fu = 2 * np.exp(2 * ui) + 2 * np.exp(-2 * ui) * w[1:-1, 1:-1]
        jac = (A - sp.diags(fu.ravel())).tocsc()
        step = spla.spsolve(jac, -r[1:-1, 1:-1].ravel()).reshape(ui.shape)
        t = 1.0
        for _ in range(30):
            trial = u.copy()
            trial[1:-1, 1:-1] += t * step
            rt = resid(trial)
            nt = float(np.max(np.abs(rt)))
            if nt < norm or nt <= tol:
                break
            t *= 0.5
        else:
            raise ConvergenceError(f"line search stalled at residual {norm:.3e}", norm)
        u, r, norm = trial, rt, nt
        history.append(norm)
        it += 1
    return ConformalFactorField(domain, u, norm, sub, sup, it, history)


def monotone_iteration(domain: GridDomain, start, weight=1.0, curvature=0.0, density=1.0,
                       boundary=0.0, shift=None, n_iter=50):
    """Monotone scheme ``1/2 Delta_g u' - c u' = F(u) - c u`` from a bracket function.

    Started at a supersolution the iterates decrease, started at a
    subsolution they increase.  ``shift`` ``c`` must dominate ``F_u`` on the
    range of the iterates; by default it is taken from ``start``.  Returns
    the list of iterates (including the start).
    """
    w = domain.sample(weight)
    k = domain.sample(curvature)
    rho = domain.sample(density)
    u = domain.sample(start)
    ub = _boundary_data(domain, boundary)
    u[~domain.interior] = ub[~domain.interior]
    if shift is None:
        shift = float(np.max(2 * np.exp(2 * u) + 2 * np.exp(-2 * u) * w))
    lap = _interior_laplacian_matrix(domain)
    A = (sp.diags(0.5 / rho[1:-1, 1:-1].ravel()) @ lap - shift * sp.identity(lap.shape[0])).tocsc()
    lu = spla.splu(A)
    # boundary contributions of the Laplacian
    edge = np.zeros(domain.shape)
    edge[~domain.interior] = u[~domain.interior]
    bterm = (0.5 * laplacian(edge, domain) / rho)[1:-1, 1:-1].ravel()
    iterates = [u.copy()]
    for _ in range(n_iter):
        rhs = (nonlinearity(u, w, k) - shift * u)[1:-1, 1:-1].ravel() - bterm
        new = u.copy()
        new[1:-1, 1:-1] = lu.solve(rhs).reshape(domain.nx - 2, domain.ny - 2)
        u = new
        iterates.append(u.copy())
    return iterates


# ---------------------------------------------------------------------------
# Sub- and supersolutions


def supersolution_beta_f(alpha, beta, z):
    """``u+ = beta |z|^{2 alpha}`` on the complex grid ``z``."""
    if alpha <= 0 or beta < 0:
        raise ValueError("need alpha > 0 and beta >= 0")
    return beta * np.abs(np.asarray(z)) ** (2 * alpha)


def check_supersolution(u, domain, weight=1.0, curvature=0.0, density=1.0, slack=0.0):
    """Interior nodes where ``1/2 Delta_g u - F(x, u) <= 0`` fails (empty when certified)."""
    r = pde_residual(u, domain, weight, curvature, density)
    bad = (r > slack) & domain.interior
    return np.argwhere(bad)


def check_subsolution(u, domain, weight=1.0, curvature=0.0, density=1.0, slack=0.0):
    """Interior nodes where ``1/2 Delta_g u - F(x, u) >= 0`` fails (empty when certified)."""
    r = pde_residual(u, domain, weight, curvature, density)
    bad = (r < -slack) & domain.interior
    return np.argwhere(bad)


def subsolution_flat_log(g_density, q_abs, cap=10.0, shift=0.0):
    """``max(w - shift, -cap)`` with ``w = 1/2 log(|q| / g)``.

    ``w`` is the log-density of the flat metric ``|q|`` against ``g``; it is
    an exact solution away from the zeros of ``q`` and tends to ``-inf`` at
    them, where the cap takes over.  A small ``shift`` turns the continuous
    solution into a strict discrete subsolution.
    """
    if cap <= 0:
        raise ValueError("cap B must be positive")
    g = np.asarray(g_density, dtype=float)
    q = np.asarray(q_abs, dtype=float)
    with np.errstate(divide="ignore"):
        w = 0.5 * np.log(q / g)
    return np.maximum(w - shift, -cap)


def tune_supersolution(domain, z, weight, curvature, density, boundary=0.0,
                       alpha=0.05, beta=1.0, max_steps=40):
    """Halve ``alpha`` / double ``beta`` until ``beta |z|^{2 alpha}`` is certified."""
    bvals = _boundary_data(domain, boundary)
    edge = ~domain.interior
    for step in range(max_steps):
        u = supersolution_beta_f(alpha, beta, z)
        ok_edge = np.all(u[edge] >= bvals[edge])
        if ok_edge and len(check_supersolution(u, domain, weight, curvature, density)) == 0:
            return alpha, beta, u
        if step % 4 == 3:
            alpha *= 0.5
        else:
            beta *= 2.0
    raise ConvergenceError("could not certify a supersolution of the form beta |z|^(2 alpha)")


def tune_subsolution(domain, g_density, q_abs, weight, curvature, boundary=0.0, cap=10.0,
                     shift=0.0, max_steps=40):
    """Grow the shift and lower the cap until ``max(w - shift, -cap)`` is certified."""
    bvals = _boundary_data(domain, boundary)
    edge = ~domain.interior
    for _ in range(max_steps):
        u = subsolution_flat_log(g_density, q_abs, cap, shift)
        ok_edge = np.all(u[edge] <= bvals[edge])
        if ok_edge and len(check_subsolution(u, domain, weight, curvature, g_density)) == 0:
            return shift, cap, u
        shift = 2 * shift if shift > 0 else 1e-6
    raise ConvergenceError("could not certify the flat-log subsolution")


# ---------------------------------------------------------------------------
# Pole-model problem


def _bump(r, r1, r2):
    """Smooth bump supported in ``r1 < r < r2`` with maximum 1."""
    t = (np.asarray(r, dtype=float) - r1) / (r2 - r1)
    out = np.zeros_like(t)
    m = (t > 0) & (t < 1)
    out[m] = np.exp(4 - 1 / t[m] - 1 / (1 - t[m]))
    return out


@dataclass(frozen=True)
class PoleProblem:
    domain: GridDomain
    model: PoleModel
    z: np.ndarray
    q_abs: np.ndarray
    psi: np.ndarray          # exact continuum solution
    density: np.ndarray      # g = density |dz|^2
    weight: np.ndarray       # ||q||_g^2
    curvature: np.ndarray    # K_g


def pole_model_problem(model: PoleModel | None = None, half_width=0.5, n=120, kappa=0.3,
                       bump=(0.15, 0.45)):
    """Vortex problem on the square ``|Re z|, |Im z| <= half_width`` around a pole.

    The background is ``g = e^{-2 psi} |q| |dz|^2`` with a smooth radial bump
    ``psi``; it coincides with the flat metric ``|q|`` near the pole and near
    the edges, as in the interpolated metric used for existence.  Then
    ``||q||_g^2 = e^{4 psi}``, ``K_g = e^{2 psi} Delta psi / |q|`` and the
    continuum solution with zero boundary data is ``u = psi``.  An even node
    count keeps the pole off the grid.
    """
    model = model or PoleModel.normal_form(4, A=0.5)
    if n % 2:
        n += 1
    h = 2 * half_width / n
    # nodes at odd multiples of h/2 so that z = 0 is not a node
    dom = GridDomain(-half_width + h / 2, half_width - h / 2, -half_width + h / 2,
                     half_width - h / 2, n, n)
    z = dom.points
    r = np.abs(z)
    r1, r2 = bump
    psi = kappa * _bump(r, r1, r2)
    # radial Laplacian of psi, analytic
    t = (r - r1) / (r2 - r1)
    m = (t > 0) & (t < 1)
    d1 = np.zeros_like(r)
    d2 = np.zeros_like(r)
    tm = t[m]
    g1 = 1 / tm ** 2 - 1 / (1 - tm) ** 2
    g2 = -2 / tm ** 3 - 2 / (1 - tm) ** 3
    b = psi[m]
    d1[m] = b * g1 / (r2 - r1)
    d2[m] = b * (g1 ** 2 + g2) / (r2 - r1) ** 2
    lap_psi = d2 + d1 / r
    q_abs = np.abs(eval_q(model, z))
    density = np.exp(-2 * psi) * q_abs
    weight = np.exp(4 * psi)
    curvature = np.exp(2 * psi) * lap_psi / q_abs
    return PoleProblem(dom, model, z, q_abs, psi, density, weight, curvature)


# ---------------------------------------------------------------------------
# Modified Bessel function I0 and the radial supersolution


def _i0e_series(x):
    # sum (x/2)^{2k} / (k!)^2, all terms positive
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    q = (x / 2) ** 2
    for k in range(1, 400):
        term = term * q / (k * k)
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return total * np.exp(-x)


def _i0e_asymptotic(x):
    x = np.asarray(x, dtype=float)
    # e^{-x} I0(x) ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! 8^k x^k)
    total = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, 30):
        term = term * (2 * k - 1) ** 2 / (k * 8 * x)
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * total):
            break
    return total / np.sqrt(2 * np.pi * x)


def bessel_i0e(x):
    """Exponentially scaled ``e^{-|x|} I0(x)``; series below 50, asymptotic above."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x <= 50
    if np.any(small):
        out[small] = _i0e_series(x[small])
    if np.any(~small):
        out[~small] = _i0e_asymptotic(x[~small])
    return out if out.ndim else float(out)


def bessel_i0(x):
    x = np.asarray(x, dtype=float)
    return bessel_i0e(x) * np.exp(np.abs(x))


def bessel_supersolution(r, s):
    """``I0(2 sqrt2 s) / I0(2 sqrt2 r)``: solves ``Delta h = 8 h`` with ``h = 1`` at radius ``r``."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > r * (1 + 1e-12)):
        raise ValueError("need 0 <= s <= r")
    a, b = 2 * np.sqrt(2) * s, 2 * np.sqrt(2) * r
    out = bessel_i0e(a) / bessel_i0e(b) * np.exp(a - b)
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# Decay and curvature diagnostics


class NonDecayingError(ValueError):
    """The fitted profile does not decay."""


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    used: int
    excluded: int


def _bilinear(domain, values, pts):
    fx = (pts.real - domain.x0) / domain.hx
    fy = (pts.imag - domain.y0) / domain.hy
    if np.any(fx < 0) or np.any(fy < 0) or np.any(fx > domain.nx - 1) or np.any(fy > domain.ny - 1):
        raise ValueError("ray exits the domain")
    i = np.minimum(fx.astype(int), domain.nx - 2)
    j = np.minimum(fy.astype(int), domain.ny - 2)
    tx, ty = fx - i, fy - j
    v = values
    return ((1 - tx) * (1 - ty) * v[i, j] + tx * (1 - ty) * v[i + 1, j]
            + (1 - tx) * ty * v[i, j + 1] + tx * ty * v[i + 1, j + 1])


def fit_decay(field_: ConformalFactorField, direction, window=(2.0, 6.0), origin=0j,
              samples=200, min_rate=1e-3) -> DecayFit:
    """Least-squares fit of ``log(v sqrt|w|)`` against ``|w|`` along a ray."""
    r = np.linspace(window[0], window[1], samples)
    pts = origin + r * np.exp(1j * direction)
    v = _bilinear(field_.domain, field_.values, pts)
    keep = v > 0
    if np.count_nonzero(keep) < 3:
        raise NonDecayingError("fewer than three positive samples on the ray")
    slope, intercept = np.polyfit(r[keep], np.log(v[keep] * np.sqrt(r[keep])), 1)
    if slope > -min_rate:
        raise NonDecayingError(f"profile does not decay (slope {slope:.3e})")
    return DecayFit(float(slope), float(intercept), int(np.count_nonzero(keep)),
                    int(np.count_nonzero(~keep)))


def decay_slope(field_: ConformalFactorField, direction, **kw) -> float:
    return fit_decay(field_, direction, **kw).slope


def principal_curvature(u, weight=1.0):
    """Positive principal curvature ``lambda = e^{-2u} ||q||_g``."""
    u = np.asarray(u, dtype=float)
    return np.exp(-2 * u) * np.sqrt(np.broadcast_to(np.asarray(weight, dtype=float), u.shape))


def curvature_flags(lam, tol=0.0):
    """Mask of nodes with ``lambda >= 1 - tol`` (not strictly inside (-1, 1))."""
    return np.asarray(lam) >= 1 - tol


# ---------------------------------------------------------------------------
# Exact radial solution of Delta v = 4 sinh(2 v)


class RadialProfile:
    """Radial solution of ``v'' + v'/r = 4 sinh(2v)`` decaying like ``a K0(2 sqrt2 r)``.

    Integrated inward from ``r_max`` (where the equation is linear to round-off)
    with an eighth-order Runge-Kutta scheme; beyond ``r_max`` the linear tail
    is used.
    """

    def __init__(self, amplitude=5.0, r_min=0.5, r_max=14.0, rtol=1e-13):
        self.a = float(amplitude)
        self.r_min = float(r_min)
        self.r_max = float(r_max)
        c = 2 * np.sqrt(2)
        y0 = [self.a * k0(c * r_max), -c * self.a * k1(c * r_max)]

        def rhs(r, y):
            return [y[1], 4 * np.sinh(2 * y[0]) - y[1] / r]

        sol = solve_ivp(rhs, (r_max, r_min), y0, method="DOP853", rtol=rtol, atol=1e-30,
                        dense_output=True)
        if not sol.success:
            raise ConvergenceError("radial profile integration failed")
        self._sol = sol.sol

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r_min):
            raise ValueError("radius below the integrated range")
        c = 2 * np.sqrt(2)
        inner = r <= self.r_max
        val = np.where(inner, 0.0, self.a * k0(c * np.maximum(r, 1e-300)))
        der = np.where(inner, 0.0, -c * self.a * k1(c * np.maximum(r, 1e-300)))
        if np.any(inner):
            y = self._sol(r[inner])
            val = np.array(val, dtype=float)
            der = np.array(der, dtype=float)
            val[inner] = y[0]
            der[inner] = y[1]
        if val.ndim == 0:
            return float(val), float(der)
        return val, der


def radial_decaying_solution(amplitude=5.0, center=-1j, **kw):
    """Exact decaying solution ``v(w) = V(|w - center|)`` and its profile."""
    prof = RadialProfile(amplitude, **kw)

    def field_(w):
        return prof(np.abs(np.asarray(w) - center))[0]

    return field_, prof


