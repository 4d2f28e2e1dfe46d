import numpy as np
import pytest
from scipy.special import i0e

from adsmax import vortex as vx


@pytest.fixture(scope="module")
def pole():
    return vx.pole_model_problem(n=60)


def edge_data(w):
    return np.where(np.asarray(w).imag == 0, 0.1, 0.0)


def test_zero_data_gives_zero():
    d = vx.GridDomain(-2, 2, 0, 2, 41, 21)
    f = vx.solve(d)
    assert np.all(f.values == 0)
    f = vx.solve(d, weight=0.0, curvature=-2.0)
    assert np.all(f.values == 0)


def test_edge_data_maximum_principle():
    d = vx.GridDomain(-1, 1, 0, 1, 41, 21)
    f = vx.solve(d, boundary=edge_data, tol=1e-12)
    inner = f.values[1:-1, 1:-1]
    assert f.residual <= 1e-8
    assert np.all(inner > 0) and np.all(inner < 0.1)
    mid = f.values[20, :]
    assert np.all(np.diff(mid[:-1]) < 0)
    # monotone iteration from the constant supersolution 0.1 decreases to the same solution
    its = vx.monotone_iteration(d, 0.1, boundary=edge_data, n_iter=400)
    for a, b in zip(its[:-1], its[1:]):
        assert np.all(b <= a + 1e-14)
    assert np.max(np.abs(its[-1] - f.values)) < 1e-6
    lam = vx.principal_curvature(f.values)
    assert lam[1:-1, 1:-1].max() < 1


def test_solver_errors():
    d = vx.GridDomain(-1, 1, 0, 1, 21, 11)
    with pytest.raises(ValueError):
        vx.solve(d, weight=-1.0)
    with pytest.raises(vx.ConvergenceError):
        vx.solve(d, weight=3.0, boundary=edge_data, max_iter=1, tol=1e-14)


def test_grid_domain_validation():
    with pytest.raises(ValueError):
        vx.GridDomain(0, 1, 0, 1, 2, 5)
    with pytest.raises(ValueError):
        vx.GridDomain(1, 0, 0, 1, 5, 5)


def test_supersolution_examples(pole):
    p = pole
    u = vx.supersolution_beta_f(0.05, 10.0, p.z)
    assert len(vx.check_supersolution(u, p.domain, p.weight, p.curvature, p.density)) == 0
    assert len(vx.check_supersolution(np.zeros(p.domain.shape), p.domain, p.weight, p.curvature, p.density)) > 0
    for beta in (1.0, 2.0, 4.0, 8.0, 16.0):
        u = vx.supersolution_beta_f(0.05, beta, p.z)
        assert len(vx.check_supersolution(u, p.domain, p.weight, p.curvature, p.density)) == 0


def test_subsolution_flat_chart():
    d = vx.GridDomain(-1, 1, 0, 1, 21, 11)
    u = vx.subsolution_flat_log(np.ones(d.shape), np.ones(d.shape))
    assert np.all(u == 0)
    assert len(vx.check_subsolution(u, d)) == 0


def test_subsolution_cap_near_zero_of_q():
    # upper half-plane metric of curvature -2 and q = z - z0 with a zero inside.
    # The discrete Laplacian of log|q| is under-resolved next to the zero, so
    # nodewise failures must stay in a ball around z0 that shrinks with h.
    z0 = 0.0155 + 1.5145j
    radii = []
    for n in (81, 161, 321):
        d = vx.GridDomain(-1, 1, 1, 2, n, (n + 1) // 2)
        z = d.points
        rho = 1 / (2 * z.imag ** 2)
        q_abs = np.abs(z - z0)
        weight = q_abs ** 2 / rho ** 2
        u = vx.subsolution_flat_log(rho, q_abs, cap=1.0, shift=0.02)
        assert np.any(u == -1.0)
        bad = vx.check_subsolution(u, d, weight, -2.0, rho)
        radii.append(max((abs(z[tuple(b)] - z0) for b in bad), default=0.0))
    assert radii[0] > radii[1] > radii[2]
    assert radii[2] < 0.2
    # uncapped, w tends to -infinity at the zero
    r = np.logspace(-1, -8, 8)
    rho0 = np.full_like(r, 1 / (2 * z0.imag ** 2))
    w = vx.subsolution_flat_log(rho0, r, cap=50.0)
    assert np.all(np.diff(w) < 0) and w[-1] < -8


def test_bracket_and_monotone_iteration(pole):
    p = pole
    _, _, sup = vx.tune_supersolution(p.domain, p.z, p.weight, p.curvature, p.density)
    _, _, sub = vx.tune_subsolution(p.domain, p.density, p.q_abs, p.weight, p.curvature)
    f = vx.solve(p.domain, p.weight, p.curvature, p.density, sub=sub, sup=sup, tol=1e-11)
    assert f.bracket_violations == 0
    assert np.max(np.abs(f.values - p.psi)) < 5e-3
    down = vx.monotone_iteration(p.domain, sup, p.weight, p.curvature, p.density, n_iter=30)
    up = vx.monotone_iteration(p.domain, sub, p.weight, p.curvature, p.density, n_iter=30)
    for a, b in zip(down[:-1], down[1:]):
        assert np.all(b <= a + 1e-12)
    for a, b in zip(up[:-1], up[1:]):
        assert np.all(b >= a - 1e-12)
    assert np.all(down[-1] >= f.values - 1e-9) and np.all(up[-1] <= f.values + 1e-9)


def test_comparison_principle():
    rng = np.random.default_rng(0)
    d = vx.GridDomain(-1, 1, 0, 1, 21, 11)
    for _ in range(10):
        w1 = rng.uniform(0.2, 1.5)
        w2 = w1 + rng.uniform(0, 1)
        b = rng.uniform(0, 0.4)
        s1 = vx.solve(d, w1, boundary=lambda z: b * np.cos(np.pi * z.real / 2) ** 2, tol=1e-12)
        s2 = vx.solve(d, w2, boundary=lambda z: b * np.cos(np.pi * z.real / 2) ** 2 + 0.1, tol=1e-12)
        assert np.all(s1.values <= s2.values + 1e-12)


def test_bessel_examples():
    assert vx.bessel_supersolution(5.0, 5.0) == pytest.approx(1.0, abs=1e-15)
    assert vx.bessel_supersolution(5.0, 0.0) * vx.bessel_i0(10 * np.sqrt(2)) == pytest.approx(1.0, rel=1e-13)
    x = np.concatenate([np.linspace(0, 60, 500), [100.0, 700.0]])
    np.testing.assert_allclose(vx.bessel_i0e(x), i0e(x), rtol=1e-13)
    with pytest.raises(ValueError):
        vx.bessel_supersolution(1.0, 2.0)
    assert np.isfinite(vx.bessel_supersolution(400.0, 399.0))


def test_bessel_radial_ode_residual():
    r, h = 5.0, 1e-4
    s = np.linspace(0.1, 5.0 - 2 * h, 200)
    f = lambda t: vx.bessel_supersolution(r, t)
    d2 = (f(s + h) - 2 * f(s) + f(s - h)) / h ** 2
    d1 = (f(s + h) - f(s - h)) / (2 * h)
    assert np.max(np.abs(d2 + d1 / s - 8 * f(s))) <= 1e-6


def test_decay_fit_examples():
    hs = 4 / 199
    d = vx.GridDomain(2 - 99 * hs, 2 + 299 * hs, 0, 2 * hs, 399, 3)
    r = np.abs(d.points)
    f = vx.ConformalFactorField(d, np.exp(-2 * np.sqrt(2) * r) / np.sqrt(r), 0.0)
    assert vx.decay_slope(f, 0.0) == pytest.approx(-2 * np.sqrt(2), abs=1e-6)
    with pytest.raises(vx.NonDecayingError):
        vx.fit_decay(vx.ConformalFactorField(d, np.ones(d.shape), 0.0), 0.0)
    with pytest.raises(ValueError):
        vx.fit_decay(f, 0.0, window=(2.0, 60.0))


def test_principal_curvature_flags():
    assert np.all(vx.curvature_flags(vx.principal_curvature(np.zeros(5))))
    assert not np.any(vx.curvature_flags(vx.principal_curvature(np.full(5, 0.3))))


def test_radial_profile_residual_order():
    exact, prof = vx.radial_decaying_solution()
    res = []
    for n in (161, 321):
        g = vx.GridDomain(-2, 2, 0, 2, n, (n + 1) // 2)
        res.append(np.max(np.abs(vx.pde_residual(exact(g.points), g))))
    assert abs(np.log2(res[0] / res[1]) - 2) <= 0.2
