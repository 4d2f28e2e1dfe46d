import numpy as np
import pytest
from scipy.linalg import expm

from adsmax import ads, asymptotics as asy, frame as fr
from adsmax.acceptance import decaying_jet


def test_osculate_of_closed_form_is_identity():
    for w in (0.2 + 0.1j, 1.5 - 0.3j):
        G = asy.osculate(fr.horospherical_frame(w), w)
        assert np.allclose(G, np.eye(4), atol=1e-12)


def test_osculate_rejects_non_isometry():
    w = 0.3 + 0.2j
    with pytest.raises(ValueError):
        asy.osculate(2 * fr.horospherical_frame(w), w)


def test_osculating_generator_vanishes_for_flat_jet():
    g = asy.osculating_generator(0.4 + 0.7j, np.exp(0.3j), fr.ZeroJet())
    assert np.max(np.abs(g)) == 0


def test_osculating_generator_is_in_so22_algebra():
    jet = decaying_jet()
    for w in (0.5 + 0.2j, -1.0 + 1.5j):
        g = asy.osculating_generator(w, np.exp(0.8j), jet)
        assert np.allclose(g.T @ fr.H + fr.H @ g, 0, atol=1e-10)
        assert asy.in_so22(expm(0.1 * g), tol=1e-9)


def test_osculating_matches_frame_integration():
    jet = decaying_jet()
    path = [1j, 0.6 + 1j, 0.6 + 1.5j]
    ff = fr.integrate_frame(path, jet=jet, step=2e-3)
    _, G = asy.integrate_osculating(path, jet)
    G0 = asy.osculate(ff.F[0], path[0], tol=1e-6)
    G1 = asy.osculate(ff.F[-1], path[-1], tol=1e-6)
    assert np.max(np.abs(np.linalg.solve(G0, G1) - G)) < 1e-6


def test_interval_tags_and_unstable_directions():
    assert asy.interval_of(0.1) == asy.J_PLUS
    assert asy.interval_of(np.pi / 2) == asy.J_ZERO
    assert asy.interval_of(3.0) == asy.J_MINUS
    for bad in (np.pi / 4, 3 * np.pi / 4, -0.5, 4.0):
        with pytest.raises(ValueError):
            asy.interval_of(bad)


def test_ray_limit_without_jet_is_identity():
    lim = asy.ray_limit(1.0)
    assert np.array_equal(lim.L, np.eye(4)) and lim.cauchy_gap == 0


def test_ray_limit_converges_and_is_direction_independent():
    jet = decaying_jet()
    a = asy.ray_limit(np.pi / 3, 0.0, jet)
    b = asy.ray_limit(np.pi / 2, 0.3, jet)
    assert a.interval == b.interval == asy.J_ZERO
    assert np.max(np.abs(a.L - b.L)) < 1e-6
    assert asy.in_so22(a.L, tol=1e-8)


def test_ray_limit_reports_failure():
    with pytest.raises(asy.LimitError):
        asy.ray_limit(np.pi / 3, 0.0, decaying_jet(), tol=1e-30, t_max=10.0)


def test_convergence_rate_peaks_on_unstable_directions():
    assert asy.convergence_rate(np.pi / 4) == pytest.approx(0, abs=1e-12)
    assert asy.convergence_rate(np.pi / 2) > 0
    assert asy.convergence_rate(0.0) > asy.convergence_rate(0.6)


def test_unipotent_factor_trivial_and_side_check():
    L = np.eye(4)
    mu, res = asy.unipotent_factor(L, L, "plus")
    assert abs(mu) < 1e-14 and res < 1e-14
    with pytest.raises(ValueError):
        asy.unipotent_factor(L, L, "middle")


def test_limit_points_of_identity_are_reference_vertices():
    for tag, v in asy.REFERENCE_VECTORS.items():
        assert np.allclose(asy.limit_vector(np.eye(4), tag), v)
        p = asy.limit_point(np.eye(4), tag)
        assert ads.bilinear_form(p.null_rep, p.null_rep) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_synthetic_end_structure(n):
    end = asy.synthetic_end(n, seed=n)
    assert end.k == 2 * (n - 2)
    assert end.foliation_labels == ["L", "R"] * (n - 2) or end.foliation_labels == ["R", "L"] * (n - 2)
    assert asy.equivariance_residual(end) < 1e-9
    plus, minus = asy.accumulation_gaps(end)
    assert plus < 1e-6 and minus < 1e-6
    counts = asy.achronality_scan(end, pairs=2000, seed=1)
    assert counts[ads.CausalClass.TIMELIKE] == 0


def test_assemble_end_validation():
    end = asy.synthetic_end(4, seed=2)
    Ls = asy.synthetic_chart_limits(4, end.holonomy, np.random.default_rng(5))
    with pytest.raises(ValueError):
        asy.assemble_end(2, end.holonomy, Ls)
    with pytest.raises(ValueError):
        asy.assemble_end(4, end.holonomy, Ls[:1])
    with pytest.raises(ValueError):
        asy.assemble_end(4, end.holonomy, [2 * Ls[0], Ls[1]])
    with pytest.raises(ValueError):
        asy.assemble_end(4, end.holonomy, [Ls[1], Ls[0]])


def test_segment_label_rejects_spacelike_pair():
    u = ads.torus_to_null(0.0, 0.0)
    v = ads.torus_to_null(1.0, 0.3)
    with pytest.raises(ValueError):
        asy.segment_label(u, v)
