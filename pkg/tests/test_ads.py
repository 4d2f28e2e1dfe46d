import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adsmax import ads

angles = st.floats(0, 2 * np.pi, allow_nan=False)


def proj_gap(a, b):
    d = abs(ads.wrap_projective(a - b))
    return min(d, np.pi - d)


def test_bilinear_examples():
    assert ads.bilinear_form([1, 0, 0, 0], [1, 0, 0, 0]) == 1
    assert ads.bilinear_form([0, 0, 1, 0], [0, 0, 1, 0]) == -1
    assert ads.bilinear_form([1, 0, 1, 0], [1, 0, 1, 0]) == 0


def test_bilinear_symmetric_and_linear():
    rng = np.random.default_rng(0)
    for _ in range(50):
        x, y, z = rng.normal(size=(3, 4))
        a, b = rng.normal(size=2)
        assert ads.bilinear_form(x, y) == pytest.approx(ads.bilinear_form(y, x), abs=1e-14)
        lhs = ads.bilinear_form(a * x + b * z, y)
        assert lhs == pytest.approx(a * ads.bilinear_form(x, y) + b * ads.bilinear_form(z, y), abs=1e-12)


def test_torus_examples():
    np.testing.assert_allclose(ads.torus_to_null(0, 0), [1, 0, 1, 0])
    np.testing.assert_allclose(ads.torus_to_null(np.pi / 2, np.pi / 2), [0, 1, 0, 1], atol=1e-16)
    np.testing.assert_allclose(ads.null_to_torus(ads.torus_to_null(1.3, 2.1)), (1.3, 2.1))


@given(angles, angles, st.floats(0.1, 10))
def test_null_roundtrip_scale(t, tp, scale):
    x = scale * ads.torus_to_null(t, tp)
    back = ads.torus_to_null(*ads.null_to_torus(x))
    np.testing.assert_allclose(back, x / scale, atol=1e-12)


def test_null_to_torus_rejects():
    with pytest.raises(ValueError):
        ads.null_to_torus([1, 0, 0, 0])
    with pytest.raises(ValueError):
        ads.null_to_torus([0, 0, 0, 0])


def test_causal_examples():
    o = ads.BoundaryPoint.from_angles(0, 0)
    C = ads.CausalClass
    assert ads.causal_class(o, ads.BoundaryPoint.from_angles(np.pi / 4, np.pi / 4)) == C.LIGHTLIKE
    assert ads.causal_class(o, ads.BoundaryPoint.from_angles(np.pi / 2, 0)) == C.SPACELIKE
    assert ads.causal_class(o, ads.BoundaryPoint.from_angles(0, np.pi / 2)) == C.TIMELIKE
    with pytest.raises(ValueError):
        ads.causal_class(o, o)


def test_isometry_identity_and_factor_independence():
    I = np.eye(2)
    np.testing.assert_allclose(ads.isometry_from_pair(I, I).rep4, np.eye(4), atol=1e-15)
    g = ads.isometry_from_pair(np.diag([np.e, 1 / np.e]), I)
    rng = np.random.default_rng(1)
    for t, tp in rng.uniform(0, 2 * np.pi, (20, 2)):
        p = ads.BoundaryPoint.from_angles(t, tp)
        assert proj_gap(g.act(p).right, p.right) < 1e-12


def test_isometry_rejects_non_unimodular():
    with pytest.raises(ValueError):
        ads.isometry_from_pair(np.diag([2.0, 1.0]), np.eye(2))


def test_factor_action_oracle():
    rng = np.random.default_rng(2)
    for _ in range(200):
        a, b = ads.random_sl2(rng), ads.random_sl2(rng)
        g = ads.isometry_from_pair(a, b)
        assert ads.in_so22(g.rep4)
        p = ads.BoundaryPoint.from_angles(*rng.uniform(0, 2 * np.pi, 2))
        la, rb = g.act_factors(p.left, p.right)
        img = g.act(p)
        assert ads.projective_distance(img.null_rep, ads.BoundaryPoint.from_factors(la, rb).null_rep) < 1e-10


def test_rep4_homomorphism():
    rng = np.random.default_rng(3)
    for _ in range(50):
        g = ads.isometry_from_pair(ads.random_sl2(rng), ads.random_sl2(rng))
        h = ads.isometry_from_pair(ads.random_sl2(rng), ads.random_sl2(rng))
        gh = ads.isometry_from_pair(g.left @ h.left, g.right @ h.right)
        np.testing.assert_allclose((g @ h).rep4, gh.rep4, atol=1e-10)


def test_causal_invariance_under_isometries():
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(300):
        g = ads.isometry_from_pair(ads.random_sl2(rng, 0.3), ads.random_sl2(rng, 0.3))
        p = ads.BoundaryPoint.from_angles(*rng.uniform(0, 2 * np.pi, 2))
        q = ads.BoundaryPoint.from_angles(*rng.uniform(0, 2 * np.pi, 2))
        c = ads.causal_class(p, q)
        # compare with the images of the same lifts; skip near-degenerate pairs
        d = abs(abs(ads.wrap_angle(q.theta - p.theta)) - abs(ads.wrap_angle(q.theta_prime - p.theta_prime)))
        if d < 1e-3:
            continue
        gp = ads.BoundaryPoint.from_null(g.rep4 @ p.null_rep)
        gq = ads.BoundaryPoint.from_null(g.rep4 @ q.null_rep)
        assert ads.causal_class(gp, gq) == c
        checked += 1
    assert checked > 200


def test_fixed_points_examples():
    att, rep = ads.fixed_points(np.diag([2.0, 0.5]))
    assert proj_gap(att, 0) < 1e-12 and proj_gap(rep, np.pi / 2) < 1e-12
    c, s = np.cos(0.4), np.sin(0.4)
    rot = np.array([[c, -s], [s, c]])
    att, rep = ads.fixed_points(rot @ np.diag([2.0, 0.5]) @ rot.T)
    assert proj_gap(att, 0.4) < 1e-12 and proj_gap(rep, 0.4 + np.pi / 2) < 1e-12
    with pytest.raises(ValueError):
        ads.fixed_points(rot)


def test_fixed_points_power_iteration():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = ads.hyperbolic_pair_sample(rng)
        att, rep = ads.fixed_points(a)
        assert proj_gap(ads.mobius(a, att), att) < 1e-10
        x = rng.uniform(0, np.pi)
        for _ in range(200):
            x = ads.mobius(a, x)
        assert proj_gap(x, att) < 1e-8


def test_limit_pair_attracts():
    rng = np.random.default_rng(6)
    a, b = ads.hyperbolic_pair_sample(rng), ads.hyperbolic_pair_sample(rng)
    g = ads.isometry_from_pair(a, b)
    fp = ads.limit_fixed_pair(a, b)
    fp3 = ads.limit_fixed_pair(g.power(3).left, g.power(3).right)
    assert fp["++"].same_projective_point(fp3["++"])
    x = ads.BoundaryPoint.from_angles(*rng.uniform(0, 2 * np.pi, 2)).null_rep
    for _ in range(60):
        x = g.rep4 @ x
        x = x / np.linalg.norm(x)
    assert ads.projective_distance(x, fp["++"].null_rep) < 1e-8


def test_negative_power_is_stable():
    rng = np.random.default_rng(7)
    g = ads.isometry_from_pair(ads.hyperbolic_pair_sample(rng), ads.hyperbolic_pair_sample(rng))
    np.testing.assert_allclose(g.power(-2).left @ g.power(2).left, np.eye(2), atol=1e-9)
    assert np.all(np.isfinite(g.power(-30).rep4))
