import numpy as np
import pytest

from adsmax import ads, asymptotics as asy, crowns
from adsmax.acceptance import matched_end, sample_crown


def record(k, length=1.2, offset=0.1, axis=0.4):
    return {"length": length, "offset": offset, "weights": [1.0] * k, "axis": axis}


def test_hyperbolic_from_axis():
    m = crowns.hyperbolic_from_axis(1.5, 0.3)
    assert np.linalg.det(m) == pytest.approx(1, abs=1e-12)
    assert np.trace(m) == pytest.approx(2 * np.cosh(0.75), abs=1e-12)


def test_validation_errors():
    with pytest.raises(crowns.CrownDataError):
        crowns.crown_from_parameters(record(2), record(3))
    with pytest.raises(crowns.CrownDataError):
        crowns.crown_from_parameters(record(2, length=-1), record(2))
    with pytest.raises(crowns.CrownDataError):
        crowns.crown_from_parameters({**record(2), "weights": [1, 0]}, record(2))
    data = crowns.crown_from_parameters(record(2), record(2))
    with pytest.raises(crowns.CrownDataError):
        crowns.CrownEndData(np.eye(2), data.right, data.theta_fund, data.theta_prime_fund)
    with pytest.raises(crowns.CrownDataError):
        crowns.CrownEndData(data.left, data.right, data.theta_fund[::-1], data.theta_prime_fund)
    with pytest.raises(crowns.CrownDataError):
        crowns.CrownEndData(data.left, data.right, (), ())


def test_json_roundtrip():
    data = sample_crown(3, np.random.default_rng(1))
    back = crowns.CrownEndData.from_dict(data.to_dict())
    assert np.allclose(back.left, data.left) and back.theta_fund == data.theta_fund


def test_orbit_is_equivariant():
    data = sample_crown(3, np.random.default_rng(2))
    for i in range(-6, 6):
        img = asy.mobius_unwrapped(data.left, data.theta(i), *data.left_arc)
        assert img == pytest.approx(data.theta(i + data.k), abs=1e-9)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_completion_is_monotone_step_function(k):
    data = sample_crown(k, np.random.default_rng(k))
    f = crowns.build_completion(data)
    assert np.all(np.diff(f.breakpoints) > 0)
    assert np.all(np.diff(f.values) > 0)
    # left-closed: value at a breakpoint is the new value
    for i in range(-k, 2 * k):
        assert f(data.theta(i)) == pytest.approx(data.theta_prime(i))
        mid = 0.5 * (data.theta(i) + data.theta(i + 1))
        assert f(mid) == pytest.approx(data.theta_prime(i))
    with pytest.raises(ValueError):
        f(data.left_arc[0] - 0.1)


def test_symmetric_single_cusp():
    data = crowns.crown_from_parameters(record(1), record(1))
    curve = crowns.curve_from_completion(crowns.build_completion(data))
    assert curve.k == 1
    assert curve.labels[:4] == ["L", "R", "L", "R"]
    assert np.allclose(curve.fundamental_factors[0], (data.theta(0), data.theta_prime(-1)))


def test_relabel_shift_zero_and_diagonal_invariance():
    data = sample_crown(3, np.random.default_rng(7))
    same = crowns.relabel(data, 0)
    assert same.theta_fund == pytest.approx(data.theta_fund)
    c0 = crowns.curve_from_completion(crowns.build_completion(data))
    c1 = crowns.curve_from_completion(crowns.build_completion(crowns.relabel(data, 2)))
    assert crowns.curves_equal(c0, c1)
    c2 = crowns.curve_from_completion(crowns.build_completion(crowns.relabel(data, 1, diagonal=False)))
    assert not crowns.curves_equal(c0, c2)


def test_curve_is_achronal():
    data = sample_crown(3, np.random.default_rng(4))
    curve = crowns.curve_from_completion(crowns.build_completion(data))
    counts = crowns.curve_causal_scan(curve, pairs=1500)
    assert counts[ads.CausalClass.TIMELIKE] == 0
    for v in curve.null_vectors():
        assert ads.bilinear_form(v, v) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_curve_agrees_with_assembled_end(k):
    rng = np.random.default_rng(10 + k)
    data = sample_crown(k, rng)
    curve = crowns.curve_from_completion(crowns.build_completion(data))
    end = matched_end(data, rng)
    vec = curve.null_vectors(curve.fundamental_factors)
    for a, b in zip(vec, end.fundamental_vectors):
        assert ads.projective_distance(a, b) < 1e-9
    assert curve.labels[curve.zero_index:curve.zero_index + 2 * k] == end.foliation_labels
