import numpy as np
import pytest
from scipy.integrate import quad

from adsmax import quadratic as qd


def test_eval_q_examples():
    assert qd.eval_q(qd.PoleModel(4, (1, 0, 0)), 1.0) == pytest.approx(1.0)
    assert qd.eval_q(qd.PoleModel(3, (1, 0)), 0.1) == pytest.approx(1000.0)
    with pytest.raises(ValueError):
        qd.eval_q(qd.PoleModel(3, (1, 0)), 0.0)


def test_pole_model_validation_and_json():
    with pytest.raises(ValueError):
        qd.PoleModel(2, (1,))
    with pytest.raises(ValueError):
        qd.PoleModel(4, (0, 1, 0))
    m = qd.PoleModel(5, (1, 0.5j, 0, -1), 0.7)
    assert m.n_charts == 3
    assert qd.PoleModel.from_dict(m.to_dict()) == m


def test_flat_length_of_circle():
    m = qd.PoleModel(4, (1, 0, 0))
    for rho in (0.2, 0.5, 0.9):
        # |q|^(1/2) |dz| along |z| = rho
        length, _ = quad(lambda t: np.sqrt(qd.flat_density(m, rho * np.exp(1j * t))) * rho,
                         0, 2 * np.pi, epsabs=1e-12, epsrel=1e-12)
        assert length == pytest.approx(2 * np.pi / rho, abs=1e-8)


def test_density_lower_bound_positive():
    m = qd.PoleModel.normal_form(4, A=0.5, radius=0.5)
    assert qd.density_lower_bound(m) > 0


def test_odd_chart_decays():
    ch = qd.make_chart(qd.PoleModel.normal_form(5), 1)
    vals = [abs(qd.natural_chart_map(ch, t * (1 + 0.5j))) for t in (10, 1e3, 1e5, 1e7)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def _samples(count=50, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-20, 20, count) + 1j * rng.uniform(0.05, 20, count)


@pytest.mark.parametrize("order", [3, 5, 7])
def test_odd_pullback(order):
    m = qd.PoleModel.normal_form(order)
    for ch in qd.make_charts(m):
        assert qd.pullback_residual(ch, _samples()) <= 1e-6


@pytest.mark.parametrize("order,A", [(4, 0.5), (4, 1.0 - 0.5j), (6, 0.3)])
def test_even_pullback(order, A):
    m = qd.PoleModel.normal_form(order, A=A)
    for ch in qd.make_charts(m):
        assert qd.pullback_residual(ch, _samples()) <= 1e-5
        assert np.all(np.abs(qd.natural_chart_map(ch, _samples())) < m.radius)


def test_chart_inverse_roundtrip():
    m = qd.PoleModel.normal_form(4, A=0.5)
    ch = qd.make_chart(m, 1)
    om = _samples(30, 1)
    back = qd.chart_inverse(ch, qd.natural_chart_map(ch, om))
    np.testing.assert_allclose(back, om, atol=1e-9)


@pytest.mark.parametrize("order,A", [(4, 0.5), (5, 0.0), (6, 0.2)])
def test_transitions_are_isometries(order, A):
    m = qd.PoleModel.normal_form(order, A=A)
    charts = qd.make_charts(m)
    k = len(charts)
    for i in range(k):
        a, b = charts[i], charts[(i + 1) % k]
        # points of chart b near its boundary ray shared with chart a
        om = -np.linspace(5, 40, 20) + 1j * np.linspace(0.5, 3, 20)
        s, c, res = qd.chart_transition(a, b, om)
        assert abs(s) == 1
        assert res <= 1e-6


def test_coverage_of_punctured_disk():
    for order, A in ((3, 0), (4, 0.5), (5, 0), (6, 0.3)):
        charts = qd.make_charts(qd.PoleModel.normal_form(order, A=A))
        r = qd.coverage_radius(charts)
        assert 0 < r
        assert qd.covers_annulus(charts, r) == 1.0


def test_adapted_form_rejects_general_models():
    with pytest.raises(ValueError):
        qd.adapted_form(qd.PoleModel(5, (1, 1, 0, 0)))
    c, A = qd.adapted_form(qd.PoleModel.normal_form(4, A=0.5))
    assert c == pytest.approx(1) and A == pytest.approx(0.5)


def test_dimension_examples():
    assert qd.qd_space_dims(-2, [])[0] == 6
    assert qd.qd_space_dims(-2, [3]) == (12, (11, 1))
    assert qd.qd_space_dims(-2, [3, 4]) == (20, (18, 2))
    assert qd.crowned_teich_dim(1, [1]) == 4
    assert qd.crowned_teich_dim(1, [2]) == 5
    assert qd.crowned_teich_dim(2, [1, 1]) == 14
