import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from finslerkit.errors import MetricFormatError, NonPositiveArgument
from finslerkit.norms import (
    CustomNorm,
    HomogeneousPolynomial,
    MthRootMetric,
    RiemannianNorm,
    counterexample_metric,
    eval_norm,
    indicatrix_point,
    indicatrix_radius,
    is_counterexample_metric,
    load_metric,
    make_quartic_family,
    metric_from_dict,
    save_metric,
)

QUARTIC_JSON = {
    "dimension": 2,
    "m": 4,
    "coeffs": [
        {"powers": [4, 0], "value": 1.0},
        {"powers": [2, 2], "value": 3.0},
        {"powers": [0, 4], "value": 1.0},
    ],
}

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_eval_on_axis(quartic):
    assert eval_norm(quartic, (1.0, 0.0)) == 1.0


def test_eval_at_1_3(quartic):
    # 1 + 27 + 81 = 109
    assert eval_norm(quartic, (1.0, 3.0)) == pytest.approx(109 ** 0.25, rel=1e-15)


def test_eval_scales(quartic):
    assert eval_norm(quartic, (2.0, 0.0)) == 2.0 * eval_norm(quartic, (1.0, 0.0))


def test_zero_vector_is_zero(quartic):
    assert eval_norm(quartic, (0.0, 0.0)) == 0.0


@pytest.mark.parametrize("c, y, expected", [
    (3.0, (1.0, 1.0), 5 ** 0.25),
    (2.0, (3.0, 4.0), 5.0),
    (0.0, (1.0, 1.0), 2 ** 0.25),
])
def test_quartic_family_values(c, y, expected):
    assert eval_norm(make_quartic_family(c), y) == pytest.approx(expected, rel=1e-14)


def test_quartic_c3_matches_closed_form(quartic, rng):
    y = rng.normal(size=(200, 2))
    direct = (y[:, 0] ** 4 + 3 * y[:, 0] ** 2 * y[:, 1] ** 2 + y[:, 1] ** 4) ** 0.25
    got = np.array([eval_norm(quartic, v) for v in y])
    np.testing.assert_allclose(got, direct, rtol=1e-15)


def test_quartic_c2_is_euclidean(flat_quartic, rng):
    y = rng.normal(scale=5.0, size=(1000, 2))
    got = flat_quartic.evaluate((y[:, 0], y[:, 1]))
    np.testing.assert_allclose(got, np.hypot(y[:, 0], y[:, 1]), rtol=1e-12)


def test_homogeneity_sampled(quartic, rng):
    y = rng.normal(size=(1000, 2))
    lam = rng.uniform(1e-6, 10.0, size=1000)
    f = quartic.evaluate((y[:, 0], y[:, 1]))
    f_scaled = quartic.evaluate((lam * y[:, 0], lam * y[:, 1]))
    assert np.max(np.abs(f_scaled - lam * f) / (lam * f)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(coord, coord, st.floats(1e-3, 10.0))
def test_homogeneity_property(a, b, lam):
    F = counterexample_metric()
    assume(a * a + b * b > 1e-12)
    f = eval_norm(F, (a, b))
    assert f > 0.0
    assert abs(eval_norm(F, (lam * a, lam * b)) - lam * f) <= 1e-12 * lam * f


def test_indicatrix_radius_values(quartic, flat_quartic):
    assert indicatrix_radius(quartic, 0.0) == pytest.approx(1.0, abs=1e-15)
    # P(sqrt2/2, sqrt2/2) = 5/4
    assert indicatrix_radius(quartic, math.pi / 4) == pytest.approx((4 / 5) ** 0.25, rel=1e-14)
    assert indicatrix_radius(quartic, math.pi / 4) == pytest.approx(0.9457, abs=1e-4)
    for t in np.linspace(0, 2 * np.pi, 17):
        assert indicatrix_radius(flat_quartic, t) == pytest.approx(1.0, rel=1e-14)


def test_indicatrix_consistency(quartic):
    theta = 2 * np.pi * np.arange(4096) / 4096
    r = indicatrix_radius(quartic, theta)
    f = quartic.evaluate((r * np.cos(theta), r * np.sin(theta)))
    assert np.max(np.abs(f - 1.0)) <= 1e-12


def test_indicatrix_point_is_unit(quartic):
    y = indicatrix_point(quartic, 1.0)
    assert eval_norm(quartic, y) == pytest.approx(1.0, abs=1e-12)


def test_nonpositive_polynomial_raises():
    F = make_quartic_family(-3.0)
    with pytest.raises(NonPositiveArgument):
        eval_norm(F, (1.0, 1.0))
    assert not F.is_positive()


def test_positivity_on_sample(quartic):
    assert quartic.is_positive(4096)


def test_odd_degree_rejected():
    with pytest.raises(MetricFormatError):
        MthRootMetric(3, {(3, 0): 1.0, (0, 3): 1.0}, 2)


def test_multi_index_must_sum_to_m():
    with pytest.raises(MetricFormatError):
        MthRootMetric(4, {(4, 0): 1.0, (2, 1): 1.0}, 2)


def test_polynomial_derivative():
    P = HomogeneousPolynomial({(4, 0): 1.0, (2, 2): 3.0, (0, 4): 1.0}, 2)
    d1 = P.derivative(0)
    # 4 y1^3 + 6 y1 y2^2 at (1, 2): 4 + 24
    assert d1((1.0, 2.0)) == 28.0
    assert P.derivative(0).derivative(1)((1.0, 2.0)) == 12.0 * 1 * 2


def test_metric_json_roundtrip(tmp_path, quartic):
    path = tmp_path / "m.json"
    save_metric(quartic, path)
    assert json.loads(path.read_text()) == QUARTIC_JSON
    again = load_metric(path)
    assert again == quartic
    assert is_counterexample_metric(again)


def test_metric_from_schema_example():
    assert metric_from_dict(QUARTIC_JSON) == counterexample_metric()


@pytest.mark.parametrize("mutate", [
    lambda d: d["coeffs"].append({"powers": [4, 0], "value": 2.0}),
    lambda d: d.pop("m"),
    lambda d: d.update(m=3),
    lambda d: d["coeffs"].append({"powers": [1, 1, 2], "value": 1.0}),
    lambda d: d["coeffs"].append({"powers": [3, 0], "value": 1.0}),
    lambda d: d.update(coeffs=[]),
    lambda d: d["coeffs"][0].pop("value"),
])
def test_malformed_metric_rejected(mutate):
    data = json.loads(json.dumps(QUARTIC_JSON))
    mutate(data)
    with pytest.raises(MetricFormatError):
        metric_from_dict(data)


def test_riemannian_roundtrip():
    A = np.array([[2.0, 0.5], [0.5, 1.0]])
    F = RiemannianNorm(A)
    G = metric_from_dict(F.to_dict())
    assert eval_norm(G, (1.0, 1.0)) == pytest.approx(math.sqrt(4.0))


def test_custom_norm_evaluates():
    F = CustomNorm(lambda c: (c[0] ** 4 + c[1] ** 4) ** 0.25, 2)
    assert eval_norm(F, (1.0, 1.0)) == pytest.approx(2 ** 0.25)
    with pytest.raises(MetricFormatError):
        F.to_dict()
