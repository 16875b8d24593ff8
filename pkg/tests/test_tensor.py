import json
import math

import numpy as np
import pytest

from finslerkit.norms import make_quartic_family
from finslerkit.tensor import (
    check_strong_convexity,
    counterexample_det,
    counterexample_trace,
    fundamental_tensor,
    polynomial_tensor,
    symmetric_eigenvalues_2x2,
    tensor_field,
)

from oracles import printed_tensor


def test_tensor_on_axis(quartic):
    t = fundamental_tensor(quartic, [1.0, 0.0])
    np.testing.assert_array_equal(t.g, [[1.0, 0.0], [0.0, 1.5]])
    assert t.trace == 2.5
    assert t.det == 1.5
    assert t.min_eigenvalue == 1.0


def test_tensor_on_diagonal(quartic):
    t = fundamental_tensor(quartic, [1.0, 1.0])
    np.testing.assert_allclose(t.g, np.array([[20.0, 5.0], [5.0, 20.0]]) / (2 * 5 ** 1.5), rtol=1e-14)


def test_tensor_euclidean(euclid):
    np.testing.assert_allclose(fundamental_tensor(euclid, [0.3, -0.4]).g, np.eye(2), atol=1e-15)


def test_tensor_matches_printed_formula(quartic, rng):
    for y in rng.normal(size=(50, 2)):
        np.testing.assert_allclose(fundamental_tensor(quartic, y).g, printed_tensor(y), rtol=1e-12, atol=1e-14)


def test_trace_det_consistent(quartic, rng):
    for y in rng.normal(size=(20, 2)):
        t = fundamental_tensor(quartic, y)
        assert t.trace == pytest.approx(np.trace(t.g), abs=1e-12)
        assert t.det == pytest.approx(np.linalg.det(t.g), abs=1e-12)
        assert t.min_eigenvalue == pytest.approx(np.linalg.eigvalsh(t.g)[0], abs=1e-12)


def test_closed_form_trace_det(quartic, rng):
    y = rng.normal(size=(256, 2))
    g = tensor_field(quartic, y)
    tr = g[:, 0, 0] + g[:, 1, 1]
    det = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] ** 2
    np.testing.assert_allclose(tr, counterexample_trace(y[:, 0], y[:, 1]), rtol=1e-10)
    np.testing.assert_allclose(det, counterexample_det(y[:, 0], y[:, 1]), rtol=1e-10)


def test_zero_homogeneity(quartic, rng):
    y = rng.normal(size=(200, 2))
    lam = rng.uniform(0.01, 100.0, size=(200, 1))
    np.testing.assert_allclose(tensor_field(quartic, lam * y), tensor_field(quartic, y), atol=1e-10)


def test_euler_contraction(quartic, rng):
    y = rng.normal(size=(200, 2))
    g = tensor_field(quartic, y)
    f2 = quartic.squared((y[:, 0], y[:, 1]))
    np.testing.assert_allclose(np.einsum("ki,kij,kj->k", y, g, y), f2, rtol=1e-10)


def test_even_metric_gives_even_tensor(quartic, rng):
    y = rng.normal(size=(100, 2))
    np.testing.assert_allclose(tensor_field(quartic, -y), tensor_field(quartic, y), atol=1e-12)


def test_riemannian_detection(flat_quartic, rng):
    y = rng.normal(size=(300, 2))
    g = tensor_field(flat_quartic, y)
    np.testing.assert_allclose(g, np.broadcast_to(np.eye(2), g.shape), atol=1e-10)
    f2 = flat_quartic.squared((y[:, 0], y[:, 1]))
    np.testing.assert_allclose(np.einsum("ki,kij,kj->k", y, g, y), f2, rtol=1e-10)


def test_polynomial_route_agrees(quartic, rng):
    for y in rng.normal(size=(20, 2)):
        np.testing.assert_allclose(polynomial_tensor(quartic, y), fundamental_tensor(quartic, y).g, rtol=1e-12)


def test_eigenvalues_2x2():
    lo, hi = symmetric_eigenvalues_2x2(2.0, 1.0, 2.0)
    assert (float(lo), float(hi)) == pytest.approx((1.0, 3.0))
    lo, hi = symmetric_eigenvalues_2x2(1.0, 2.0, 1.0)
    assert float(lo) == pytest.approx(-1.0)


def test_convexity_paper_metric(quartic):
    rep = check_strong_convexity(quartic, 4096)
    assert rep.passed
    # minimum eigenvalue sits on the diagonals: g(1,1) = [[20,5],[5,20]] / (2 5^1.5) -> 15 / (2 5^1.5)
    assert rep.min_eigenvalue == pytest.approx(15 / (2 * 5 ** 1.5), rel=1e-12)
    assert rep.argmin_angle == pytest.approx(math.pi / 4)
    assert rep.closed_form["trace_at_axis"] == 2.5
    assert rep.closed_form["det_at_axis"] == 1.5
    assert rep.closed_form["trace_max_rel_error"] <= 1e-10
    assert rep.closed_form["det_max_rel_error"] <= 1e-10


def test_convexity_euclidean(euclid):
    rep = check_strong_convexity(euclid, 256)
    assert rep.passed
    assert rep.min_eigenvalue == pytest.approx(1.0, abs=1e-14)


def test_convexity_fails_for_c12():
    # oracle: det(g) * P = (-c^2 y1^2 y2^2 + 2c (y1^4 + y2^4) + 12 y1^2 y2^2) / 4, negative on the diagonal
    c = 12.0
    assert (-(c**2) + 4 * c + 12) / 4 < 0
    g = tensor_field(make_quartic_family(c), np.array([1.0, 1.0]))
    assert g[0, 0] * g[1, 1] - g[0, 1] ** 2 < 0
    rep = check_strong_convexity(make_quartic_family(c), 4096)
    assert not rep.passed
    assert rep.min_eigenvalue < 0


def test_convexity_not_a_norm():
    rep = check_strong_convexity(make_quartic_family(-3.0), 256)
    assert not rep.passed
    assert rep.to_dict()["min_eigenvalue"] is None


def test_convexity_json(quartic):
    d = json.loads(json.dumps(check_strong_convexity(quartic, 64).to_dict()))
    assert {"pass", "min_eigenvalue", "argmin_angle", "n_angles"} <= set(d)
    assert d["pass"] is True and d["n_angles"] == 64


def test_convexity_preconditions(quartic):
    with pytest.raises(ValueError):
        check_strong_convexity(quartic, 32)
