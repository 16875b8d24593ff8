import json
import math

import numpy as np
import pytest

from finslerkit.conjecture import (
    HOLDS,
    REFUTED,
    CounterexampleCertificate,
    sweep_family,
    sweep_vectors,
    test_conjecture as run_conjecture,
    verify_certificate,
)
from finslerkit.errors import ConvexityFailure
from finslerkit.norms import eval_norm, make_quartic_family

from oracles import brute_force_min, circular_distance

SQ5 = math.sqrt(5.0)


def test_example1_refuted(quartic):
    rep = run_conjecture(quartic, (1.0, 0.0))
    assert rep.verdict == REFUTED
    assert rep.self_energy == pytest.approx(0.5, rel=1e-12)
    assert rep.global_min == pytest.approx(1 / SQ5, rel=1e-9)
    assert rep.global_min_theta == pytest.approx(math.pi / 4, abs=1e-6)
    assert rep.convexity_pass
    assert rep.certificate is not None and rep.certificate.verify().ok


def test_example2_refuted(quartic):
    rep = run_conjecture(quartic, (1.0, 3.0))
    assert rep.verdict == REFUTED
    assert rep.self_energy == pytest.approx(math.sqrt(109) / 2, rel=1e-12)
    assert rep.global_min == pytest.approx(17 / (2 * SQ5), rel=1e-9)
    u = rep.global_min_y / np.linalg.norm(rep.global_min_y)
    assert abs(u[0] + u[1]) < 1e-6  # parallel to (1, -1)


def test_example2_minimum_against_brute_force(quartic):
    e_min, theta = brute_force_min((1.0, 3.0), 10**5)
    rep = run_conjecture(quartic, (1.0, 3.0))
    assert rep.global_min <= e_min + 1e-12
    assert rep.global_min == pytest.approx(e_min, rel=1e-8)


def test_euclidean_holds(flat_quartic):
    rep = run_conjecture(flat_quartic, (3.0, -1.0))
    assert rep.verdict == HOLDS
    assert abs(rep.margin) <= 1e-10
    assert rep.certificate is None
    assert rep.note


def test_global_min_never_exceeds_self(quartic, rng):
    for X in rng.normal(size=(5, 2)):
        rep = run_conjecture(quartic, X, n_angles=1024)
        assert rep.global_min <= rep.self_energy + 1e-10


def test_monotone_refinement(quartic):
    for X in [(1.0, 0.0), (1.0, 3.0), (0.4, -1.7)]:
        coarse = run_conjecture(quartic, X, n_angles=1024).global_min
        fine = run_conjecture(quartic, X, n_angles=8192).global_min
        assert fine <= coarse + 1e-8


@pytest.mark.parametrize("lam", [1e-3, 0.5, 7.0, 1e3])
def test_scale_invariance(quartic, lam):
    X = np.array([1.0, 3.0])
    a = run_conjecture(quartic, X)
    b = run_conjecture(quartic, lam * X)
    assert a.verdict == b.verdict
    assert circular_distance(a.global_min_theta, b.global_min_theta) < 1e-6
    assert b.global_min == pytest.approx(lam**2 * a.global_min, rel=1e-9)


def test_nonconvex_metric_still_reported():
    F = make_quartic_family(12.0)
    rep = run_conjecture(F, (1.0, 0.0), n_angles=1024)
    assert not rep.convexity_pass
    with pytest.raises(ConvexityFailure):
        run_conjecture(F, (1.0, 0.0), n_angles=1024, require_convex=True)


def test_certificate_roundtrip_and_tamper(quartic, tmp_path):
    cert = run_conjecture(quartic, (1.0, 3.0)).certificate
    path = tmp_path / "cert.json"
    cert.save(path)
    loaded = CounterexampleCertificate.load(path)
    check = verify_certificate(loaded)
    assert check.ok
    assert check.witness_norm == pytest.approx(1.0, abs=1e-10)
    assert check.margin >= 1.4

    data = json.loads(path.read_text())
    data["witness_y"] = [1.0, 3.0]
    assert not CounterexampleCertificate.from_dict(data).verify().ok

    data = json.loads(path.read_text())
    data["metric"]["coeffs"][1]["value"] = 2.0  # Euclidean: no counterexample
    assert not CounterexampleCertificate.from_dict(data).verify().ok


def test_sweep_paper_metric(quartic):
    sweep = sweep_vectors(quartic, 8)
    assert sweep.n_refuted == 8
    assert all(r.certificate.verify().ok for r in sweep.reports)


def test_sweep_euclidean(euclid):
    assert sweep_vectors(euclid, 8).n_refuted == 0


def test_sweep_c21():
    # brute-force oracle: dense-grid minimum below the self value in every direction
    F = make_quartic_family(2.1)
    sweep = sweep_vectors(F, 8)
    theta = 2 * np.pi * np.arange(20000) / 20000
    from finslerkit.energy import energy_at_angles

    for rep in sweep.reports:
        brute = energy_at_angles(F, rep.X, theta).min()
        assert (0.5 * eval_norm(F, rep.X) ** 2 - brute > 1e-8) == rep.refuted
    assert sweep.n_refuted == 8


def test_sweep_threads_match_serial(quartic):
    a = sweep_vectors(quartic, 4, n_angles=512)
    b = sweep_vectors(quartic, 4, n_angles=512, workers=4)
    assert [r.global_min for r in a.reports] == [r.global_min for r in b.reports]


def test_sweep_family():
    summary = sweep_family([2.0, 3.0, 12.0, -3.0], 8, n_angles=1024)
    by_c = summary.by_c()
    assert by_c[3.0].convexity_pass and by_c[3.0].refutation_fraction == 1.0
    assert by_c[2.0].convexity_pass and by_c[2.0].refutation_fraction == 0.0
    assert not by_c[12.0].convexity_pass and by_c[12.0].status == "convexity_fail"
    assert by_c[-3.0].status == "not_a_norm"
    assert json.loads(json.dumps(summary.to_dict()))["results"]["3"]["n_refuted"] == 8


def test_sweep_preconditions(quartic):
    with pytest.raises(ValueError):
        sweep_vectors(quartic, 3)
    with pytest.raises(ValueError):
        sweep_family([], 8)
