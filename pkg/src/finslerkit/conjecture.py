"""Deciding Matsumoto's conjecture numerically and certifying counterexamples.

The conjecture says that for nonzero ``X`` the relative energy ``E_X`` is
globally minimized on the indicatrix at ``X/F(X)``, where it equals
``F(X)^2 / 2``.  A report compares that self-energy with the smallest energy
found over the angular grid and the refined critical points.  A positive
margin beyond the noise threshold refutes the conjecture, and the witness
is packaged as a self-contained, re-checkable certificate.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energy import (
    DEFAULT_N_ANGLES,
    CriticalPoint,
    energy_at_angles,
    energy_profile,
    find_critical_points,
    scalar_multiple_angles,
)
from .errors import ConvexityFailure, MetricFormatError, NonPositiveArgument, ResolutionFailure
from .norms import MinkowskiNorm, eval_norm, indicatrix_point, make_quartic_family, metric_from_dict
from .tensor import check_strong_convexity, first_argmin, polynomial_tensor

HOLDS = "holds_numerically"
REFUTED = "refuted"
REFUTATION_TOL = 1e-8


def refutation_threshold(self_energy: float, tol: float = REFUTATION_TOL) -> float:
    return tol * max(1.0, self_energy)


@dataclass(frozen=True)
class CounterexampleCertificate:
    """Everything needed to re-check a refutation from scratch."""

    metric: dict
    X: tuple[float, ...]
    witness_y: tuple[float, ...]
    witness_theta: float
    witness_energy: float
    self_energy: float
    tol: float = REFUTATION_TOL

    @property
    def margin(self) -> float:
        return self.self_energy - self.witness_energy

    def to_dict(self) -> dict:
        return {
            "kind": "matsumoto_counterexample",
            "metric": self.metric,
            "X": list(self.X),
            "witness_y": list(self.witness_y),
            "witness_theta": self.witness_theta,
            "witness_energy": self.witness_energy,
            "self_energy": self.self_energy,
            "margin": self.margin,
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CounterexampleCertificate":
        try:
            return cls(
                metric=dict(data["metric"]),
                X=tuple(float(v) for v in data["X"]),
                witness_y=tuple(float(v) for v in data["witness_y"]),
                witness_theta=float(data["witness_theta"]),
                witness_energy=float(data["witness_energy"]),
                self_energy=float(data["self_energy"]),
                tol=float(data.get("tol", REFUTATION_TOL)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MetricFormatError(f"malformed certificate: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "CounterexampleCertificate":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def verify(self) -> "CertificateCheck":
        return verify_certificate(self)


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    witness_norm: float
    witness_energy: float
    self_energy: float
    margin: float
    failures: tuple[str, ...] = ()


def verify_certificate(cert: CounterexampleCertificate) -> CertificateCheck:
    """Recompute a certificate through a path independent of the search.

    The metric is rebuilt from its stored definition; ``F`` is evaluated
    directly and ``g`` comes from exact polynomial derivatives, so no
    hyper-dual arithmetic, finite differences or cached values are involved.
    """
    norm = metric_from_dict(cert.metric)
    X = np.array(cert.X, dtype=float)
    y = np.array(cert.witness_y, dtype=float)
    f_y = float(norm.evaluate(tuple(y)))
    f_x = float(norm.evaluate(tuple(X)))
    energy = float(0.5 * X @ polynomial_tensor(norm, y) @ X)
    self_energy = 0.5 * f_x * f_x
    margin = self_energy - energy

    failures = []
    if abs(f_y - 1.0) > 1e-10:
        failures.append(f"witness is off the indicatrix: F(y*) = {f_y!r}")
    if not margin > refutation_threshold(self_energy, cert.tol):
        failures.append(f"margin {margin!r} does not exceed the refutation threshold")
    if abs(energy - cert.witness_energy) > 1e-9 * max(1.0, abs(energy)):
        failures.append("stored witness energy does not match recomputation")
    if abs(self_energy - cert.self_energy) > 1e-9 * max(1.0, self_energy):
        failures.append("stored self energy does not match recomputation")
    return CertificateCheck(not failures, f_y, energy, self_energy, margin, tuple(failures))


@dataclass
class ConjectureReport:
    metric_id: str
    X: np.ndarray
    self_energy: float
    global_min: float
    global_min_theta: float
    global_min_y: np.ndarray
    verdict: str
    margin: float
    convexity_pass: bool
    critical_points: list[CriticalPoint] = field(default_factory=list)
    certificate: CounterexampleCertificate | None = None
    note: str = ""

    @property
    def refuted(self) -> bool:
        return self.verdict == REFUTED

    def to_dict(self) -> dict:
        out = {
            "metric": self.metric_id,
            "X": self.X.tolist(),
            "self_energy": self.self_energy,
            "global_min": self.global_min,
            "global_min_location": {"theta": self.global_min_theta, "y": self.global_min_y.tolist()},
            "verdict": self.verdict,
            "margin": self.margin,
            "convexity_pass": self.convexity_pass,
            "critical_points": [p.to_dict() for p in self.critical_points],
        }
        if self.note:
            out["note"] = self.note
        return out


def test_conjecture(
    norm: MinkowskiNorm,
    X,
    n_angles: int = DEFAULT_N_ANGLES,
    tol: float = REFUTATION_TOL,
    require_convex: bool = False,
) -> ConjectureReport:
    """Check whether ``E_X`` is globally minimized at ``X/F(X)``.

    The global minimum is taken over the raw angular grid, the refined
    critical points, and the self point.  Non-convex metrics still get a
    report (``convexity_pass=False``) unless ``require_convex`` is set, in
    which case :class:`ConvexityFailure` is raised.
    """
    X = np.asarray(X, dtype=float)
    convexity = check_strong_convexity(norm, max(64, n_angles))
    if not convexity.passed and require_convex:
        raise ConvexityFailure(convexity.reason or "metric is not strongly convex")
    profile = energy_profile(norm, X, n_angles)

    note = ""
    try:
        points = find_critical_points(norm, X, n_angles)
    except ResolutionFailure as exc:
        points = []
        note = str(exc)

    self_theta = scalar_multiple_angles(X)
    candidates_theta = np.concatenate([profile.angles, [p.theta for p in points], self_theta])
    candidates_energy = np.concatenate([
        profile.values,
        [p.energy for p in points],
        energy_at_angles(norm, X, self_theta),
    ])
    order = np.argsort(candidates_theta, kind="stable")
    candidates_theta = candidates_theta[order]
    candidates_energy = candidates_energy[order]
    k = first_argmin(candidates_energy)
    global_min = float(candidates_energy[k])
    theta_min = float(candidates_theta[k])

    f_x = eval_norm(norm, X)
    self_energy = 0.5 * f_x * f_x
    margin = self_energy - global_min
    verdict = REFUTED if margin > refutation_threshold(self_energy, tol) else HOLDS
    y_min = indicatrix_point(norm, theta_min)

    certificate = None
    if verdict == REFUTED:
        try:
            metric = norm.to_dict()
        except MetricFormatError:
            metric = None
        if metric is not None:
            certificate = CounterexampleCertificate(
                metric=metric,
                X=tuple(float(v) for v in X),
                witness_y=tuple(float(v) for v in y_min),
                witness_theta=theta_min,
                witness_energy=global_min,
                self_energy=self_energy,
                tol=tol,
            )

    return ConjectureReport(
        metric_id=norm.description,
        X=X,
        self_energy=self_energy,
        global_min=global_min,
        global_min_theta=theta_min,
        global_min_y=y_min,
        verdict=verdict,
        margin=margin,
        convexity_pass=convexity.passed,
        critical_points=points,
        certificate=certificate,
        note=note,
    )


test_conjecture.__test__ = False  # not a pytest test despite the name


def unit_directions(n_dirs: int) -> np.ndarray:
    theta = 2.0 * math.pi * np.arange(n_dirs) / n_dirs
    return np.column_stack([np.cos(theta), np.sin(theta)])


@dataclass
class VectorSweep:
    reports: list[ConjectureReport]

    @property
    def n_refuted(self) -> int:
        return sum(r.refuted for r in self.reports)

    @property
    def refutation_fraction(self) -> float:
        return self.n_refuted / len(self.reports)


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def sweep_vectors(
    norm: MinkowskiNorm,
    n_dirs: int = 8,
    n_angles: int = DEFAULT_N_ANGLES,
    tol: float = REFUTATION_TOL,
    workers: int | None = None,
) -> VectorSweep:
    """Run :func:`test_conjecture` for ``n_dirs`` equally spaced unit vectors."""
    if n_dirs < 4:
        raise ValueError("n_dirs must be at least 4")
    dirs = unit_directions(n_dirs)
    return VectorSweep(_map(lambda X: test_conjecture(norm, X, n_angles, tol), dirs, workers))


@dataclass(frozen=True)
class FamilyEntry:
    c: float
    convexity_pass: bool
    min_eigenvalue: float | None
    n_dirs: int
    n_refuted: int | None
    refutation_fraction: float | None
    status: str

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "convexity_pass": self.convexity_pass,
            "min_eigenvalue": self.min_eigenvalue,
            "n_dirs": self.n_dirs,
            "n_refuted": self.n_refuted,
            "refutation_fraction": self.refutation_fraction,
            "status": self.status,
        }


@dataclass
class FamilySweepSummary:
    n_dirs: int
    entries: list[FamilyEntry]

    def by_c(self) -> dict[float, FamilyEntry]:
        return {e.c: e for e in self.entries}

    def to_dict(self) -> dict:
        return {
            "family": "y1^4 + c*y1^2*y2^2 + y2^4",
            "n_dirs": self.n_dirs,
            "results": {f"{e.c:g}": e.to_dict() for e in self.entries},
        }


def _family_entry(c: float, n_dirs: int, n_angles: int, tol: float) -> FamilyEntry:
    norm = make_quartic_family(c)
    conv = check_strong_convexity(norm, max(64, n_angles))
    min_eig = None if math.isnan(conv.min_eigenvalue) else conv.min_eigenvalue
    status = "ok" if conv.passed else "convexity_fail"
    try:
        sweep = sweep_vectors(norm, n_dirs, n_angles, tol)
    except NonPositiveArgument:
        return FamilyEntry(c, False, min_eig, n_dirs, None, None, "not_a_norm")
    return FamilyEntry(c, conv.passed, min_eig, n_dirs, sweep.n_refuted, sweep.refutation_fraction, status)


def sweep_family(
    c_values,
    n_dirs: int = 8,
    n_angles: int = DEFAULT_N_ANGLES,
    tol: float = REFUTATION_TOL,
    workers: int | None = None,
) -> FamilySweepSummary:
    """Convexity verdict and refutation fraction for each quartic-family parameter."""
    c_values = [float(c) for c in c_values]
    if not c_values:
        raise ValueError("c_values must be nonempty")
    entries = _map(lambda c: _family_entry(c, n_dirs, n_angles, tol), c_values, workers)
    return FamilySweepSummary(n_dirs, entries)
