"""Fundamental tensor ``g = 1/2 Hess(F^2)`` and strong-convexity checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import jet_of_norm_squared
from .errors import NonPositiveArgument
from .norms import MinkowskiNorm, MthRootMetric, RiemannianNorm, is_counterexample_metric

CONVEXITY_THRESHOLD = 1e-9


@dataclass(frozen=True)
class FundamentalTensor:
    at: np.ndarray
    g: np.ndarray
    trace: float
    det: float
    min_eigenvalue: float


def tensor_field(norm: MinkowskiNorm, y) -> np.ndarray:
    """``g`` for a vector ``(n,)`` or a batch ``(N, n)``; returns ``(n, n)`` or ``(N, n, n)``."""
    return 0.5 * jet_of_norm_squared(norm, y).hess


def symmetric_eigenvalues_2x2(a, b, d):
    """Eigenvalues ``(low, high)`` of ``[[a, b], [b, d]]``, elementwise over arrays."""
    a, b, d = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, d)))
    half_tr = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), b)
    high = half_tr + rad
    det = a * d - b * b
    # det/high avoids cancellation in half_tr - rad when both eigenvalues are positive
    with np.errstate(divide="ignore", invalid="ignore"):
        low = np.where(high > 0.0, det / np.where(high > 0.0, high, 1.0), half_tr - rad)
    return low, high


def min_eigenvalues(g: np.ndarray) -> np.ndarray:
    if g.shape[-1] == 2:
        return symmetric_eigenvalues_2x2(g[..., 0, 0], g[..., 0, 1], g[..., 1, 1])[0]
    return np.linalg.eigvalsh(g)[..., 0]


def first_argmin(values: np.ndarray, rel: float = 1e-12) -> int:
    """Index of the smallest value; near-ties resolve to the lowest index."""
    lo = float(np.min(values))
    return int(np.flatnonzero(values <= lo + rel * max(1.0, abs(lo)))[0])


def fundamental_tensor(norm: MinkowskiNorm, y) -> FundamentalTensor:
    y = np.asarray(y, dtype=float)
    g = tensor_field(norm, y)
    return FundamentalTensor(
        at=y.copy(),
        g=g,
        trace=float(np.trace(g)),
        det=float(np.linalg.det(g)) if g.shape[0] > 2 else float(g[0, 0] * g[1, 1] - g[0, 1] ** 2),
        min_eigenvalue=float(min_eigenvalues(g)),
    )


# closed forms for the quartic counterexample metric
def counterexample_trace(y1, y2):
    p = y1**4 + 3 * y1**2 * y2**2 + y2**4
    return 5.0 * (y1**2 + y2**2) ** 3 / (2.0 * p**1.5)


def counterexample_det(y1, y2):
    p = y1**4 + 3 * y1**2 * y2**2 + y2**4
    return 3.0 * (2 * y1**4 + y1**2 * y2**2 + 2 * y2**4) / (4.0 * p)


@dataclass
class ConvexityReport:
    passed: bool
    min_eigenvalue: float
    argmin_angle: float
    n_angles: int
    reason: str = ""
    closed_form: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "pass": self.passed,
            "min_eigenvalue": None if math.isnan(self.min_eigenvalue) else self.min_eigenvalue,
            "argmin_angle": self.argmin_angle,
            "n_angles": self.n_angles,
        }
        if self.reason:
            out["reason"] = self.reason
        if self.closed_form:
            out["closed_form"] = self.closed_form
        return out


def check_strong_convexity(norm: MinkowskiNorm, n_angles: int = 4096) -> ConvexityReport:
    """Scan ``g`` over ``n_angles`` unit directions; pass iff min eigenvalue > 1e-9.

    By 0-homogeneity of ``g`` the unit circle covers every direction.  For the
    quartic counterexample metric the report also carries the worst relative
    error of the sampled trace and determinant against their closed forms.
    """
    if norm.dimension != 2:
        raise ValueError("strong-convexity scan is implemented for dimension 2")
    if n_angles < 64:
        raise ValueError("n_angles must be at least 64")
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    y = np.column_stack([np.cos(theta), np.sin(theta)])
    try:
        g = tensor_field(norm, y)
    except NonPositiveArgument:
        bad = _first_nonpositive_angle(norm, theta)
        return ConvexityReport(False, float("nan"), bad, n_angles, reason="norm is not positive in some direction")
    lam = min_eigenvalues(g)
    k = first_argmin(lam)
    report = ConvexityReport(
        passed=bool(lam[k] > CONVEXITY_THRESHOLD),
        min_eigenvalue=float(lam[k]),
        argmin_angle=float(theta[k]),
        n_angles=n_angles,
    )
    if not report.passed:
        report.reason = "fundamental tensor is not positive definite in some direction"
    if is_counterexample_metric(norm):
        tr = g[:, 0, 0] + g[:, 1, 1]
        det = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] ** 2
        tr_ref = counterexample_trace(y[:, 0], y[:, 1])
        det_ref = counterexample_det(y[:, 0], y[:, 1])
        report.closed_form = {
            "trace_max_rel_error": float(np.max(np.abs(tr / tr_ref - 1.0))),
            "det_max_rel_error": float(np.max(np.abs(det / det_ref - 1.0))),
            "trace_at_axis": float(tr[0]),
            "det_at_axis": float(det[0]),
        }
    return report


def _first_nonpositive_angle(norm, theta) -> float:
    for t in theta:
        try:
            norm.squared((math.cos(t), math.sin(t)))
        except NonPositiveArgument:
            return float(t)
    return float("nan")


def polynomial_tensor(norm: MthRootMetric | RiemannianNorm, y) -> np.ndarray:
    """``g(y)`` from exact polynomial derivatives, without automatic differentiation.

    For ``F^2 = P^p`` with ``p = 2/m``::

        g = 1/2 P^(p-2) (p P Hess(P) + p (p-1) grad(P) grad(P)^T)

    Used as an independent route for certificate re-verification.
    """
    if isinstance(norm, RiemannianNorm):
        return np.array(norm.matrix, dtype=float)
    if not isinstance(norm, MthRootMetric):
        raise TypeError("polynomial_tensor needs an m-th root or Riemannian metric")
    y = tuple(float(v) for v in y)
    n = norm.dimension
    P = norm.polynomial
    dP = [P.derivative(i) for i in range(n)]
    pv = P(y)
    if pv <= 0.0:
        raise NonPositiveArgument("polynomial is not positive here")
    grad = np.array([d(y) for d in dP])
    hess = np.array([[dP[i].derivative(j)(y) for j in range(n)] for i in range(n)])
    p = 2.0 / norm.m
    return 0.5 * pv ** (p - 2.0) * (p * pv * hess + p * (p - 1.0) * np.outer(grad, grad))
