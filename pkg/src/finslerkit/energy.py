"""Relative length, relative energy and its critical points on the 2D indicatrix.

For a fixed vector ``X`` the relative energy is ``E_X(y) = 1/2 X^T g(y) X``.
Because ``g`` is 0-homogeneous, ``E_X`` only depends on the direction of
``y``, so along the indicatrix it is a 2*pi-periodic function of the
Euclidean angle ``theta``.  Critical points are found as roots of
``dE/dtheta``, which is taken by central differences so the
differentiation engine never needs third derivatives of ``F``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ResolutionFailure
from .norms import MinkowskiNorm, MthRootMetric, indicatrix_point
from .tensor import tensor_field

TWO_PI = 2.0 * math.pi
DEFAULT_N_ANGLES = 4096
MERGE_TOL = 1e-6
SMALL_DERIVATIVE = 1e-6
RESIDUAL_TOL = 1e-8
CONSTANT_PROFILE_TOL = 1e-10

LOCAL_MIN = "local_min"
LOCAL_MAX = "local_max"
INFLECTION = "inflection"


def _vector(X, dimension: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape != (dimension,):
        raise ValueError(f"expected a vector of length {dimension}, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("vector has non-finite entries")
    return X


def _nonzero_vector(X, dimension: int) -> np.ndarray:
    X = _vector(X, dimension)
    if not np.any(X):
        raise ValueError("X must be nonzero")
    return X


def relative_energy(norm: MinkowskiNorm, X, y) -> float:
    """``1/2 X^T g(y) X``; ``y`` only matters up to positive scaling."""
    X = _vector(X, norm.dimension)
    y = _vector(y, norm.dimension)
    r = np.linalg.norm(y)
    if r == 0.0:
        raise ValueError("y must be nonzero")
    g = tensor_field(norm, y / r)
    return float(0.5 * X @ g @ X)


def relative_length(norm: MinkowskiNorm, X, y) -> float:
    """``|X|_y = sqrt(g_ij(y) X^i X^j)``."""
    return math.sqrt(max(0.0, 2.0 * relative_energy(norm, X, y)))


def energy_at_angles(norm: MinkowskiNorm, X, theta) -> np.ndarray:
    """Vectorized ``E_X`` at the indicatrix points with Euclidean angles ``theta``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    y = np.column_stack([np.cos(theta), np.sin(theta)])
    g = tensor_field(norm, y)
    return 0.5 * np.einsum("i,kij,j->k", X, g, X)


@dataclass(frozen=True)
class EnergyProfile:
    X: np.ndarray
    angles: np.ndarray
    values: np.ndarray
    metric_id: str

    def to_csv(self, path_or_file) -> None:
        """Write ``theta,energy`` rows with 17 significant digits."""
        if hasattr(path_or_file, "write"):
            self._write_rows(path_or_file)
        else:
            with open(path_or_file, "w", newline="") as fh:
                self._write_rows(fh)

    def _write_rows(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta", "energy"])
        for t, e in zip(self.angles, self.values):
            writer.writerow([f"{t:.17g}", f"{e:.17g}"])

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_id,
            "X": self.X.tolist(),
            "theta": self.angles.tolist(),
            "energy": self.values.tolist(),
        }

    def is_constant(self, rel: float = CONSTANT_PROFILE_TOL) -> bool:
        spread = float(np.max(self.values) - np.min(self.values))
        return spread <= rel * abs(float(np.mean(self.values)))


def energy_profile(norm: MinkowskiNorm, X, n_angles: int = DEFAULT_N_ANGLES) -> EnergyProfile:
    """Sample ``E_X`` on the uniform grid ``theta_k = 2*pi*k/n_angles``."""
    if norm.dimension != 2:
        raise ValueError("energy profiles are defined for dimension 2 only")
    if n_angles < 256:
        raise ValueError("n_angles must be at least 256")
    X = _nonzero_vector(X, 2)
    theta = TWO_PI * np.arange(n_angles) / n_angles
    return EnergyProfile(X=X, angles=theta, values=energy_at_angles(norm, X, theta), metric_id=norm.description)


def scalar_multiple_angles(X) -> list[float]:
    """Angles in ``[0, 2*pi)`` of the two indicatrix points parallel to ``X``."""
    t = math.atan2(X[1], X[0]) % TWO_PI
    return sorted([t, (t + math.pi) % TWO_PI])


@dataclass(frozen=True)
class CriticalPoint:
    theta: float
    y: np.ndarray
    energy: float
    kind: str
    derivative_residual: float
    lagrange_residual: float | None

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "y": self.y.tolist(),
            "energy": self.energy,
            "kind": self.kind,
            "derivative_residual": self.derivative_residual,
            "lagrange_residual": self.lagrange_residual,
        }


class _AngularDerivatives:
    """Five-point central differences of ``E_X(theta)``.

    The step defaults to ``2*pi/(8*n_angles)``.  The second derivative uses a
    4x longer step, since its roundoff grows like ``1/h^2``.
    """

    def __init__(self, norm, X, n_angles):
        self.norm = norm
        self.X = X
        self.h = TWO_PI / (8 * n_angles)
        self.h2 = 4.0 * self.h

    def energy(self, theta):
        return energy_at_angles(self.norm, self.X, theta)

    def first(self, theta):
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        h = self.h
        e = self.energy(np.concatenate([t - 2 * h, t - h, t + h, t + 2 * h])).reshape(4, -1)
        # differences first, so reflection-symmetric samples cancel exactly
        return (8.0 * (e[2] - e[1]) - (e[3] - e[0])) / (12.0 * h)

    def second(self, theta):
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        h = self.h2
        e = self.energy(np.concatenate([t - 2 * h, t - h, t, t + h, t + 2 * h])).reshape(5, -1)
        return (16.0 * (e[1] + e[3]) - (e[0] + e[4]) - 30.0 * e[2]) / (12.0 * h * h)

    def first_scalar(self, theta: float) -> float:
        return float(self.first(theta)[0])

    def second_scalar(self, theta: float) -> float:
        return float(self.second(theta)[0])


def _sign_change_roots(f, grid, values, xtol) -> list[float]:
    roots = []
    n = len(grid)
    step = grid[1] - grid[0]
    signs = np.sign(values)
    for k in range(n):
        if signs[k] == 0.0:
            roots.append(float(grid[k]))
            continue
        k1 = (k + 1) % n
        if signs[k] * signs[k1] < 0.0:
            a = float(grid[k])
            roots.append(brentq(f, a, a + step, xtol=xtol))
    return roots


def _touch_candidates(d: _AngularDerivatives, grid, dvals, d2vals, xtol) -> list[float]:
    """Seeds for critical points where ``dE/dtheta`` touches zero without crossing.

    Such points are extrema of ``dE/dtheta``, so they are roots of the second
    derivative; grid samples with tiny ``|dE/dtheta|`` are added as well.
    """
    seeds = _sign_change_roots(d.second_scalar, grid, d2vals, xtol)
    n = len(grid)
    mag = np.abs(dvals)
    for k in range(n):
        prev, nxt = (k - 1) % n, (k + 1) % n
        if mag[k] < SMALL_DERIVATIVE and mag[k] <= mag[prev] and mag[k] <= mag[nxt]:
            if np.sign(dvals[prev]) == np.sign(dvals[nxt]) != 0.0:
                seeds.append(float(grid[k]))
    return seeds


def _circular_distance(a: float, b: float) -> float:
    return abs((a - b + math.pi) % TWO_PI - math.pi)


def _merge(angles: list[float], score, tol: float = MERGE_TOL) -> list[float]:
    """Collapse angles closer than ``tol`` (circularly), keeping the best-scored one."""
    if not angles:
        return []
    pts = sorted(a % TWO_PI for a in angles)
    groups = [[pts[0]]]
    for a in pts[1:]:
        if a - groups[-1][-1] < tol:
            groups[-1].append(a)
        else:
            groups.append([a])
    if len(groups) > 1 and groups[0][0] + TWO_PI - groups[-1][-1] < tol:
        groups[0] = groups.pop() + groups[0]
    return sorted(min(g, key=score) % TWO_PI for g in groups)


def _classify(left: float, right: float) -> str:
    if left < 0.0 < right:
        return LOCAL_MIN
    if left > 0.0 > right:
        return LOCAL_MAX
    return INFLECTION


def find_critical_points(norm: MinkowskiNorm, X, n_angles: int = DEFAULT_N_ANGLES) -> list[CriticalPoint]:
    """Locate and classify the critical points of ``E_X`` on the indicatrix.

    Sign changes of ``dE/dtheta`` on the grid are refined with Brent's method.
    Points where the derivative touches zero without changing sign (e.g.
    horizontal inflections) are found through roots of the second derivative
    and kept when ``|dE/dtheta|`` there is below the residual tolerance.
    Raises :class:`ResolutionFailure` for a constant profile or when nothing
    is found.
    """
    if norm.dimension != 2:
        raise ValueError("critical-point search is defined for dimension 2 only")
    X = _nonzero_vector(X, 2)
    profile = energy_profile(norm, X, max(n_angles, 256))
    if profile.is_constant():
        raise ResolutionFailure("energy profile is constant; every direction is critical")

    d = _AngularDerivatives(norm, X, len(profile.angles))
    grid = profile.angles
    scale = max(1.0, float(np.mean(np.abs(profile.values))))
    tol = RESIDUAL_TOL * scale
    xtol = 1e-13

    dvals = d.first(grid)
    crossings = _sign_change_roots(d.first_scalar, grid, dvals, xtol)
    spacing = TWO_PI / len(grid)
    # a touch seed next to a crossing is the same (flat, higher-order) root
    touches = [
        t for t in _touch_candidates(d, grid, dvals, d.second(grid), xtol)
        if abs(d.first_scalar(t)) <= tol
        and all(_circular_distance(t, c) > 0.5 * spacing for c in crossings)
    ]
    touches = _merge(touches, score=lambda t: abs(d.first_scalar(t)), tol=0.5 * spacing)
    roots = _merge(crossings + touches, score=lambda t: abs(d.first_scalar(t)))
    if not roots:
        raise ResolutionFailure("no critical points resolved on the angular grid")

    points = []
    lagrange = isinstance(norm, MthRootMetric)
    energies = d.energy(np.array(roots))
    for i, t in enumerate(roots):
        gaps = [_circular_distance(u, t) for j, u in enumerate(roots) if j != i]
        delta = min([0.5 * spacing] + [0.4 * gap for gap in gaps])
        left, right = d.first(np.array([t - delta, t + delta]))
        y = indicatrix_point(norm, t)
        points.append(CriticalPoint(
            theta=t,
            y=y,
            energy=float(energies[i]),
            kind=_classify(left, right),
            derivative_residual=abs(d.first_scalar(t)),
            lagrange_residual=lagrange_residual(norm, X, y) if lagrange else None,
        ))
    return points


def lagrange_residual(norm: MthRootMetric, X, y, relative: bool = False) -> float:
    """``|d1(Et) d2(P) - d2(Et) d1(P)|`` at ``y``.

    ``Et = X^T M X`` is the numerator polynomial of ``E_X`` with the constant
    (on the indicatrix) power of ``P`` cleared, where
    ``M = p P Hess(P) + p(p-1) grad(P) grad(P)^T`` and ``p = 2/m``.  It is
    evaluated from exact polynomial derivatives.  With ``relative=True`` the
    value is divided by ``|grad Et| |grad P|`` (sine of the angle between the
    two gradients).
    """
    if not isinstance(norm, MthRootMetric) or norm.dimension != 2:
        raise TypeError("lagrange_residual needs a 2-dimensional m-th root metric")
    X = _vector(X, 2)
    y = tuple(_vector(y, 2))
    if not any(y):
        raise ValueError("y must be nonzero")
    P = norm.polynomial
    p = 2.0 / norm.m
    dP = [P.derivative(i) for i in range(2)]
    ddP = [[dP[i].derivative(j) for j in range(2)] for i in range(2)]
    dddP = [[[ddP[i][j].derivative(k) for k in range(2)] for j in range(2)] for i in range(2)]

    Pv = P(y)
    grad = np.array([dP[i](y) for i in range(2)])
    hess = np.array([[ddP[i][j](y) for j in range(2)] for i in range(2)])
    xgx = X @ hess @ X
    xg = X @ grad
    grad_et = np.empty(2)
    for k in range(2):
        dhess = np.array([[dddP[i][j][k](y) for j in range(2)] for i in range(2)])
        grad_et[k] = (
            p * grad[k] * xgx
            + p * Pv * (X @ dhess @ X)
            + 2.0 * p * (p - 1.0) * xg * (X @ hess[:, k])
        )
    cross = abs(grad_et[0] * grad[1] - grad_et[1] * grad[0])
    if relative:
        denom = np.linalg.norm(grad_et) * np.linalg.norm(grad)
        return float(cross / denom) if denom > 0.0 else 0.0
    return float(cross)


def crit_condition_residual(X, y) -> float:
    """Factored critical-point condition of the quartic counterexample metric.

    ``y1 y2 (y1 - y2)(y1 + y2)(y1^2 + y2^2)(X1 y2 - X2 y1)^2``
    """
    X1, X2 = (float(v) for v in X)
    y1, y2 = (float(v) for v in y)
    return y1 * y2 * (y1 - y2) * (y1 + y2) * (y1**2 + y2**2) * (X1 * y2 - X2 * y1) ** 2


def counterexample_critical_values(X) -> dict[str, float]:
    """Closed-form critical values of ``E_X`` for the quartic counterexample metric.

    Keys: ``self`` (y parallel to X), ``axis1`` (y on the y1-axis), ``axis2``,
    ``diagonal`` (y1 = y2) and ``antidiagonal`` (y1 = -y2).
    """
    X1, X2 = (float(v) for v in X)
    root5 = math.sqrt(5.0)
    return {
        "self": 0.5 * math.sqrt(X1**4 + 3 * X1**2 * X2**2 + X2**4),
        "axis1": 0.5 * X1**2 + 0.75 * X2**2,
        "axis2": 0.75 * X1**2 + 0.5 * X2**2,
        "diagonal": (2 * X1**2 + X1 * X2 + 2 * X2**2) / (2 * root5),
        "antidiagonal": (2 * X1**2 - X1 * X2 + 2 * X2**2) / (2 * root5),
    }


def write_critical_points_json(points: list[CriticalPoint], path) -> None:
    with open(path, "w") as fh:
        json.dump([p.to_dict() for p in points], fh, indent=2)
        fh.write("\n")
