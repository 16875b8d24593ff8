"""Minkowski norms on R^n.

A norm here is anything that maps a nonzero vector ``y`` to a positive number
``F(y)`` with ``F(t*y) = t*F(y)`` for ``t > 0``.  Every concrete norm also
exposes ``squared(coords)``, which evaluates ``F^2`` on a sequence of
coordinates using plain arithmetic only.  The coordinates may be floats,
numpy arrays (batched evaluation) or hyper-dual numbers (exact second
derivatives, see :mod:`finslerkit.calculus`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import MetricFormatError, NonPositiveArgument

MTH_ROOT = "mth_root_polynomial"
RIEMANNIAN = "riemannian"
CUSTOM = "custom"
FAMILIES = (MTH_ROOT, RIEMANNIAN, CUSTOM)


def _integer_power(x, k: int):
    # repeated products keep hyper-dual arithmetic exact for negative bases
    if k == 0:
        return 1.0
    result = x
    for _ in range(k - 1):
        result = result * x
    return result


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """A polynomial stored as ``{exponent multi-index: coefficient}``.

    Only the pieces needed for m-th root metrics are provided: evaluation on
    generic coordinates and exact partial derivatives.
    """

    terms: Mapping[tuple[int, ...], float]
    nvars: int

    def __post_init__(self):
        clean = {}
        for powers, value in self.terms.items():
            powers = tuple(int(p) for p in powers)
            if len(powers) != self.nvars:
                raise MetricFormatError(f"multi-index {powers} has wrong length, expected {self.nvars}")
            if any(p < 0 for p in powers):
                raise MetricFormatError(f"negative exponent in {powers}")
            if value != 0.0:
                clean[powers] = float(value)
        object.__setattr__(self, "terms", clean)

    @property
    def degree(self) -> int | None:
        degrees = {sum(p) for p in self.terms}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise MetricFormatError(f"polynomial is not homogeneous: degrees {sorted(degrees)}")
        return degrees.pop()

    def __call__(self, coords: Sequence):
        total = 0.0
        for powers, value in self.terms.items():
            term = value
            for x, k in zip(coords, powers):
                if k:
                    term = term * _integer_power(x, k)
            total = term + total
        return total

    def derivative(self, var: int) -> "HomogeneousPolynomial":
        out: dict[tuple[int, ...], float] = {}
        for powers, value in self.terms.items():
            k = powers[var]
            if k == 0:
                continue
            lowered = powers[:var] + (k - 1,) + powers[var + 1:]
            out[lowered] = out.get(lowered, 0.0) + value * k
        return HomogeneousPolynomial(out, self.nvars)


class MinkowskiNorm:
    """Base class for norms; subclasses implement :meth:`squared`."""

    dimension: int
    family: str
    description: str

    def squared(self, coords: Sequence):
        raise NotImplementedError

    def __call__(self, y) -> float:
        return eval_norm(self, y)

    def evaluate(self, coords: Sequence):
        """F on coordinates (floats or arrays), without the zero-vector special case."""
        return np.sqrt(self.squared(coords))

    def to_dict(self) -> dict:
        raise MetricFormatError(f"{self.family} norms cannot be serialized")

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.description}>"


@dataclass(frozen=True, repr=False)
class MthRootMetric(MinkowskiNorm):
    """``F(y) = P(y)^(1/m)`` for a homogeneous polynomial ``P`` of even degree ``m``."""

    m: int
    coeffs: Mapping[tuple[int, ...], float]
    dimension: int
    description: str = ""
    family: str = field(default=MTH_ROOT, init=False)

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m <= 0:
            raise MetricFormatError(f"m must be a positive integer, got {self.m!r}")
        if self.m % 2:
            raise MetricFormatError(f"odd m={self.m} cannot give a compact indicatrix")
        if self.dimension < 1:
            raise MetricFormatError("dimension must be positive")
        poly = HomogeneousPolynomial(dict(self.coeffs), self.dimension)
        for powers in poly.terms:
            if sum(powers) != self.m:
                raise MetricFormatError(f"multi-index {powers} does not sum to m={self.m}")
        if not poly.terms:
            raise MetricFormatError("metric polynomial has no nonzero terms")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "coeffs", dict(poly.terms))
        object.__setattr__(self, "_poly", poly)
        if not self.description:
            object.__setattr__(self, "description", f"{self.m}th-root metric {_describe_poly(poly)}")

    @property
    def polynomial(self) -> HomogeneousPolynomial:
        return self._poly

    def squared(self, coords):
        p = self._poly(coords)
        _require_positive(p)
        return p ** (2.0 / self.m)

    def evaluate(self, coords):
        p = self._poly(coords)
        _require_positive(p)
        return p ** (1.0 / self.m)

    def is_positive(self, n_angles: int = 4096) -> bool:
        """Check ``P > 0`` on a uniform angular sample (2D only)."""
        if self.dimension != 2:
            raise ValueError("angular positivity check is only defined in dimension 2")
        theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
        return bool(np.all(self._poly((np.cos(theta), np.sin(theta))) > 0.0))

    def to_dict(self) -> dict:
        ordered = sorted(self.coeffs.items(), key=lambda kv: kv[0], reverse=True)
        return {
            "dimension": self.dimension,
            "m": self.m,
            "coeffs": [{"powers": list(p), "value": v} for p, v in ordered],
        }

    def __eq__(self, other):
        if not isinstance(other, MthRootMetric):
            return NotImplemented
        return (self.m, self.dimension, self.coeffs) == (other.m, other.dimension, other.coeffs)

    def __hash__(self):
        return hash((self.m, self.dimension, tuple(sorted(self.coeffs.items()))))


def _describe_poly(poly: HomogeneousPolynomial) -> str:
    parts = []
    for powers, value in sorted(poly.terms.items(), reverse=True):
        mono = "*".join(f"y{i + 1}^{k}" for i, k in enumerate(powers) if k)
        parts.append(f"{value:g}*{mono}")
    return "P = " + " + ".join(parts)


def _require_positive(p):
    bad = np.any(np.asarray(getattr(p, "re", p)) <= 0.0)
    if bad:
        raise NonPositiveArgument("polynomial is not positive here; coefficients do not define a norm")


@dataclass(frozen=True, repr=False)
class RiemannianNorm(MinkowskiNorm):
    """``F(y) = sqrt(y^T A y)`` for a symmetric positive definite matrix ``A``."""

    matrix: np.ndarray
    description: str = ""
    family: str = field(default=RIEMANNIAN, init=False)

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MetricFormatError("Riemannian metric needs a square matrix")
        if not np.allclose(a, a.T, rtol=0, atol=1e-14):
            raise MetricFormatError("Riemannian metric matrix must be symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        if not self.description:
            object.__setattr__(self, "description", f"riemannian A={a.tolist()}")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def squared(self, coords):
        total = 0.0
        n = self.dimension
        for i in range(n):
            for j in range(n):
                a = self.matrix[i, j]
                if a:
                    total = coords[i] * coords[j] * a + total
        return total

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "family": RIEMANNIAN, "matrix": self.matrix.tolist()}


class CustomNorm(MinkowskiNorm):
    """Wraps a user function ``fn(coords) -> F``.

    ``fn`` must use arithmetic (and ``**``) only, so that it also works on
    hyper-dual numbers.
    """

    family = CUSTOM

    def __init__(self, fn: Callable[[Sequence], object], dimension: int, description: str = "custom"):
        self._fn = fn
        self.dimension = dimension
        self.description = description

    def squared(self, coords):
        f = self._fn(coords)
        return f * f

    def evaluate(self, coords):
        return self._fn(coords)


def eval_norm(norm: MinkowskiNorm, y) -> float:
    """Value of ``F`` at a single vector; ``F(0) = 0`` by continuity."""
    y = _as_vector(y, norm.dimension)
    if not np.any(y):
        return 0.0
    return float(norm.evaluate(tuple(y)))


def make_quartic_family(c: float) -> MthRootMetric:
    """``F_c(y) = (y1^4 + c*y1^2*y2^2 + y2^4)^(1/4)``; ``c = 2`` is Euclidean."""
    c = float(c)
    coeffs = {(4, 0): 1.0, (0, 4): 1.0}
    if c != 0.0:
        coeffs[(2, 2)] = c
    return MthRootMetric(4, coeffs, 2, description=f"quartic family c={c:g}")


def counterexample_metric() -> MthRootMetric:
    """The quartic norm ``(y1^4 + 3 y1^2 y2^2 + y2^4)^(1/4)`` that refutes Matsumoto's conjecture."""
    return make_quartic_family(3.0)


def is_counterexample_metric(norm: MinkowskiNorm) -> bool:
    return isinstance(norm, MthRootMetric) and norm == counterexample_metric()


def euclidean(dimension: int = 2) -> RiemannianNorm:
    return RiemannianNorm(np.eye(dimension), description=f"euclidean R^{dimension}")


def indicatrix_radius(norm: MinkowskiNorm, theta):
    """Radius ``r`` with ``F(r*(cos t, sin t)) = 1``; accepts scalars or arrays."""
    if norm.dimension != 2:
        raise ValueError("indicatrix_radius requires a 2-dimensional norm")
    theta = np.asarray(theta, dtype=float)
    r = 1.0 / norm.evaluate((np.cos(theta), np.sin(theta)))
    return float(r) if r.ndim == 0 else r


def indicatrix_point(norm: MinkowskiNorm, theta: float) -> np.ndarray:
    r = indicatrix_radius(norm, theta)
    return np.array([r * math.cos(theta), r * math.sin(theta)])


def normalize_to_indicatrix(norm: MinkowskiNorm, y) -> np.ndarray:
    y = _as_vector(y, norm.dimension)
    f = eval_norm(norm, y)
    if f == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return y / f


def _as_vector(y, dimension: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (dimension,):
        raise ValueError(f"expected a vector of length {dimension}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("vector has non-finite entries")
    return y


# -- metric definition files --------------------------------------------------

def metric_from_dict(data: Mapping) -> MinkowskiNorm:
    """Build a norm from the JSON-compatible metric definition."""
    if not isinstance(data, Mapping):
        raise MetricFormatError("metric definition must be a JSON object")
    family = data.get("family", MTH_ROOT)
    try:
        dimension = int(data["dimension"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MetricFormatError("metric definition needs an integer 'dimension'") from exc
    if family == RIEMANNIAN:
        matrix = np.asarray(data.get("matrix"), dtype=float)
        if matrix.shape != (dimension, dimension):
            raise MetricFormatError("'matrix' shape does not match 'dimension'")
        return RiemannianNorm(matrix)
    if family != MTH_ROOT:
        raise MetricFormatError(f"unsupported metric family {family!r}")
    m = data.get("m")
    if not isinstance(m, int) or isinstance(m, bool):
        raise MetricFormatError("'m' must be an integer")
    entries = data.get("coeffs")
    if not isinstance(entries, list) or not entries:
        raise MetricFormatError("'coeffs' must be a nonempty list")
    coeffs: dict[tuple[int, ...], float] = {}
    for entry in entries:
        try:
            powers = tuple(entry["powers"])
            value = float(entry["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MetricFormatError(f"bad coefficient entry {entry!r}") from exc
        if not all(isinstance(p, int) and not isinstance(p, bool) for p in powers):
            raise MetricFormatError(f"exponents must be integers: {entry!r}")
        if len(powers) != dimension:
            raise MetricFormatError(f"multi-index {list(powers)} does not have length {dimension}")
        if powers in coeffs:
            raise MetricFormatError(f"duplicate multi-index {list(powers)}")
        coeffs[powers] = value
    return MthRootMetric(m, coeffs, dimension)


def load_metric(path) -> MinkowskiNorm:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MetricFormatError(f"{path}: invalid JSON ({exc})") from exc
    return metric_from_dict(data)


def save_metric(norm: MinkowskiNorm, path) -> None:
    Path(path).write_text(json.dumps(norm.to_dict(), indent=2) + "\n")
