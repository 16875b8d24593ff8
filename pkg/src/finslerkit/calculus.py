"""Second derivatives of ``F^2`` by hyper-dual arithmetic, plus a finite-difference oracle.

A hyper-dual number ``a + b*e1 + c*e2 + d*e1e2`` with ``e1^2 = e2^2 = 0``
carries exactly the information of a second-order Taylor expansion along two
seed directions.  Seeding coordinate ``i`` in ``e1`` and coordinate ``j`` in
``e2`` and pushing the coordinates through ``F^2`` gives
``d/dy_i``, ``d/dy_j`` and ``d^2/dy_i dy_j`` with no truncation error.

Components may be numpy arrays, so a whole grid of directions is handled by
one propagation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveArgument
from .norms import MinkowskiNorm


class HyperDual:
    __slots__ = ("re", "e1", "e2", "e12")
    __array_ufunc__ = None  # make numpy scalars and arrays defer to the reflected operators

    def __init__(self, re, e1=0.0, e2=0.0, e12=0.0):
        self.re = re
        self.e1 = e1
        self.e2 = e2
        self.e12 = e12

    @staticmethod
    def _lift(x):
        return x if isinstance(x, HyperDual) else HyperDual(x)

    def __add__(self, other):
        o = self._lift(other)
        return HyperDual(self.re + o.re, self.e1 + o.e1, self.e2 + o.e2, self.e12 + o.e12)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.re, -self.e1, -self.e2, -self.e12)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, HyperDual):
            return HyperDual(self.re * other, self.e1 * other, self.e2 * other, self.e12 * other)
        return HyperDual(
            self.re * other.re,
            self.re * other.e1 + self.e1 * other.re,
            self.re * other.e2 + self.e2 * other.re,
            self.re * other.e12 + self.e1 * other.e2 + self.e2 * other.e1 + self.e12 * other.re,
        )

    __rmul__ = __mul__

    def _chain(self, f0, f1, f2):
        # f(a + db) = f(a) + f'(a) db + f''(a)/2 db^2, with db^2 = 2 e1 e2 b1 b2
        return HyperDual(
            f0,
            f1 * self.e1,
            f1 * self.e2,
            f1 * self.e12 + f2 * self.e1 * self.e2,
        )

    def reciprocal(self):
        inv = 1.0 / self.re
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if not isinstance(other, HyperDual):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, HyperDual):
            raise TypeError("hyper-dual exponents are not supported")
        if float(p).is_integer() and p >= 0:
            k = int(p)
            if k == 0:
                return HyperDual(np.ones_like(self.re) if np.ndim(self.re) else 1.0)
            if k == 1:
                return self
            return self._chain(self.re**k, k * self.re ** (k - 1), k * (k - 1) * self.re ** (k - 2))
        if np.any(np.asarray(self.re) <= 0.0):
            raise NonPositiveArgument("non-integer power of a non-positive value")
        return self._chain(self.re**p, p * self.re ** (p - 1.0), p * (p - 1.0) * self.re ** (p - 2.0))

    def sqrt(self):
        return self**0.5

    def __repr__(self):
        return f"HyperDual({self.re!r}, {self.e1!r}, {self.e2!r}, {self.e12!r})"


@dataclass(frozen=True)
class SecondOrderJet:
    """Value, gradient and Hessian of a scalar function at a point (or a batch of points)."""

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray


def _check_nonzero(y: np.ndarray):
    if np.any(np.all(y == 0.0, axis=-1)):
        raise ValueError("derivatives of F^2 require y != 0")


def jet_of_norm_squared(norm: MinkowskiNorm, y) -> SecondOrderJet:
    """Exact value, gradient and Hessian of ``F^2`` at ``y``.

    ``y`` is a vector of shape ``(n,)`` or a batch of shape ``(N, n)``; the
    jet fields then carry the same leading batch axis.  ``n(n+1)/2``
    hyper-dual propagations are made, one per unordered coordinate pair.
    """
    y = np.asarray(y, dtype=float)
    n = norm.dimension
    if y.shape[-1] != n:
        raise ValueError(f"expected trailing dimension {n}, got shape {y.shape}")
    _check_nonzero(y)
    batch = y.shape[:-1]
    grad = np.zeros(batch + (n,))
    hess = np.zeros(batch + (n, n))
    value = None
    cols = [y[..., k] for k in range(n)]
    for i in range(n):
        for j in range(i, n):
            coords = [
                HyperDual(cols[k], float(k == i), float(k == j), 0.0)
                for k in range(n)
            ]
            out = norm.squared(coords)
            if value is None:
                value = np.broadcast_to(out.re, batch).astype(float)
            if i == j:
                grad[..., i] = out.e1
            hess[..., i, j] = out.e12
            hess[..., j, i] = out.e12
    return SecondOrderJet(value=value if batch else float(value), grad=grad, hess=hess)


def default_step(y) -> float:
    r = float(np.linalg.norm(y))
    return min(1e-4 * max(1.0, r), r / 200.0)


def finite_difference_hessian(norm: MinkowskiNorm, y, h: float | None = None) -> np.ndarray:
    """Central-difference Hessian of ``F^2`` at a single point, symmetrized."""
    y = np.asarray(y, dtype=float)
    n = norm.dimension
    if y.shape != (n,):
        raise ValueError(f"expected a vector of length {n}")
    _check_nonzero(y)
    if h is None:
        h = default_step(y)
    if not 0.0 < h < np.linalg.norm(y) / 100.0:
        raise ValueError("step must satisfy 0 < h < |y|/100")

    def f2(v):
        return float(norm.squared(tuple(v)))

    eye = np.eye(n) * h
    center = f2(y)
    H = np.empty((n, n))
    for i in range(n):
        H[i, i] = (f2(y + eye[i]) - 2.0 * center + f2(y - eye[i])) / h**2
        for j in range(i + 1, n):
            H[i, j] = (
                f2(y + eye[i] + eye[j]) - f2(y + eye[i] - eye[j])
                - f2(y - eye[i] + eye[j]) + f2(y - eye[i] - eye[j])
            ) / (4.0 * h**2)
            H[j, i] = H[i, j]
    return 0.5 * (H + H.T)
