"""Homogeneous two-exponent collision kernel and its truncated variant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["KernelSpec", "eval_kernel", "kernel_matrix", "kernel_bound_check"]

_EXPONENT_RANGE = (-2.0, 2.0)


def power(x, a):
    """x**a computed as exp(a*log(x)), elementwise.

    One code path for every exponent keeps rounding independent of whether
    the exponent happens to be rational, so repeated evaluations are bitwise
    reproducible.
    """
    x = np.asarray(x, dtype=float)
    return np.exp(a * np.log(x))


@dataclass(frozen=True)
class KernelSpec:
    """Collision kernel x^l1 y^l2 + x^l2 y^l1, optionally cut outside (1/n, n)^2.

    Exponents are stored in canonical order lambda1 <= lambda2; a reversed
    pair is swapped on construction.  Both exponents must lie in [-2, 2].
    """

    lambda1: float
    lambda2: float
    truncation: int | None = None

    def __post_init__(self):
        l1 = float(self.lambda1)
        l2 = float(self.lambda2)
        if l1 > l2:
            l1, l2 = l2, l1
        lo, hi = _EXPONENT_RANGE
        for name, val in (("lambda1", l1), ("lambda2", l2)):
            if not lo <= val <= hi:
                raise DomainError(f"{name}={val} outside [{lo}, {hi}]")
        if self.truncation is not None:
            n = int(self.truncation)
            if n < 1:
                raise DomainError(f"truncation index must be >= 1, got {n}")
            object.__setattr__(self, "truncation", n)
        object.__setattr__(self, "lambda1", l1)
        object.__setattr__(self, "lambda2", l2)

    @property
    def homogeneity(self) -> float:
        return self.lambda1 + self.lambda2


def _inside_cutoff(spec: KernelSpec, x):
    """Indicator of the open interval (1/n, n); all ones without truncation."""
    x = np.asarray(x, dtype=float)
    if spec.truncation is None:
        return np.ones_like(x)
    n = float(spec.truncation)
    return ((x > 1.0 / n) & (x < n)).astype(float)


def eval_kernel(spec: KernelSpec, x, y):
    """Collision rate between sizes x and y (scalars or broadcastable arrays).

    Returns x^l1 y^l2 + x^l2 y^l1, multiplied by the open-interval indicator
    product when a truncation index is set.  Non-positive sizes are rejected.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise DomainError("kernel arguments must be positive sizes")
    value = power(x, spec.lambda1) * power(y, spec.lambda2) + power(
        x, spec.lambda2
    ) * power(y, spec.lambda1)
    if spec.truncation is not None:
        value = value * _inside_cutoff(spec, x) * _inside_cutoff(spec, y)
    if value.ndim == 0:
        return float(value)
    return value


def kernel_matrix(spec: KernelSpec, sizes) -> np.ndarray:
    """Dense symmetric matrix of collision rates over a vector of sizes.

    Assembled as A + A.T from one outer product so the result is exactly
    symmetric in floating point.
    """
    sizes = np.asarray(sizes, dtype=float)
    if np.any(sizes <= 0.0):
        raise DomainError("kernel arguments must be positive sizes")
    a = np.outer(power(sizes, spec.lambda1), power(sizes, spec.lambda2))
    mat = a + a.T
    if spec.truncation is not None:
        mask = _inside_cutoff(spec, sizes)
        mat = mat * np.outer(mask, mask)
    return mat


def kernel_bound_check(spec: KernelSpec, k0: float, x: float, y: float) -> bool:
    """Whether Phi(x, y) <= 2 (x^k0 + x)(y^k0 + y).

    Pure predicate used by the property-test suite; valid on the admissible
    range k0 <= lambda1 <= lambda2 <= 1.
    """
    lhs = eval_kernel(KernelSpec(spec.lambda1, spec.lambda2), x, y)
    rhs = 2.0 * (x**k0 + x) * (y**k0 + y)
    return bool(lhs <= rhs)
