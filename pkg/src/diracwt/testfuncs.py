"""Compactly supported C^2 test functions used by the transform, resolvent
and projection machinery.

A test function is a scalar profile times a fixed channel-weight vector in
C^2.  The polynomial bump (1 - u^2)^3 (u the normalised offset) is twice
continuously differentiable with a jump only in its third derivative at the
support edges; the modulated variant multiplies it by cos(freq * (x - c)).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class BumpKind(enum.Enum):
    POLYNOMIAL = "polynomial_bump"
    MODULATED = "modulated_bump"


@dataclass(frozen=True)
class TestFunction:
    kind: BumpKind = BumpKind.POLYNOMIAL
    center: float = 0.0
    half_width: float = 1.0
    frequency: float = 0.0
    weights: tuple = (1.0 + 0j, 0.0 + 0j)

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        object.__setattr__(self, "weights", tuple(complex(w) for w in self.weights))

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.half_width, self.center + self.half_width)

    def profile(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        u = (xs - self.center) / self.half_width
        out = np.where(np.abs(u) < 1.0, (1.0 - u * u) ** 3, 0.0)
        if self.kind is BumpKind.MODULATED:
            out = out * np.cos(self.frequency * (xs - self.center))
        return out

    def __call__(self, xs) -> np.ndarray:
        """Values as an (n, 2) complex array."""
        p = self.profile(xs)
        w = np.asarray(self.weights, dtype=np.complex128)
        return np.outer(p, w)

    def with_weights(self, weights) -> "TestFunction":
        return TestFunction(self.kind, self.center, self.half_width, self.frequency, tuple(weights))

    def l2_norm_sq(self, n: int = 8192) -> float:
        """||profile||^2 * |weights|^2 by composite Simpson on the support."""
        a, b = self.support
        if n % 2 == 1:
            n += 1
        xs = np.linspace(a, b, n + 1)
        p2 = np.abs(self.profile(xs)) ** 2
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        h = (b - a) / n
        wsq = float(np.sum(np.abs(np.asarray(self.weights)) ** 2))
        return float((h / 3.0) * np.dot(w, p2)) * wsq
