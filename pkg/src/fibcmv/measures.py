"""Point sets and counting measures on the unit circle, parametrized by angle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

TWO_PI = 2 * math.pi


@dataclass
class CircleZeroSet:
    """Sorted angles in [0, 2π) with the residual of the defining function at each."""

    angles: np.ndarray
    residuals: np.ndarray = field(default=None)
    method: str = ""

    def __post_init__(self):
        a = np.mod(np.asarray(self.angles, dtype=float), TWO_PI)
        order = np.argsort(a)
        self.angles = a[order]
        r = np.zeros(len(a)) if self.residuals is None else np.asarray(self.residuals, dtype=float)
        self.residuals = r[order]

    def __len__(self):
        return len(self.angles)

    def points(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def min_gap(self) -> float:
        """Smallest circular gap between neighbours (2π for a single point)."""
        if len(self.angles) < 2:
            return TWO_PI
        d = np.diff(np.concatenate([self.angles, [self.angles[0] + TWO_PI]]))
        return float(d.min())


@dataclass
class CircleMeasure:
    """Equal-weight counting measure on a finite set of angles."""

    support: np.ndarray
    weights: list

    @property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def cdf(self, t) -> np.ndarray:
        """μ([0, t]) for angles t in [0, 2π)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        w = np.array([float(x) for x in self.weights])
        cum = np.concatenate([[0.0], np.cumsum(w)])
        return cum[np.searchsorted(self.support, t, side="right")]


def zero_measure(zeros) -> CircleMeasure:
    """Counting probability measure on a zero set (angles or CircleZeroSet)."""
    ang = zeros.angles if isinstance(zeros, CircleZeroSet) else np.sort(np.mod(np.asarray(zeros, dtype=float), TWO_PI))
    n = len(ang)
    if n == 0:
        raise ValueError("empty zero set")
    return CircleMeasure(np.asarray(ang), [Fraction(1, n)] * n)


def circular_distance(a, b):
    """Arc-length distance; symmetric in a and b."""
    d = np.abs(np.mod(np.asarray(a, dtype=float), TWO_PI) - np.mod(np.asarray(b, dtype=float), TWO_PI))
    return np.minimum(d, TWO_PI - d)


def hausdorff(a, b) -> float:
    """Hausdorff distance of two finite angle sets under arc-length distance."""
    a = np.mod(np.atleast_1d(np.asarray(a, dtype=float)), TWO_PI)
    b = np.mod(np.atleast_1d(np.asarray(b, dtype=float)), TWO_PI)
    if a.size == 0 or b.size == 0:
        raise ValueError("empty angle set")
    d = circular_distance(a[:, None], b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def kolmogorov(mu: CircleMeasure, nu: CircleMeasure) -> float:
    """sup_t |μ([0,t]) - ν([0,t])|, CDFs anchored at angle 0."""
    pts = np.union1d(mu.support, nu.support)
    return float(np.max(np.abs(mu.cdf(pts) - nu.cdf(pts))))


def measure_distance(mu: CircleMeasure, nu: CircleMeasure) -> tuple[float, float]:
    """(Kolmogorov distance, Hausdorff distance of the supports)."""
    return kolmogorov(mu, nu), hausdorff(mu.support, nu.support)
