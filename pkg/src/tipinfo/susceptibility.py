"""Degree-dependent flip susceptibility under i.i.d. binomial neighbourhoods.

A node sits in the majority state 0 with ``k`` neighbours, each in state 0
with probability ``f``. The expected Glauber probability that it flips to
state 1 is the binomial mixture over how many neighbours agree with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ising import glauber_accept


def flip_probability(m: int, k: int, beta: float, J: float = 1.0) -> float:
    """Glauber probability of a 0 -> 1 flip with ``m`` of ``k`` neighbours in state 0."""
    field = (k - m) - m  # sum of neighbour spins
    return glauber_accept(-2.0 * J * field, beta)


def flip_susceptibility(k: int, f: float, beta: float, J: float = 1.0) -> float:
    if k < 0:
        raise ValueError("degree must be non-negative")
    if not 0.0 <= f <= 1.0:
        raise ValueError("majority fraction must lie in [0, 1]")
    m = np.arange(k + 1)
    p = np.atleast_1d(glauber_accept(-2.0 * J * (k - 2 * m), beta))
    w = np.array([math.comb(k, j) for j in m], dtype=float) * f ** m * (1.0 - f) ** (k - m)
    # a convex combination of probabilities; normalising keeps roundoff inside [0, 1]
    return float(min(max(np.dot(w, p) / w.sum(), 0.0), 1.0))


def binary_entropy(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(f > 0, f * np.log2(f), 0.0) + np.where(f < 1, (1 - f) * np.log2(1 - f), 0.0))
    return h


@dataclass(frozen=True, eq=False)
class SusceptibilityCurve:
    k: int
    beta: float
    f: np.ndarray
    expectation: np.ndarray

    @property
    def neighborhood_entropy(self) -> np.ndarray:
        return binary_entropy(self.f)


def susceptibility_curve(k: int, beta: float = 0.5, f=None) -> SusceptibilityCurve:
    f = np.linspace(0.0, 1.0, 101) if f is None else np.asarray(f, dtype=float)
    return SusceptibilityCurve(k, beta, f, np.array([flip_susceptibility(k, x, beta) for x in f]))
