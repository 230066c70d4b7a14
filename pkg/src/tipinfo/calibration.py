"""Statistical complexity of the Boltzmann distribution and noise matching.

The operating temperature of a graph is chosen where the product of
normalised entropy and disequilibrium of its stationary distribution peaks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .graph import Graph
from .infoflow import entropy
from .ising import ModelParams, check_exact, energies


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ComplexityReport:
    temperature: float | None
    beta: float | None
    entropy_normalized: float
    disequilibrium: float
    complexity: float


def statistical_complexity(d, beta: float | None = None) -> ComplexityReport:
    """Normalised entropy, disequilibrium and their product for a distribution.

    Parameters
    ----------
    d : array_like
        Probabilities over ``m >= 2`` states.
    beta : float, optional
        Inverse temperature the distribution was drawn at; only recorded.
    """
    p = np.asarray(d, dtype=float)
    m = p.size
    if m < 2:
        raise ValueError("statistical complexity needs at least two states")
    h_norm = entropy(p) / np.log2(m)
    diseq = float(np.sum((p - 1.0 / m) ** 2))
    temp = None if beta is None or beta == 0 else 1.0 / beta
    return ComplexityReport(temp, beta, float(h_norm), diseq, float(h_norm * diseq))


def _boltzmann_from_energies(e: np.ndarray, beta: float) -> np.ndarray:
    logw = -beta * e
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def complexity_curve(g: Graph, temperatures, J: float = 1.0) -> list[ComplexityReport]:
    check_exact(g)
    e = energies(g, ModelParams(beta=0.0, J=J))
    return [
        statistical_complexity(_boltzmann_from_energies(e, 1.0 / t), beta=1.0 / t)
        for t in temperatures
    ]


def match_noise(g: Graph, t_bounds=(0.1, 10.0), J: float = 1.0,
                grid: int = 200, xatol: float = 1e-4) -> float:
    """Inverse temperature maximising the statistical complexity of ``g``.

    A coarse temperature grid locates the best bracket (guarding against more
    than one local peak), then a bounded Brent/golden-section search refines
    the temperature to ``xatol``.
    """
    check_exact(g)
    t_min, t_max = map(float, t_bounds)
    if not 0 < t_min < t_max:
        raise ValueError(f"need 0 < t_min < t_max, got {t_bounds}")
    e = energies(g, ModelParams(beta=0.0, J=J))

    def neg_c(t):
        return -statistical_complexity(_boltzmann_from_energies(e, 1.0 / t)).complexity

    ts = np.linspace(t_min, t_max, grid)
    cs = -np.array([neg_c(t) for t in ts])
    if np.ptp(cs) <= 1e-12 * max(1.0, abs(cs).max()):
        raise CalibrationError(
            f"statistical complexity is flat over T in [{t_min}, {t_max}]"
        )
    k = int(np.argmax(cs))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, grid - 1)]
    res = minimize_scalar(neg_c, bounds=(lo, hi), method="bounded",
                          options={"xatol": xatol})
    t_star = float(res.x) if -res.fun >= cs[k] else float(ts[k])
    return 1.0 / t_star
