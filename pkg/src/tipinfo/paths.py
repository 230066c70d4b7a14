"""Monotone trajectories from the all-zeros attractor to the tipping partition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .graph import Graph
from .ising import ModelParams, check_exact, glauber_accept


@dataclass(frozen=True)
class Trajectory:
    """Flip sequence starting from all zeros; ``log_prob`` is the natural-log score."""

    nodes: tuple[int, ...]
    log_prob: float

    @property
    def states(self) -> list[int]:
        out = [0]
        for v in self.nodes:
            out.append(out[-1] | (1 << v))
        return out


def enumerate_tipping_trajectories(g: Graph, params: ModelParams,
                                   horizon: int | None = None) -> list[Trajectory]:
    """Every ordered flip sequence of ``horizon = n/2`` distinct nodes.

    Each step is scored with its transfer-operator entry: the ``1/n`` node
    choice times the Glauber acceptance of that flip. Results are in
    lexicographic order of the node sequence.
    """
    check_exact(g)
    n = g.n
    if n % 2:
        raise ValueError(f"tipping partition <S> = 0.5 needs an even node count, got {n}")
    if horizon is None:
        horizon = n // 2
    if horizon != n // 2:
        raise ValueError(f"horizon must be n/2 = {n // 2} to reach <S> = 0.5")
    nbrs = g.neighbors
    log_choice = -math.log(n)
    spin = [-1] * n
    out: list[Trajectory] = []
    seq: list[int] = []

    def dfs(depth: int, lp: float):
        if depth == horizon:
            out.append(Trajectory(tuple(seq), lp))
            return
        for v in range(n):
            if spin[v] > 0:
                continue
            field = sum(spin[u] for u in nbrs[v])
            h_v = params.h[v] if params.h is not None else 0.0
            # flipping v from -1 to +1 changes the energy by -2 (J field + h_v)
            delta = -2.0 * (params.J * field + h_v)
            step = log_choice + math.log(glauber_accept(delta, params.beta))
            spin[v] = 1
            seq.append(v)
            dfs(depth + 1, lp + step)
            seq.pop()
            spin[v] = -1

    dfs(0, 0.0)
    return out


def max_likelihood_trajectories(trajectories, rtol: float = 1e-9) -> list[Trajectory]:
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("no trajectories given")
    best = max(t.log_prob for t in trajectories)
    tol = rtol * max(abs(best), 1e-300)
    return [t for t in trajectories if t.log_prob >= best - tol]


def flip_expectations(trajectories, n: int, weighting: str = "probability") -> np.ndarray:
    """``E[s_i = 1]`` at each popcount level, shape ``(n, horizon + 1)``.

    ``weighting="probability"`` weights trajectories by ``exp(log_prob)``
    normalised over the input; ``"uniform"`` counts them equally.
    """
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("no trajectories given")
    horizon = len(trajectories[0].nodes)
    if weighting == "probability":
        lp = np.array([t.log_prob for t in trajectories])
        w = np.exp(lp - logsumexp(lp))
    elif weighting == "uniform":
        w = np.full(len(trajectories), 1.0 / len(trajectories))
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    # first_flip[j, i] = step at which trajectory j flips node i (horizon+1 = never)
    first_flip = np.full((len(trajectories), n), horizon + 1)
    for j, t in enumerate(trajectories):
        for step, v in enumerate(t.nodes, start=1):
            first_flip[j, v] = step
    levels = np.arange(horizon + 1)
    on = first_flip[:, :, None] <= levels[None, None, :]
    return np.einsum("j,jil->il", w, on.astype(float))
