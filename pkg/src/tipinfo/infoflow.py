"""Exact time-lagged mutual information between a node and the future system state.

For a partition ``S_gamma`` (all configurations with a fraction ``gamma`` of
nodes in state 1) the initial distribution is the Boltzmann distribution
restricted to the partition. Splitting it further on the state of node ``i``
gives two conditional distributions; both are pushed forward with the
unconditioned transfer operator and ``I(s_i^tau : S^{tau+t} | <S^tau> = gamma)``
is the weight-averaged KL divergence of each conditional from their mixture.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .ising import (
    ModelParams,
    TransferOperator,
    all_states,
    boltzmann_distribution,
    popcount,
    state_bits,
    transfer_operator,
)

DEFAULT_T_MAX = 300


class UndefinedPartitionError(ValueError):
    """No configuration has the requested macrostate."""


def entropy(p, axis=0) -> float | np.ndarray:
    """Shannon entropy in bits with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(p), 0.0)
    out = -terms.sum(axis=axis)
    return float(out) if np.ndim(out) == 0 else out


def partition_count(n: int, gamma: float) -> int:
    """Popcount ``k`` with ``k / n == gamma``."""
    k = int(round(gamma * n))
    if not 0 <= k <= n or abs(k - gamma * n) > 1e-9 * max(n, 1):
        raise UndefinedPartitionError(
            f"no configuration of {n} nodes has macrostate {gamma}"
        )
    return k


@dataclass(frozen=True, eq=False)
class InfoCurve:
    node: int
    gamma: float
    values: np.ndarray

    @property
    def t_max(self) -> int:
        return len(self.values) - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values))


def _conditionals(pi: np.ndarray, n: int, k: int, nodes) -> tuple[np.ndarray, np.ndarray]:
    """Initial conditionals for partition ``k``.

    Returns ``(weights, cols)`` where ``weights[j, a] = p(s_node=a | partition)``
    for the j-th node and ``cols[:, 2*j + a]`` is the matching normalised
    conditional distribution (all zero when its weight is zero).
    """
    states = all_states(n)
    in_part = popcount(states) == k
    restricted = np.where(in_part, pi, 0.0)
    z = restricted.sum()
    if z <= 0:
        raise UndefinedPartitionError(f"partition k={k} carries no probability")
    restricted /= z
    bits = state_bits(states, n)
    weights = np.zeros((len(nodes), 2))
    cols = np.zeros((states.size, 2 * len(nodes)))
    for j, i in enumerate(nodes):
        for a in (0, 1):
            col = np.where(bits[:, i] == a, restricted, 0.0)
            w = col.sum()
            weights[j, a] = w
            if w > 0:
                cols[:, 2 * j + a] = col / w
    return weights, cols


def _mi_columns(weights: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """``sum_a w_a KL(q_a || q)`` per node, in bits; zero for determined nodes."""
    n_nodes = weights.shape[0]
    out = np.zeros(n_nodes)
    for j in range(n_nodes):
        w0, w1 = weights[j]
        if w0 <= 0 or w1 <= 0:
            continue
        q0, q1 = cols[:, 2 * j], cols[:, 2 * j + 1]
        mix = w0 * q0 + w1 * q1
        total = 0.0
        for w, q in ((w0, q0), (w1, q1)):
            nz = q > 0
            total += w * float(np.sum(q[nz] * np.log2(q[nz] / mix[nz])))
        # 0 <= I(s : S) <= H(s); clamp roundoff at both ends
        out[j] = min(max(total, 0.0), entropy(weights[j]))
    return out


def _partition_curves(op: TransferOperator, pi: np.ndarray, n: int, k: int,
                      nodes, t_max: int) -> np.ndarray:
    values = np.zeros((len(nodes), t_max + 1))
    if k in (0, n):
        return values
    weights, cols = _conditionals(pi, n, k, nodes)
    pt = op.transpose
    for t in range(t_max + 1):
        values[:, t] = _mi_columns(weights, cols)
        if t < t_max:
            cols = pt @ cols
    return values


def lagged_mi(g: Graph, params: ModelParams, node: int, gamma: float, t: int,
              op: TransferOperator | None = None) -> float:
    """``I(s_node^tau : S^{tau+t} | <S^tau> = gamma)`` in bits."""
    if t < 0:
        raise ValueError("lag must be non-negative")
    k = partition_count(g.n, gamma)
    if op is None:
        op = transfer_operator(g, params)
    pi = boltzmann_distribution(g, params)
    if k in (0, g.n):
        return 0.0
    weights, cols = _conditionals(pi, g.n, k, [node])
    pt = op.transpose
    for _ in range(t):
        cols = pt @ cols
    return float(_mi_columns(weights, cols)[0])


def info_curve(g: Graph, params: ModelParams, node: int, gamma: float,
               t_max: int = DEFAULT_T_MAX, op: TransferOperator | None = None) -> InfoCurve:
    k = partition_count(g.n, gamma)
    if op is None:
        op = transfer_operator(g, params)
    pi = boltzmann_distribution(g, params)
    vals = _partition_curves(op, pi, g.n, k, [node], t_max)[0]
    return InfoCurve(node, k / g.n, vals)


def info_curves(g: Graph, params: ModelParams, t_max: int = DEFAULT_T_MAX,
                gammas=None, nodes=None, workers: int = 1) -> list[InfoCurve]:
    """Curves for every (node, partition) pair, sharing propagation per partition.

    Returned in ``(node, gamma)`` order regardless of ``workers``.
    """
    n = g.n
    ks = list(range(n + 1)) if gammas is None else [partition_count(n, x) for x in gammas]
    nodes = list(range(n)) if nodes is None else list(nodes)
    op = transfer_operator(g, params)
    pi = boltzmann_distribution(g, params)

    def run(k):
        return _partition_curves(op, pi, n, k, nodes, t_max)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            blocks = list(ex.map(run, ks))
    else:
        blocks = [run(k) for k in ks]
    return [
        InfoCurve(node, k / n, blocks[a][j])
        for j, node in enumerate(nodes)
        for a, k in enumerate(ks)
    ]
