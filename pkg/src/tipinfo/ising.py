"""Kinetic Ising model: energies, Glauber kernel and the exact transfer operator.

Configurations are integers whose bit ``i`` is the display state of node ``i``
(0 or 1); internally the spin is ``2*s - 1``. Distributions are dense float
arrays of length ``2**n`` indexed by configuration.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .graph import Graph

MAX_EXACT_NODES = 20


class ExactnessCapError(ValueError):
    """The graph is too large for exact enumeration of its state space."""


@dataclass(frozen=True)
class ModelParams:
    beta: float
    J: float = 1.0
    h: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if self.h is not None:
            object.__setattr__(self, "h", tuple(float(x) for x in self.h))

    def field(self, n: int) -> np.ndarray:
        if self.h is None:
            return np.zeros(n)
        if len(self.h) != n:
            raise ValueError(f"field has {len(self.h)} entries for {n} nodes")
        return np.asarray(self.h, dtype=float)


def check_exact(g: Graph) -> None:
    if g.n > MAX_EXACT_NODES:
        raise ExactnessCapError(
            f"{g.n} nodes exceeds the exact-enumeration cap of {MAX_EXACT_NODES}"
        )


def all_states(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def state_bits(states, n: int) -> np.ndarray:
    """Display states as an ``(len(states), n)`` array of 0/1."""
    states = np.asarray(states, dtype=np.int64)
    return ((states[..., None] >> np.arange(n)) & 1).astype(np.int8)


def popcount(states) -> np.ndarray:
    states = np.asarray(states, dtype=np.int64)
    out = np.zeros(states.shape, dtype=np.int64)
    s = states.copy()
    while np.any(s):
        out += s & 1
        s >>= 1
    return out


def hamiltonian(cfg: int, g: Graph, params: ModelParams) -> float:
    """Energy ``-J sum_edges s_i s_j - sum_i h_i s_i`` with spins in {-1, +1}."""
    if not 0 <= cfg < (1 << g.n):
        raise ValueError(f"configuration {cfg} invalid for {g.n} nodes")
    spin = [2 * ((cfg >> i) & 1) - 1 for i in range(g.n)]
    e = -params.J * sum(spin[i] * spin[j] for i, j in g.edges)
    if params.h is not None:
        e -= float(np.dot(params.field(g.n), spin))
    return float(e)


def energies(g: Graph, params: ModelParams) -> np.ndarray:
    """Energy of every configuration, vectorised over the state space."""
    check_exact(g)
    states = all_states(g.n)
    bond = np.zeros(states.size)
    for i, j in g.edges:
        # s_i s_j = 1 - 2 * (bit_i xor bit_j)
        bond += 1 - 2 * (((states >> i) ^ (states >> j)) & 1)
    e = -params.J * bond
    if params.h is not None:
        h = params.field(g.n)
        for i in range(g.n):
            e -= h[i] * (2 * ((states >> i) & 1) - 1)
    return e


def glauber_accept(delta_e, beta):
    """Probability ``1 / (1 + exp(beta * delta_e))`` of accepting a proposed flip.

    ``delta_e`` is the energy of the proposed state minus the current one, so
    energy-lowering moves are favoured and ``p(d) / p(-d) = exp(-beta * d)``.
    """
    if np.any(np.asarray(beta) < 0):
        raise ValueError("beta must be non-negative")
    out = expit(-np.multiply(beta, delta_e))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class TransferOperator:
    """Row-stochastic single-flip Glauber operator over ``2**n`` configurations.

    ``matrix[S, S']`` is the probability of moving from ``S`` to ``S'`` in one
    attempted flip. Each row holds at most ``n + 1`` non-zeros.
    """

    n: int
    matrix: sp.csr_matrix

    @property
    def n_states(self) -> int:
        return self.matrix.shape[0]

    def row(self, state: int) -> list[tuple[int, float]]:
        lo, hi = self.matrix.indptr[state], self.matrix.indptr[state + 1]
        return list(zip(self.matrix.indices[lo:hi].tolist(), self.matrix.data[lo:hi].tolist()))

    @property
    def transpose(self) -> sp.csr_matrix:
        # cached so repeated propagation reuses one CSR layout
        t = self.__dict__.get("_transpose")
        if t is None:
            t = self.matrix.T.tocsr()
            t.sort_indices()
            self.__dict__["_transpose"] = t
        return t

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def transfer_operator(g: Graph, params: ModelParams) -> TransferOperator:
    """Exact Glauber transfer operator; one step flips a uniformly chosen node."""
    check_exact(g)
    n = g.n
    n_states = 1 << n
    states = all_states(n)
    e = energies(g, params)
    cols = np.empty((n_states, n + 1), dtype=np.int64)
    vals = np.empty((n_states, n + 1))
    for i in range(n):
        tgt = states ^ (1 << i)
        cols[:, i] = tgt
        vals[:, i] = glauber_accept(e[tgt] - e, params.beta) / n if n else 0.0
    cols[:, n] = states
    vals[:, n] = 1.0 - vals[:, :n].sum(axis=1)
    order = np.argsort(cols, axis=1, kind="stable")
    cols = np.take_along_axis(cols, order, axis=1)
    vals = np.take_along_axis(vals, order, axis=1)
    indptr = np.arange(0, n_states * (n + 1) + 1, n + 1, dtype=np.int64)
    mat = sp.csr_matrix((vals.ravel(), cols.ravel(), indptr), shape=(n_states, n_states))
    return TransferOperator(n, mat)


def boltzmann_distribution(g: Graph, params: ModelParams) -> np.ndarray:
    """Stationary Boltzmann-Gibbs weights ``exp(-beta H) / Z``."""
    logw = -params.beta * energies(g, params)
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def propagate(op: TransferOperator, d: np.ndarray, steps: int = 1) -> np.ndarray:
    """Advance a distribution (or a matrix of column distributions) by ``steps``."""
    d = np.asarray(d, dtype=float)
    if d.shape[0] != op.n_states:
        raise ValueError(f"distribution has {d.shape[0]} entries, operator {op.n_states}")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    pt = op.transpose
    for _ in range(steps):
        d = pt @ d
    return d


def macrostate_marginal(d: np.ndarray, n: int) -> np.ndarray:
    """Probability of each popcount ``k = 0..n`` (macrostate ``k / n``)."""
    return np.bincount(popcount(all_states(n)), weights=d, minlength=n + 1)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def write_distribution_csv(path: str | Path, d: np.ndarray, n: int) -> None:
    """Write ``state,probability`` rows; the state string lists node n-1 first."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["state", "probability"])
        for s, p in enumerate(d):
            w.writerow([format(s, f"0{n}b") if n else "", repr(float(p))])
