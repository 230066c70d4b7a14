"""Seeded Glauber Monte-Carlo with optional single-node pinning.

Random numbers come from numpy generators seeded by ``(seed, *stream)`` and
are handed to a compiled kernel in chunks, so a run is fully determined by its
configuration no matter how many runs execute concurrently.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .graph import Graph
from .ising import glauber_accept

DEFAULT_SEEDS = (0, 12, 123, 1234, 123456, 1234567)
SETTLE_LO = 0.25
SETTLE_HI = 0.75
_CHUNK = 1 << 20


@dataclass(frozen=True)
class SimConfig:
    graph: Graph
    beta: float
    steps: int = 1_000_000
    seed: int = 0
    pinned_node: int | None = None
    pinned_state: int = 0
    record_stride: int = 1
    J: float = 1.0
    h: tuple[float, ...] | None = None
    initial_state: int = 0
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")
        if self.pinned_node is not None and not 0 <= self.pinned_node < self.graph.n:
            raise ValueError(f"pinned node {self.pinned_node} not in graph")
        if self.pinned_state not in (0, 1):
            raise ValueError("pinned state must be 0 or 1")


@dataclass(frozen=True)
class TrajectoryStats:
    eta_below: float | None
    eta_above: float | None
    frac_time_below: float
    transitions: int
    final_state: int


@dataclass(frozen=True, eq=False)
class SimResult:
    config: SimConfig
    counts: np.ndarray  # popcount at each recorded step
    stats: TrajectoryStats

    @property
    def macrostates(self) -> np.ndarray:
        return self.counts / self.config.graph.n


@numba.njit(nogil=True)
def _glauber_chunk(spin, nodes, uniforms, offsets, flat, table, maxdeg, pinned,
                   count, t0, stride, out, pos):
    for s in range(nodes.size):
        v = nodes[s]
        if v != pinned:
            field = 0
            for q in range(offsets[v], offsets[v + 1]):
                field += spin[flat[q]]
            up = 1 if spin[v] > 0 else 0
            if uniforms[s] < table[v, up, field + maxdeg]:
                spin[v] = -spin[v]
                count += 1 if spin[v] > 0 else -1
        if (t0 + s + 1) % stride == 0:
            out[pos] = count
            pos += 1
    return count, pos


def _acceptance_table(g: Graph, beta: float, J: float, h) -> tuple[np.ndarray, int]:
    """``table[v, up, field + maxdeg]``: flip acceptance for node ``v``.

    ``up`` is 1 when node ``v`` currently has spin +1; ``field`` is the sum of
    its neighbours' spins.
    """
    maxdeg = max(g.degrees) if g.n else 0
    fields = np.arange(-maxdeg, maxdeg + 1)
    hv = np.zeros(g.n) if h is None else np.asarray(h, dtype=float)
    table = np.empty((g.n, 2, fields.size))
    for v in range(g.n):
        for up, sigma in ((0, -1.0), (1, 1.0)):
            # flipping sigma -> -sigma changes H by 2 sigma (J field + h_v)
            table[v, up] = glauber_accept(2.0 * sigma * (J * fields + hv[v]), beta)
    return table, maxdeg


def simulate(cfg: SimConfig, keep_trajectory: bool = True) -> SimResult:
    """Run ``cfg.steps`` attempted flips and summarise the macrostate trajectory."""
    g = cfg.graph
    n = g.n
    state = cfg.initial_state
    if cfg.pinned_node is not None:
        bit = 1 << cfg.pinned_node
        state = (state | bit) if cfg.pinned_state else (state & ~bit)
    spin = np.array([1 if (state >> i) & 1 else -1 for i in range(n)], dtype=np.int64)
    offsets = np.zeros(n + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(g.degrees)
    flat = np.array([u for nb in g.neighbors for u in nb], dtype=np.int64)
    table, maxdeg = _acceptance_table(g, cfg.beta, cfg.J, cfg.h)
    pinned = -1 if cfg.pinned_node is None else cfg.pinned_node

    rng = np.random.default_rng([cfg.seed, *cfg.stream])
    out = np.empty(cfg.steps // cfg.record_stride, dtype=np.int16)
    count = int((spin > 0).sum())
    pos = 0
    for t0 in range(0, cfg.steps, _CHUNK):
        size = min(_CHUNK, cfg.steps - t0)
        nodes = rng.integers(0, n, size=size)
        uniforms = rng.random(size)
        count, pos = _glauber_chunk(spin, nodes, uniforms, offsets, flat, table, maxdeg,
                                    pinned, count, t0, cfg.record_stride, out, pos)
    macro = out / n
    eta_b, eta_a = noise_metric(macro, n, None if cfg.pinned_node is None else cfg.pinned_state)
    final = sum(1 << i for i in range(n) if spin[i] > 0)
    stats = TrajectoryStats(eta_b, eta_a, frac_time_below(macro), count_transitions(macro), final)
    return SimResult(cfg, out if keep_trajectory else out[:0], stats)


def noise_metric(macrostates, n: int | None = None, pinned: int | None = None):
    """Range-normalised second moment of the macrostate on each side of 0.5.

    Below the tipping point the deviation is ``<S>``, above it ``1 - <S>``; each
    side's mean squared deviation is divided by ``alpha**2``, the side's
    attainable deviation range. That range is 0.5 without intervention and
    shrinks to ``(n - 1) / n - 0.5`` on the side a pinned node keeps the system
    away from. Samples exactly at 0.5 are dropped. A side without samples
    yields ``None``.
    """
    x = np.asarray(macrostates, dtype=float)
    if x.size == 0:
        raise ValueError("empty trajectory")
    alpha_below = alpha_above = 0.5
    if pinned is not None:
        if n is None:
            raise ValueError("node count is needed to correct for a pinned node")
        reduced = (n - 1) / n - 0.5
        if pinned == 0:
            alpha_above = reduced
        else:
            alpha_below = reduced
    below = x[x < 0.5]
    above = 1.0 - x[x > 0.5]
    eta_b = float(np.mean(below ** 2) / alpha_below ** 2) if below.size else None
    eta_a = float(np.mean(above ** 2) / alpha_above ** 2) if above.size else None
    return eta_b, eta_a


def frac_time_below(macrostates) -> float:
    x = np.asarray(macrostates, dtype=float)
    return float(np.mean(x < 0.5)) if x.size else math.nan


def count_transitions(macrostates, settle_lo: float = SETTLE_LO,
                      settle_hi: float = SETTLE_HI) -> int:
    """Number of moves from one settled basin to the other.

    A sample at or below ``settle_lo`` (at or above ``settle_hi``) settles the
    trajectory in the low (high) basin; excursions that return to the basin
    they left are not counted.
    """
    if not settle_lo < 0.5 < settle_hi:
        raise ValueError("need settle_lo < 0.5 < settle_hi")
    x = np.asarray(macrostates, dtype=float)
    side = np.zeros(x.size, dtype=np.int8)
    side[x <= settle_lo] = -1
    side[x >= settle_hi] = 1
    settled = side[side != 0]
    if settled.size < 2:
        return 0
    return int(np.count_nonzero(settled[1:] != settled[:-1]))


def macrostate_histogram(counts, n: int) -> np.ndarray:
    h = np.bincount(np.asarray(counts, dtype=np.int64), minlength=n + 1).astype(float)
    return h / h.sum()


@dataclass(frozen=True)
class InterventionRecord:
    graph_id: int
    pinned_node: int
    seed: int
    eta_below_rel: float | None
    eta_above_rel: float | None
    frac_time_below_rel: float | None
    transitions: int | None
    transitions_control: int | None
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    records: list[InterventionRecord]
    controls: dict = field(default_factory=dict)  # (graph_id, seed) -> TrajectoryStats


def _ratio(x, ref):
    if x is None or ref is None or ref == 0:
        return None
    return x / ref


def intervention_sweep(graphs, betas, seeds=DEFAULT_SEEDS, steps: int = 1_000_000,
                       nodes=None, workers: int = 1, J: float = 1.0,
                       pinned_state: int = 0) -> SweepResult:
    """Control run plus one pinned run per node, for every graph and seed.

    ``betas`` is one inverse temperature for all graphs or one per graph.
    Each cell draws from its own stream ``(seed, graph_index, slot)`` with
    slot 0 for the control and ``node + 1`` for pinning ``node``. A failing
    cell is reported through ``error`` instead of aborting the sweep.
    """
    graphs = list(graphs)
    if np.ndim(betas) == 0:
        betas = [float(betas)] * len(graphs)
    if len(betas) != len(graphs):
        raise ValueError("need one beta per graph")
    cells = []
    for gi, g in enumerate(graphs):
        node_list = range(g.n) if nodes is None else nodes
        for seed in seeds:
            cells.append((gi, seed, None))
            cells.extend((gi, seed, v) for v in node_list)

    def run(cell):
        gi, seed, v = cell
        cfg = SimConfig(graphs[gi], betas[gi], steps=steps, seed=seed, pinned_node=v,
                        pinned_state=pinned_state, J=J,
                        stream=(gi, 0 if v is None else v + 1))
        try:
            return simulate(cfg, keep_trajectory=False).stats
        except Exception as exc:  # noqa: BLE001 - reported per cell
            return exc

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, cells))
    else:
        results = [run(c) for c in cells]

    controls = {}
    for (gi, seed, v), res in zip(cells, results):
        if v is None:
            controls[(gi, seed)] = res
    records = []
    for (gi, seed, v), res in zip(cells, results):
        if v is None:
            continue
        ctrl = controls[(gi, seed)]
        if isinstance(res, Exception) or isinstance(ctrl, Exception):
            err = res if isinstance(res, Exception) else ctrl
            records.append(InterventionRecord(gi, v, seed, None, None, None, None, None,
                                              f"{type(err).__name__}: {err}"))
            continue
        records.append(InterventionRecord(
            gi, v, seed,
            _ratio(res.eta_below, ctrl.eta_below),
            _ratio(res.eta_above, ctrl.eta_above),
            res.frac_time_below - ctrl.frac_time_below,
            res.transitions, ctrl.transitions,
        ))
    return SweepResult(records, {k: v for k, v in controls.items() if not isinstance(v, Exception)})
