"""Undirected simple graphs, named generators and isomorphism testing.

Graphs are small (the exact pipeline caps out at 20 nodes) so everything here
works on plain Python sets and tuples. Isomorphism is decided through a
canonical form: ordered colour refinement followed by an individualisation
search with automorphism pruning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np


class EnsembleExhausted(RuntimeError):
    """Rejection sampling ran out of attempts before enough graphs were found."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..n-1``.

    Edges are stored as a frozenset of ``(i, j)`` pairs with ``i < j``, so two
    graphs compare equal whenever their edge sets do, regardless of the order
    the edges were supplied in.
    """

    n: int
    edges: frozenset

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise ValueError(f"node count must be non-negative, got {n}")
        norm = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) outside 0..{n - 1}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", frozenset(norm))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.neighbors)

    def degree(self, i: int) -> int:
        return self.degrees[i]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a

    def relabel(self, perm) -> "Graph":
        """Return the graph with node ``i`` renamed to ``perm[i]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        return Graph(self.n, ((perm[i], perm[j]) for i, j in self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.sorted_edges()})"

    # -- serialisation -------------------------------------------------

    def to_edgelist(self) -> str:
        lines = [f"n={self.n}"]
        lines += [f"{i} {j}" for i, j in self.sorted_edges()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.sorted_edges()]})

    @classmethod
    def from_edgelist(cls, text: str) -> "Graph":
        n = None
        edges = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("n="):
                n = int(line[2:])
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"bad edge line: {raw!r}")
            edges.append((int(parts[0]), int(parts[1])))
        if n is None:
            raise ValueError("edge list is missing the 'n=<count>' header")
        return cls(n, edges)

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        obj = json.loads(text)
        return cls(int(obj["n"]), [tuple(e) for e in obj["edges"]])


def load_graph(source: str | Path) -> Graph:
    """Read a graph from an edge-list file, a JSON file, or an inline JSON string."""
    s = str(source).strip()
    if s.startswith("{"):
        return Graph.from_json(s)
    text = Path(source).read_text()
    if text.lstrip().startswith("{"):
        return Graph.from_json(text)
    return Graph.from_edgelist(text)


# -- named generators ---------------------------------------------------

_KITE_EDGES = (
    (0, 1), (0, 2), (0, 3), (0, 5), (1, 3), (1, 4), (1, 6), (2, 3), (2, 5),
    (3, 4), (3, 5), (3, 6), (4, 6), (5, 6), (5, 7), (6, 7), (7, 8), (8, 9),
)


def krackhardt_kite() -> Graph:
    """The 10-node Krackhardt kite; node 3 is the hub and node 9 the tail leaf."""
    return Graph(10, _KITE_EDGES)


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return Graph(n, ((i, (i + 1) % n) for i in range(n)))


def star_graph(n: int) -> Graph:
    """Star on ``n`` nodes, node 0 at the centre."""
    return Graph(n, ((0, i) for i in range(1, n)))


def complete_graph(n: int) -> Graph:
    return Graph(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


NAMED_GRAPHS = {
    "kite": lambda: krackhardt_kite(),
    "path": path_graph,
    "cycle": cycle_graph,
    "star": star_graph,
    "complete": complete_graph,
}


def named_graph(text: str) -> Graph:
    """Build a graph from ``"kite"`` or ``"<name>:<n>"`` (e.g. ``"path:5"``)."""
    name, _, arg = text.partition(":")
    if name not in NAMED_GRAPHS:
        raise ValueError(f"unknown graph generator {name!r}")
    if name == "kite":
        if arg:
            raise ValueError("kite takes no size argument")
        return krackhardt_kite()
    if not arg:
        raise ValueError(f"generator {name!r} needs a size, e.g. {name}:5")
    return NAMED_GRAPHS[name](int(arg))


# -- connectivity -------------------------------------------------------

def is_connected(g: Graph) -> bool:
    if g.n == 0:
        raise ValueError("connectivity is undefined for the empty graph")
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in g.neighbors[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.n


# -- canonical labelling ------------------------------------------------

def _refine(g: Graph, colors: list[int]) -> list[int]:
    """Ordered colour refinement until the partition is equitable.

    Colours are ranks, so the refined colouring depends only on the input
    colouring and the graph structure, never on node ids.
    """
    nbrs = g.neighbors
    n_cells = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted(colors[u] for u in nbrs[v])))
            for v in range(g.n)
        ]
        rank = {s: r for r, s in enumerate(sorted(set(sigs)))}
        colors = [rank[s] for s in sigs]
        if len(rank) == n_cells:
            return colors
        n_cells = len(rank)


def _individualize(colors: list[int], v: int) -> list[int]:
    key = [(2 * c + (0 if u == v else 1)) for u, c in enumerate(colors)]
    rank = {k: r for r, k in enumerate(sorted(set(key)))}
    return [rank[k] for k in key]


def _certificate(g: Graph, colors: list[int]) -> tuple:
    return tuple(sorted(
        (min(colors[i], colors[j]), max(colors[i], colors[j])) for i, j in g.edges
    ))


def _orbit_roots(cell: list[int], gens: list[tuple[int, ...]]) -> dict[int, int]:
    parent = {v: v for v in cell}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in gens:
        for v in cell:
            w = perm[v]
            if w in parent:
                a, b = find(v), find(w)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return {v: find(v) for v in cell}


def canonical_form(g: Graph) -> tuple:
    """Isomorphism-invariant certificate: equal iff the graphs are isomorphic."""
    best: dict = {"cert": None, "labels": None}
    autos: list[tuple[int, ...]] = []

    def search(colors, prefix):
        # Leaves are discrete partitions; colours then are the new labels.
        if len(set(colors)) == g.n:
            cert = _certificate(g, colors)
            if best["cert"] is None or cert < best["cert"]:
                best["cert"], best["labels"] = cert, colors
            elif cert == best["cert"]:
                # labels_best^{-1} o labels_new is an automorphism
                inv = {lab: v for v, lab in enumerate(best["labels"])}
                autos.append(tuple(inv[colors[v]] for v in range(g.n)))
            return
        counts = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min((c for c in counts if counts[c] > 1), key=lambda c: (counts[c], c))
        cell = [v for v in range(g.n) if colors[v] == target]
        explored: list[int] = []
        for v in cell:
            # automorphisms fixing the prefix map subtree(v) onto subtree(w)
            stab = [p for p in autos if all(p[u] == u for u in prefix)]
            if explored and stab:
                roots = _orbit_roots(cell, stab)
                if any(roots[u] == roots[v] for u in explored):
                    continue
            search(_refine(g, _individualize(colors, v)), prefix + (v,))
            explored.append(v)

    if g.n == 0:
        return (0, ())
    search(_refine(g, [0] * g.n), ())
    return (g.n, best["cert"])


def are_isomorphic(g1: Graph, g2: Graph) -> bool:
    if g1.n != g2.n or g1.n_edges != g2.n_edges:
        return False
    if sorted(g1.degrees) != sorted(g2.degrees):
        return False
    return canonical_form(g1) == canonical_form(g2)


# -- random ensembles ---------------------------------------------------

def erdos_renyi_ensemble(n: int, p: float, count: int, seed=0,
                         max_attempts: int | None = None) -> list[Graph]:
    """Draw ``count`` pairwise non-isomorphic connected G(n, p) graphs.

    Candidates are sampled edge by edge and rejected if disconnected or
    isomorphic to one already accepted.

    Raises
    ------
    EnsembleExhausted
        If ``max_attempts`` candidates (default ``10_000 * count``) were drawn
        without collecting ``count`` graphs.
    """
    if not 0 < p < 1:
        raise ValueError(f"edge probability must lie in (0, 1), got {p}")
    if count < 1:
        raise ValueError("count must be at least 1")
    if max_attempts is None:
        max_attempts = 10_000 * count
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    accepted: list[Graph] = []
    seen: set = set()
    for _ in range(max_attempts):
        mask = rng.random(iu.size) < p
        g = Graph(n, zip(iu[mask].tolist(), ju[mask].tolist()))
        if not is_connected(g):
            continue
        cf = canonical_form(g)
        if cf in seen:
            continue
        seen.add(cf)
        accepted.append(g)
        if len(accepted) == count:
            return accepted
    raise EnsembleExhausted(
        f"found {len(accepted)} of {count} graphs after {max_attempts} attempts "
        f"(n={n}, p={p})"
    )
