"""Simple undirected graphs and the path/weight primitives metrics build on.

Nodes are dense integers ``0..n-1``; edges are stored canonically as
``(min, max)`` pairs so they can key weight maps unambiguously.  Graphs and
weights are immutable after construction and all queries are pure.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


def canonical_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: node count plus a canonical edge tuple."""

    n: int
    edges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays (int32), aligned with `edges` order."""
        if not self.edges:
            empty = np.empty(0, dtype=np.int32)
            return empty, empty.copy()
        arr = np.asarray(self.edges, dtype=np.int32)
        return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])

    def adjacency_csr(self, weights: "EdgeWeights | None" = None) -> sparse.csr_matrix:
        """Upper-triangular CSR adjacency (use directed=False in csgraph calls)."""
        iu, ju = self.edge_arrays
        data = np.ones(self.m) if weights is None else np.asarray(weights.values, dtype=float)
        return sparse.csr_matrix((data, (iu, ju)), shape=(self.n, self.n))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def with_edge(self, u: int, v: int) -> "Graph":
        """Copy of this graph with one extra edge (no-op if present)."""
        e = canonical_edge(u, v)
        if e in set(self.edges):
            return self
        return build_graph(self.n, list(self.edges) + [e])


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Validate, deduplicate, and canonicalize an edge list into a Graph.

    Rejects self-loops and out-of-range endpoints, naming the offending pair.
    """
    if n < 0:
        raise ValueError(f"node count must be nonnegative, got {n}")
    seen: set[tuple[int, int]] = set()
    out: list[tuple[int, int]] = []
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop not allowed: ({u}, {v})")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge endpoint out of range for n={n}: ({u}, {v})")
        e = canonical_edge(u, v)
        if e not in seen:
            seen.add(e)
            out.append(e)
    out.sort()
    return Graph(n, tuple(out))


@dataclass(frozen=True)
class EdgeWeights:
    """Strictly positive distance weights, one per edge of a companion graph.

    ``values[i]`` is the weight of ``graph.edges[i]``.
    """

    graph: Graph
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.graph.m:
            raise ValueError(
                f"expected {self.graph.m} weights (one per edge), got {len(self.values)}"
            )
        for (u, v), w in zip(self.graph.edges, self.values):
            if not w > 0:
                raise ValueError(f"edge weight must be > 0, got D({u},{v})={w}")

    @classmethod
    def from_mapping(cls, graph: Graph, mapping: Mapping[tuple[int, int], float]) -> "EdgeWeights":
        normalized = {canonical_edge(u, v): float(w) for (u, v), w in mapping.items()}
        missing = [e for e in graph.edges if e not in normalized]
        if missing:
            raise ValueError(f"weights missing for edges: {missing[:5]}")
        extra = set(normalized) - set(graph.edges)
        if extra:
            raise ValueError(f"weights given for non-edges: {sorted(extra)[:5]}")
        return cls(graph, tuple(normalized[e] for e in graph.edges))

    @classmethod
    def uniform(cls, graph: Graph, value: float = 1.0) -> "EdgeWeights":
        return cls(graph, (float(value),) * graph.m)

    def __getitem__(self, edge: tuple[int, int]) -> float:
        return self.as_dict[canonical_edge(*edge)]

    @cached_property
    def as_dict(self) -> dict[tuple[int, int], float]:
        return dict(zip(self.graph.edges, self.values))


def shortest_path_lengths(g: Graph, source: int) -> np.ndarray:
    """Hop distances from `source` by BFS; unreachable nodes get ``inf``."""
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range for n={g.n}")
    dist = np.full(g.n, np.inf)
    dist[source] = 0.0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v in adj[u]:
            if np.isinf(dist[v]):
                dist[v] = du + 1.0
                queue.append(v)
    return dist


def weighted_shortest_path_lengths(g: Graph, weights: EdgeWeights, source: int) -> np.ndarray:
    """Dijkstra distances from `source` under positive edge weights."""
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range for n={g.n}")
    if weights.graph is not g and weights.graph != g:
        raise ValueError("weights belong to a different graph")
    wmap = weights.as_dict
    dist = np.full(g.n, np.inf)
    dist[source] = 0.0
    heap: list[tuple[float, int]] = [(0.0, source)]
    done = np.zeros(g.n, dtype=bool)
    adj = g.adjacency
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v in adj[u]:
            alt = du + wmap[canonical_edge(u, v)]
            if alt < dist[v]:
                dist[v] = alt
                heapq.heappush(heap, (alt, v))
    return dist


def connected_components(g: Graph) -> list[list[int]]:
    """Partition of nodes into components, each sorted, ordered by least node."""
    seen = np.zeros(g.n, dtype=bool)
    comps: list[list[int]] = []
    adj = g.adjacency
    for start in range(g.n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def harmonic_mean_weight(g: Graph, weights: EdgeWeights, g_exp: float = 1.0) -> float:
    """Edge-weight aggregate H = |E| / sum((1/D)^g); requires at least one edge."""
    if g.m == 0:
        raise ValueError("harmonic mean weight is undefined on an empty edge set")
    inv = np.power(1.0 / np.asarray(weights.values, dtype=float), g_exp)
    return g.m / float(inv.sum())


def hop_distance_matrix(g: Graph) -> np.ndarray:
    """All-pairs hop distances (float matrix, inf where unreachable)."""
    if g.n == 0:
        return np.zeros((0, 0))
    if g.m == 0:
        d = np.full((g.n, g.n), np.inf)
        np.fill_diagonal(d, 0.0)
        return d
    return csgraph.shortest_path(g.adjacency_csr(), method="D", directed=False, unweighted=True)


def weighted_distance_matrix(g: Graph, weights: EdgeWeights) -> np.ndarray:
    """All-pairs Dijkstra distances under positive edge weights."""
    if g.n == 0:
        return np.zeros((0, 0))
    if g.m == 0:
        d = np.full((g.n, g.n), np.inf)
        np.fill_diagonal(d, 0.0)
        return d
    return csgraph.shortest_path(g.adjacency_csr(weights), method="D", directed=False)
