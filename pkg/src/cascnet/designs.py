"""The six parametric network designs and closed forms for Stars/Cycles.

A design partitions ``n`` nodes into cells of size ``k`` (one smaller
remainder cell when k does not divide n) wired as cliques, stars, or
rings; the "connected" variants add at most one random inter-cell edge
per cell pair with probability ``p``; ER ignores cells entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .graphs import Graph, build_graph
from .seeding import RunSeed

CLIQUES = "cliques"
STARS = "stars"
CYCLES = "cycles"
CONNECTED_CLIQUES = "connected-cliques"
CONNECTED_STARS = "connected-stars"
ER = "er"

ALL_DESIGNS = (CLIQUES, STARS, CYCLES, CONNECTED_CLIQUES, CONNECTED_STARS, ER)
CELL_DESIGNS = (CLIQUES, STARS, CYCLES, CONNECTED_CLIQUES, CONNECTED_STARS)
P_DESIGNS = (CONNECTED_CLIQUES, CONNECTED_STARS, ER)

#: Ensemble sizes: random-connectivity designs vary between instances.
DEFAULT_ENSEMBLE_WITH_P = 10
DEFAULT_ENSEMBLE_NO_P = 1


@dataclass(frozen=True)
class DesignConfig:
    """One configuration of a design: the parameters that fix an ensemble."""

    design: str
    n: int = 180
    k: int | None = None
    p: float | None = None
    ensemble_size: int | None = None
    leader_wiring: bool = False

    def __post_init__(self) -> None:
        if self.design not in ALL_DESIGNS:
            raise ValueError(f"unknown design {self.design!r}; expected one of {ALL_DESIGNS}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.design in CELL_DESIGNS:
            if self.k is None:
                raise ValueError(f"design {self.design!r} requires the cell size k")
            if not 1 <= self.k <= self.n:
                raise ValueError(f"k must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")
        elif self.k is not None:
            raise ValueError(f"design {self.design!r} takes no cell size")
        if self.design in P_DESIGNS:
            if self.p is None:
                raise ValueError(f"design {self.design!r} requires the connectivity p")
            if not 0.0 <= self.p <= 1.0:
                raise ValueError(f"p must be in [0, 1], got {self.p}")
        elif self.p is not None:
            raise ValueError(f"design {self.design!r} takes no connectivity p")

    @property
    def resolved_ensemble_size(self) -> int:
        if self.ensemble_size is not None:
            if self.ensemble_size < 1:
                raise ValueError("ensemble_size must be positive")
            return self.ensemble_size
        return DEFAULT_ENSEMBLE_WITH_P if self.design in P_DESIGNS else DEFAULT_ENSEMBLE_NO_P

    def with_ensemble(self, size: int) -> "DesignConfig":
        return replace(self, ensemble_size=size)


def cell_partition(n: int, k: int) -> list[list[int]]:
    """Consecutive cells of size k plus one remainder cell of size n mod k."""
    cells = [list(range(start, min(start + k, n))) for start in range(0, n, k)]
    return cells


def _cell_edges(cells: list[list[int]], kind: str) -> list[tuple[int, int]]:
    edges: list[tuple[int, int]] = []
    for cell in cells:
        s = len(cell)
        if s < 2:
            continue
        if kind == "clique":
            edges.extend((cell[i], cell[j]) for i in range(s) for j in range(i + 1, s))
        elif kind == "star":
            leader = cell[0]
            edges.extend((leader, member) for member in cell[1:])
        elif kind == "ring":
            if s == 2:
                edges.append((cell[0], cell[1]))
            else:
                edges.extend((cell[i], cell[i + 1]) for i in range(s - 1))
                edges.append((cell[0], cell[s - 1]))
    return edges


def _inter_cell_edges(
    cells: list[list[int]], p: float, rng: np.random.Generator, leader_wiring: bool
) -> list[tuple[int, int]]:
    edges: list[tuple[int, int]] = []
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            if rng.random() < p:
                if leader_wiring:
                    edges.append((cells[i][0], cells[j][0]))
                else:
                    u = cells[i][int(rng.integers(len(cells[i])))]
                    v = cells[j][int(rng.integers(len(cells[j])))]
                    edges.append((u, v))
    return edges


def generate(config: DesignConfig, seed: RunSeed) -> Graph:
    """Materialize one graph of the configuration, deterministically in seed."""
    n = config.n
    if config.design == ER:
        rng = seed.generator()
        iu, ju = np.triu_indices(n, 1)
        mask = rng.random(len(iu)) < config.p
        return Graph(n, tuple(zip(iu[mask].tolist(), ju[mask].tolist())))

    cells = cell_partition(n, config.k)
    kind = {
        CLIQUES: "clique",
        CONNECTED_CLIQUES: "clique",
        STARS: "star",
        CONNECTED_STARS: "star",
        CYCLES: "ring",
    }[config.design]
    edges = _cell_edges(cells, kind)
    if config.design in (CONNECTED_CLIQUES, CONNECTED_STARS):
        rng = seed.generator()
        edges.extend(_inter_cell_edges(cells, config.p, rng, config.leader_wiring))
    # construction yields distinct in-range (min, max) pairs, so skip
    # build_graph's dedup pass
    edges.sort()
    return Graph(n, tuple(edges))


def generate_ensemble(config: DesignConfig, seed: RunSeed) -> list[Graph]:
    """The configuration's ensemble, member i drawn from the derived stream i."""
    return [generate(config, seed.derive(i)) for i in range(config.resolved_ensemble_size)]


def analytic_stars(n: int, k: int, tau: float, g_exp: float = 1.0) -> tuple[float, float]:
    """Closed-form (R, W) for the Stars design with identical cells (k | n)."""
    _check_analytic_args(n, k, tau, g_exp)
    if k == 1:
        return 1.0, 0.0
    frac = (1.0 - 1.0 / k) / (n - 1)
    r_val = 1.0 - frac * (2.0 + tau * (k - 2)) * tau
    w_val = frac * (2.0 + 2.0**-g_exp * (k - 2))
    return r_val, w_val


def analytic_cycles(n: int, k: int, tau: float, g_exp: float = 1.0) -> tuple[float, float]:
    """Closed-form (R, W) for the Cycles design with identical cells (k | n).

    The expected extent is accumulated as sum over ring positions j of
    1 - (1 - tau^j)(1 - tau^(k-j)), the chance that at least one of the two
    arcs to the seed transmits end to end; this equals the geometric-series
    form 2*tau*(1-tau^(k-1))/(1-tau) - (k-1)*tau^k and stays finite at
    tau = 1, where each replication fails the whole ring (k - 1 new cases).
    """
    _check_analytic_args(n, k, tau, g_exp)
    if k == 1:
        return 1.0, 0.0
    extent = 0.0
    for j in range(1, k):
        extent += 1.0 - (1.0 - tau**j) * (1.0 - tau ** (k - j))
    r_val = 1.0 - extent / (n - 1)

    if k % 2 == 0:
        reach = (k / 2.0) ** -g_exp + 2.0 * sum(j**-g_exp for j in range(1, k // 2))
    else:
        reach = 2.0 * sum(j**-g_exp for j in range(1, (k - 1) // 2 + 1))
    w_val = reach / (n - 1)
    return r_val, w_val


def stars_single_cell_threshold(g_exp: float = 1.0) -> float:
    """Cascade probability above which a single large star cell stops paying."""
    if g_exp < 0:
        raise ValueError(f"g_exp must be nonnegative, got {g_exp}")
    return 2.0 ** (-g_exp / 2.0)


def _check_analytic_args(n: int, k: int, tau: float, g_exp: float) -> None:
    if n < 2:
        raise ValueError(f"analytic forms need n >= 2, got n={n}")
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    if g_exp < 0:
        raise ValueError(f"g_exp must be nonnegative, got {g_exp}")


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending (the identical-cell sizes)."""
    small = [d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0]
    large = [n // d for d in reversed(small) if n // d not in small]
    return small + large
