"""Resilience, distance-attenuated efficiency, and their fitness aggregate."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _bfs
from .cascade import (
    EXACT_EDGE_CAP,
    MAX_REPLICATIONS,
    CascadeParams,
    MetricEstimate,
    estimate_expected_extent,
    exact_estimate,
    expected_extent_exact,
)
from .graphs import (
    EdgeWeights,
    Graph,
    harmonic_mean_weight,
    weighted_distance_matrix,
)
from .seeding import RunSeed


@dataclass(frozen=True)
class FitnessParams:
    """Resilience weight r and connectivity attenuation exponent."""

    r: float
    g_exp: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must be in [0, 1], got {self.r}")
        if self.g_exp < 0:
            raise ValueError(f"g_exp must be nonnegative, got {self.g_exp}")


def _reach_sum(dist: np.ndarray, g_exp: float) -> float:
    """Sum of 1/d^g over ordered pairs, unreachable pairs contributing 0."""
    off = ~np.eye(dist.shape[0], dtype=bool)
    finite = np.isfinite(dist) & off
    return float(np.sum(np.power(dist[finite], -g_exp)))


def efficiency(g: Graph, g_exp: float = 1.0) -> float:
    """Distance-attenuated reach in [0, 1]; 1 exactly iff the graph is complete.

    W = (1/(n(n-1))) * sum over ordered pairs of 1/d(u,v)^g, where pairs with
    no connecting path contribute 0.  Degenerate n < 2 is defined as 0.
    """
    if g.n < 2:
        return 0.0
    if g.m == 0:
        return 0.0
    iu, ju = g.edge_arrays
    return _bfs.reach_sum(g.n, iu, ju, g_exp) / (g.n * (g.n - 1))


def weighted_efficiency(g: Graph, weights: EdgeWeights, g_exp: float = 1.0) -> float:
    """Efficiency under distance weights, normalized by the edge harmonic mean.

    W = H(G)/(n(n-1)) * sum of 1/d_D(u,v)^g with Dijkstra distances d_D.  The
    normalization makes the all-ones weighting reduce to `efficiency`; it is
    exactly 1 on a complete graph only when each direct edge is itself a
    shortest path, so values slightly above 1 are possible for inconsistent
    weights and are reported as-is with a warning rather than clamped.
    """
    if g.n < 2 or g.m == 0:
        return 0.0
    h = harmonic_mean_weight(g, weights, g_exp)
    w = h * _reach_sum(weighted_distance_matrix(g, weights), g_exp) / (g.n * (g.n - 1))
    if w > 1.0:
        warnings.warn(
            f"weighted efficiency {w:.6g} exceeds 1; the distance weights are not "
            "path-consistent",
            stacklevel=2,
        )
    return w


def resilience(
    g: Graph,
    params: CascadeParams,
    seed: RunSeed | None = None,
    *,
    method: str = "auto",
    target_half_width: float = 0.5,
    max_reps: int = MAX_REPLICATIONS,
    seed_mode: str = "uniform",
    inner_edges=None,
    inner_samples: int = 32,
) -> MetricEstimate:
    """Expected surviving fraction R = 1 - E[extent]/(n-1).

    ``method`` picks the extent computation: "exact" enumerates (small edge
    counts only), "mc" runs the sequential estimator, "auto" uses exact when
    the graph is within the enumeration cap.  The extent CI propagates
    through the affine map.
    """
    if g.n < 2:
        return exact_estimate(1.0)
    if method == "auto":
        method = "exact" if g.m <= EXACT_EDGE_CAP else "mc"
    if method == "exact":
        return exact_estimate(1.0 - expected_extent_exact(g, params) / (g.n - 1))
    if method == "mc":
        if seed is None:
            raise ValueError("Monte Carlo resilience requires a RunSeed")
        est = estimate_expected_extent(
            g,
            params,
            seed,
            target_half_width=target_half_width,
            max_reps=max_reps,
            seed_mode=seed_mode,
            inner_edges=inner_edges,
            inner_samples=inner_samples,
        )
        return est.scaled(-1.0 / (g.n - 1)).shifted(1.0)
    raise ValueError(f"unknown method {method!r}")


def fitness(R: float, W: float, r: float) -> float:
    """Convex aggregate r*R + (1-r)*W of resilience and efficiency."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must be in [0, 1], got {r}")
    return r * R + (1.0 - r) * W
