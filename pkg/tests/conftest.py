"""Shared enumeration helpers for small-graph exhaustive checks."""

from itertools import combinations

import pytest

from cascnet import CascadeParams, build_graph, expected_extent_exact


def pair_list(n):
    return list(combinations(range(n), 2))


def graph_from_bitmask(n, mask):
    pairs = pair_list(n)
    return build_graph(n, [pairs[i] for i in range(len(pairs)) if mask >> i & 1])


def all_graphs(n):
    """Every labeled simple graph on n nodes, as (bitmask, Graph)."""
    pairs = pair_list(n)
    for mask in range(1 << len(pairs)):
        yield mask, graph_from_bitmask(n, mask)


def exact_extent_table(n, tau):
    """Exact expected extent for every labeled graph on n nodes."""
    return {
        mask: expected_extent_exact(g, CascadeParams(tau)) for mask, g in all_graphs(n)
    }


def is_connected_mask(n, mask):
    g = graph_from_bitmask(n, mask)
    if g.n <= 1:
        return True
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in g.adjacency[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


@pytest.fixture(scope="session")
def extent_table_5_nodes():
    """Exact extents for all 1024 graphs on 5 nodes at tau = 0.6."""
    return exact_extent_table(5, 0.6)
