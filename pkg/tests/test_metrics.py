import numpy as np
import pytest

from cascnet import (
    CascadeParams,
    EdgeWeights,
    FitnessParams,
    RunSeed,
    build_graph,
    efficiency,
    fitness,
    resilience,
    weighted_efficiency,
)
from conftest import all_graphs, graph_from_bitmask, pair_list

K3 = build_graph(3, [(0, 1), (0, 2), (1, 2)])


def complete_graph(n):
    return build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


@pytest.mark.parametrize("n", [2, 3, 5, 8, 180])
def test_efficiency_complete_graph_is_exactly_one(n):
    assert efficiency(complete_graph(n)) == 1.0


def test_efficiency_edgeless_is_zero():
    assert efficiency(build_graph(4, [])) == 0.0


def test_efficiency_path3():
    # ordered pairs: 4 at distance 1, 2 at distance 2 -> (4 + 1)/6
    assert efficiency(build_graph(3, [(0, 1), (1, 2)])) == pytest.approx(5 / 6, abs=1e-15)


def test_efficiency_degenerate_small_n():
    assert efficiency(build_graph(1, [])) == 0.0
    assert efficiency(build_graph(0, [])) == 0.0


def test_efficiency_attenuation_exponent():
    g = build_graph(3, [(0, 1), (1, 2)])
    # distances 1,1,2 (x2 ordered): W(g=2) = (4*1 + 2*0.25)/6
    assert efficiency(g, 2.0) == pytest.approx(4.5 / 6, abs=1e-15)


def test_efficiency_bounds_and_complete_iff_one():
    for mask, g in all_graphs(5):
        w = efficiency(g)
        assert 0.0 <= w <= 1.0
        assert (w == 1.0) == (g.m == 10)


def test_weighted_reduces_to_unweighted_on_unit_weights():
    rng = np.random.default_rng(31)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
        g = build_graph(n, pairs)
        if g.m == 0:
            continue
        for g_exp in (1.0, 2.0):
            assert weighted_efficiency(g, EdgeWeights.uniform(g), g_exp) == pytest.approx(
                efficiency(g, g_exp), abs=1e-12
            )


def test_weighted_k2_normalization():
    g = build_graph(2, [(0, 1)])
    w = EdgeWeights.uniform(g, 2.0)
    # H = 2, both ordered distances 2: (2/2) * (0.5 + 0.5) = 1
    assert weighted_efficiency(g, w) == pytest.approx(1.0, abs=1e-15)


def test_weighted_empty_edge_set_is_zero():
    g = build_graph(3, [])
    assert weighted_efficiency(g, EdgeWeights(g, ())) == 0.0


def test_weighted_flags_path_inconsistent_weights():
    w = EdgeWeights.from_mapping(K3, {(0, 1): 10.0, (0, 2): 0.1, (1, 2): 0.1})
    with pytest.warns(UserWarning, match="exceeds 1"):
        val = weighted_efficiency(K3, w)
    assert val > 1.0


def test_resilience_tau_zero_is_one():
    for g in (K3, build_graph(5, [(0, 1), (2, 3)])):
        assert resilience(g, CascadeParams(0.0)).mean == 1.0


def test_resilience_tau_one_connected_is_zero():
    est = resilience(K3, CascadeParams(1.0))
    assert est.mean == 0.0


def test_resilience_k3_exact_value():
    est = resilience(K3, CascadeParams(0.5))
    assert est.mean == pytest.approx(0.375, abs=1e-15)
    assert est.half_width_95 == 0.0


def test_resilience_mc_within_ci_of_exact():
    est = resilience(K3, CascadeParams(0.5), RunSeed(33), method="mc", target_half_width=0.1)
    assert abs(est.mean - 0.375) <= est.half_width_95 * 1.5 + 1e-12


def test_resilience_mc_needs_seed():
    with pytest.raises(ValueError):
        resilience(K3, CascadeParams(0.5), method="mc")


def test_resilience_degenerate_n():
    assert resilience(build_graph(1, []), CascadeParams(0.7)).mean == 1.0


def test_resilience_auto_switches_to_mc_on_big_graphs():
    g = build_graph(30, [(i, (i + 1) % 30) for i in range(30)])  # 30 edges > cap
    est = resilience(g, CascadeParams(0.3), RunSeed(34))
    assert est.reps >= 40


def test_fitness_examples():
    assert fitness(1.0, 0.0, 0.51) == pytest.approx(0.51, abs=1e-15)
    assert fitness(0.375, 5 / 6, 0.5) == pytest.approx(0.6041666666666666, abs=1e-12)
    assert fitness(0.9, 0.4, 0.0) == 0.4
    with pytest.raises(ValueError):
        fitness(0.5, 0.5, 1.2)


def test_fitness_params_validation():
    FitnessParams(0.51)
    with pytest.raises(ValueError):
        FitnessParams(-0.1)
    with pytest.raises(ValueError):
        FitnessParams(0.5, g_exp=-1.0)


def test_fitness_lipschitz_in_r():
    rng = np.random.default_rng(35)
    for _ in range(200):
        R, W = rng.random(2)
        r1, r2 = rng.random(2)
        assert abs(fitness(R, W, r1) - fitness(R, W, r2)) <= abs(r1 - r2) + 1e-15


def test_edge_addition_tradeoff_is_genuine():
    # adding an edge never lowers W and never raises exact R
    pairs = pair_list(4)
    for mask, g in all_graphs(4):
        w0 = efficiency(g)
        r0 = resilience(g, CascadeParams(0.6)).mean
        for i in range(len(pairs)):
            if not mask >> i & 1:
                g2 = graph_from_bitmask(4, mask | (1 << i))
                assert efficiency(g2) >= w0 - 1e-12
                assert resilience(g2, CascadeParams(0.6)).mean <= r0 + 1e-12
