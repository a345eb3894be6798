"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line with the measured quantities.

The Monte Carlo design sweeps (criteria 4-6) share one module-scoped
evaluation of the three random designs over the 21-point tau grid; with two
worker processes this is the bulk of the suite's runtime.
"""

import os
import time

import numpy as np
import pytest

from cascnet import (
    CascadeParams,
    DesignConfig,
    RunSeed,
    analytic_cycles,
    analytic_stars,
    analyze_network,
    efficiency,
    expected_extent_exact,
    fitness_curve,
    generate,
    grid_search,
    pareto_frontier,
    resilience,
    sensitivity,
)
from cascnet.io import LabeledNetwork, map_multiplicity_weights
from cascnet.graphs import build_graph
from cascnet.optimize import SurfacePoint, best_of, evaluate_surfaces
from cascnet.seeding import label_code
from conftest import all_graphs, is_connected_mask

MASTER = 20260809
TAU21 = tuple(round(0.05 * i, 2) for i in range(21))
TAU11 = TAU21[::2]
N_JOBS = min(os.cpu_count() or 1, 4)


def report(criterion, ok, detail):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


@pytest.fixture(scope="module")
def mc_sweeps():
    """Surfaces and r=0.51 best-fitness curves for ER and the connected designs."""
    seed = RunSeed(MASTER)
    out = {}
    for design in ("er", "connected-stars", "connected-cliques"):
        t0 = time.time()
        surfaces = evaluate_surfaces(design, TAU21, 1.0, seed, n=180, n_jobs=N_JOBS)
        curve = fitness_curve(
            design, TAU21, 0.51, 1.0, seed, n=180, surfaces=surfaces, n_jobs=N_JOBS
        )
        out[design] = (surfaces, curve)
        print(f"\n[mc_sweeps] {design}: 21-tau grid evaluated in {time.time() - t0:.0f}s")
    return out


def test_criterion_1_oracle_equivalence_k3():
    est = resilience(
        build_graph(3, [(0, 1), (0, 2), (1, 2)]),
        CascadeParams(0.5),
        RunSeed(MASTER).derive(1),
        method="mc",
    )
    ok = abs(est.mean - 0.375) <= est.half_width_95
    assert report(
        "1a",
        ok,
        f"K3 tau=0.5: MC R={est.mean:.4f} vs exact 0.375, ci={est.half_width_95:.4f}",
    )


def test_criterion_1_oracle_equivalence_all_small_graphs():
    """Coverage of the reported 95% CI against the enumeration oracle.

    Known shortfall: with the stopping rule's z-based interval, dense graphs
    at tau=0.9 very often yield 40 identical extents, a zero-width CI, and
    an automatic miss, and 40-replication normal intervals on skewed
    discrete extents undercover by a few percent across the board.  The
    93% aggregate is kept as stated and this test records the honest result.
    """
    taus = (0.1, 0.3, 0.5, 0.7, 0.9)
    seed = RunSeed(MASTER).derive(11)
    t0 = time.time()
    inside = total = zero_width_misses = 0
    for n in (2, 3, 4, 5):
        for mask, g in all_graphs(n):
            if not is_connected_mask(n, mask):
                continue
            for ti, tau in enumerate(taus):
                exact_R = 1.0 - expected_extent_exact(g, CascadeParams(tau)) / (n - 1)
                est = resilience(g, CascadeParams(tau), seed.derive(n, mask, ti), method="mc")
                total += 1
                if abs(est.mean - exact_R) <= est.half_width_95:
                    inside += 1
                elif est.half_width_95 == 0.0:
                    zero_width_misses += 1
    coverage = inside / total
    ok = coverage >= 0.93
    report(
        "1b",
        ok,
        f"{inside}/{total} within reported CI = {coverage:.4f} (target >= 0.93; "
        f"{zero_width_misses} misses had zero-width CIs from 40 identical extents) "
        f"[{time.time() - t0:.0f}s]",
    )
    assert ok, (
        f"coverage {coverage:.4f} < 0.93: the z-based 40-replication interval "
        "undercovers on small discrete extents; see notes in the decisions ledger"
    )


def test_criterion_2_analytic_agreement():
    seed = RunSeed(3000)
    taus = (0.25, 0.5, 0.75)
    worst_w = 0.0
    worst_z = 0.0
    w_single_star = None
    for design, closed_form in (("stars", analytic_stars), ("cycles", analytic_cycles)):
        for k in (2, 5, 30, 180):
            g = generate(DesignConfig(design, n=180, k=k), seed.derive(label_code(design), k))
            w_gap = abs(efficiency(g) - closed_form(180, k, 0.25)[1])
            worst_w = max(worst_w, w_gap)
            if design == "stars" and k == 180:
                w_single_star = efficiency(g)
            for ti, tau in enumerate(taus):
                est = resilience(
                    g,
                    CascadeParams(tau),
                    seed.derive(label_code(design), k, ti),
                    method="mc",
                )
                r_ref = closed_form(180, k, tau)[0]
                # Monte Carlo CI: the estimator guarantees +-0.5 new cases at
                # 95%, i.e. 0.5/(n-1) on R, and may report a narrower interval
                tol = max(est.half_width_95, 0.5 / 179)
                worst_z = max(worst_z, abs(est.mean - r_ref) / tol)
    ok_w = worst_w <= 1e-12 and abs(w_single_star - 91 / 180) <= 1e-12
    ok_r = worst_z <= 1.0
    assert report(
        "2",
        ok_w and ok_r,
        f"max |W - closed form| = {worst_w:.2e} (tol 1e-12), "
        f"W_stars(180,180,1) = {w_single_star!r} vs 91/180 = {91 / 180!r}, "
        f"worst R deviation = {worst_z:.2f} CI widths",
    )


def test_criterion_3_stars_threshold():
    seed = RunSeed(MASTER)
    low = [round(0.05 * i, 2) for i in range(1, 14)]  # 0.05 .. 0.65
    high = [round(0.05 * i, 2) for i in range(15, 21)]  # 0.75 .. 1.0
    t0 = time.time()
    k_low = {}
    k_high = {}
    for tau in low:
        best, _ = grid_search("stars", tau, 0.5, 1.0, seed, method="analytic")
        k_low[tau] = best.config.k
    for tau in high:
        best, _ = grid_search("stars", tau, 0.5, 1.0, seed, method="analytic")
        k_high[tau] = best.config.k
    ok = all(k == 180 for k in k_low.values()) and all(k <= 3 for k in k_high.values())
    assert report(
        "3",
        ok,
        f"k*=180 for tau<=0.65 (got {sorted(set(k_low.values()))}), "
        f"k*<=3 for tau>=0.75 (got {sorted(set(k_high.values()))}); threshold in "
        f"(0.65, 0.75) brackets 2^(-1/2)=0.707 [{time.time() - t0:.1f}s]",
    )


def test_criterion_4_monotonicity_analytic():
    seed = RunSeed(MASTER)
    ok = True
    detail = []
    for design in ("stars", "cycles"):
        curve = fitness_curve(design, TAU21, 0.51, 1.0, seed, method="analytic")
        values = [cp.fitness for cp in curve]
        mono = all(b <= a for a, b in zip(values, values[1:]))
        ok &= mono
        detail.append(f"{design} exactly nonincreasing: {mono}")
    assert report("4a", ok, "; ".join(detail))


def test_criterion_4_monotonicity_monte_carlo(mc_sweeps):
    ok = True
    detail = []
    for design in ("er", "connected-stars", "connected-cliques"):
        _, curve = mc_sweeps[design]
        worst = 0.0
        for a, b in zip(curve, curve[1:]):
            slack = 2.0 * (a.fitness_ci + b.fitness_ci)
            worst = max(worst, b.fitness - a.fitness - slack)
        mono = worst <= 0.0
        ok &= mono
        detail.append(f"{design}: max violation beyond 2x combined CI = {worst:.2e}")
    assert report("4b", ok, "; ".join(detail))


def test_criterion_5_lipschitz_in_r(mc_sweeps):
    surfaces, _ = mc_sweeps["connected-stars"]
    surface = surfaces[0.5]
    rng = np.random.default_rng(MASTER)
    worst = 0.0
    for _ in range(100):
        r1, r2 = rng.random(2)
        f1 = best_of(surface, r1).fitness_at(r1)
        f2 = best_of(surface, r2).fitness_at(r2)
        worst = max(worst, abs(f1 - f2) - abs(r1 - r2))
    ok = worst <= 0.0
    assert report(
        "5", ok, f"100 random (r1, r2) pairs on the cached tau=0.5 surface; "
        f"max |f(r1)-f(r2)| - |r1-r2| = {worst:.2e}"
    )


def test_criterion_6_connected_stars_dominate_er(mc_sweeps):
    _, er_curve = mc_sweeps["er"]
    _, cs_curve = mc_sweeps["connected-stars"]
    er_by_tau = {cp.tau: cp for cp in er_curve}
    cs_by_tau = {cp.tau: cp for cp in cs_curve}
    ok = True
    rows = []
    for tau in TAU11:
        er_cp = er_by_tau[tau]
        cs_cp = cs_by_tau[tau]
        margin = cs_cp.fitness - er_cp.fitness
        slack = cs_cp.fitness_ci + er_cp.fitness_ci
        interior = 0.0 < tau < 1.0
        if interior and margin < slack:
            ok = False
        rows.append(f"tau={tau}: CS-ER={margin:+.4f} (ci {slack:.4f})")
    assert report(
        "6",
        ok,
        "CS >= ER with combined-CI slack at all interior tau; endpoints reported only. "
        + " | ".join(rows),
    )


def test_criterion_7_density_phase_transition():
    seed = RunSeed(MASTER)
    t0 = time.time()
    surfaces = evaluate_surfaces(
        "cliques", (0.9,), 1.0, seed, n=180, n_jobs=N_JOBS, target_half_width=0.05
    )
    surface = surfaces[0.9]
    dense = best_of(surface, 0.49)
    sparse = best_of(surface, 0.51)
    ok = dense.avg_degree == 179.0 and sparse.avg_degree < 10.0
    assert report(
        "7",
        ok,
        f"cliques at tau=0.9: r=0.49 -> k={dense.config.k} (avg degree "
        f"{dense.avg_degree:.0f}), r=0.51 -> k={sparse.config.k} (avg degree "
        f"{sparse.avg_degree:.2f}) [{time.time() - t0:.0f}s]",
    )


def _synthetic_point(design, n, k, p, R, W):
    return SurfacePoint(
        config=DesignConfig(design, n=n, k=k, p=p, ensemble_size=1),
        tau=0.4,
        g_exp=1.0,
        member_R=(R,),
        member_W=(W,),
        member_R_hw=(0.0,),
        avg_degree=0.0,
        reps_total=40,
        tolerance_met=True,
    )


def test_criterion_8_pareto_and_sensitivity_plumbing():
    pts = [
        _synthetic_point("connected-stars", 20, 2, 0.1, 0.90, 0.10),
        _synthetic_point("connected-stars", 20, 4, 0.2, 0.50, 0.60),
        _synthetic_point("connected-stars", 20, 5, 0.3, 0.45, 0.55),  # dominated
    ]
    frontier = pareto_frontier(pts, 0.01)
    ok_pareto = len(frontier) == 2 and {(f.R, f.W) for f in frontier} == {
        (0.90, 0.10),
        (0.50, 0.60),
    }
    top_shared_k = [
        _synthetic_point("connected-stars", 20, 7, 0.1, 0.90, 0.50),
        _synthetic_point("connected-stars", 20, 7, 0.2, 0.88, 0.52),
        _synthetic_point("connected-stars", 20, 2, 0.3, 0.10, 0.10),
    ]
    rep = sensitivity(top_shared_k, 0.5)
    ok_sens = rep.sd_k == 0.0 and rep.n_selected == 2
    assert report(
        "8",
        ok_pareto and ok_sens,
        f"3-point frontier keeps exactly the 2 non-dominated points: {ok_pareto}; "
        f"top-5% sharing k gives std(k)={rep.sd_k}",
    )


def test_criterion_9_weighted_vs_binary_report():
    # Synthetic surrogate: clique cells with sparse bridges and integer tie
    # multiplicities Z in {1..4}, mapped to distances D = 2/Z.  Real datasets
    # are not bundled, so the gap bounds are reported, not asserted.
    rng = np.random.default_rng(MASTER)
    g = generate(DesignConfig("connected-cliques", n=60, k=6, p=0.4), RunSeed(MASTER).derive(9))
    mult = rng.integers(1, 5, g.m)
    weights = map_multiplicity_weights(g, [int(z) for z in mult])
    net = LabeledNetwork(graph=g, labels=tuple(str(v) for v in range(g.n)), weights=weights)
    taus = tuple(round(0.1 * i, 1) for i in range(11))
    rows = analyze_network(net, taus, 0.51, 1.0, RunSeed(MASTER).derive(10))
    gap_f = max(row.gap_F for row in rows)
    gap_w = max(row.gap_W for row in rows)
    ok = all(
        row.F_weighted is not None and np.isfinite(row.gap_F) and np.isfinite(row.gap_W)
        for row in rows
    )
    assert report(
        "9",
        ok,
        f"synthetic 11M-style surrogate (60 nodes, {g.m} edges): per-tau gaps computed; "
        f"max |F_bin - F_wt| = {gap_f:.3f}, max |W gap| = {gap_w:.3f} "
        f"(<=0.15 / <=0.05 bounds apply to the genuine datasets, which are not bundled)",
    )
