"""Grid-search optimization over design configurations.

A "surface" is the list of evaluated configurations of one design at one
cascade probability.  Surfaces cache ensemble means of resilience and
efficiency, so sweeping the trade-off weight r, extracting Pareto
frontiers, and sensitivity analysis all reuse the same evaluations — this
is also what makes the fitness maximum exactly 1-Lipschitz in r.
"""

from __future__ import annotations

import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cascade import CascadeParams
from .designs import (
    ALL_DESIGNS,
    CELL_DESIGNS,
    CONNECTED_CLIQUES,
    CONNECTED_STARS,
    P_DESIGNS,
    STARS,
    CYCLES,
    DesignConfig,
    analytic_cycles,
    analytic_stars,
    divisors,
    generate,
)
from .metrics import efficiency, fitness, resilience
from .seeding import RunSeed, label_code

#: Ensembles whose fitness coefficient of variation reaches this are flagged
#: as near a structural or percolation transition (flagged, never dropped).
CV_FLAG_THRESHOLD = 0.2

#: Adjacent-gridpoint fitness jump that triggers one bisection refinement.
REFINE_FITNESS_JUMP = 0.05

#: Extra small connectivities sampled to catch the percolation onset.
EXTRA_P_POINTS = (0.005, 0.01, 0.02)


@dataclass(frozen=True)
class SurfacePoint:
    """One evaluated configuration: ensemble statistics at a fixed tau."""

    config: DesignConfig
    tau: float
    g_exp: float
    member_R: tuple[float, ...]
    member_W: tuple[float, ...]
    member_R_hw: tuple[float, ...]
    avg_degree: float
    reps_total: int
    tolerance_met: bool
    method: str = "mc"

    @property
    def R_mean(self) -> float:
        return float(np.mean(self.member_R))

    @property
    def W_mean(self) -> float:
        return float(np.mean(self.member_W))

    @property
    def R_ci(self) -> float:
        """Propagated Monte Carlo half-width of the ensemble mean."""
        hw = np.asarray(self.member_R_hw)
        return float(np.sqrt(np.sum(hw**2)) / len(hw))

    def fitness_at(self, r: float) -> float:
        return fitness(self.R_mean, self.W_mean, r)

    def fitness_ci(self, r: float) -> float:
        return r * self.R_ci

    def cv_fitness(self, r: float) -> float:
        """Coefficient of variation of member fitness across the ensemble."""
        f = r * np.asarray(self.member_R) + (1.0 - r) * np.asarray(self.member_W)
        if len(f) < 2:
            return 0.0
        mean = float(np.mean(f))
        sd = float(np.sqrt(np.var(f, ddof=1)))
        if mean == 0.0:
            return 0.0 if sd == 0.0 else float("inf")
        return sd / abs(mean)

    def near_transition(self, r: float) -> bool:
        return self.cv_fitness(r) >= CV_FLAG_THRESHOLD


@dataclass(frozen=True)
class ParetoPoint:
    """A retained (resilience, efficiency) pair and the configuration behind it."""

    R: float
    W: float
    config: DesignConfig
    tau: float


@dataclass(frozen=True)
class SensitivityReport:
    """Spread of parameters and metrics over the near-optimal configurations."""

    sd_k: float | None
    sd_p: float | None
    sd_R: float
    sd_W: float
    n_selected: int
    singleton: bool
    fitness_threshold: float


@dataclass(frozen=True)
class CurvePoint:
    """Best configuration of a design at one cascade probability."""

    tau: float
    fitness: float
    k: int | None
    p: float | None
    R: float
    W: float
    avg_degree: float
    fitness_ci: float
    best: SurfacePoint


def default_k_grid(n: int) -> list[int]:
    return list(range(1, n + 1))


def default_p_grid() -> list[float]:
    base = [round(0.05 * i, 2) for i in range(21)]
    return sorted(set(base) | set(EXTRA_P_POINTS))


def _config_stream(seed: RunSeed, config: DesignConfig) -> RunSeed:
    """Stream keyed by the configuration, not by evaluation order."""
    p_code = 0 if config.p is None else round(config.p * 1_000_000)
    return seed.derive(
        label_code(config.design),
        config.n,
        config.k or 0,
        p_code,
        int(config.leader_wiring),
    )


def _tau_code(tau: float) -> int:
    return round(tau * 1_000_000)


#: Redraws per replication when inter-cell edges are averaged conditionally.
INNER_SAMPLES = 32


def _conditioning_edges(config: DesignConfig, graph) -> np.ndarray | None:
    """Inter-cell edge indices, when conditioning on them is worthwhile.

    For the connected designs a handful of bridges carry most of the extent
    variance, so redrawing them INNER_SAMPLES times per replication lets
    the stopping rule finish orders of magnitude sooner.  Skipped when the
    bridge count is large relative to the graph (small cells), where the
    inner loop would cost more than it saves.
    """
    if config.design not in (CONNECTED_CLIQUES, CONNECTED_STARS):
        return None
    iu, ju = graph.edge_arrays
    if graph.m == 0:
        return None
    inner = np.nonzero(iu // config.k != ju // config.k)[0].astype(np.int32)
    n_inner = len(inner)
    if n_inner == 0 or INNER_SAMPLES * (n_inner + graph.n) > 8 * graph.m:
        return None
    return inner


def evaluate_configuration(
    config: DesignConfig,
    tau: float,
    g_exp: float,
    seed: RunSeed,
    *,
    target_half_width: float = 0.5,
    seed_mode: str = "average",
) -> SurfacePoint:
    """Generate the ensemble and estimate (R, W) statistics at one tau."""
    return _evaluate_over_taus(
        config, (tau,), g_exp, seed, target_half_width=target_half_width, seed_mode=seed_mode
    )[0]


def _evaluate_over_taus(
    config: DesignConfig,
    taus: Sequence[float],
    g_exp: float,
    seed: RunSeed,
    *,
    target_half_width: float = 0.5,
    seed_mode: str = "average",
) -> list[SurfacePoint]:
    """Evaluate one configuration at several taus, reusing graphs and W."""
    stream = _config_stream(seed, config)
    members = []
    for i in range(config.resolved_ensemble_size):
        graph = generate(config, stream.derive(i, 0))
        members.append((i, graph, efficiency(graph, g_exp), _conditioning_edges(config, graph)))
    avg_degree = float(np.mean([2.0 * g.m / g.n for _, g, _, _ in members]))

    points = []
    for tau in taus:
        params = CascadeParams(tau)
        member_R: list[float] = []
        member_hw: list[float] = []
        reps_total = 0
        tol = True
        for i, graph, _, inner in members:
            est = resilience(
                graph,
                params,
                stream.derive(i, 1, _tau_code(tau)),
                method="mc",
                target_half_width=target_half_width,
                seed_mode=seed_mode,
                inner_edges=inner,
                inner_samples=INNER_SAMPLES,
            )
            member_R.append(est.mean)
            member_hw.append(est.half_width_95)
            reps_total += est.reps
            tol &= est.tolerance_met
        points.append(
            SurfacePoint(
                config=config,
                tau=float(tau),
                g_exp=float(g_exp),
                member_R=tuple(member_R),
                member_W=tuple(w for _, _, w, _ in members),
                member_R_hw=tuple(member_hw),
                avg_degree=avg_degree,
                reps_total=reps_total,
                tolerance_met=tol,
            )
        )
    return points


def _analytic_point(design: str, n: int, k: int, tau: float, g_exp: float) -> SurfacePoint:
    if design == STARS:
        r_val, w_val = analytic_stars(n, k, tau, g_exp)
        deg = 2.0 * (n - n / k if k > 1 else 0.0) / n
    elif design == CYCLES:
        r_val, w_val = analytic_cycles(n, k, tau, g_exp)
        deg = 2.0 if k >= 3 else (1.0 if k == 2 else 0.0)
    else:
        raise ValueError(f"no closed forms for design {design!r}")
    return SurfacePoint(
        config=DesignConfig(design, n=n, k=k, ensemble_size=1),
        tau=float(tau),
        g_exp=float(g_exp),
        member_R=(r_val,),
        member_W=(w_val,),
        member_R_hw=(0.0,),
        avg_degree=deg,
        reps_total=0,
        tolerance_met=True,
        method="analytic",
    )


def _worker_count(n_jobs: int | None) -> int:
    if n_jobs is None:
        n_jobs = int(os.environ.get("CASCNET_JOBS", "0")) or (os.cpu_count() or 1)
    return max(1, n_jobs)


def _eval_job(args) -> list[SurfacePoint]:
    config, taus, g_exp, master, path, hw, seed_mode = args
    seed = RunSeed(master, path)
    return _evaluate_over_taus(
        config, taus, g_exp, seed, target_half_width=hw, seed_mode=seed_mode
    )


def _run_jobs(jobs: list, n_jobs: int) -> list[list[SurfacePoint]]:
    if n_jobs <= 1 or len(jobs) <= 1:
        return [_eval_job(j) for j in jobs]
    ctx = multiprocessing.get_context("fork")
    chunk = max(1, len(jobs) // (8 * n_jobs))
    with ProcessPoolExecutor(max_workers=n_jobs, mp_context=ctx) as pool:
        return list(pool.map(_eval_job, jobs, chunksize=chunk))


def design_configurations(
    design: str,
    n: int = 180,
    *,
    k_values: Iterable[int] | None = None,
    p_values: Iterable[float] | None = None,
    ensemble_size: int | None = None,
    leader_wiring: bool = False,
) -> list[DesignConfig]:
    """The grid of configurations searched for one design."""
    if design not in ALL_DESIGNS:
        raise ValueError(f"unknown design {design!r}")
    ks: list[int | None]
    ps: list[float | None]
    ks = list(k_values) if k_values is not None else default_k_grid(n)
    if design not in CELL_DESIGNS:
        ks = [None]
    ps = list(p_values) if p_values is not None else default_p_grid()
    if design not in P_DESIGNS:
        ps = [None]
    return [
        DesignConfig(
            design,
            n=n,
            k=k,
            p=p,
            ensemble_size=ensemble_size,
            leader_wiring=leader_wiring if design in P_DESIGNS else False,
        )
        for k in ks
        for p in ps
    ]


def evaluate_surfaces(
    design: str,
    taus: Sequence[float],
    g_exp: float,
    seed: RunSeed,
    *,
    n: int = 180,
    configs: Sequence[DesignConfig] | None = None,
    ensemble_size: int | None = None,
    target_half_width: float = 0.5,
    seed_mode: str = "average",
    n_jobs: int | None = None,
    method: str = "mc",
) -> dict[float, list[SurfacePoint]]:
    """Evaluate a design's whole configuration grid at each tau.

    With ``method="analytic"`` (Stars/Cycles only) the closed forms replace
    simulation; the cell-size grid is then restricted to divisors of n,
    where the identical-cell derivation applies exactly.
    """
    if method == "analytic":
        if design not in (STARS, CYCLES):
            raise ValueError("analytic evaluation is available only for stars/cycles")
        ks = divisors(n)
        return {
            float(tau): [_analytic_point(design, n, k, tau, g_exp) for k in ks] for tau in taus
        }
    if configs is None:
        configs = design_configurations(design, n, ensemble_size=ensemble_size)
    jobs = [
        (cfg, tuple(float(t) for t in taus), g_exp, seed.master, seed.path,
         target_half_width, seed_mode)
        for cfg in configs
    ]
    results = _run_jobs(jobs, _worker_count(n_jobs))
    surfaces: dict[float, list[SurfacePoint]] = {float(t): [] for t in taus}
    for per_config in results:
        for point in per_config:
            surfaces[point.tau].append(point)
    for tau in surfaces:
        surfaces[tau].sort(key=_point_order)
    return surfaces


def _point_order(sp: SurfacePoint):
    return (sp.config.design, sp.config.k or 0, sp.config.p if sp.config.p is not None else -1.0)


def best_of(surface: Sequence[SurfacePoint], r: float) -> SurfacePoint:
    """Argmax of fitness with deterministic tie-breaking (lowest k, then p)."""
    if not surface:
        raise ValueError("cannot take the best of an empty surface")
    return min(
        surface,
        key=lambda sp: (
            -sp.fitness_at(r),
            sp.config.k or 0,
            sp.config.p if sp.config.p is not None else -1.0,
            sp.config.design,
        ),
    )


def refinement_candidates(surface: Sequence[SurfacePoint], r: float) -> list[DesignConfig]:
    """Midpoint-p configurations wherever adjacent fitness jumps sharply."""
    by_k: dict[int | None, list[SurfacePoint]] = {}
    for sp in surface:
        if sp.config.p is not None:
            by_k.setdefault(sp.config.k, []).append(sp)
    new_configs: list[DesignConfig] = []
    for pts in by_k.values():
        pts.sort(key=lambda sp: sp.config.p)
        for a, b in zip(pts, pts[1:]):
            if abs(a.fitness_at(r) - b.fitness_at(r)) > REFINE_FITNESS_JUMP:
                new_configs.append(
                    DesignConfig(
                        a.config.design,
                        n=a.config.n,
                        k=a.config.k,
                        p=(a.config.p + b.config.p) / 2.0,
                        ensemble_size=a.config.ensemble_size,
                        leader_wiring=a.config.leader_wiring,
                    )
                )
    return new_configs


def _refine_surface(
    surface: list[SurfacePoint],
    r: float,
    g_exp: float,
    seed: RunSeed,
    *,
    target_half_width: float,
    seed_mode: str,
    n_jobs: int | None,
) -> list[SurfacePoint]:
    """One bisection level on the p grid where fitness jumps sharply."""
    new_configs = refinement_candidates(surface, r)
    if not new_configs:
        return surface
    tau = surface[0].tau
    jobs = [
        (cfg, (tau,), g_exp, seed.master, seed.path, target_half_width, seed_mode)
        for cfg in new_configs
    ]
    extra = [p for per_config in _run_jobs(jobs, _worker_count(n_jobs)) for p in per_config]
    return sorted(surface + extra, key=_point_order)


def grid_search(
    design: str,
    tau: float,
    r: float,
    g_exp: float,
    seed: RunSeed,
    *,
    n: int = 180,
    ensemble_size: int | None = None,
    target_half_width: float = 0.5,
    seed_mode: str = "average",
    n_jobs: int | None = None,
    method: str = "mc",
    surface: list[SurfacePoint] | None = None,
) -> tuple[SurfacePoint, list[SurfacePoint]]:
    """Best configuration of a design at one tau, plus the whole surface.

    An already-evaluated ``surface`` may be passed in to reuse cached
    evaluations (refinement still runs against the requested r).
    """
    if surface is None:
        surface = evaluate_surfaces(
            design,
            (tau,),
            g_exp,
            seed,
            n=n,
            ensemble_size=ensemble_size,
            target_half_width=target_half_width,
            seed_mode=seed_mode,
            n_jobs=n_jobs,
            method=method,
        )[float(tau)]
    if method == "mc" and design in P_DESIGNS:
        surface = _refine_surface(
            surface,
            r,
            g_exp,
            seed,
            target_half_width=target_half_width,
            seed_mode=seed_mode,
            n_jobs=n_jobs,
        )
    return best_of(surface, r), surface


def fitness_curve(
    design: str,
    tau_grid: Sequence[float],
    r: float,
    g_exp: float,
    seed: RunSeed,
    *,
    n: int = 180,
    ensemble_size: int | None = None,
    target_half_width: float = 0.5,
    seed_mode: str = "average",
    n_jobs: int | None = None,
    method: str = "mc",
    surfaces: dict[float, list[SurfacePoint]] | None = None,
) -> list[CurvePoint]:
    """Best fitness and configuration of a design across a tau grid."""
    for tau in tau_grid:
        if not 0.0 <= tau <= 1.0:
            raise ValueError(f"tau values must be in [0, 1], got {tau}")
    if surfaces is None:
        surfaces = evaluate_surfaces(
            design,
            tuple(tau_grid),
            g_exp,
            seed,
            n=n,
            ensemble_size=ensemble_size,
            target_half_width=target_half_width,
            seed_mode=seed_mode,
            n_jobs=n_jobs,
            method=method,
        )
    curve = []
    for tau in tau_grid:
        best, _ = grid_search(
            design,
            float(tau),
            r,
            g_exp,
            seed,
            n=n,
            ensemble_size=ensemble_size,
            target_half_width=target_half_width,
            seed_mode=seed_mode,
            n_jobs=n_jobs,
            method=method,
            surface=list(surfaces[float(tau)]),
        )
        curve.append(
            CurvePoint(
                tau=float(tau),
                fitness=best.fitness_at(r),
                k=best.config.k,
                p=best.config.p,
                R=best.R_mean,
                W=best.W_mean,
                avg_degree=best.avg_degree,
                fitness_ci=best.fitness_ci(r),
                best=best,
            )
        )
    return curve


def pareto_frontier(surface: Sequence[SurfacePoint], epsilon: float) -> list[ParetoPoint]:
    """Epsilon-thinned Pareto frontier of (R, W), both maximized.

    Every surface point is epsilon-dominated by some retained point, and no
    retained point is epsilon-dominated by another.  The result does not
    depend on the input ordering.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not surface:
        return []
    pts = sorted(surface, key=lambda sp: (-sp.R_mean, -sp.W_mean, _point_order(sp)))
    nondominated: list[SurfacePoint] = []
    for sp in pts:
        if not any(
            (q.R_mean >= sp.R_mean and q.W_mean >= sp.W_mean)
            and (q.R_mean > sp.R_mean or q.W_mean > sp.W_mean)
            for q in pts
            if q is not sp
        ):
            nondominated.append(sp)
    kept: list[SurfacePoint] = []
    for sp in nondominated:
        if not any(
            q.R_mean >= sp.R_mean - epsilon and q.W_mean >= sp.W_mean - epsilon for q in kept
        ):
            kept.append(sp)
    return [ParetoPoint(sp.R_mean, sp.W_mean, sp.config, sp.tau) for sp in kept]


def sensitivity(
    surface: Sequence[SurfacePoint], r: float, quantile_frac: float = 0.95
) -> SensitivityReport:
    """Unbiased standard deviations over the near-optimal configuration set.

    Selects points whose fitness reaches ``quantile_frac`` of the surface
    maximum and reports the spread of k, p, R, and W within that set.
    """
    if not surface:
        raise ValueError("sensitivity needs a non-empty surface")
    best = max(sp.fitness_at(r) for sp in surface)
    threshold = quantile_frac * best
    top = [sp for sp in surface if sp.fitness_at(r) >= threshold]
    singleton = len(top) == 1

    def sd(values: list[float]) -> float:
        if len(values) < 2:
            return 0.0
        return float(np.sqrt(np.var(values, ddof=1)))

    ks = [float(sp.config.k) for sp in top if sp.config.k is not None]
    ps = [float(sp.config.p) for sp in top if sp.config.p is not None]
    return SensitivityReport(
        sd_k=sd(ks) if ks else None,
        sd_p=sd(ps) if ps else None,
        sd_R=sd([sp.R_mean for sp in top]),
        sd_W=sd([sp.W_mean for sp in top]),
        n_selected=len(top),
        singleton=singleton,
        fitness_threshold=threshold,
    )
