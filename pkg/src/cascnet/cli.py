"""Command-line surface: design sweeps, Pareto frontiers, sensitivity, and
analysis of user-supplied networks.

Every subcommand requires --seed; the seed is echoed into each output file
so results can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import io as netio
from . import optimize
from .designs import ALL_DESIGNS, CYCLES, STARS
from .io import EdgeListError
from .seeding import RunSeed

DEFAULT_TAU_GRID = [round(0.05 * i, 2) for i in range(21)]
DEFAULT_R_SET = (0.25, 0.49, 0.51, 0.75)


def _parse_floats(text: str) -> list[float]:
    if ":" in text:
        lo, hi, step = (float(t) for t in text.split(":"))
        values = []
        v = lo
        while v <= hi + 1e-12:
            values.append(round(v, 10))
            v += step
        return values
    return [float(t) for t in text.split(",") if t.strip()]


def _parse_designs(text: str) -> list[str]:
    names = [t.strip().lower() for t in text.split(",") if t.strip()]
    for name in names:
        if name not in ALL_DESIGNS:
            raise ValueError(f"unknown design {name!r}; choose from {', '.join(ALL_DESIGNS)}")
    return names


def _add_common(parser: argparse.ArgumentParser, *, taus: bool = True) -> None:
    parser.add_argument("--seed", type=int, required=True, help="master seed (required)")
    parser.add_argument("--g", type=float, default=1.0, dest="g_exp",
                        help="connectivity attenuation exponent (default 1)")
    if taus:
        parser.add_argument("--tau-grid", type=_parse_floats, default=DEFAULT_TAU_GRID,
                            help="comma list or lo:hi:step (default 0:1:0.05)")
    parser.add_argument("--out", required=True, help="output CSV path (or directory for sweeps)")
    parser.add_argument("--plot", action="store_true", help="also write a vector plot")
    parser.add_argument("--jobs", type=int, default=None, help="parallel evaluation processes")


def _add_design_opts(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--designs", type=_parse_designs, default=list(ALL_DESIGNS),
                        help="comma list of designs (default: all six)")
    parser.add_argument("--n", type=int, default=180, help="node count (default 180)")
    parser.add_argument("--ensemble", type=int, default=None,
                        help="override ensemble size per configuration")
    parser.add_argument("--method", choices=("mc", "analytic"), default="mc",
                        help="analytic closed forms apply to stars/cycles only")
    parser.add_argument("--half-width", type=float, default=0.5,
                        help="extent CI half-width target per estimate (default 0.5)")


def _curve_records(curve: list[optimize.CurvePoint]) -> list[dict]:
    return [
        {
            "tau": cp.tau,
            "fitness": cp.fitness,
            "k": cp.k if cp.k is not None else "",
            "p": cp.p if cp.p is not None else "",
            "R": cp.R,
            "W": cp.W,
            "avg_degree": cp.avg_degree,
            "ci": cp.fitness_ci,
        }
        for cp in curve
    ]


def _cmd_design_sweep(args) -> int:
    seed = RunSeed(args.seed)
    r_values = args.r
    os.makedirs(args.out, exist_ok=True)
    for design in args.designs:
        method = args.method
        if method == "analytic" and design not in (STARS, CYCLES):
            raise ValueError(f"analytic method is not available for design {design!r}")
        surfaces = optimize.evaluate_surfaces(
            design, args.tau_grid, args.g_exp, seed, n=args.n,
            ensemble_size=args.ensemble, target_half_width=args.half_width,
            n_jobs=args.jobs, method=method,
        )
        for r in r_values:
            curve = optimize.fitness_curve(
                design, args.tau_grid, r, args.g_exp, seed, n=args.n,
                ensemble_size=args.ensemble, target_half_width=args.half_width,
                n_jobs=args.jobs, method=method, surfaces=surfaces,
            )
            path = os.path.join(args.out, f"sweep_{design}_r{r:g}.csv")
            netio.emit_csv(
                _curve_records(curve),
                ["tau", "fitness", "k", "p", "R", "W", "avg_degree", "ci"],
                path, master_seed=args.seed,
            )
            print(f"wrote {path}")
            if args.plot:
                plot_path = os.path.splitext(path)[0] + ".pdf"
                netio.emit_plot(
                    [cp.tau for cp in curve],
                    {
                        "fitness": [cp.fitness for cp in curve],
                        "R": [cp.R for cp in curve],
                        "W": [cp.W for cp in curve],
                    },
                    plot_path,
                    title=f"{design} (r={r:g})",
                )
                print(f"wrote {plot_path}")
    return 0


def _cmd_pareto(args) -> int:
    seed = RunSeed(args.seed)
    records = []
    for design in args.designs:
        surfaces = optimize.evaluate_surfaces(
            design, (args.tau,), args.g_exp, seed, n=args.n,
            ensemble_size=args.ensemble, target_half_width=args.half_width,
            n_jobs=args.jobs, method=args.method if design in (STARS, CYCLES) else "mc",
        )
        frontier = optimize.pareto_frontier(surfaces[args.tau], args.epsilon)
        for pp in frontier:
            records.append(
                {
                    "R": pp.R,
                    "W": pp.W,
                    "design": pp.config.design,
                    "k": pp.config.k if pp.config.k is not None else "",
                    "p": pp.config.p if pp.config.p is not None else "",
                }
            )
    netio.emit_csv(records, ["R", "W", "design", "k", "p"], args.out, master_seed=args.seed)
    print(f"wrote {args.out}")
    return 0


def _cmd_sensitivity(args) -> int:
    seed = RunSeed(args.seed)
    records = []
    for design in args.designs:
        surfaces = optimize.evaluate_surfaces(
            design, args.tau_grid, args.g_exp, seed, n=args.n,
            ensemble_size=args.ensemble, target_half_width=args.half_width,
            n_jobs=args.jobs, method=args.method if design in (STARS, CYCLES) else "mc",
        )
        for tau in args.tau_grid:
            report = optimize.sensitivity(surfaces[float(tau)], args.r)
            records.append(
                {
                    "tau": tau,
                    "design": design,
                    "r": args.r,
                    "sd_k": report.sd_k if report.sd_k is not None else "",
                    "sd_p": report.sd_p if report.sd_p is not None else "",
                    "sd_R": report.sd_R,
                    "sd_W": report.sd_W,
                    "n_selected": report.n_selected,
                }
            )
    netio.emit_csv(
        records,
        ["tau", "design", "r", "sd_k", "sd_p", "sd_R", "sd_W", "n_selected"],
        args.out, master_seed=args.seed,
    )
    print(f"wrote {args.out}")
    return 0


def _load_network(args) -> netio.LabeledNetwork:
    with open(args.input) as fh:
        net = netio.parse_edge_list(fh)
    print(f"parsed {args.input}: {net.summary()}")
    if args.expect:
        nodes, edges = (int(t) for t in args.expect.split(","))
        netio.validate_counts(net, nodes, edges)
    if args.expect_known:
        name = args.expect_known
        if name not in netio.KNOWN_NETWORK_SIZES:
            raise ValueError(
                f"unknown dataset {name!r}; known: {', '.join(netio.KNOWN_NETWORK_SIZES)}"
            )
        netio.validate_counts(net, *netio.KNOWN_NETWORK_SIZES[name])
    if args.roles:
        with open(args.roles) as fh:
            roles = netio.parse_roles(fh)
        weights = netio.map_hijacker_weights(net, roles)
        net = netio.LabeledNetwork(net.graph, net.labels, weights, roles)
    elif args.multiplicities:
        if net.weights is None:
            raise ValueError("--weights-are-multiplicities needs a weighted edge list")
        weights = netio.map_multiplicity_weights(net.graph, net.weights.values)
        net = netio.LabeledNetwork(net.graph, net.labels, weights)
    return net


def _analysis_records(rows: list[netio.AnalysisRow], weighted: bool) -> list[dict]:
    records = []
    for row in rows:
        rec = {
            "tau": row.tau,
            "R": row.R.mean,
            "R_ci": row.R.half_width_95,
            "W": row.W,
            "F": row.F,
            "F_ci": row.F_ci,
        }
        if weighted:
            rec.update(
                {
                    "R_weighted": row.R_weighted.mean if row.R_weighted else "",
                    "W_weighted": row.W_weighted,
                    "F_weighted": row.F_weighted,
                    "gap_F": row.gap_F,
                    "gap_W": row.gap_W,
                }
            )
        records.append(rec)
    return records


def _cmd_analyze(args) -> int:
    seed = RunSeed(args.seed)
    net = _load_network(args)
    rows = netio.analyze_network(net, args.tau_grid, args.r, args.g_exp, seed)
    weighted = net.weights is not None
    fields = ["tau", "R", "R_ci", "W", "F", "F_ci"]
    if weighted:
        fields += ["R_weighted", "W_weighted", "F_weighted", "gap_F", "gap_W"]
    netio.emit_csv(_analysis_records(rows, weighted), fields, args.out, master_seed=args.seed)
    print(f"wrote {args.out}")
    if args.plot:
        series = {"F": [row.F for row in rows]}
        if weighted:
            series["F_weighted"] = [row.F_weighted for row in rows]
        plot_path = os.path.splitext(args.out)[0] + ".pdf"
        netio.emit_plot([row.tau for row in rows], series, plot_path, title="network fitness")
        print(f"wrote {plot_path}")
    return 0


def _cmd_compare_weighted(args) -> int:
    seed = RunSeed(args.seed)
    net = _load_network(args)
    if net.weights is None:
        raise ValueError(
            "compare-weighted needs distance weights: a weighted edge list, "
            "--roles, or --weights-are-multiplicities"
        )
    rows = netio.analyze_network(net, args.tau_grid, args.r, args.g_exp, seed)
    records = [
        {
            "tau": row.tau,
            "F_binary": row.F,
            "F_weighted": row.F_weighted,
            "gap_F": row.gap_F,
            "W_binary": row.W,
            "W_weighted": row.W_weighted,
            "gap_W": row.gap_W,
            "R_binary": row.R.mean,
            "R_weighted": row.R_weighted.mean,
        }
        for row in rows
    ]
    netio.emit_csv(
        records,
        ["tau", "F_binary", "F_weighted", "gap_F", "W_binary", "W_weighted", "gap_W",
         "R_binary", "R_weighted"],
        args.out, master_seed=args.seed,
    )
    print(f"wrote {args.out}")
    max_gap_f = max(row.gap_F for row in rows)
    max_gap_w = max(row.gap_W for row in rows)
    print(f"max |F_binary - F_weighted| = {max_gap_f:.4f}; max |W gap| = {max_gap_w:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascnet",
        description="Construct, evaluate, and optimize cascade-resilient network designs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-sweep", help="best fitness per tau for each design")
    _add_common(p)
    _add_design_opts(p)
    p.add_argument("--r", type=_parse_floats, default=list(DEFAULT_R_SET),
                   help="comma list of resilience weights (default 0.25,0.49,0.51,0.75)")
    p.set_defaults(func=_cmd_design_sweep)

    p = sub.add_parser("pareto", help="epsilon-dominance Pareto frontier at one tau")
    _add_common(p, taus=False)
    _add_design_opts(p)
    p.add_argument("--tau", type=float, default=0.4, help="cascade probability (default 0.4)")
    p.add_argument("--epsilon", type=float, default=0.01,
                   help="epsilon-dominance radius (default 0.01)")
    p.set_defaults(func=_cmd_pareto)

    p = sub.add_parser("sensitivity", help="parameter spread over near-optimal configurations")
    _add_common(p)
    _add_design_opts(p)
    p.add_argument("--r", type=float, default=0.51, help="resilience weight (default 0.51)")
    p.set_defaults(func=_cmd_sensitivity)

    for name, helptext, func in (
        ("analyze", "metrics of a user-supplied network", _cmd_analyze),
        ("compare-weighted", "binary versus weighted metrics of a network",
         _cmd_compare_weighted),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        p.add_argument("--input", required=True, help="edge-list file")
        p.add_argument("--roles", default=None,
                       help="node role file ('label hijacker|facilitator')")
        p.add_argument("--weights-are-multiplicities", dest="multiplicities",
                       action="store_true",
                       help="treat edge weights as tie multiplicities Z, mapping D=2/Z")
        p.add_argument("--expect", default=None, help="assert 'nodes,edges' counts")
        p.add_argument("--expect-known", default=None,
                       help=f"assert a known dataset size: {', '.join(netio.KNOWN_NETWORK_SIZES)}")
        p.add_argument("--r", type=float, default=0.51, help="resilience weight (default 0.51)")
        p.set_defaults(func=func)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, EdgeListError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
