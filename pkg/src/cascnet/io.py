"""Edge-list ingestion, weight-mapping transforms, and CSV/plot emission.

The edge-list format: one edge per non-comment line, either ``u v`` or
``u v w`` with whitespace-separated arbitrary string labels and a strictly
positive real weight; ``#`` starts a comment.  A file mixes weighted and
unweighted lines only by mistake, so that is rejected.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .cascade import CascadeParams, MetricEstimate
from .graphs import EdgeWeights, Graph, build_graph, canonical_edge
from .metrics import efficiency, fitness, resilience, weighted_efficiency
from .seeding import RunSeed

#: Published (nodes, edges) sizes used to sanity-check ingested datasets.
KNOWN_NETWORK_SIZES = {
    "9/11": (62, 152),
    "11M": (70, 240),
    "FTP": (174, 300),
    "CollabNet": (1589, 2742),
    "E-Mail": (1133, 5452),
    "Gnutella": (6301, 20777),
    "Internet-AS": (26475, 53381),
}

_ROLE_HIJACKER = "hijacker"
_ROLE_FACILITATOR = "facilitator"


@dataclass(frozen=True)
class LabeledNetwork:
    """A parsed network: dense graph plus the original node labels."""

    graph: Graph
    labels: tuple[str, ...]
    weights: EdgeWeights | None = None
    roles: Mapping[str, str] | None = None

    @property
    def label_to_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def summary(self) -> str:
        w = "weighted" if self.weights is not None else "binary"
        return f"{self.graph.n} nodes, {self.graph.m} edges ({w})"


class EdgeListError(ValueError):
    """Malformed edge-list input, with the offending line number."""


def parse_edge_list(stream: IO[str] | Iterable[str]) -> LabeledNetwork:
    """Parse an edge list into a deduplicated simple graph.

    Node labels keep their first-seen order; duplicate edges collapse
    (conflicting duplicate weights are an error, as are self-loops,
    nonpositive weights, and mixed weighted/unweighted lines).
    """
    labels: list[str] = []
    index: dict[str, int] = {}
    edge_weights: dict[tuple[int, int], float] = {}
    edges: list[tuple[int, int]] = []
    weighted: bool | None = None

    def node(label: str) -> int:
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise EdgeListError(
                f"line {lineno}: expected 'u v' or 'u v w', got {len(tokens)} fields"
            )
        has_weight = len(tokens) == 3
        if weighted is None:
            weighted = has_weight
        elif weighted != has_weight:
            raise EdgeListError(
                f"line {lineno}: mixed weighted and unweighted lines are not allowed"
            )
        if tokens[0] == tokens[1]:
            raise EdgeListError(f"line {lineno}: self-loop on node {tokens[0]!r}")
        u, v = node(tokens[0]), node(tokens[1])
        e = canonical_edge(u, v)
        w = None
        if has_weight:
            try:
                w = float(tokens[2])
            except ValueError:
                raise EdgeListError(f"line {lineno}: weight {tokens[2]!r} is not a number")
            if not w > 0:
                raise EdgeListError(f"line {lineno}: weight must be > 0, got {w}")
        if e in edge_weights:
            if weighted and edge_weights[e] != w:
                raise EdgeListError(
                    f"line {lineno}: duplicate edge {tokens[0]!r}-{tokens[1]!r} "
                    f"with conflicting weight"
                )
            continue
        edge_weights[e] = w if w is not None else 1.0
        edges.append(e)

    graph = build_graph(len(labels), edges)
    weights = None
    if weighted:
        weights = EdgeWeights.from_mapping(graph, {e: edge_weights[e] for e in graph.edges})
    return LabeledNetwork(graph=graph, labels=tuple(labels), weights=weights)


def format_edge_list(net: LabeledNetwork) -> str:
    """Render a network back to the edge-list format (round-trips parse)."""
    lines = []
    for i, (u, v) in enumerate(net.graph.edges):
        if net.weights is not None:
            lines.append(f"{net.labels[u]} {net.labels[v]} {net.weights.values[i]!r}")
        else:
            lines.append(f"{net.labels[u]} {net.labels[v]}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_roles(stream: IO[str] | Iterable[str]) -> dict[str, str]:
    """Parse 'label role' lines into a role map."""
    roles: dict[str, str] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListError(f"line {lineno}: expected 'label role'")
        roles[tokens[0]] = tokens[1].lower()
    return roles


def map_hijacker_weights(net: LabeledNetwork, roles: Mapping[str, str]) -> EdgeWeights:
    """Distance weights from operative roles: D = 2, 1, 0.5 for edges whose
    endpoints include zero, one, or two hijackers."""
    role_of: list[str] = []
    for label in net.labels:
        role = roles.get(label)
        if role is None:
            raise ValueError(f"node {label!r} has no role tag")
        role = role.lower()
        if role not in (_ROLE_HIJACKER, _ROLE_FACILITATOR):
            raise ValueError(
                f"node {label!r}: role must be 'hijacker' or 'facilitator', got {role!r}"
            )
        role_of.append(role)
    values = []
    for u, v in net.graph.edges:
        hijackers = (role_of[u] == _ROLE_HIJACKER) + (role_of[v] == _ROLE_HIJACKER)
        values.append({0: 2.0, 1: 1.0, 2: 0.5}[hijackers])
    return EdgeWeights(net.graph, tuple(values))


def map_multiplicity_weights(graph: Graph, multiplicities: Sequence[float]) -> EdgeWeights:
    """Distance weights D = 2/Z from positive integer tie multiplicities."""
    if len(multiplicities) != graph.m:
        raise ValueError(f"expected {graph.m} multiplicities, got {len(multiplicities)}")
    values = []
    for (u, v), z in zip(graph.edges, multiplicities):
        if z < 1 or z != int(z):
            raise ValueError(f"multiplicity must be a positive integer, got Z({u},{v})={z}")
        values.append(2.0 / int(z))
    return EdgeWeights(graph, tuple(values))


def validate_counts(net: LabeledNetwork, nodes: int, edges: int) -> None:
    if net.graph.n != nodes or net.graph.m != edges:
        raise ValueError(
            f"network has {net.graph.n} nodes / {net.graph.m} edges, "
            f"expected {nodes} / {edges}"
        )


@dataclass(frozen=True)
class AnalysisRow:
    """Metrics of one network at one cascade probability."""

    tau: float
    R: MetricEstimate
    W: float
    F: float
    F_ci: float
    R_weighted: MetricEstimate | None = None
    W_weighted: float | None = None
    F_weighted: float | None = None

    @property
    def gap_F(self) -> float | None:
        return None if self.F_weighted is None else abs(self.F - self.F_weighted)

    @property
    def gap_W(self) -> float | None:
        return None if self.W_weighted is None else abs(self.W - self.W_weighted)


def analyze_network(
    net: LabeledNetwork,
    tau_grid: Sequence[float],
    r: float,
    g_exp: float,
    seed: RunSeed,
    *,
    method: str = "auto",
    target_half_width: float = 0.5,
    include_weighted: bool = True,
) -> list[AnalysisRow]:
    """Per-tau resilience/efficiency/fitness table for a supplied network.

    When the network carries distance weights (and ``include_weighted``),
    each row also holds the weighted metrics and is suitable for the
    binary-versus-weighted comparison.
    """
    g = net.graph
    w_binary = efficiency(g, g_exp)
    weighted = include_weighted and net.weights is not None
    w_weighted = weighted_efficiency(g, net.weights, g_exp) if weighted else None

    rows = []
    for ti, tau in enumerate(tau_grid):
        est = resilience(
            g,
            CascadeParams(float(tau)),
            seed.derive(0, ti),
            method=method,
            target_half_width=target_half_width,
        )
        f_val = fitness(est.mean, w_binary, r)
        row_kwargs = {}
        if weighted:
            est_w = resilience(
                g,
                CascadeParams(float(tau), net.weights),
                seed.derive(1, ti),
                method=method,
                target_half_width=target_half_width,
            )
            row_kwargs = dict(
                R_weighted=est_w,
                W_weighted=w_weighted,
                F_weighted=fitness(est_w.mean, w_weighted, r),
            )
        rows.append(
            AnalysisRow(
                tau=float(tau),
                R=est,
                W=w_binary,
                F=f_val,
                F_ci=r * est.half_width_95,
                **row_kwargs,
            )
        )
    return rows


def emit_csv(
    records: Sequence[Mapping[str, object]],
    fieldnames: Sequence[str],
    path: str,
    master_seed: int | None = None,
) -> None:
    """Write records as CSV with a header row; refuses empty results.

    The master seed is echoed in a leading comment so every output is
    reproducible from the file alone.
    """
    if not records:
        raise ValueError("refusing to write an empty result set")
    with open(path, "w", newline="") as fh:
        if master_seed is not None:
            fh.write(f"# seed={master_seed}\n")
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), extrasaction="ignore")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: _fmt(rec.get(k)) for k in fieldnames})


def _fmt(value: object) -> object:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def read_csv(path: str) -> tuple[list[dict[str, str]], int | None]:
    """Read back an emitted CSV, returning rows and the recorded seed."""
    seed = None
    with open(path, newline="") as fh:
        first = fh.readline()
        if first.startswith("# seed="):
            seed = int(first.strip().split("=", 1)[1])
        else:
            fh.seek(0)
        rows = list(csv.DictReader(fh))
    return rows, seed


def emit_plot(
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    path: str,
    *,
    xlabel: str = "tau",
    ylabel: str = "value",
    title: str | None = None,
) -> None:
    """Line plot of one or more series against x, written as a vector image."""
    if not len(x) or not series:
        raise ValueError("refusing to plot an empty result set")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, ys in series.items():
        ax.plot(x, ys, marker="o", markersize=3, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
