"""Rankings, rank changes, homogeneity graph, and file emission.

All ranking and graph logic consumes exact values; the 2-decimal rounding
in emitted tables is presentation only, with full-precision values carried
in parallel ``*_exact`` columns.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .errors import IncompletePairCoverage, UnitSetMismatch
from .stats.results import CorrelationMatrix, PairwiseDecision

Number = Fraction | int | float


@dataclass(frozen=True)
class RankEntry:
    rank: int
    unit: str
    value: Number


@dataclass(frozen=True)
class Ranking:
    key: str
    entries: tuple[RankEntry, ...]

    def rank_of(self, unit: str) -> int:
        for entry in self.entries:
            if entry.unit == unit:
                return entry.rank
        raise KeyError(unit)

    def units(self) -> frozenset[str]:
        return frozenset(e.unit for e in self.entries)


def rank_units(rows: Sequence[object], key: str) -> Ranking:
    """Rank rows descending by the named attribute, ties broken by
    ascending unit name. Ranks run 1..n with no gaps."""
    decorated = sorted(
        ((getattr(row, key), row.unit) for row in rows),
        key=lambda pair: (-Fraction(pair[0]), pair[1]),
    )
    entries = tuple(
        RankEntry(rank=i, unit=unit, value=value)
        for i, (value, unit) in enumerate(decorated, start=1)
    )
    return Ranking(key=key, entries=entries)


def rank_change(a: Ranking, b: Ranking) -> list[tuple[str, int]]:
    """Per-unit rank delta between two rankings, in b's rank order.

    delta = rank in a - rank in b, so positive means the unit improved
    in b.
    """
    if a.units() != b.units():
        raise UnitSetMismatch(
            f"rankings cover different unit sets: "
            f"{sorted(a.units() ^ b.units())} differ"
        )
    rank_a = {e.unit: e.rank for e in a.entries}
    return [(e.unit, rank_a[e.unit] - e.rank) for e in b.entries]


# ---------------------------------------------------------------------------
# Homogeneity graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomogeneityGraph:
    """Units as vertices; an edge joins each pair whose impacts are NOT
    significantly different. Components are the homogeneous groups."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    density: float
    components: tuple[frozenset[str], ...]


def _connected_components(
    vertices: Sequence[str], edges: Iterable[tuple[str, str]]
) -> tuple[frozenset[str], ...]:
    parent = {v: v for v in vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, set[str]] = {}
    for v in vertices:
        groups.setdefault(find(v), set()).add(v)
    return tuple(
        sorted((frozenset(g) for g in groups.values()), key=lambda g: sorted(g)[0])
    )


def build_homogeneity_graph(decisions: Sequence[PairwiseDecision]) -> HomogeneityGraph:
    """Build the graph from a complete set of pairwise decisions."""
    vertices = tuple(sorted({d.unit_i for d in decisions} | {d.unit_j for d in decisions}))
    covered = {tuple(sorted((d.unit_i, d.unit_j))) for d in decisions}
    expected = set(combinations(vertices, 2))
    if covered != expected:
        missing = sorted(expected - covered)
        raise IncompletePairCoverage(f"missing pairs: {missing[:5]}")
    edges = frozenset(
        tuple(sorted((d.unit_i, d.unit_j))) for d in decisions if not d.significant
    )
    n = len(vertices)
    density = len(edges) / (n * (n - 1) / 2) if n > 1 else 0.0
    return HomogeneityGraph(
        vertices=vertices,
        edges=edges,
        density=density,
        components=_connected_components(vertices, edges),
    )


def emit_graph_dot(graph: HomogeneityGraph) -> str:
    """Undirected DOT output; vertices and edges in sorted order."""
    lines = [
        f"// density {graph.density:.6f}",
        f"// components {len(graph.components)}",
        "graph homogeneity {",
    ]
    for v in graph.vertices:
        lines.append(f'  "{v}";')
    for a, b in sorted(graph.edges):
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def _display(value: Number, integer: bool = False) -> str:
    if integer:
        return str(int(value))
    return f"{float(value):.2f}"


def _exact(value: Number) -> str:
    return f"{float(value):.12g}"


def format_aggregates_csv(rows: Sequence[object], keys: Sequence[tuple[str, bool]]) -> str:
    """Aggregate table CSV: per key a display column plus an `_exact` one.

    `keys` lists (attribute, is_integer) pairs in emission order.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["unit", "P"]
    for key, _ in keys:
        header += [key, f"{key}_exact"]
    writer.writerow(header)
    for row in rows:
        out = [row.unit, str(row.p)]
        for key, integer in keys:
            value = getattr(row, key)
            out += [_display(value, integer), _exact(value)]
        writer.writerow(out)
    return buf.getvalue()


def format_ranking_csv(ranking: Ranking) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rank", "unit", ranking.key, f"{ranking.key}_exact"])
    for e in ranking.entries:
        writer.writerow([e.rank, e.unit, _display(e.value), _exact(e.value)])
    return buf.getvalue()


def format_rank_changes_csv(
    changes: Sequence[tuple[str, int]], from_key: str, to_key: str
) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["unit", f"delta_{from_key}_to_{to_key}"])
    for unit, delta in changes:
        writer.writerow([unit, f"{delta:+d}" if delta else "0"])
    return buf.getvalue()


def format_correlation_csv(matrix: CorrelationMatrix) -> str:
    """Long-format matrix CSV, each cell tagged with its triangle."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row", "col", "triangle", "value", "p_value", "stars"])
    m = len(matrix.labels)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            if i > j:  # lower triangle: Pearson
                method, value, p = "pearson", matrix.pearson[i, j], matrix.pearson_p[i, j]
            else:  # upper triangle: Spearman
                method, value, p = "spearman", matrix.spearman[i, j], matrix.spearman_p[i, j]
            writer.writerow(
                [
                    matrix.labels[i],
                    matrix.labels[j],
                    method,
                    f"{value:.6f}",
                    f"{p:.6f}",
                    "*" * matrix.stars(i, j, method),
                ]
            )
    return buf.getvalue()


def format_decisions_csv(decisions: Sequence[PairwiseDecision]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["unit_i", "unit_j", "mean_diff", "critical_diff", "significant"])
    for d in sorted(decisions, key=lambda d: (d.unit_i, d.unit_j)):
        writer.writerow(
            [
                d.unit_i,
                d.unit_j,
                f"{d.mean_diff:.12g}",
                f"{d.critical_diff:.12g}",
                str(d.significant).lower(),
            ]
        )
    return buf.getvalue()


def write_text(path: Path, content: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
    return path
