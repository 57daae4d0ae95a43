"""Integer and fractional citation counting over citation windows.

Fractional counts accumulate exact rationals (one 1/k term per citing
link, k = reference-list length of the citing document), so results are
bit-identical regardless of summation order. Conversion to floating point
happens only at reporting and statistics boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .corpus import Corpus, EVALUATED_DOCTYPES, PublicationRecord
from .errors import UnknownUnit, ZeroReferences


@dataclass(frozen=True, order=True)
class Window:
    """Inclusive range of citing-publication years."""

    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"window start {self.start} > end {self.end}")

    def __contains__(self, year: int) -> bool:
        return self.start <= year <= self.end

    def label(self) -> str:
        return f"{self.start}-{self.end}"


@dataclass
class PaperImpact:
    """Citation tallies for one cited paper within a window."""

    paper_id: str
    ic: int = 0
    fc: Fraction = Fraction(0)


def resolve_k(citing: PublicationRecord) -> int:
    """The reference-list length of a citing document.

    `nrefs` is authoritative when present; otherwise the number of
    extracted references is used.
    """
    return citing.reference_count


def fractional_weight(citing: PublicationRecord) -> Fraction:
    """Weight 1/k contributed by each citation of this document."""
    k = resolve_k(citing)
    if k <= 0:
        raise ZeroReferences(
            f"citing record {citing.id!r} has no resolvable reference count"
        )
    return Fraction(1, k)


@dataclass
class ScoreSet:
    """Per-paper impacts plus the ids of citing documents skipped for
    having k = 0 (skip-and-warn policy)."""

    impacts: dict[str, PaperImpact]
    skipped_citing: list[str] = field(default_factory=list)


def paper_scores(
    corpus: Corpus,
    window: Window,
    eligible_doctypes: frozenset[str] = EVALUATED_DOCTYPES,
    pub_years: frozenset[int] | None = None,
    eligible_citing_doctypes: frozenset[str] | None = None,
) -> ScoreSet:
    """Count integer and fractional citations per cited paper.

    The cited side is filtered to `eligible_doctypes` and, when given, to
    `pub_years`. A citing link contributes iff the citing record's year
    falls in `window`. Citing documents are not type-filtered by default
    (`eligible_citing_doctypes=None` counts all of them). Papers with no
    in-window citations appear with ic = 0, fc = 0.
    """
    impacts: dict[str, PaperImpact] = {}
    for rec in corpus.cited.values():
        if rec.doctype not in eligible_doctypes:
            continue
        if pub_years is not None and rec.year not in pub_years:
            continue
        impacts[rec.id] = PaperImpact(rec.id)

    skipped: list[str] = []
    skipped_seen: set[str] = set()
    for citing_id, cited_id in corpus.links:
        if cited_id not in impacts:
            continue
        citing = corpus.citing[citing_id]
        if citing.year not in window:
            continue
        if (
            eligible_citing_doctypes is not None
            and citing.doctype not in eligible_citing_doctypes
        ):
            continue
        try:
            weight = fractional_weight(citing)
        except ZeroReferences:
            if citing_id not in skipped_seen:
                skipped_seen.add(citing_id)
                skipped.append(citing_id)
            continue
        impact = impacts[cited_id]
        impact.ic += 1
        impact.fc += weight
    skipped.sort()
    return ScoreSet(impacts=impacts, skipped_citing=skipped)


@dataclass(frozen=True)
class UnitAggregate:
    """Per-unit publication count and citation tallies for one window."""

    unit: str
    p: int
    ic: int
    fc: Fraction

    @property
    def icp(self) -> Fraction:
        return Fraction(self.ic, self.p)

    @property
    def fcp(self) -> Fraction:
        return self.fc / self.p


@dataclass
class AggregateResult:
    aggregates: list[UnitAggregate]
    skipped_units: list[tuple[str, int]]  # (unit, p) below the threshold


def aggregate_units(
    assignment: Mapping[str, frozenset[str]],
    scores: ScoreSet | Mapping[str, PaperImpact],
    min_pubs: int = 5,
) -> AggregateResult:
    """Sum per-paper impacts into unit rows.

    A paper assigned to several units contributes fully to each (whole
    counting at the unit level). Units with fewer than `min_pubs` assigned
    papers are excluded and listed separately.
    """
    impacts = scores.impacts if isinstance(scores, ScoreSet) else scores
    aggregates: list[UnitAggregate] = []
    skipped: list[tuple[str, int]] = []
    for unit in sorted(assignment):
        paper_ids = [pid for pid in assignment[unit] if pid in impacts]
        p = len(paper_ids)
        if p < min_pubs:
            skipped.append((unit, p))
            continue
        ic = sum(impacts[pid].ic for pid in paper_ids)
        fc = sum((impacts[pid].fc for pid in paper_ids), Fraction(0))
        aggregates.append(UnitAggregate(unit=unit, p=p, ic=ic, fc=fc))
    return AggregateResult(aggregates=aggregates, skipped_units=skipped)


def per_paper_samples(
    assignment: Mapping[str, frozenset[str]],
    scores: ScoreSet | Mapping[str, PaperImpact],
    unit: str,
) -> list[float]:
    """The unit's per-paper fractional citation values, zeros included.

    This is the sample fed to the significance battery; its length equals
    the unit's publication count.
    """
    if unit not in assignment:
        raise UnknownUnit(f"unit {unit!r} not in assignment")
    impacts = scores.impacts if isinstance(scores, ScoreSet) else scores
    return [
        float(impacts[pid].fc)
        for pid in sorted(assignment[unit])
        if pid in impacts
    ]


def export_scores_csv(
    scores: ScoreSet | Mapping[str, PaperImpact],
    assignment: Mapping[str, frozenset[str]],
) -> str:
    """Scores export: paper_id, unit, ic, fc_num, fc_den, fc_decimal."""
    impacts = scores.impacts if isinstance(scores, ScoreSet) else scores
    lines = ["paper_id,unit,ic,fc_num,fc_den,fc_decimal"]
    rows: list[tuple[str, str]] = []
    for unit in sorted(assignment):
        for pid in sorted(assignment[unit]):
            if pid in impacts:
                rows.append((pid, unit))
    for pid, unit in sorted(rows, key=lambda r: (r[1], r[0])):
        imp = impacts[pid]
        lines.append(
            f"{pid},{unit},{imp.ic},{imp.fc.numerator},{imp.fc.denominator},"
            f"{float(imp.fc):.12f}"
        )
    return "\n".join(lines) + "\n"
