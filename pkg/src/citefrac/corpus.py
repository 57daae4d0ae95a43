"""Bibliographic data model and input/output formats.

Holds the publication record type, the parser for tagged flat-file exports,
the canonical line-delimited JSON interchange format, and the loader for
pre-aggregated indicator tables.
"""
from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable

from .errors import (
    DuplicateId,
    MalformedField,
    MissingId,
    NonNumericCell,
    NonPositiveP,
    ParseError,
    UnterminatedRecord,
)

# Canonical document-type labels. Anything else is kept verbatim as an
# "other" label, never rejected: citing-side records are not type-filtered.
ARTICLE = "Article"
REVIEW = "Review"
PROCEEDINGS_PAPER = "Proceedings Paper"
EVALUATED_DOCTYPES = frozenset({ARTICLE, REVIEW, PROCEEDINGS_PAPER})

_DOCTYPE_MAP = {
    "article": ARTICLE,
    "review": REVIEW,
    "proceedings paper": PROCEEDINGS_PAPER,
}


def normalize_doctype(label: str) -> str:
    """Map a raw document-type string onto its canonical label.

    Unknown labels are preserved as-is (stripped of surrounding space).
    """
    return _DOCTYPE_MAP.get(label.strip().lower(), label.strip())


@dataclass(frozen=True)
class PublicationRecord:
    """One bibliographic record, either cited-side, citing-side, or both."""

    id: str
    year: int
    doctype: str = ARTICLE
    addresses: tuple[str, ...] = ()
    nrefs: int | None = None
    cited_ids: tuple[str, ...] = ()
    doi: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")
        if self.year <= 0:
            raise ValueError(f"year must be positive, got {self.year}")
        if self.nrefs is not None and self.nrefs < 0:
            raise ValueError(f"nrefs must be >= 0, got {self.nrefs}")
        if len(set(self.cited_ids)) != len(self.cited_ids):
            raise ValueError("cited_ids contains duplicates")

    @property
    def reference_count(self) -> int:
        """The k of the fractional weight: nrefs when present, else the
        number of extracted references."""
        if self.nrefs is not None:
            return self.nrefs
        return len(self.cited_ids)


@dataclass(frozen=True)
class Corpus:
    """The evaluated (cited) set, its citing documents, and resolved links.

    Immutable after construction; safe to share across workers.
    """

    cited: dict[str, PublicationRecord]
    citing: dict[str, PublicationRecord]
    links: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for citing_id, cited_id in self.links:
            if citing_id not in self.citing:
                raise ValueError(f"link source {citing_id!r} not in citing set")
            if cited_id not in self.cited:
                raise ValueError(f"link target {cited_id!r} not in cited set")
        if len(set(self.links)) != len(self.links):
            raise ValueError("duplicate links")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.cited == other.cited
            and self.citing == other.citing
            and sorted(self.links) == sorted(other.links)
        )


def build_corpus(
    cited: Iterable[PublicationRecord], citing: Iterable[PublicationRecord]
) -> Corpus:
    """Assemble a corpus, materializing links from the citing records'
    reference lists restricted to ids present on the cited side.

    References pointing outside the corpus do not become links but still
    count toward a record's k.
    """
    cited_map: dict[str, PublicationRecord] = {}
    for rec in cited:
        if rec.id in cited_map:
            raise DuplicateId(f"duplicate cited id {rec.id!r}")
        cited_map[rec.id] = rec
    citing_map: dict[str, PublicationRecord] = {}
    for rec in citing:
        if rec.id in citing_map:
            raise DuplicateId(f"duplicate citing id {rec.id!r}")
        citing_map[rec.id] = rec
    links = tuple(
        (rec.id, ref)
        for rec in citing_map.values()
        for ref in rec.cited_ids
        if ref in cited_map
    )
    return Corpus(cited=cited_map, citing=citing_map, links=links)


# ---------------------------------------------------------------------------
# Tagged flat-file format (WoS-style export)
# ---------------------------------------------------------------------------

_TAG_RE = re.compile(r"^([A-Z][A-Z0-9]) (.*)$")
_DOI_SUFFIX_RE = re.compile(r"\bDOI (\S+?)\.?$")
_BRACKET_PREFIX_RE = re.compile(r"^\[[^\]]*\]\s*")


@dataclass
class TaggedParseResult:
    """Outcome of parsing a tagged file: accepted records plus per-record
    rejection errors (each error carries a line number)."""

    records: list[PublicationRecord] = field(default_factory=list)
    errors: list[ParseError] = field(default_factory=list)


def _split_addresses(c1_lines: list[str]) -> list[str]:
    addresses: list[str] = []
    for line in c1_lines:
        for segment in line.split(";"):
            segment = _BRACKET_PREFIX_RE.sub("", segment.strip()).strip()
            if segment:
                addresses.append(segment)
    return addresses


def _finish_record(
    fields: dict[str, list[str]], start_line: int
) -> PublicationRecord:
    def first(tag: str) -> str | None:
        values = fields.get(tag)
        return values[0] if values else None

    rec_id = first("UT") or first("DI")
    if not rec_id:
        raise MissingId("record has neither UT nor DI", start_line)

    py_raw = first("PY")
    if py_raw is None:
        raise MalformedField("record has no PY field", start_line)
    try:
        year = int(py_raw)
    except ValueError:
        raise MalformedField(f"non-integer PY {py_raw!r}", start_line) from None

    nrefs: int | None = None
    nr_raw = first("NR")
    if nr_raw is not None:
        try:
            nrefs = int(nr_raw)
        except ValueError:
            raise MalformedField(f"non-integer NR {nr_raw!r}", start_line) from None

    cited_ids: list[str] = []
    seen: set[str] = set()
    for cr_line in fields.get("CR", []):
        m = _DOI_SUFFIX_RE.search(cr_line)
        if m and m.group(1) not in seen:
            seen.add(m.group(1))
            cited_ids.append(m.group(1))

    return PublicationRecord(
        id=rec_id,
        year=year,
        doctype=normalize_doctype(first("DT") or ""),
        addresses=tuple(_split_addresses(fields.get("C1", []))),
        nrefs=nrefs,
        cited_ids=tuple(cited_ids),
        doi=first("DI"),
    )


def parse_tagged(stream: IO[str] | str) -> TaggedParseResult:
    """Parse a tagged flat file into publication records.

    Records are delimited by ``ER`` lines; each field starts with a
    two-letter tag in column 1 and may continue on indented lines. The file
    ends with ``EF``. Malformed records are rejected individually and
    reported in the result's error list.
    """
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream.read().splitlines()

    result = TaggedParseResult()
    fields: dict[str, list[str]] = {}
    current_tag: str | None = None
    start_line = 0
    in_record = False
    saw_ef = False

    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        stripped = raw.rstrip()
        if stripped == "EF":
            saw_ef = True
            break
        if stripped == "ER":
            if in_record:
                try:
                    result.records.append(_finish_record(fields, start_line))
                except ParseError as exc:
                    result.errors.append(exc)
            fields = {}
            current_tag = None
            in_record = False
            continue
        m = _TAG_RE.match(raw)
        if m:
            tag, value = m.group(1), m.group(2)
            if not in_record:
                in_record = True
                start_line = lineno
            # FN/VR and other file-header tags are harmless extras.
            fields.setdefault(tag, []).append(value)
            current_tag = tag
        elif raw[:1].isspace() and current_tag is not None:
            fields[current_tag].append(raw.strip())
        # Anything else (header prose) is ignored.

    if in_record and not saw_ef:
        result.errors.append(
            UnterminatedRecord("record not terminated by ER before EOF", start_line)
        )
    elif in_record:
        result.errors.append(
            UnterminatedRecord("record open at EF marker", start_line)
        )
    return result


# ---------------------------------------------------------------------------
# Canonical line-delimited JSON interchange format
# ---------------------------------------------------------------------------

_CANONICAL_FIELDS = ("id", "side", "year", "doctype", "addresses", "nrefs", "cites", "doi")
_SIDES = {"cited", "citing", "both"}


def load_canonical(stream: IO[str] | str) -> Corpus:
    """Load a corpus from the canonical one-JSON-object-per-line format.

    Unknown fields are ignored. References to ids outside the cited set do
    not become links (but still count toward k via ``cites`` length).
    """
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream.read().splitlines()

    cited: list[PublicationRecord] = []
    citing: list[PublicationRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
        side = obj.get("side")
        if side not in _SIDES:
            raise ParseError(f"invalid side {side!r}", lineno)
        rec_id = obj.get("id")
        if not rec_id:
            raise MissingId("missing id", lineno)
        if rec_id in seen:
            raise DuplicateId(f"duplicate id {rec_id!r} at line {lineno}")
        seen.add(rec_id)
        rec = PublicationRecord(
            id=rec_id,
            year=int(obj["year"]),
            doctype=obj.get("doctype") or ARTICLE,
            addresses=tuple(obj.get("addresses") or ()),
            nrefs=obj.get("nrefs"),
            cited_ids=tuple(obj.get("cites") or ()),
            doi=obj.get("doi"),
        )
        if side in ("cited", "both"):
            cited.append(rec)
        if side in ("citing", "both"):
            citing.append(rec)
    return build_corpus(cited, citing)


def write_canonical(corpus: Corpus) -> str:
    """Serialize a corpus to the canonical format; round-trip stable."""
    out_lines: list[str] = []
    all_ids = sorted(set(corpus.cited) | set(corpus.citing))
    for rec_id in all_ids:
        if rec_id in corpus.cited and rec_id in corpus.citing:
            side = "both"
            rec = corpus.cited[rec_id]
        elif rec_id in corpus.cited:
            side = "cited"
            rec = corpus.cited[rec_id]
        else:
            side = "citing"
            rec = corpus.citing[rec_id]
        obj = {
            "id": rec.id,
            "side": side,
            "year": rec.year,
            "doctype": rec.doctype,
            "addresses": list(rec.addresses),
            "nrefs": rec.nrefs,
            "cites": list(rec.cited_ids),
            "doi": rec.doi,
        }
        out_lines.append(json.dumps(obj, ensure_ascii=False))
    return "\n".join(out_lines) + ("\n" if out_lines else "")


# ---------------------------------------------------------------------------
# Pre-aggregated indicator tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AggregateRow:
    """Per-unit indicator row over the three- and five-year windows.

    Counts are stored exactly (Fraction) and the per-publication ratios are
    derived at full precision, never read from rounded display columns.
    """

    unit: str
    p: int
    ic3: Fraction
    fc3: Fraction
    ic5: Fraction
    fc5: Fraction

    @property
    def icp3(self) -> Fraction:
        return self.ic3 / self.p

    @property
    def fcp3(self) -> Fraction:
        return self.fc3 / self.p

    @property
    def icp5(self) -> Fraction:
        return self.ic5 / self.p

    @property
    def fcp5(self) -> Fraction:
        return self.fc5 / self.p


_AGGREGATE_COLUMNS = ("unit", "P", "IC3", "FC3", "IC5", "FC5")


def load_aggregate_table(stream: IO[str] | str) -> list[AggregateRow]:
    """Load a unit,P,IC3,FC3,IC5,FC5 CSV into aggregate rows."""
    if isinstance(stream, str):
        import io

        stream = io.StringIO(stream)
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or tuple(reader.fieldnames) != _AGGREGATE_COLUMNS:
        raise ParseError(
            f"expected header {','.join(_AGGREGATE_COLUMNS)}, "
            f"got {reader.fieldnames}",
            1,
        )
    rows: list[AggregateRow] = []
    for lineno, raw in enumerate(reader, start=2):
        try:
            p = int(raw["P"])
            counts = {c: Fraction(raw[c]) for c in ("IC3", "FC3", "IC5", "FC5")}
        except (ValueError, ZeroDivisionError):
            raise NonNumericCell(f"non-numeric cell in row {raw!r}", lineno) from None
        if p <= 0:
            raise NonPositiveP(f"P must be positive, got {p}", lineno)
        rows.append(
            AggregateRow(
                unit=raw["unit"],
                p=p,
                ic3=counts["IC3"],
                fc3=counts["FC3"],
                ic5=counts["IC5"],
                fc5=counts["FC5"],
            )
        )
    return rows
