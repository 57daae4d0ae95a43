"""Shared test utilities: random corpora, brute-force counting oracle,
random query ASTs."""
from __future__ import annotations

import random
from fractions import Fraction

from citefrac.corpus import Corpus, PublicationRecord, build_corpus
from citefrac.counting import PaperImpact, Window
from citefrac import unitquery as uq

DOCTYPES = ["Article", "Review", "Proceedings Paper", "Editorial", "Letter"]


def random_corpus(rng: random.Random, max_records: int = 50) -> Corpus:
    n_cited = rng.randint(1, max(1, max_records // 2))
    n_citing = rng.randint(0, max_records - n_cited)
    cited = [
        PublicationRecord(
            id=f"C{i}",
            year=rng.randint(2004, 2006),
            doctype=rng.choice(DOCTYPES),
            addresses=tuple(
                f"Univ {rng.randint(0, 3)}, Dep {rng.choice('ABC')}, City"
                for _ in range(rng.randint(0, 2))
            ),
        )
        for i in range(n_cited)
    ]
    cited_ids = [r.id for r in cited]
    citing = []
    for j in range(n_citing):
        n_refs_internal = rng.randint(0, min(4, n_cited))
        cites = tuple(sorted(rng.sample(cited_ids, n_refs_internal)))
        # nrefs may exceed the internal reference count (external refs),
        # be absent, or be zero.
        style = rng.random()
        if style < 0.6:
            nrefs = len(cites) + rng.randint(0, 30)
        elif style < 0.8:
            nrefs = None
        else:
            nrefs = 0 if not cites else len(cites)
        citing.append(
            PublicationRecord(
                id=f"X{j}",
                year=rng.randint(2004, 2011),
                doctype=rng.choice(DOCTYPES),
                nrefs=nrefs,
                cited_ids=cites,
            )
        )
    return build_corpus(cited, citing)


def brute_force_scores(
    corpus: Corpus,
    window: Window,
    eligible_doctypes: frozenset[str],
    pub_years: frozenset[int] | None = None,
) -> dict[str, PaperImpact]:
    """Naive per-link reimplementation of the counting rules."""
    out: dict[str, PaperImpact] = {}
    for rec in corpus.cited.values():
        if rec.doctype not in eligible_doctypes:
            continue
        if pub_years is not None and rec.year not in pub_years:
            continue
        impact = PaperImpact(rec.id)
        for citing in corpus.citing.values():
            if citing.year < window.start or citing.year > window.end:
                continue
            k = citing.nrefs if citing.nrefs is not None else len(citing.cited_ids)
            for ref in citing.cited_ids:
                if ref == rec.id:
                    if k <= 0:
                        continue
                    impact.ic += 1
                    impact.fc += Fraction(1, k)
        out[rec.id] = impact
    return out


# -- random query ASTs ------------------------------------------------------

_WORDS = ["univ", "dep", "phys", "chem", "sch", "coll", "beijing", "china",
          "taiwan", "life", "sci", "engr", "tsinghua", "state"]


def _random_ad_node(rng: random.Random, depth: int) -> uq.Node:
    if depth <= 0 or rng.random() < 0.4:
        n = rng.randint(1, 3)
        return uq.Phrase(tuple(rng.choice(_WORDS) for _ in range(n)))
    ctor = rng.choice([uq.And, uq.Or, uq.Not, uq.Same])
    return ctor(_random_ad_node(rng, depth - 1), _random_ad_node(rng, depth - 1))


def random_ast(rng: random.Random, depth: int = 3) -> uq.Node:
    roll = rng.random()
    if roll < 0.25:
        return uq.YearEquals(rng.randint(1990, 2020))
    if roll < 0.55 or depth <= 0:
        return uq.FieldScope("ad", _random_ad_node(rng, rng.randint(0, 3)))
    ctor = rng.choice([uq.And, uq.Or, uq.Not])
    return ctor(random_ast(rng, depth - 1), random_ast(rng, depth - 1))


def random_record(rng: random.Random) -> PublicationRecord:
    addresses = tuple(
        ", ".join(
            " ".join(rng.choice(_WORDS) for _ in range(rng.randint(1, 3)))
            for _ in range(rng.randint(1, 3))
        )
        for _ in range(rng.randint(0, 3))
    )
    return PublicationRecord(
        id=f"R{rng.randint(0, 10**9)}",
        year=rng.randint(1990, 2020),
        addresses=addresses,
    )
