"""Rankings, TREC run files, external score intake, and pair export.

A Run is the universal exchange format: every scoring route (BM25 over
full texts, BM25 over summaries, an external model, the label oracle)
produces one, and evaluation consumes only Runs.  A query that also
appears in some candidate pool is never scored as its own candidate.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .corpus import Corpus, QueryRecord
from .textproc import estimate_subword_count, token_spans, tokenize_words
from .validation import check_finite, check_identifier

# Transformer-style pair encoding: one leading marker plus two separators.
MAX_SEQUENCE_SLOTS = 512
CONTROL_MARKER_SLOTS = 3

_WHITESPACE_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class PairScore:
    """Model output for one (query, candidate) pair; higher is better."""

    query_id: str
    doc_id: str
    score: float

    def __post_init__(self) -> None:
        check_identifier("query_id", self.query_id)
        check_identifier("doc_id", self.doc_id)
        check_finite("score", self.score)


class RankedDoc(NamedTuple):
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class Run:
    """Per-query rankings with contiguous ranks and non-increasing scores."""

    tag: str
    rankings: Mapping[str, tuple[RankedDoc, ...]]

    def __post_init__(self) -> None:
        check_identifier("tag", self.tag)
        for query_id, ranking in self.rankings.items():
            check_identifier("query_id", query_id)
            if not ranking:
                raise ValueError(f"query {query_id!r} has an empty ranking")
            seen = set()
            for position, entry in enumerate(ranking, 1):
                if entry.rank != position:
                    raise ValueError(
                        f"query {query_id!r}: rank {entry.rank} at position {position}"
                    )
                if entry.doc_id in seen:
                    raise ValueError(
                        f"query {query_id!r}: duplicate doc {entry.doc_id!r}"
                    )
                seen.add(entry.doc_id)
                if position > 1 and entry.score > ranking[position - 2].score:
                    raise ValueError(
                        f"query {query_id!r}: scores increase at rank {position}"
                    )

    def query_ids(self) -> list[str]:
        return sorted(self.rankings)

    def ranked_ids(self, query_id: str) -> list[str]:
        return [entry.doc_id for entry in self.rankings[query_id]]


@dataclass(frozen=True)
class PairInput:
    """Token-level view of one encoded (query, candidate) pair."""

    query_tokens: tuple[str, ...]
    candidate_tokens: tuple[str, ...]
    truncated: bool
    estimated_length: int


def candidate_token_budget(query_word_count: int) -> int:
    """Largest candidate word count whose pair encoding still fits.

    The pair must satisfy estimate(query + candidate) + markers <= 512.
    Raises when the query alone overflows the budget.
    """
    if estimate_subword_count(query_word_count) + CONTROL_MARKER_SLOTS > MAX_SEQUENCE_SLOTS:
        raise ValueError(
            f"query summary of {query_word_count} words cannot fit the "
            f"{MAX_SEQUENCE_SLOTS}-slot pair budget; lower the summary word budget"
        )
    budget = 0
    while (
        estimate_subword_count(query_word_count + budget + 1) + CONTROL_MARKER_SLOTS
        <= MAX_SEQUENCE_SLOTS
    ):
        budget += 1
    return budget


def build_pair_sequence(query_summary, candidate_summary) -> PairInput:
    """Assemble the token pair fed to a sequence classifier.

    Both arguments are Summary objects.  The query side is kept whole; the
    candidate tail is dropped until the estimated subword length of the
    pair, plus control markers, fits the sequence budget.
    """
    query_tokens = tokenize_words(query_summary.text).tokens
    candidate_tokens = tokenize_words(candidate_summary.text).tokens
    budget = candidate_token_budget(len(query_tokens))
    keep = min(len(candidate_tokens), budget)
    estimated = (
        estimate_subword_count(len(query_tokens) + keep) + CONTROL_MARKER_SLOTS
    )
    return PairInput(
        query_tokens,
        candidate_tokens[:keep],
        keep < len(candidate_tokens),
        estimated,
    )


def _pool_without_self(query: QueryRecord) -> list[str]:
    return [doc_id for doc_id in query.candidate_ids if doc_id != query.query_id]


def rank_candidates(
    scores: Iterable[PairScore], queries: Sequence[QueryRecord], tag: str = "run"
) -> Run:
    """Order each query's pool by score, ties broken by ascending doc id.

    Exactly one score per (query, pool candidate) pair is required; the
    query itself is excluded from its own pool.
    """
    by_query: dict[str, dict[str, float]] = {}
    for pair in scores:
        table = by_query.setdefault(pair.query_id, {})
        if pair.doc_id in table:
            raise ValueError(f"duplicate score for ({pair.query_id}, {pair.doc_id})")
        table[pair.doc_id] = pair.score

    known = {query.query_id for query in queries}
    stray = sorted(set(by_query) - known)
    if stray:
        raise ValueError(f"scores mention unknown query {stray[0]!r}")

    rankings = {}
    for query in queries:
        table = by_query.get(query.query_id, {})
        pool = _pool_without_self(query)
        missing = [doc_id for doc_id in pool if doc_id not in table]
        if missing:
            raise ValueError(
                f"query {query.query_id!r}: missing scores for {len(missing)} "
                f"candidates (first: {missing[0]!r})"
            )
        extra = sorted(set(table) - set(pool))
        if extra:
            raise ValueError(
                f"query {query.query_id!r}: score for non-pool doc {extra[0]!r}"
            )
        ordered = sorted(pool, key=lambda doc_id: (-table[doc_id], doc_id))
        rankings[query.query_id] = tuple(
            RankedDoc(doc_id, table[doc_id], rank)
            for rank, doc_id in enumerate(ordered, 1)
        )
    return Run(tag, rankings)


def load_external_scores(path: str | Path, corpus: Corpus) -> list[PairScore]:
    """Read ``query_id<TAB>doc_id<TAB>score`` lines from an external model.

    The file must cover every (query, pool candidate) pair of the corpus
    exactly once with finite scores; anything else is rejected with the
    offending line or pair named.
    """
    path = Path(path)
    pools = {query.query_id: _pool_without_self(query) for query in corpus.queries}
    pool_sets = {query_id: set(pool) for query_id, pool in pools.items()}
    seen: set[tuple[str, str]] = set()
    scores = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'query_id<TAB>doc_id<TAB>score'")
        query_id, doc_id, raw = parts
        if query_id not in pool_sets:
            raise ValueError(f"{path}:{lineno}: unknown query {query_id!r}")
        if doc_id not in pool_sets[query_id]:
            raise ValueError(
                f"{path}:{lineno}: doc {doc_id!r} is not in the pool of query {query_id!r}"
            )
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: unparseable score {raw!r}") from None
        if not math.isfinite(value):
            raise ValueError(f"{path}:{lineno}: non-finite score {raw!r}")
        if (query_id, doc_id) in seen:
            raise ValueError(f"{path}:{lineno}: duplicate pair ({query_id}, {doc_id})")
        seen.add((query_id, doc_id))
        scores.append(PairScore(query_id, doc_id, value))

    for query_id, pool in pools.items():
        missing = [doc_id for doc_id in pool if (query_id, doc_id) not in seen]
        if missing:
            raise ValueError(
                f"{path}: query {query_id!r} is missing {len(missing)} scores "
                f"(first: {missing[0]!r})"
            )
    return scores


def perfect_ranking(corpus: Corpus, tag: str = "perfect") -> Run:
    """Label oracle: relevant candidates first, doc id order within blocks.

    Synthetic scores count down from pool size so the file format's
    non-increasing-score invariant holds.  Only judged queries appear.
    """
    if corpus.qrels is None:
        raise ValueError("perfect ranking requires relevance judgments")
    rankings = {}
    for query in corpus.queries:
        if not corpus.qrels.is_judged(query.query_id):
            continue
        relevant = corpus.qrels.relevant_ids(query.query_id)
        pool = _pool_without_self(query)
        ordered = sorted([d for d in pool if d in relevant]) + sorted(
            [d for d in pool if d not in relevant]
        )
        rankings[query.query_id] = tuple(
            RankedDoc(doc_id, float(len(ordered) - position), position + 1)
            for position, doc_id in enumerate(ordered)
        )
    return Run(tag, rankings)


def write_run(run: Run, path: str | Path) -> None:
    """Write the TREC run format: qid Q0 doc rank score tag."""
    lines = []
    for query_id in run.query_ids():
        for entry in run.rankings[query_id]:
            lines.append(
                f"{query_id} Q0 {entry.doc_id} {entry.rank} {entry.score!r} {run.tag}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_run(path: str | Path) -> Run:
    """Parse a TREC run file written by write_run (or compatible)."""
    path = Path(path)
    tag = None
    grouped: dict[str, list[RankedDoc]] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 'qid Q0 doc rank score tag'")
        query_id, _, doc_id, rank, score, line_tag = parts
        if tag is None:
            tag = line_tag
        elif line_tag != tag:
            raise ValueError(f"{path}:{lineno}: mixed run tags {tag!r} and {line_tag!r}")
        try:
            entry = RankedDoc(doc_id, float(score), int(rank))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad rank or score") from None
        grouped.setdefault(query_id, []).append(entry)
    if tag is None:
        raise ValueError(f"{path}: empty run file")
    rankings = {
        query_id: tuple(sorted(entries, key=lambda e: e.rank))
        for query_id, entries in grouped.items()
    }
    return Run(tag, rankings)


def _flatten(text: str) -> str:
    # Pair rows are one-per-line TSV; collapse all whitespace runs.
    return _WHITESPACE_RE.sub(" ", text).strip()


def export_pairs(
    corpus: Corpus, summaries: Mapping[str, str], path: str | Path
) -> int:
    """Write classifier training pairs, one per (query, pool candidate).

    Row format: query_id, doc_id, label, query summary, candidate summary,
    tab-separated.  The candidate summary is cut at the word boundary that
    keeps the estimated pair encoding inside the sequence budget.  Labels
    are 1/0 against the qrels (pool docs without a judgment count as 0) or
    empty when the corpus is unlabeled.
    """
    rows = []
    for query in corpus.queries:
        if query.query_id not in summaries:
            raise ValueError(f"no summary for query {query.query_id!r}")
        query_text = _flatten(summaries[query.query_id])
        budget = candidate_token_budget(tokenize_words(query_text).word_count)
        relevant = (
            corpus.qrels.relevant_ids(query.query_id)
            if corpus.qrels is not None and corpus.qrels.is_judged(query.query_id)
            else frozenset()
        )
        for doc_id in _pool_without_self(query):
            if doc_id not in summaries:
                raise ValueError(f"no summary for candidate {doc_id!r}")
            candidate_text = _flatten(summaries[doc_id])
            spans = token_spans(candidate_text)
            if len(spans) > budget:
                candidate_text = candidate_text[: spans[budget - 1][1]] if budget else ""
            label = "" if corpus.qrels is None else str(int(doc_id in relevant))
            rows.append(
                f"{query.query_id}\t{doc_id}\t{label}\t{query_text}\t{candidate_text}"
            )
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")
    return len(rows)
