"""Corpus ingestion, validation, persistence, splitting, and length stats.

Two on-disk layouts are supported:

* Case law: one directory per query holding ``query.txt``, a
  ``candidates/`` directory with one ``<doc_id>.txt`` file per pool member,
  and an optional ``labels.txt`` naming the relevant candidates (one id per
  line).  Every query has its own fixed-size candidate pool.
* Statute: ``articles.tsv`` and ``queries.tsv`` with one ``id<TAB>text``
  record per line, plus an optional TREC-format qrels file.  Every query
  shares the full article collection as its pool.

A Corpus is immutable once built; derived artifacts (summaries, indexes,
runs) live in separate files keyed by document id.
"""

from __future__ import annotations

import math
import random
import statistics
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .textproc import tokenize_words
from .validation import check_identifier, check_unit_interval


class CorpusError(ValueError):
    """An on-disk corpus violates the layout or a corpus invariant."""


class TaskKind(str, Enum):
    CASE_LAW = "case_law"
    STATUTE = "statute"


@dataclass(frozen=True)
class Document:
    """One retrievable text; word_count is derived from the text."""

    doc_id: str
    text: str
    word_count: int = field(init=False)

    def __post_init__(self) -> None:
        check_identifier("doc_id", self.doc_id)
        object.__setattr__(self, "word_count", tokenize_words(self.text).word_count)


@dataclass(frozen=True)
class QueryRecord:
    """A query text plus the ids of its candidate pool, in pool order."""

    query_id: str
    text: str
    candidate_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        check_identifier("query_id", self.query_id)
        object.__setattr__(self, "candidate_ids", tuple(self.candidate_ids))
        if not self.candidate_ids:
            raise CorpusError(f"query {self.query_id!r} has an empty candidate pool")
        if len(set(self.candidate_ids)) != len(self.candidate_ids):
            raise CorpusError(f"query {self.query_id!r} has duplicate candidate ids")


@dataclass(frozen=True)
class Qrels:
    """Binary relevance judgments keyed by query id then doc id.

    Every judged query must have at least one relevant document; queries
    without that are rejected here rather than silently skewing recall.
    """

    judgments: Mapping[str, Mapping[str, bool]]

    def __post_init__(self) -> None:
        for query_id, docs in self.judgments.items():
            check_identifier("query_id", query_id)
            if not any(docs.values()):
                raise CorpusError(f"query {query_id!r} has no relevant documents")

    def query_ids(self) -> list[str]:
        return sorted(self.judgments)

    def is_judged(self, query_id: str) -> bool:
        return query_id in self.judgments

    def relevant_ids(self, query_id: str) -> frozenset[str]:
        docs = self.judgments.get(query_id, {})
        return frozenset(doc_id for doc_id, rel in docs.items() if rel)

    def relevant_count(self, query_id: str) -> int:
        return len(self.relevant_ids(query_id))


@dataclass(frozen=True)
class Corpus:
    task_kind: TaskKind
    documents: Mapping[str, Document]
    queries: tuple[QueryRecord, ...]
    qrels: Qrels | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "queries", tuple(self.queries))
        seen = set()
        pool_sizes = set()
        for query in self.queries:
            if query.query_id in seen:
                raise CorpusError(f"duplicate query id {query.query_id!r}")
            seen.add(query.query_id)
            pool_sizes.add(len(query.candidate_ids))
            for doc_id in query.candidate_ids:
                if doc_id not in self.documents:
                    raise CorpusError(
                        f"query {query.query_id!r} references unknown candidate {doc_id!r}"
                    )
        if self.task_kind is TaskKind.CASE_LAW and len(pool_sizes) > 1:
            raise CorpusError(f"candidate pools differ in size: {sorted(pool_sizes)}")
        if self.task_kind is TaskKind.STATUTE:
            pools = {query.candidate_ids for query in self.queries}
            if len(pools) > 1:
                raise CorpusError("statute queries must share one article pool")
        by_id = {query.query_id: query for query in self.queries}
        # A query id may collide with a doc id only when both name the same
        # text (a case that is both a query and another query's candidate).
        for query_id, query in by_id.items():
            doc = self.documents.get(query_id)
            if doc is not None and doc.text != query.text:
                raise CorpusError(
                    f"id {query_id!r} names both a query and a different document"
                )
        if self.qrels is not None:
            for query_id in self.qrels.judgments:
                query = by_id.get(query_id)
                if query is None:
                    raise CorpusError(f"qrels mention unknown query {query_id!r}")
                pool = set(query.candidate_ids)
                for doc_id in self.qrels.judgments[query_id]:
                    if doc_id not in pool:
                        raise CorpusError(
                            f"qrels for query {query_id!r} mention {doc_id!r}, "
                            "which is outside its candidate pool"
                        )

    def query(self, query_id: str) -> QueryRecord:
        for record in self.queries:
            if record.query_id == query_id:
                return record
        raise KeyError(f"unknown query {query_id!r}")


@dataclass(frozen=True)
class SplitSpec:
    """Query-level split: fraction of queries assigned to the train side."""

    train_fraction: float = 0.75
    rng_seed: int = 0

    def __post_init__(self) -> None:
        check_unit_interval("train_fraction", self.train_fraction, open_ends=True)


@dataclass(frozen=True)
class LengthDistribution:
    """Word-count distribution over every text (documents and queries)."""

    word_counts: Mapping[str, int]
    histogram: tuple[tuple[int, int], ...]
    cdf: tuple[tuple[int, float], ...]
    median: float


def _add_document(documents: dict[str, Document], doc_id: str, text: str) -> None:
    existing = documents.get(doc_id)
    if existing is not None:
        if existing.text != text:
            raise CorpusError(f"doc id {doc_id!r} appears twice with different texts")
        return
    documents[doc_id] = Document(doc_id, text)


def ingest_case_law(root: str | Path, pool_size: int | None = None) -> Corpus:
    """Load the per-query directory layout.

    pool_size pins the expected candidate count per query; by default the
    (uniform) size is inferred.  Candidate files shared between queries must
    carry identical text under the same id.
    """
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"corpus root {root} is not a directory")
    query_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not query_dirs:
        raise CorpusError(f"no query directories under {root}")

    documents: dict[str, Document] = {}
    queries = []
    judgments: dict[str, dict[str, bool]] = {}
    for query_dir in query_dirs:
        query_id = query_dir.name
        query_file = query_dir / "query.txt"
        if not query_file.is_file():
            raise CorpusError(f"query {query_id!r}: missing query.txt")
        candidates_dir = query_dir / "candidates"
        candidate_files = sorted(candidates_dir.glob("*.txt")) if candidates_dir.is_dir() else []
        if not candidate_files:
            raise CorpusError(f"query {query_id!r}: no candidate files")
        if pool_size is not None and len(candidate_files) != pool_size:
            raise CorpusError(
                f"query {query_id!r}: expected {pool_size} candidates, "
                f"found {len(candidate_files)}"
            )
        candidate_ids = []
        for candidate in candidate_files:
            _add_document(documents, candidate.stem, candidate.read_text(encoding="utf-8"))
            candidate_ids.append(candidate.stem)
        queries.append(
            QueryRecord(query_id, query_file.read_text(encoding="utf-8"), tuple(candidate_ids))
        )
        labels_file = query_dir / "labels.txt"
        if labels_file.is_file():
            labeled = [
                line.strip()
                for line in labels_file.read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
            if not labeled:
                raise CorpusError(f"query {query_id!r}: labels.txt names no candidates")
            unknown = sorted(set(labeled) - set(candidate_ids))
            if unknown:
                raise CorpusError(
                    f"query {query_id!r}: labels.txt names unknown candidate {unknown[0]!r}"
                )
            judgments[query_id] = {doc_id: True for doc_id in sorted(set(labeled))}

    qrels = Qrels(judgments) if judgments else None
    return Corpus(TaskKind.CASE_LAW, documents, tuple(queries), qrels)


def _read_tsv_records(path: Path) -> list[tuple[str, str]]:
    records = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if "\t" not in line:
            raise CorpusError(f"{path}:{lineno}: expected 'id<TAB>text'")
        record_id, text = line.split("\t", 1)
        try:
            check_identifier("id", record_id)
        except ValueError as exc:
            raise CorpusError(f"{path}:{lineno}: {exc}") from None
        records.append((record_id, text))
    if not records:
        raise CorpusError(f"{path}: no records")
    return records


def ingest_statute(
    articles_path: str | Path,
    queries_path: str | Path,
    qrels_path: str | Path | None = None,
) -> Corpus:
    """Load the TSV layout; every query's pool is the full article list."""
    articles = _read_tsv_records(Path(articles_path))
    documents: dict[str, Document] = {}
    for doc_id, text in articles:
        if doc_id in documents:
            raise CorpusError(f"duplicate article id {doc_id!r}")
        documents[doc_id] = Document(doc_id, text)
    article_ids = tuple(doc_id for doc_id, _ in articles)

    queries = []
    for query_id, text in _read_tsv_records(Path(queries_path)):
        queries.append(QueryRecord(query_id, text, article_ids))

    qrels = read_qrels(qrels_path) if qrels_path is not None else None
    return Corpus(TaskKind.STATUTE, documents, tuple(queries), qrels)


def read_qrels(path: str | Path) -> Qrels:
    """Parse TREC qrels: ``query_id 0 doc_id rel`` with rel in {0, 1}."""
    path = Path(path)
    judgments: dict[str, dict[str, bool]] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise CorpusError(f"{path}:{lineno}: expected 'query_id 0 doc_id rel'")
        query_id, _, doc_id, rel = parts
        if rel not in ("0", "1"):
            raise CorpusError(f"{path}:{lineno}: relevance must be 0 or 1, got {rel!r}")
        if doc_id in judgments.get(query_id, {}):
            raise CorpusError(f"{path}:{lineno}: duplicate judgment for ({query_id}, {doc_id})")
        judgments.setdefault(query_id, {})[doc_id] = rel == "1"
    if not judgments:
        raise CorpusError(f"{path}: no judgments")
    return Qrels(judgments)


def write_qrels(qrels: Qrels, path: str | Path) -> None:
    """Write TREC qrels sorted by query id then doc id."""
    lines = []
    for query_id in qrels.query_ids():
        for doc_id in sorted(qrels.judgments[query_id]):
            rel = int(qrels.judgments[query_id][doc_id])
            lines.append(f"{query_id} 0 {doc_id} {rel}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_corpus(corpus: Corpus, root: str | Path) -> None:
    """Write the canonical on-disk layout for the corpus kind.

    Case-law labels.txt files record relevant candidates only, which is
    exactly what ingest_case_law produces; explicit negative judgments
    exist only in statute qrels files.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    if corpus.task_kind is TaskKind.CASE_LAW:
        for query in corpus.queries:
            query_dir = root / query.query_id
            candidates_dir = query_dir / "candidates"
            candidates_dir.mkdir(parents=True, exist_ok=True)
            (query_dir / "query.txt").write_text(query.text, encoding="utf-8")
            for doc_id in query.candidate_ids:
                target = candidates_dir / f"{doc_id}.txt"
                target.write_text(corpus.documents[doc_id].text, encoding="utf-8")
            if corpus.qrels is not None and corpus.qrels.is_judged(query.query_id):
                relevant = sorted(corpus.qrels.relevant_ids(query.query_id))
                (query_dir / "labels.txt").write_text(
                    "\n".join(relevant) + "\n", encoding="utf-8"
                )
        return

    for name, records in (
        ("articles.tsv", [(d.doc_id, d.text) for d in corpus.documents.values()]),
        ("queries.tsv", [(q.query_id, q.text) for q in corpus.queries]),
    ):
        lines = []
        for record_id, text in records:
            if "\n" in text or "\r" in text or "\t" in text:
                raise CorpusError(
                    f"{record_id!r}: statute texts must be single-line and tab-free"
                )
            lines.append(f"{record_id}\t{text}")
        (root / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if corpus.qrels is not None:
        write_qrels(corpus.qrels, root / "qrels.txt")


def load_corpus(root: str | Path) -> Corpus:
    """Load either layout, detected by the presence of articles.tsv."""
    root = Path(root)
    articles = root / "articles.tsv"
    if articles.is_file():
        qrels_path = root / "qrels.txt"
        return ingest_statute(
            articles, root / "queries.tsv", qrels_path if qrels_path.is_file() else None
        )
    return ingest_case_law(root)


def split_train_eval(corpus: Corpus, spec: SplitSpec = SplitSpec()) -> tuple[Corpus, Corpus]:
    """Split queries (not documents) into train and eval sub-corpora.

    The shuffle runs over the sorted query ids with a dedicated RNG, so the
    assignment depends only on (query ids, train_fraction, rng_seed).  The
    train side gets floor(fraction * n + 0.5) queries.  Documents are kept
    iff some query on that side references them; qrels are filtered the
    same way.
    """
    if corpus.qrels is None:
        raise CorpusError("cannot split an unlabeled corpus")
    query_ids = sorted(query.query_id for query in corpus.queries)
    if len(query_ids) < 2:
        raise CorpusError("need at least two queries to split")
    rng = random.Random(spec.rng_seed)
    rng.shuffle(query_ids)
    n_train = math.floor(spec.train_fraction * len(query_ids) + 0.5)
    if n_train < 1 or n_train > len(query_ids) - 1:
        raise CorpusError(
            f"train_fraction {spec.train_fraction} leaves one side of the split empty"
        )
    train_ids = set(query_ids[:n_train])

    def side(selected: set[str]) -> Corpus:
        queries = tuple(q for q in corpus.queries if q.query_id in selected)
        documents = {
            doc_id: corpus.documents[doc_id]
            for query in queries
            for doc_id in query.candidate_ids
        }
        judgments = {
            query.query_id: dict(corpus.qrels.judgments[query.query_id])
            for query in queries
            if corpus.qrels.is_judged(query.query_id)
        }
        return Corpus(
            corpus.task_kind,
            documents,
            queries,
            Qrels(judgments) if judgments else None,
        )

    return side(train_ids), side(set(query_ids) - train_ids)


def corpus_stats(corpus: Corpus) -> LengthDistribution:
    """Word-count distribution over all texts, queries included."""
    counts: dict[str, int] = {doc_id: doc.word_count for doc_id, doc in corpus.documents.items()}
    for query in corpus.queries:
        counts.setdefault(query.query_id, tokenize_words(query.text).word_count)
    if not counts:
        raise CorpusError("corpus has no texts")
    values = sorted(counts.values())
    histogram = tuple(sorted(Counter(values).items()))
    total = len(values)
    cdf = []
    running = 0
    for value, count in histogram:
        running += count
        cdf.append((value, running / total))
    return LengthDistribution(counts, histogram, tuple(cdf), float(statistics.median(values)))


def write_histogram_tsv(dist: LengthDistribution, path: str | Path) -> None:
    lines = [f"{value}\t{count}" for value, count in dist.histogram]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_cdf_tsv(dist: LengthDistribution, path: str | Path) -> None:
    lines = [f"{value}\t{fraction!r}" for value, fraction in dist.cdf]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
