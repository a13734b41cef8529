"""BM25 scoring over an inverted index.

The idf uses the non-negative variant ln(1 + (N - df + 0.5) / (df + 0.5)),
so scores never go below zero even for terms in every document.  Documents
can be indexed on their full text or on cached summaries; the index records
which, and runs produced from it inherit that provenance.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import QueryRecord
from .ranker import PairScore
from .textproc import TokenizedText, tokenize_words
from .validation import check_identifier, check_non_negative, check_unit_interval

FIELD_FULL_TEXT = "full_text"
FIELD_SUMMARY = "summary"
_FIELDS = (FIELD_FULL_TEXT, FIELD_SUMMARY)

INDEX_FORMAT = "bm25-index-v1"


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self) -> None:
        check_non_negative("k1", self.k1)
        check_unit_interval("b", self.b)


@dataclass(frozen=True)
class InvertedIndex:
    """Postings map term -> {doc_id: term frequency}.

    avgdl is derived from doc_length and recomputed on load rather than
    stored, so a hand-edited file cannot desynchronize the two.
    """

    postings: Mapping[str, Mapping[str, int]]
    doc_length: Mapping[str, int]
    avgdl: float
    doc_count: int
    field: str

    def has_document(self, doc_id: str) -> bool:
        return doc_id in self.doc_length


def idf(doc_freq: int, doc_count: int) -> float:
    """Non-negative inverse document frequency."""
    if not 0 <= doc_freq <= doc_count:
        raise ValueError(f"doc_freq {doc_freq} outside [0, {doc_count}]")
    return math.log(1.0 + (doc_count - doc_freq + 0.5) / (doc_freq + 0.5))


def build_index(documents: Mapping[str, str], field: str = FIELD_FULL_TEXT) -> InvertedIndex:
    """Index a collection of id -> text, in sorted id order."""
    if field not in _FIELDS:
        raise ValueError(f"field must be one of {_FIELDS}, got {field!r}")
    if not documents:
        raise ValueError("cannot index an empty collection")
    postings: dict[str, dict[str, int]] = {}
    doc_length = {}
    for doc_id in sorted(documents):
        check_identifier("doc_id", doc_id)
        tokens = tokenize_words(documents[doc_id]).tokens
        doc_length[doc_id] = len(tokens)
        for term, frequency in sorted(Counter(tokens).items()):
            postings.setdefault(term, {})[doc_id] = frequency
    avgdl = sum(doc_length.values()) / len(doc_length)
    return InvertedIndex(postings, doc_length, avgdl, len(doc_length), field)


def bm25_score(
    index: InvertedIndex,
    query: TokenizedText,
    doc_id: str,
    params: Bm25Params = Bm25Params(),
) -> float:
    """Score one document for a query; terms count once each (distinct)."""
    if not index.has_document(doc_id):
        raise KeyError(f"doc {doc_id!r} is not in the index")
    length = index.doc_length[doc_id]
    if index.avgdl > 0:
        norm = 1.0 - params.b + params.b * length / index.avgdl
    else:
        norm = 1.0
    score = 0.0
    for term in dict.fromkeys(query.tokens):
        entry = index.postings.get(term)
        if not entry:
            continue
        frequency = entry.get(doc_id, 0)
        if frequency == 0:
            continue
        score += (
            idf(len(entry), index.doc_count)
            * frequency
            * (params.k1 + 1.0)
            / (frequency + params.k1 * norm)
        )
    return score


def score_pool(
    index: InvertedIndex,
    query: QueryRecord,
    params: Bm25Params = Bm25Params(),
    query_text: str | None = None,
) -> list[PairScore]:
    """Score every pool candidate; the query is never its own candidate.

    query_text overrides the record's text (for scoring against a query
    summary instead of the full query).
    """
    tokens = tokenize_words(query.text if query_text is None else query_text)
    scores = []
    for doc_id in query.candidate_ids:
        if doc_id == query.query_id:
            continue
        if not index.has_document(doc_id):
            raise KeyError(f"candidate {doc_id!r} of query {query.query_id!r} is not indexed")
        scores.append(PairScore(query.query_id, doc_id, bm25_score(index, tokens, doc_id, params)))
    return scores


def write_index(index: InvertedIndex, path: str | Path) -> None:
    """Line-oriented persistence with a version header.

    doc lines carry lengths, post lines carry one term's postings.  Terms
    are tokens (no whitespace) and doc ids are identifiers, so the
    space/colon separators are unambiguous.
    """
    lines = [f"{INDEX_FORMAT}\t{index.field}"]
    for doc_id in sorted(index.doc_length):
        lines.append(f"doc\t{doc_id}\t{index.doc_length[doc_id]}")
    for term in sorted(index.postings):
        entry = index.postings[term]
        cells = " ".join(f"{doc_id}:{entry[doc_id]}" for doc_id in sorted(entry))
        lines.append(f"post\t{term}\t{cells}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_index(path: str | Path) -> InvertedIndex:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty index file")
    header = lines[0].split("\t")
    if len(header) != 2 or header[0] != INDEX_FORMAT:
        raise ValueError(f"{path}: not a {INDEX_FORMAT} file")
    field = header[1]
    if field not in _FIELDS:
        raise ValueError(f"{path}: unknown index field {field!r}")
    doc_length: dict[str, int] = {}
    postings: dict[str, dict[str, int]] = {}
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split("\t")
        if parts[0] == "doc" and len(parts) == 3:
            doc_length[parts[1]] = int(parts[2])
        elif parts[0] == "post" and len(parts) == 3:
            entry = {}
            for cell in parts[2].split(" "):
                doc_id, _, frequency = cell.rpartition(":")
                if not doc_id or doc_id not in doc_length:
                    raise ValueError(f"{path}:{lineno}: posting for unknown doc {doc_id!r}")
                entry[doc_id] = int(frequency)
            postings[parts[1]] = entry
        else:
            raise ValueError(f"{path}:{lineno}: unrecognized index line")
    if not doc_length:
        raise ValueError(f"{path}: index has no documents")
    avgdl = sum(doc_length.values()) / len(doc_length)
    return InvertedIndex(postings, doc_length, avgdl, len(doc_length), field)


class Bm25Scorer(BaseEstimator):
    """Estimator-style BM25: fit() builds the index, then score away."""

    def __init__(self, k1: float = 1.2, b: float = 0.75, field: str = FIELD_FULL_TEXT) -> None:
        self.k1 = k1
        self.b = b
        self.field = field

    def fit(self, X: Mapping[str, str], y=None):
        """X maps doc_id -> text."""
        self.index_ = build_index(X, self.field)
        return self

    def _scoring_params(self) -> Bm25Params:
        return Bm25Params(k1=self.k1, b=self.b)

    def score(self, query_text: str, doc_id: str) -> float:
        check_is_fitted(self, "index_")
        return bm25_score(self.index_, tokenize_words(query_text), doc_id, self._scoring_params())

    def score_pool(self, query: QueryRecord, query_text: str | None = None) -> list[PairScore]:
        check_is_fitted(self, "index_")
        return score_pool(self.index_, query, self._scoring_params(), query_text)
