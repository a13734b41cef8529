"""Extractive summarization: TextRank over a sentence-similarity graph.

Each sentence of the input is one node; edge weights come from a symmetric
BM25-style similarity in which every sentence acts as one document of the
collection (for document frequency and average length).  Sentences are
scored with weighted PageRank and greedily packed into a word budget,
highest score first, then re-emitted in original reading order.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from math import log
from pathlib import Path
from typing import Mapping, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .textproc import TokenizedText, split_sentences, tokenize_words
from .validation import (
    check_positive,
    check_positive_int,
    check_unit_interval,
)

# Similarity hyperparameters are fixed; only selection and convergence
# behavior are configurable.
SIMILARITY_K1 = 1.2
SIMILARITY_B = 0.75


@dataclass(frozen=True)
class SummaryConfig:
    word_budget: int = 180
    damping: float = 0.85
    tolerance: float = 1e-6
    max_iterations: int = 100

    def __post_init__(self) -> None:
        check_positive_int("word_budget", self.word_budget)
        check_unit_interval("damping", self.damping, open_ends=True)
        check_positive("tolerance", self.tolerance)
        check_positive_int("max_iterations", self.max_iterations)

    def cache_key(self) -> str:
        payload = (
            f"word_budget={self.word_budget};damping={self.damping!r};"
            f"tolerance={self.tolerance!r};max_iterations={self.max_iterations}"
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class SentenceStats:
    """Collection statistics where each sentence plays one document."""

    doc_freq: Mapping[str, int]
    avg_len: float
    sentence_count: int


@dataclass(frozen=True)
class SentenceGraph:
    """Undirected weighted graph; weights keyed by (i, j) with i < j."""

    nodes: tuple[int, ...]
    weights: Mapping[tuple[int, int], float]

    def weight(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        return self.weights.get(key, 0.0)


@dataclass(frozen=True)
class PageRankResult:
    """Scores always sum to 1; converged is False when max_iterations ran
    out, in which case scores hold the final iterate."""

    scores: Mapping[int, float]
    iterations: int
    converged: bool


@dataclass(frozen=True)
class Summary:
    """Verbatim extract: selected sentence indexes in reading order."""

    text: str
    selected: tuple[int, ...]
    word_count: int


def collection_stats(sentences: Sequence[TokenizedText]) -> SentenceStats:
    doc_freq: Counter[str] = Counter()
    total = 0
    for sentence in sentences:
        doc_freq.update(set(sentence.tokens))
        total += sentence.word_count
    avg_len = total / len(sentences) if sentences else 0.0
    return SentenceStats(dict(doc_freq), avg_len, len(sentences))


def _idf(doc_freq: int, doc_count: int) -> float:
    # Same non-negative variant as the document-level scorer.
    return log(1.0 + (doc_count - doc_freq + 0.5) / (doc_freq + 0.5))


def _directed_score(query: TokenizedText, doc: TokenizedText, stats: SentenceStats) -> float:
    if not doc.tokens:
        return 0.0
    if stats.avg_len > 0:
        norm = 1.0 - SIMILARITY_B + SIMILARITY_B * doc.word_count / stats.avg_len
    else:
        norm = 1.0
    frequencies = Counter(doc.tokens)
    score = 0.0
    for term in dict.fromkeys(query.tokens):
        tf = frequencies.get(term, 0)
        if tf == 0:
            continue
        idf = _idf(stats.doc_freq.get(term, 0), stats.sentence_count)
        score += idf * tf * (SIMILARITY_K1 + 1.0) / (tf + SIMILARITY_K1 * norm)
    return score


def sentence_similarity(a: TokenizedText, b: TokenizedText, stats: SentenceStats) -> float:
    """Symmetric similarity: mean of scoring a against b and b against a."""
    return 0.5 * (_directed_score(a, b, stats) + _directed_score(b, a, stats))


def build_sentence_graph(sentences: Sequence[TokenizedText]) -> SentenceGraph:
    """Dense pairwise graph; zero-similarity edges are dropped."""
    if not sentences:
        raise ValueError("cannot build a graph over zero sentences")
    stats = collection_stats(sentences)
    weights = {}
    for i in range(len(sentences)):
        for j in range(i + 1, len(sentences)):
            weight = sentence_similarity(sentences[i], sentences[j], stats)
            if weight > 0.0:
                weights[(i, j)] = weight
    return SentenceGraph(tuple(range(len(sentences))), weights)


def pagerank(graph: SentenceGraph, config: SummaryConfig = SummaryConfig()) -> PageRankResult:
    """Weighted PageRank by power iteration.

    Transition mass from node j spreads proportionally to edge weights;
    nodes with zero total weight (dangling) spread uniformly.  Iteration
    stops when the L1 change falls below config.tolerance.
    """
    nodes = graph.nodes
    n = len(nodes)
    if n == 0:
        raise ValueError("cannot rank an empty graph")
    adjacency: dict[int, dict[int, float]] = {i: {} for i in nodes}
    for (i, j), weight in graph.weights.items():
        adjacency[i][j] = weight
        adjacency[j][i] = weight
    strength = {i: sum(adjacency[i].values()) for i in nodes}

    damping = config.damping
    scores = {i: 1.0 / n for i in nodes}
    iterations = 0
    converged = False
    for iterations in range(1, config.max_iterations + 1):
        dangling = sum(scores[i] for i in nodes if strength[i] == 0.0)
        base = (1.0 - damping) / n + damping * dangling / n
        updated = dict.fromkeys(nodes, base)
        for j in nodes:
            if strength[j] == 0.0:
                continue
            spread = damping * scores[j] / strength[j]
            for i, weight in adjacency[j].items():
                updated[i] += spread * weight
        delta = sum(abs(updated[i] - scores[i]) for i in nodes)
        scores = updated
        if delta < config.tolerance:
            converged = True
            break
    return PageRankResult(scores, iterations, converged)


def summarize(text: str, config: SummaryConfig = SummaryConfig()) -> Summary:
    """Summarize one text into at most config.word_budget words.

    Selection is greedy by PageRank score (ties broken toward earlier
    sentences), skipping sentences that no longer fit.  When not even the
    top-ranked sentence fits, that sentence alone becomes the summary, so
    the result is never empty.  Selected sentences keep reading order and
    are joined with single spaces.
    """
    spans = split_sentences(text)
    if not spans:
        raise ValueError("cannot summarize text with no sentences")
    tokenized = [tokenize_words(span.text) for span in spans]
    result = pagerank(build_sentence_graph(tokenized), config)
    order = sorted(range(len(spans)), key=lambda i: (-result.scores[i], i))

    selected = []
    used = 0
    for i in order:
        count = tokenized[i].word_count
        if used + count <= config.word_budget:
            selected.append(i)
            used += count
    if not selected:
        top = order[0]
        selected = [top]
        used = tokenized[top].word_count
    selected.sort()
    summary_text = " ".join(spans[i].text for i in selected)
    return Summary(summary_text, tuple(selected), used)


class TextRankSummarizer(BaseEstimator, TransformerMixin):
    """Estimator-style wrapper so summarization slots into pipelines.

    Stateless: fit only validates parameters, transform maps each input
    text to its Summary.
    """

    def __init__(
        self,
        word_budget: int = 180,
        damping: float = 0.85,
        tolerance: float = 1e-6,
        max_iterations: int = 100,
    ) -> None:
        self.word_budget = word_budget
        self.damping = damping
        self.tolerance = tolerance
        self.max_iterations = max_iterations

    def _config(self) -> SummaryConfig:
        return SummaryConfig(
            word_budget=self.word_budget,
            damping=self.damping,
            tolerance=self.tolerance,
            max_iterations=self.max_iterations,
        )

    def fit(self, X=None, y=None):
        self._config()
        return self

    def transform(self, X: Sequence[str]) -> list[Summary]:
        config = self._config()
        return [summarize(text, config) for text in X]


CACHE_FORMAT = "summary-cache-v1"


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            mapped = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def write_summary_cache(
    summaries: Mapping[str, str], config: SummaryConfig, path: str | Path
) -> None:
    """Persist id -> summary text, keyed to the generating config.

    Ids are written sorted and texts escaped, so the same summaries under
    the same config always produce the identical file.
    """
    lines = [f"# {CACHE_FORMAT}\t{config.cache_key()}"]
    for text_id in sorted(summaries):
        lines.append(f"{text_id}\t{_escape(summaries[text_id])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_summary_cache(
    path: str | Path, config: SummaryConfig | None = None
) -> dict[str, str]:
    """Load a cache; with a config given, reject a stale or foreign one."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError(f"{path}: missing summary-cache header")
    header = lines[0][2:].split("\t")
    if len(header) != 2 or header[0] != CACHE_FORMAT:
        raise ValueError(f"{path}: not a {CACHE_FORMAT} file")
    if config is not None and header[1] != config.cache_key():
        raise ValueError(f"{path}: cache was written under a different config")
    summaries = {}
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split("\t", 1)
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'id<TAB>summary'")
        text_id, escaped = parts
        if text_id in summaries:
            raise ValueError(f"{path}:{lineno}: duplicate id {text_id!r}")
        summaries[text_id] = _unescape(escaped)
    return summaries
