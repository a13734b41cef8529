"""Pair-file input and score-file output.

The input format is the five-column TSV emitted by the legalrank exporter:
``query_id<TAB>doc_id<TAB>label<TAB>query_text<TAB>candidate_text`` with the
label column left empty on unlabeled corpora.  The output format is the
three-column score TSV the legalrank ranker accepts back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


@dataclass(frozen=True)
class PairExample:
    query_id: str
    doc_id: str
    query_text: str
    candidate_text: str
    label: int | None = None

    def __post_init__(self) -> None:
        for name in ("query_id", "doc_id"):
            value = getattr(self, name)
            if not value or value != value.strip() or any(c.isspace() for c in value):
                raise ValueError(f"{name} must be non-empty without whitespace, got {value!r}")
        if self.label not in (None, 0, 1):
            raise ValueError(f"label must be 0, 1, or absent, got {self.label!r}")


def read_pairs(path: str | Path) -> list[PairExample]:
    """Parse a pair TSV; malformed rows are rejected with their line number."""
    path = Path(path)
    pairs = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(
                f"{path}:{lineno}: expected 5 tab-separated columns, got {len(parts)}"
            )
        query_id, doc_id, raw_label, query_text, candidate_text = parts
        if raw_label == "":
            label = None
        elif raw_label in ("0", "1"):
            label = int(raw_label)
        else:
            raise ValueError(f"{path}:{lineno}: label must be '', '0', or '1', got {raw_label!r}")
        try:
            pairs.append(PairExample(query_id, doc_id, query_text, candidate_text, label))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not pairs:
        raise ValueError(f"{path}: pair file is empty")
    return pairs


def class_counts(pairs: Iterable[PairExample]) -> tuple[int, int]:
    """Count (negative, positive) labels; unlabeled rows are rejected."""
    counts = [0, 0]
    for i, pair in enumerate(pairs):
        if pair.label is None:
            raise ValueError(f"pair {i} ({pair.query_id}, {pair.doc_id}) has no label")
        counts[pair.label] += 1
    return counts[0], counts[1]


def write_scores(rows: Iterable[tuple[str, str, float]], path: str | Path) -> int:
    """Write ``query_id<TAB>doc_id<TAB>score`` rows in the order given.

    Scores are rendered with repr so a reader recovers the exact float.
    """
    path = Path(path)
    lines = []
    for query_id, doc_id, score in rows:
        if not math.isfinite(score):
            raise ValueError(f"score for ({query_id}, {doc_id}) is not finite: {score!r}")
        lines.append(f"{query_id}\t{doc_id}\t{score!r}\n")
    path.write_text("".join(lines), encoding="utf-8")
    return len(lines)
