"""Ranked-run evaluation with the classic trec_eval conventions.

Per query: average precision, precision and recall at fixed cutoffs, and
R-precision (precision at the number of relevant documents).  Cutoff
precision keeps k in the denominator even when fewer documents were
retrieved, unjudged documents count as non-relevant, and the macro average
runs over every judged query; a judged query absent from the run
contributes zero to every metric.  Runs containing a query with no qrels
entry are rejected rather than silently ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import AbstractSet, Mapping, Sequence

from .corpus import Qrels
from .ranker import Run

# Standard 11-point interpolation grid.
RECALL_LEVELS = tuple(level / 10.0 for level in range(11))
_LEVEL_EPS = 1e-12

MACRO_QUERY_ID = "all"
_CUTOFF_RE = re.compile(r"([PR])@([1-9][0-9]*)")


@dataclass(frozen=True)
class MetricsReport:
    """Per-query values plus their macro averages over num_queries queries.

    Per-query keys: AP, P@k / R@k for each cutoff, P@R, and R (the
    relevant count, an integer).  Macro keys: MAP for the AP average,
    otherwise the per-query names; R is not averaged.
    """

    per_query: Mapping[str, Mapping[str, float]]
    macro: Mapping[str, float]
    num_queries: int


@dataclass(frozen=True)
class PrCurve:
    """Interpolated precision at the 11 standard recall levels."""

    points: tuple[tuple[float, float], ...]


def _check_ranking(ranked: Sequence[str], relevant: AbstractSet[str]) -> None:
    if not relevant:
        raise ValueError("relevant set must not be empty")
    if len(set(ranked)) != len(ranked):
        raise ValueError("ranking contains duplicate doc ids")


def average_precision(ranked: Sequence[str], relevant: AbstractSet[str]) -> float:
    """Mean of precision at each relevant hit, over all relevant docs."""
    _check_ranking(ranked, relevant)
    hits = 0
    total = 0.0
    for position, doc_id in enumerate(ranked, 1):
        if doc_id in relevant:
            hits += 1
            total += hits / position
    return total / len(relevant)


def precision_recall_at_k(
    ranked: Sequence[str], relevant: AbstractSet[str], k: int
) -> tuple[float, float]:
    """(P@k, R@k); the precision denominator is k, retrieved or not."""
    _check_ranking(ranked, relevant)
    if k < 1:
        raise ValueError(f"cutoff must be >= 1, got {k}")
    hits = sum(1 for doc_id in ranked[:k] if doc_id in relevant)
    return hits / k, hits / len(relevant)


def r_precision(ranked: Sequence[str], relevant: AbstractSet[str]) -> float:
    """Precision at R, where R is the size of the relevant set."""
    _check_ranking(ranked, relevant)
    r = len(relevant)
    hits = sum(1 for doc_id in ranked[:r] if doc_id in relevant)
    return hits / r


def _check_cutoffs(ks: Sequence[int]) -> tuple[int, ...]:
    cutoffs = tuple(ks)
    if not cutoffs or any(k < 1 for k in cutoffs) or len(set(cutoffs)) != len(cutoffs):
        raise ValueError(f"cutoffs must be distinct positive integers, got {ks!r}")
    return cutoffs


def _check_run_judged(run: Run, qrels: Qrels) -> None:
    unjudged = [query_id for query_id in run.query_ids() if not qrels.is_judged(query_id)]
    if unjudged:
        raise ValueError(f"run contains unjudged query {unjudged[0]!r}")


def metric_names(ks: Sequence[int]) -> list[str]:
    """Canonical per-query metric order for reports and TSV files."""
    names = ["AP"]
    for k in sorted(_check_cutoffs(ks)):
        names.extend((f"P@{k}", f"R@{k}"))
    names.append("P@R")
    return names


def evaluate_run(run: Run, qrels: Qrels, ks: Sequence[int] = (1, 5, 10)) -> MetricsReport:
    """Score a run against qrels at the given cutoffs."""
    cutoffs = sorted(_check_cutoffs(ks))
    _check_run_judged(run, qrels)
    per_query: dict[str, dict[str, float]] = {}
    for query_id in qrels.query_ids():
        relevant = qrels.relevant_ids(query_id)
        ranked = (
            run.ranked_ids(query_id) if query_id in run.rankings else []
        )
        row: dict[str, float] = {"AP": average_precision(ranked, relevant)}
        for k in cutoffs:
            precision, recall = precision_recall_at_k(ranked, relevant, k)
            row[f"P@{k}"] = precision
            row[f"R@{k}"] = recall
        row["P@R"] = r_precision(ranked, relevant)
        row["R"] = len(relevant)
        per_query[query_id] = row

    macro = {}
    for name in metric_names(cutoffs):
        values = [per_query[query_id][name] for query_id in per_query]
        macro["MAP" if name == "AP" else name] = fmean(values)
    return MetricsReport(per_query, macro, len(per_query))


def single_metric(run: Run, qrels: Qrels, metric: str) -> dict[str, float]:
    """Per-query values of one named metric (AP, P@k, R@k, or P@R)."""
    _check_run_judged(run, qrels)
    name = "AP" if metric in ("AP", "MAP") else metric
    cutoff = None
    kind = None
    if name not in ("AP", "P@R"):
        match = _CUTOFF_RE.fullmatch(name)
        if match is None:
            raise ValueError(f"unknown metric {metric!r}")
        kind, cutoff = match.group(1), int(match.group(2))
    values = {}
    for query_id in qrels.query_ids():
        relevant = qrels.relevant_ids(query_id)
        ranked = run.ranked_ids(query_id) if query_id in run.rankings else []
        if name == "AP":
            values[query_id] = average_precision(ranked, relevant)
        elif name == "P@R":
            values[query_id] = r_precision(ranked, relevant)
        else:
            precision, recall = precision_recall_at_k(ranked, relevant, cutoff)
            values[query_id] = precision if kind == "P" else recall
    return values


def pr_curve(run: Run, qrels: Qrels) -> PrCurve:
    """Macro-averaged 11-point interpolated precision-recall curve.

    Per query, interpolated precision at level L is the best precision at
    any rank whose recall reaches L; the per-level macro average then runs
    over all judged queries.  The curve is non-increasing by construction.
    """
    _check_run_judged(run, qrels)
    query_ids = qrels.query_ids()
    sums = [0.0] * len(RECALL_LEVELS)
    for query_id in query_ids:
        relevant = qrels.relevant_ids(query_id)
        ranked = run.ranked_ids(query_id) if query_id in run.rankings else []
        _check_ranking(ranked, relevant)
        steps = []
        hits = 0
        for position, doc_id in enumerate(ranked, 1):
            if doc_id in relevant:
                hits += 1
                steps.append((hits / len(relevant), hits / position))
        for i, level in enumerate(RECALL_LEVELS):
            best = 0.0
            for recall, precision in steps:
                if recall + _LEVEL_EPS >= level and precision > best:
                    best = precision
            sums[i] += best
    points = tuple(
        (level, sums[i] / len(query_ids)) for i, level in enumerate(RECALL_LEVELS)
    )
    return PrCurve(points)


def write_metrics_tsv(report: MetricsReport, path: str | Path) -> None:
    """metric<TAB>query_id<TAB>value rows; macro rows use query id 'all'.

    Values are written with repr so read_metrics_tsv restores them exactly.
    """
    lines = []
    for query_id in sorted(report.per_query):
        row = report.per_query[query_id]
        for name in [k for k in row if k != "R"]:
            lines.append(f"{name}\t{query_id}\t{row[name]!r}")
        lines.append(f"R\t{query_id}\t{int(row['R'])}")
    for name, value in report.macro.items():
        lines.append(f"{name}\t{MACRO_QUERY_ID}\t{value!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_metrics_tsv(path: str | Path) -> MetricsReport:
    path = Path(path)
    per_query: dict[str, dict[str, float]] = {}
    macro: dict[str, float] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'metric<TAB>query<TAB>value'")
        name, query_id, raw = parts
        if query_id == MACRO_QUERY_ID:
            macro[name] = float(raw)
        elif name == "R":
            per_query.setdefault(query_id, {})[name] = int(raw)
        else:
            per_query.setdefault(query_id, {})[name] = float(raw)
    if not per_query:
        raise ValueError(f"{path}: no per-query rows")
    return MetricsReport(per_query, macro, len(per_query))


def write_pr_curve_tsv(curve: PrCurve, path: str | Path) -> None:
    """recall_level<TAB>interpolated_precision, one row per level."""
    lines = [f"{level:.1f}\t{precision!r}" for level, precision in curve.points]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
