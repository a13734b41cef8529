"""Command-line surface: one subcommand per pipeline stage.

Every command is deterministic given its inputs and flags, writes fixed
file names under --out, and exits 0 only on success.  A flat key=value
config file supplies defaults; explicit flags override it.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .bm25 import (
    Bm25Params,
    FIELD_FULL_TEXT,
    FIELD_SUMMARY,
    build_index,
    read_index,
    score_pool,
    write_index,
)
from .corpus import (
    SplitSpec,
    corpus_stats,
    ingest_case_law,
    ingest_statute,
    load_corpus,
    save_corpus,
    split_train_eval,
    write_cdf_tsv,
    write_histogram_tsv,
)
from .evaluate import evaluate_run, pr_curve, write_metrics_tsv, write_pr_curve_tsv
from .ranker import (
    export_pairs,
    load_external_scores,
    rank_candidates,
    read_run,
    write_run,
)
from .stats import compare_runs, write_comparison_tsv
from .summarize import SummaryConfig, read_summary_cache, summarize, write_summary_cache

SCORE_MODES = ("bm25_full", "bm25_summary", "external")


@dataclass
class PipelineConfig:
    """Defaults shared across subcommands; round-trips through a file."""

    task: str | None = None
    root: str | None = None
    articles: str | None = None
    queries: str | None = None
    qrels: str | None = None
    corpus: str | None = None
    out: str | None = None
    budget: int = 180
    damping: float = 0.85
    tolerance: float = 1e-6
    max_iterations: int = 100
    k1: float = 1.2
    b: float = 0.75
    train_fraction: float = 0.75
    seed: int = 0
    ks: tuple[int, ...] = (1, 5, 10)

    def to_file(self, path: str | Path) -> None:
        lines = []
        for spec in fields(self):
            value = getattr(self, spec.name)
            if value is None:
                continue
            if spec.name == "ks":
                value = ",".join(str(k) for k in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{spec.name}={value}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        known = {spec.name: spec for spec in fields(cls)}
        values = {}
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key=value'")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _parse_config_value(key, raw, path, lineno)
        return cls(**values)


def _parse_config_value(key: str, raw: str, path: Path, lineno: int):
    try:
        if key == "ks":
            return parse_ks(raw)
        if key in ("budget", "max_iterations", "seed"):
            return int(raw)
        if key in ("damping", "tolerance", "k1", "b", "train_fraction"):
            return float(raw)
    except ValueError as exc:
        raise ValueError(f"{path}:{lineno}: {exc}") from None
    return raw


def parse_ks(raw: str) -> tuple[int, ...]:
    """Comma-separated cutoffs, e.g. '1,5,10'."""
    try:
        ks = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ValueError(f"bad cutoff list {raw!r}") from None
    if not ks:
        raise ValueError(f"bad cutoff list {raw!r}")
    return ks


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _summary_config(args) -> SummaryConfig:
    return SummaryConfig(
        word_budget=args.budget,
        damping=args.damping,
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
    )


def _all_texts(corpus) -> dict[str, str]:
    # Queries are texts too (a query case is itself a judgment document).
    texts = {doc_id: doc.text for doc_id, doc in corpus.documents.items()}
    for query in corpus.queries:
        texts.setdefault(query.query_id, query.text)
    return texts


def _summaries_for(corpus, path, ids) -> dict[str, str]:
    cache = read_summary_cache(path)
    missing = sorted(set(ids) - set(cache))
    if missing:
        raise ValueError(f"summary cache {path} is missing {missing[0]!r}")
    return cache


def cmd_ingest(args) -> None:
    if args.task == "case_law":
        if not args.root:
            raise ValueError("case_law ingest requires --root")
        corpus = ingest_case_law(args.root)
    else:
        if not args.articles or not args.queries:
            raise ValueError("statute ingest requires --articles and --queries")
        corpus = ingest_statute(args.articles, args.queries, args.qrels)
    out = _out_dir(args)
    save_corpus(corpus, out / "corpus")
    judged = len(corpus.qrels.judgments) if corpus.qrels is not None else 0
    print(
        f"ingested {len(corpus.queries)} queries, {len(corpus.documents)} documents "
        f"({judged} judged)"
    )
    if args.split:
        train, held_out = split_train_eval(
            corpus, SplitSpec(args.train_fraction, args.seed)
        )
        save_corpus(train, out / "corpus_train")
        save_corpus(held_out, out / "corpus_eval")
        print(f"split {len(train.queries)} train / {len(held_out.queries)} eval queries")


def cmd_stats(args) -> None:
    corpus = load_corpus(args.corpus)
    dist = corpus_stats(corpus)
    out = _out_dir(args)
    write_histogram_tsv(dist, out / "length_hist.tsv")
    write_cdf_tsv(dist, out / "length_cdf.tsv")
    print(f"{len(dist.word_counts)} texts, median length {dist.median:g} words")


def cmd_summarize(args) -> None:
    corpus = load_corpus(args.corpus)
    config = _summary_config(args)
    summaries = {
        text_id: summarize(text, config).text
        for text_id, text in sorted(_all_texts(corpus).items())
    }
    out = _out_dir(args)
    write_summary_cache(summaries, config, out / "summaries.tsv")
    print(f"wrote {len(summaries)} summaries (budget {config.word_budget})")


def cmd_index(args) -> None:
    corpus = load_corpus(args.corpus)
    if args.field == FIELD_SUMMARY:
        if not args.summaries:
            raise ValueError("indexing summaries requires --summaries")
        cache = _summaries_for(corpus, args.summaries, corpus.documents)
        texts = {doc_id: cache[doc_id] for doc_id in corpus.documents}
    else:
        texts = {doc_id: doc.text for doc_id, doc in corpus.documents.items()}
    index = build_index(texts, args.field)
    out = _out_dir(args)
    write_index(index, out / f"index_{args.field}.txt")
    print(f"indexed {index.doc_count} documents on {args.field} ({len(index.postings)} terms)")


def cmd_score(args) -> None:
    corpus = load_corpus(args.corpus)
    if args.mode == "external":
        if not args.scores:
            raise ValueError("external mode requires --scores")
        pair_scores = load_external_scores(args.scores, corpus)
    else:
        if args.mode == "bm25_summary":
            if not args.summaries:
                raise ValueError("bm25_summary mode requires --summaries")
            all_ids = set(corpus.documents) | {q.query_id for q in corpus.queries}
            cache = _summaries_for(corpus, args.summaries, all_ids)
            doc_texts = {doc_id: cache[doc_id] for doc_id in corpus.documents}
            query_texts = {q.query_id: cache[q.query_id] for q in corpus.queries}
            field = FIELD_SUMMARY
        else:
            doc_texts = {doc_id: doc.text for doc_id, doc in corpus.documents.items()}
            query_texts = {q.query_id: q.text for q in corpus.queries}
            field = FIELD_FULL_TEXT
        if args.index:
            index = read_index(args.index)
            if index.field != field:
                raise ValueError(
                    f"index field {index.field!r} does not match mode {args.mode!r}"
                )
        else:
            index = build_index(doc_texts, field)
        params = Bm25Params(k1=args.k1, b=args.b)
        pair_scores = []
        for query in corpus.queries:
            pair_scores.extend(
                score_pool(index, query, params, query_texts[query.query_id])
            )
    run = rank_candidates(pair_scores, corpus.queries, tag=args.mode)
    out = _out_dir(args)
    write_run(run, out / f"run_{args.mode}.txt")
    print(f"wrote run_{args.mode}.txt for {len(run.rankings)} queries")


def cmd_eval(args) -> None:
    corpus = load_corpus(args.corpus)
    if corpus.qrels is None:
        raise ValueError("evaluation requires a labeled corpus")
    run = read_run(args.run)
    report = evaluate_run(run, corpus.qrels, args.ks)
    curve = pr_curve(run, corpus.qrels)
    out = _out_dir(args)
    write_metrics_tsv(report, out / "metrics.tsv")
    write_pr_curve_tsv(curve, out / "pr_curve.tsv")
    for name, value in report.macro.items():
        print(f"{name}\tall\t{value:.4f}")


def cmd_compare(args) -> None:
    corpus = load_corpus(args.corpus)
    if corpus.qrels is None:
        raise ValueError("comparison requires a labeled corpus")
    baseline = read_run(args.run_a)
    treatment = read_run(args.run_b)
    result = compare_runs(baseline, treatment, corpus.qrels, args.metric)
    out = _out_dir(args)
    write_comparison_tsv(result, args.metric, out / "compare.tsv")
    print(
        f"{args.metric}: coef={result.coefficient:.6f} t={result.t_statistic:.4f} "
        f"dof={result.dof} p={result.p_value:.6f}"
    )


def cmd_export_pairs(args) -> None:
    corpus = load_corpus(args.corpus)
    ids = set(_all_texts(corpus))
    cache = _summaries_for(corpus, args.summaries, ids)
    out = _out_dir(args)
    count = export_pairs(corpus, cache, out / "pairs.tsv")
    print(f"wrote {count} pairs")


def build_parser(cfg: PipelineConfig) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="legalrank",
        description="Legal-search experiments: summaries, BM25 runs, metrics, significance",
    )
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, handler, help_text):
        cmd = sub.add_parser(name, help=help_text)
        cmd.set_defaults(handler=handler)
        cmd.add_argument("--config", help=argparse.SUPPRESS)
        cmd.add_argument(
            "--out", default=cfg.out, required=cfg.out is None, help="output directory"
        )
        return cmd

    ingest = add("ingest", cmd_ingest, "load, validate, and save a corpus")
    ingest.add_argument("--task", choices=("case_law", "statute"), default=cfg.task,
                        required=cfg.task is None)
    ingest.add_argument("--root", default=cfg.root, help="case-law corpus directory")
    ingest.add_argument("--articles", default=cfg.articles, help="statute articles TSV")
    ingest.add_argument("--queries", default=cfg.queries, help="statute queries TSV")
    ingest.add_argument("--qrels", default=cfg.qrels, help="statute qrels file")
    ingest.add_argument("--split", action="store_true",
                        help="also write a train/eval query split")
    ingest.add_argument("--train-fraction", type=float, default=cfg.train_fraction)
    ingest.add_argument("--seed", type=int, default=cfg.seed, help="split shuffle seed")

    stats = add("stats", cmd_stats, "word-count histogram, CDF, and median")
    stats.add_argument("--corpus", default=cfg.corpus, required=cfg.corpus is None)

    summarize_cmd = add("summarize", cmd_summarize, "summarize every text into a cache")
    summarize_cmd.add_argument("--corpus", default=cfg.corpus, required=cfg.corpus is None)
    summarize_cmd.add_argument("--budget", type=int, default=cfg.budget,
                               help="summary word budget")
    summarize_cmd.add_argument("--damping", type=float, default=cfg.damping)
    summarize_cmd.add_argument("--tolerance", type=float, default=cfg.tolerance)
    summarize_cmd.add_argument("--max-iterations", type=int, default=cfg.max_iterations)

    index = add("index", cmd_index, "build and persist an inverted index")
    index.add_argument("--corpus", default=cfg.corpus, required=cfg.corpus is None)
    index.add_argument("--field", choices=(FIELD_FULL_TEXT, FIELD_SUMMARY),
                       default=FIELD_FULL_TEXT)
    index.add_argument("--summaries", help="summary cache (for --field summary)")

    score = add("score", cmd_score, "score pools and write a TREC run")
    score.add_argument("--corpus", default=cfg.corpus, required=cfg.corpus is None)
    score.add_argument("--mode", choices=SCORE_MODES, required=True)
    score.add_argument("--summaries", help="summary cache (for bm25_summary)")
    score.add_argument("--scores", help="external score TSV (for external)")
    score.add_argument("--index", help="prebuilt index file (optional)")
    score.add_argument("--k1", type=float, default=cfg.k1)
    score.add_argument("--b", type=float, default=cfg.b)

    eval_cmd = add("eval", cmd_eval, "evaluate a run against the corpus qrels")
    eval_cmd.add_argument("--corpus", default=cfg.corpus, required=cfg.corpus is None)
    eval_cmd.add_argument("--run", required=True, help="TREC run file")
    eval_cmd.add_argument("--ks", type=parse_ks, default=cfg.ks,
                          help="comma-separated cutoffs, e.g. 1,5,10")

    compare = add("compare", cmd_compare, "significance test between two runs")
    compare.add_argument("--corpus", default=cfg.corpus, required=cfg.corpus is None)
    compare.add_argument("--run-a", required=True, help="baseline run file")
    compare.add_argument("--run-b", required=True, help="treatment run file")
    compare.add_argument("--metric", default="AP", help="AP, P@k, R@k, or P@R")

    pairs = add("export-pairs", cmd_export_pairs, "write classifier pairs TSV")
    pairs.add_argument("--corpus", default=cfg.corpus, required=cfg.corpus is None)
    pairs.add_argument("--summaries", required=True, help="summary cache")

    return parser


def main(argv=None) -> int:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        cfg = PipelineConfig.from_file(known.config) if known.config else PipelineConfig()
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser(cfg)
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        args.handler(args)
    except (ValueError, OSError, KeyError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
