"""Legal-search experimentation engine.

Pipeline stages: corpus ingestion, extractive summarization, BM25 scoring,
ranking, IR metrics, and OLS-dummy significance tests, each usable as a
library or through the ``legalrank`` command line.
"""

from .bm25 import (
    Bm25Params,
    Bm25Scorer,
    FIELD_FULL_TEXT,
    FIELD_SUMMARY,
    InvertedIndex,
    bm25_score,
    build_index,
    idf,
    read_index,
    score_pool,
    write_index,
)
from .corpus import (
    Corpus,
    CorpusError,
    Document,
    LengthDistribution,
    Qrels,
    QueryRecord,
    SplitSpec,
    TaskKind,
    corpus_stats,
    ingest_case_law,
    ingest_statute,
    load_corpus,
    read_qrels,
    save_corpus,
    split_train_eval,
    write_qrels,
)
from .evaluate import (
    MetricsReport,
    PrCurve,
    RECALL_LEVELS,
    average_precision,
    evaluate_run,
    pr_curve,
    precision_recall_at_k,
    r_precision,
    read_metrics_tsv,
    single_metric,
    write_metrics_tsv,
    write_pr_curve_tsv,
)
from .ranker import (
    MAX_SEQUENCE_SLOTS,
    PairInput,
    PairScore,
    RankedDoc,
    Run,
    build_pair_sequence,
    candidate_token_budget,
    export_pairs,
    load_external_scores,
    perfect_ranking,
    rank_candidates,
    read_run,
    write_run,
)
from .stats import (
    ComparisonResult,
    compare_runs,
    ols_dummy_test,
    regularized_incomplete_beta,
    student_t_p_value,
)
from .summarize import (
    PageRankResult,
    SentenceGraph,
    Summary,
    SummaryConfig,
    TextRankSummarizer,
    build_sentence_graph,
    collection_stats,
    pagerank,
    read_summary_cache,
    sentence_similarity,
    summarize,
    write_summary_cache,
)
from .textproc import (
    DEFAULT_ABBREVIATIONS,
    SentenceSpan,
    TokenizedText,
    estimate_subword_count,
    load_abbreviations,
    split_sentences,
    token_spans,
    tokenize_words,
)

__version__ = "0.1.0"

__all__ = [
    "Bm25Params",
    "Bm25Scorer",
    "ComparisonResult",
    "Corpus",
    "CorpusError",
    "DEFAULT_ABBREVIATIONS",
    "Document",
    "FIELD_FULL_TEXT",
    "FIELD_SUMMARY",
    "InvertedIndex",
    "LengthDistribution",
    "MAX_SEQUENCE_SLOTS",
    "MetricsReport",
    "PageRankResult",
    "PairInput",
    "PairScore",
    "PrCurve",
    "Qrels",
    "QueryRecord",
    "RECALL_LEVELS",
    "RankedDoc",
    "Run",
    "SentenceGraph",
    "SentenceSpan",
    "SplitSpec",
    "Summary",
    "SummaryConfig",
    "TaskKind",
    "TextRankSummarizer",
    "TokenizedText",
    "average_precision",
    "bm25_score",
    "build_index",
    "build_pair_sequence",
    "build_sentence_graph",
    "candidate_token_budget",
    "collection_stats",
    "compare_runs",
    "corpus_stats",
    "estimate_subword_count",
    "evaluate_run",
    "export_pairs",
    "idf",
    "ingest_case_law",
    "ingest_statute",
    "load_abbreviations",
    "load_corpus",
    "load_external_scores",
    "ols_dummy_test",
    "pagerank",
    "perfect_ranking",
    "pr_curve",
    "precision_recall_at_k",
    "r_precision",
    "rank_candidates",
    "read_index",
    "read_metrics_tsv",
    "read_qrels",
    "read_run",
    "read_summary_cache",
    "regularized_incomplete_beta",
    "save_corpus",
    "score_pool",
    "sentence_similarity",
    "single_metric",
    "split_sentences",
    "split_train_eval",
    "student_t_p_value",
    "summarize",
    "token_spans",
    "tokenize_words",
    "write_index",
    "write_metrics_tsv",
    "write_pr_curve_tsv",
    "write_qrels",
    "write_run",
    "write_summary_cache",
]
