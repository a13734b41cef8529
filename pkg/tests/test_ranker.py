import random

import pytest

from legalrank.corpus import Corpus, Document, Qrels, QueryRecord, TaskKind
from legalrank.ranker import (
    MAX_SEQUENCE_SLOTS,
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
from legalrank.summarize import Summary


def words(n, prefix="w"):
    return " ".join(f"{prefix}{i}" for i in range(n))


def summary_of(text):
    return Summary(text, (0,), len(text.split()))


def tiny_corpus(labels=True):
    documents = {
        "d1": Document("d1", "alpha beta"),
        "d2": Document("d2", "gamma delta"),
        "d3": Document("d3", "epsilon zeta"),
    }
    queries = (
        QueryRecord("q1", "alpha question", ("d1", "d2", "d3")),
        QueryRecord("q2", "gamma question", ("d1", "d2", "d3")),
    )
    qrels = Qrels({"q1": {"d1": True}, "q2": {"d2": True, "d3": False}}) if labels else None
    return Corpus(TaskKind.STATUTE, documents, queries, qrels)


class TestRankCandidates:
    def test_orders_by_score_then_doc_id(self):
        queries = (QueryRecord("q1", "t", ("d1", "d2", "d3")),)
        scores = [
            PairScore("q1", "d1", 1.0),
            PairScore("q1", "d2", 2.0),
            PairScore("q1", "d3", 2.0),
        ]
        run = rank_candidates(scores, queries, tag="test")
        assert run.rankings["q1"] == (
            RankedDoc("d2", 2.0, 1),
            RankedDoc("d3", 2.0, 2),
            RankedDoc("d1", 1.0, 3),
        )

    def test_excludes_query_from_own_pool(self):
        queries = (QueryRecord("q1", "t", ("q1", "d2")),)
        run = rank_candidates([PairScore("q1", "d2", 1.0)], queries)
        assert run.ranked_ids("q1") == ["d2"]

    def test_missing_score_rejected(self):
        queries = (QueryRecord("q1", "t", ("d1", "d2")),)
        with pytest.raises(ValueError, match="missing scores"):
            rank_candidates([PairScore("q1", "d1", 1.0)], queries)

    def test_duplicate_score_rejected(self):
        queries = (QueryRecord("q1", "t", ("d1",)),)
        scores = [PairScore("q1", "d1", 1.0), PairScore("q1", "d1", 2.0)]
        with pytest.raises(ValueError, match="duplicate"):
            rank_candidates(scores, queries)

    def test_unknown_query_rejected(self):
        queries = (QueryRecord("q1", "t", ("d1",)),)
        scores = [PairScore("q1", "d1", 1.0), PairScore("q9", "d1", 1.0)]
        with pytest.raises(ValueError, match="q9"):
            rank_candidates(scores, queries)

    def test_non_pool_doc_rejected(self):
        queries = (QueryRecord("q1", "t", ("d1",)),)
        scores = [PairScore("q1", "d1", 1.0), PairScore("q1", "d9", 1.0)]
        with pytest.raises(ValueError, match="d9"):
            rank_candidates(scores, queries)

    def test_non_finite_score_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            PairScore("q1", "d1", float("nan"))


class TestRunValidation:
    def test_rank_gap_rejected(self):
        with pytest.raises(ValueError, match="rank"):
            Run("t", {"q1": (RankedDoc("d1", 2.0, 1), RankedDoc("d2", 1.0, 3))})

    def test_increasing_scores_rejected(self):
        with pytest.raises(ValueError, match="increase"):
            Run("t", {"q1": (RankedDoc("d1", 1.0, 1), RankedDoc("d2", 2.0, 2))})

    def test_duplicate_doc_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            Run("t", {"q1": (RankedDoc("d1", 2.0, 1), RankedDoc("d1", 1.0, 2))})

    def test_empty_ranking_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            Run("t", {"q1": ()})

    def test_tag_with_whitespace_rejected(self):
        with pytest.raises(ValueError, match="whitespace"):
            Run("bad tag", {"q1": (RankedDoc("d1", 1.0, 1),)})


class TestPerfectRanking:
    def test_relevant_first_sorted(self):
        corpus = tiny_corpus()
        run = perfect_ranking(corpus)
        assert run.tag == "perfect"
        assert run.ranked_ids("q1") == ["d1", "d2", "d3"]
        assert run.ranked_ids("q2") == ["d2", "d1", "d3"]
        for ranking in run.rankings.values():
            scores = [entry.score for entry in ranking]
            assert scores == sorted(scores, reverse=True)
            assert len(set(scores)) == len(scores)

    def test_requires_qrels(self):
        with pytest.raises(ValueError, match="judgments"):
            perfect_ranking(tiny_corpus(labels=False))

    def test_skips_unjudged_queries(self):
        corpus = tiny_corpus()
        trimmed = Corpus(
            corpus.task_kind,
            corpus.documents,
            corpus.queries,
            Qrels({"q1": {"d1": True}}),
        )
        run = perfect_ranking(trimmed)
        assert run.query_ids() == ["q1"]


class TestRunFile:
    def test_round_trip_equality_and_bytes(self, tmp_path):
        corpus = tiny_corpus()
        run = perfect_ranking(corpus)
        path = tmp_path / "run.txt"
        write_run(run, path)
        loaded = read_run(path)
        assert loaded == run
        rewritten = tmp_path / "again.txt"
        write_run(loaded, rewritten)
        assert rewritten.read_bytes() == path.read_bytes()

    def test_mixed_tags_rejected(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("q1 Q0 d1 1 2.0 tagA\nq1 Q0 d2 2 1.0 tagB\n", encoding="utf-8")
        with pytest.raises(ValueError, match="mixed"):
            read_run(path)

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("q1 Q0 d1 1 2.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":1:"):
            read_run(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ValueError, match="empty"):
            read_run(path)


class TestExternalScores:
    def write(self, tmp_path, lines):
        path = tmp_path / "scores.tsv"
        path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
        return path

    def full_lines(self):
        return [
            "q1\td1\t0.9", "q1\td2\t0.5", "q1\td3\t0.1",
            "q2\td1\t0.2", "q2\td2\t0.8", "q2\td3\t0.3",
        ]

    def test_complete_file_loads(self, tmp_path):
        corpus = tiny_corpus()
        scores = load_external_scores(self.write(tmp_path, self.full_lines()), corpus)
        assert len(scores) == 6
        run = rank_candidates(scores, corpus.queries, tag="external")
        assert run.ranked_ids("q1") == ["d1", "d2", "d3"]

    def test_incomplete_rejected(self, tmp_path):
        corpus = tiny_corpus()
        path = self.write(tmp_path, self.full_lines()[:-1])
        with pytest.raises(ValueError, match="missing"):
            load_external_scores(path, corpus)

    def test_unknown_query_rejected(self, tmp_path):
        corpus = tiny_corpus()
        path = self.write(tmp_path, self.full_lines() + ["q9\td1\t0.5"])
        with pytest.raises(ValueError, match="q9"):
            load_external_scores(path, corpus)

    def test_non_pool_doc_rejected(self, tmp_path):
        corpus = tiny_corpus()
        path = self.write(tmp_path, self.full_lines() + ["q1\td9\t0.5"])
        with pytest.raises(ValueError, match="d9"):
            load_external_scores(path, corpus)

    def test_duplicate_rejected(self, tmp_path):
        corpus = tiny_corpus()
        path = self.write(tmp_path, self.full_lines() + ["q1\td1\t0.9"])
        with pytest.raises(ValueError, match="duplicate"):
            load_external_scores(path, corpus)

    def test_non_finite_rejected(self, tmp_path):
        corpus = tiny_corpus()
        lines = self.full_lines()
        lines[0] = "q1\td1\tinf"
        with pytest.raises(ValueError, match="non-finite"):
            load_external_scores(self.write(tmp_path, lines), corpus)

    def test_unparseable_rejected(self, tmp_path):
        corpus = tiny_corpus()
        lines = self.full_lines()
        lines[0] = "q1\td1\tnot-a-number"
        with pytest.raises(ValueError, match="unparseable"):
            load_external_scores(self.write(tmp_path, lines), corpus)

    def test_wrong_column_count_rejected(self, tmp_path):
        corpus = tiny_corpus()
        path = self.write(tmp_path, ["q1\td1"])
        with pytest.raises(ValueError, match="expected"):
            load_external_scores(path, corpus)


class TestPairBudget:
    def test_boundary_cases(self):
        assert candidate_token_budget(180) == 74
        assert candidate_token_budget(254) == 0
        with pytest.raises(ValueError, match="budget"):
            candidate_token_budget(255)

    def test_no_truncation_when_short(self):
        pair = build_pair_sequence(summary_of(words(10)), summary_of(words(20)))
        assert not pair.truncated
        assert len(pair.candidate_tokens) == 20
        assert pair.estimated_length == 2 * 30 + 3

    def test_exact_180_plus_74(self):
        pair = build_pair_sequence(summary_of(words(180)), summary_of(words(80)))
        assert pair.truncated
        assert len(pair.query_tokens) == 180
        assert len(pair.candidate_tokens) == 74
        assert pair.estimated_length == 2 * 254 + 3 == 511

    def test_budget_always_respected(self):
        rng = random.Random(47)
        for _ in range(100):
            q = summary_of(words(rng.randrange(1, 254)))
            c = summary_of(words(rng.randrange(1, 300)))
            pair = build_pair_sequence(q, c)
            assert pair.estimated_length <= MAX_SEQUENCE_SLOTS
            assert pair.query_tokens == tuple(q.text.lower().split())
            if not pair.truncated:
                assert pair.candidate_tokens == tuple(c.text.lower().split())


class TestExportPairs:
    def summaries(self, corpus):
        table = {doc_id: doc.text for doc_id, doc in corpus.documents.items()}
        for query in corpus.queries:
            table.setdefault(query.query_id, query.text)
        return table

    def test_rows_and_labels(self, tmp_path):
        corpus = tiny_corpus()
        path = tmp_path / "pairs.tsv"
        count = export_pairs(corpus, self.summaries(corpus), path)
        rows = path.read_text(encoding="utf-8").splitlines()
        assert count == len(rows) == 6
        assert rows[0] == "q1\td1\t1\talpha question\talpha beta"
        assert rows[1] == "q1\td2\t0\talpha question\tgamma delta"
        by_pair = {tuple(r.split("\t")[:2]): r.split("\t")[2] for r in rows}
        assert by_pair[("q2", "d2")] == "1"
        assert by_pair[("q2", "d3")] == "0"

    def test_unlabeled_corpus_has_empty_labels(self, tmp_path):
        corpus = tiny_corpus(labels=False)
        path = tmp_path / "pairs.tsv"
        export_pairs(corpus, self.summaries(corpus), path)
        for row in path.read_text(encoding="utf-8").splitlines():
            assert row.split("\t")[2] == ""

    def test_whitespace_flattened(self, tmp_path):
        corpus = tiny_corpus()
        table = self.summaries(corpus)
        table["d1"] = "alpha\tbeta\ngamma  delta"
        path = tmp_path / "pairs.tsv"
        export_pairs(corpus, table, path)
        first = path.read_text(encoding="utf-8").splitlines()[0]
        assert first.split("\t")[4] == "alpha beta gamma delta"

    def test_candidate_cut_at_token_boundary(self, tmp_path):
        documents = {"long": Document("long", "x"), "q": Document("q", "y")}
        corpus = Corpus(
            TaskKind.CASE_LAW,
            documents,
            (QueryRecord("qq", "query text", ("long", "q")),),
        )
        table = {"qq": words(200), "long": words(300), "q": "short"}
        path = tmp_path / "pairs.tsv"
        export_pairs(corpus, table, path)
        rows = {r.split("\t")[1]: r.split("\t")[4] for r in path.read_text().splitlines()}
        kept = rows["long"].split(" ")
        assert len(kept) == candidate_token_budget(200) == 54
        assert kept == words(300).split(" ")[:54]
        assert not rows["long"].endswith(" ")

    def test_missing_summary_rejected(self, tmp_path):
        corpus = tiny_corpus()
        table = self.summaries(corpus)
        del table["d2"]
        with pytest.raises(ValueError, match="d2"):
            export_pairs(corpus, table, tmp_path / "pairs.tsv")
