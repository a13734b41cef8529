import math
import random

import pytest
from sklearn.base import clone

from legalrank.summarize import (
    SentenceGraph,
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
from legalrank.textproc import split_sentences, tokenize_words

from oracles import dense_pagerank


def toks(text):
    return tokenize_words(text)


class TestSimilarity:
    def test_hand_computed_pair(self):
        sentences = [toks("a b"), toks("a c")]
        stats = collection_stats(sentences)
        # Only "a" is shared: df=2 over 2 sentences, tf=1, both lengths at
        # the average, so each direction reduces to idf alone.
        idf_a = math.log(1.0 + 0.5 / 2.5)
        got = sentence_similarity(sentences[0], sentences[1], stats)
        assert got == pytest.approx(idf_a, abs=1e-12)

    def test_symmetric(self):
        rng = random.Random(5)
        vocab = ["alpha", "beta", "gamma", "delta", "epsilon"]
        for _ in range(50):
            sents = [
                toks(" ".join(rng.choices(vocab, k=rng.randrange(1, 8))))
                for _ in range(rng.randrange(2, 6))
            ]
            stats = collection_stats(sents)
            a, b = rng.sample(range(len(sents)), 2)
            assert sentence_similarity(sents[a], sents[b], stats) == pytest.approx(
                sentence_similarity(sents[b], sents[a], stats), abs=1e-12
            )

    def test_disjoint_vocabulary_is_zero(self):
        sentences = [toks("alpha beta"), toks("gamma delta")]
        stats = collection_stats(sentences)
        assert sentence_similarity(sentences[0], sentences[1], stats) == 0.0

    def test_stats_counts(self):
        stats = collection_stats([toks("a b b"), toks("b c")])
        assert stats.doc_freq == {"a": 1, "b": 2, "c": 1}
        assert stats.avg_len == 2.5
        assert stats.sentence_count == 2


class TestGraph:
    def test_zero_edges_dropped_and_keys_canonical(self):
        graph = build_sentence_graph([toks("alpha beta"), toks("gamma"), toks("alpha")])
        assert all(i < j for i, j in graph.weights)
        assert (1, 2) not in graph.weights
        assert graph.weight(2, 0) == graph.weight(0, 2) > 0
        assert graph.weight(1, 1) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_sentence_graph([])


class TestPageRank:
    def test_uniform_on_equal_complete_graph(self):
        for n in (2, 5, 17):
            weights = {(i, j): 1.0 for i in range(n) for j in range(i + 1, n)}
            result = pagerank(SentenceGraph(tuple(range(n)), weights))
            assert result.converged
            for score in result.scores.values():
                assert score == pytest.approx(1.0 / n, abs=1e-9)

    def test_scores_sum_to_one(self):
        rng = random.Random(13)
        for _ in range(50):
            n = rng.randrange(1, 12)
            weights = {
                (i, j): rng.random()
                for i in range(n)
                for j in range(i + 1, n)
                if rng.random() < 0.5
            }
            result = pagerank(SentenceGraph(tuple(range(n)), weights))
            assert sum(result.scores.values()) == pytest.approx(1.0, abs=1e-9)

    def test_matches_dense_oracle(self):
        rng = random.Random(29)
        config = SummaryConfig()
        for _ in range(30):
            n = rng.randrange(2, 15)
            weights = {
                (i, j): rng.uniform(0.1, 2.0)
                for i in range(n)
                for j in range(i + 1, n)
                if rng.random() < 0.6
            }
            result = pagerank(SentenceGraph(tuple(range(n)), weights), config)
            expected = dense_pagerank(n, weights, config.damping)
            for i in range(n):
                assert result.scores[i] == pytest.approx(expected[i], abs=1e-8)

    def test_dangling_nodes_share_mass(self):
        # One isolated node: it keeps only teleport + dangling share.
        weights = {(0, 1): 1.0}
        result = pagerank(SentenceGraph((0, 1, 2), weights))
        assert sum(result.scores.values()) == pytest.approx(1.0, abs=1e-12)
        assert result.scores[0] == pytest.approx(result.scores[1], abs=1e-12)
        assert result.scores[2] < result.scores[0]

    def test_non_convergence_reports_last_iterate(self):
        weights = {(0, 1): 1.0, (1, 2): 5.0}
        config = SummaryConfig(max_iterations=1)
        result = pagerank(SentenceGraph((0, 1, 2), weights), config)
        assert not result.converged
        assert result.iterations == 1
        assert sum(result.scores.values()) == pytest.approx(1.0, abs=1e-12)

    def test_single_node(self):
        result = pagerank(SentenceGraph((0,), {}))
        assert result.scores == {0: 1.0}
        assert result.converged


class TestSummarize:
    def test_short_text_is_identity(self):
        text = "The court ruled on the motion. The appeal was dismissed with costs."
        summary = summarize(text)
        assert summary.text == "The court ruled on the motion. The appeal was dismissed with costs."
        assert summary.selected == (0, 1)

    def test_budget_respected(self):
        sentences = " ".join(
            f"Filler sentence number {i} about procedure and appeals here." for i in range(60)
        )
        summary = summarize(sentences, SummaryConfig(word_budget=20))
        assert summary.word_count <= 20
        assert len(summary.selected) == 2

    def test_single_oversize_sentence(self):
        words = " ".join(f"word{i}" for i in range(300))
        summary = summarize(words + ".", SummaryConfig(word_budget=180))
        assert summary.selected == (0,)
        assert summary.word_count == 300

    def test_sentences_verbatim_and_ordered(self):
        rng = random.Random(41)
        vocab = ["claim", "court", "notice", "appeal", "costs", "breach", "tenant"]
        for _ in range(30):
            n = rng.randrange(1, 15)
            text = " ".join(
                " ".join(rng.choices(vocab, k=rng.randrange(3, 9))).capitalize() + "."
                for _ in range(n)
            )
            spans = split_sentences(text)
            summary = summarize(text, SummaryConfig(word_budget=25))
            assert list(summary.selected) == sorted(set(summary.selected))
            expected = " ".join(spans[i].text for i in summary.selected)
            assert summary.text == expected
            count = sum(len(tokenize_words(spans[i].text).tokens) for i in summary.selected)
            assert count == summary.word_count
            assert summary.word_count <= 25 or len(summary.selected) == 1

    def test_deterministic(self):
        text = " ".join(f"Sentence about topic {i % 5} here." for i in range(30))
        assert summarize(text) == summarize(text)

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            summarize("   ")

    def test_tie_break_prefers_earlier_sentence(self):
        # Identical sentences tie exactly; the budget fits only two.
        text = "Alpha beta gamma delta. Alpha beta gamma delta. Alpha beta gamma delta."
        summary = summarize(text, SummaryConfig(word_budget=8))
        assert summary.selected == (0, 1)


class TestSummaryConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SummaryConfig(word_budget=0)
        with pytest.raises(ValueError):
            SummaryConfig(damping=1.0)
        with pytest.raises(ValueError):
            SummaryConfig(tolerance=0.0)
        with pytest.raises(ValueError):
            SummaryConfig(max_iterations=0)

    def test_cache_key_tracks_fields(self):
        assert SummaryConfig().cache_key() == SummaryConfig().cache_key()
        assert SummaryConfig().cache_key() != SummaryConfig(word_budget=90).cache_key()


class TestCache:
    def test_round_trip_with_escapes(self, tmp_path):
        path = tmp_path / "summaries.tsv"
        summaries = {
            "d1": "plain text",
            "d2": "tab\there and\nnewline and \\ backslash",
            "d3": "",
        }
        config = SummaryConfig()
        write_summary_cache(summaries, config, path)
        assert read_summary_cache(path, config) == summaries

    def test_rewrite_is_bit_identical(self, tmp_path):
        config = SummaryConfig()
        summaries = {"b": "beta", "a": "alpha"}
        first = tmp_path / "one.tsv"
        second = tmp_path / "two.tsv"
        write_summary_cache(summaries, config, first)
        write_summary_cache(dict(reversed(summaries.items())), config, second)
        assert first.read_bytes() == second.read_bytes()

    def test_config_mismatch_rejected(self, tmp_path):
        path = tmp_path / "summaries.tsv"
        write_summary_cache({"d": "text"}, SummaryConfig(), path)
        with pytest.raises(ValueError, match="different config"):
            read_summary_cache(path, SummaryConfig(word_budget=90))

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "summaries.tsv"
        path.write_text("d1\ttext\n", encoding="utf-8")
        with pytest.raises(ValueError, match="header"):
            read_summary_cache(path)

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "summaries.tsv"
        write_summary_cache({"d": "text"}, SummaryConfig(), path)
        with path.open("a", encoding="utf-8") as handle:
            handle.write("d\tagain\n")
        with pytest.raises(ValueError, match="duplicate"):
            read_summary_cache(path)


class TestEstimator:
    def test_transform_matches_function(self):
        texts = [
            "The first document sentence. Another sentence follows it.",
            "A second document entirely. With its own two sentences.",
        ]
        estimator = TextRankSummarizer(word_budget=6)
        config = SummaryConfig(word_budget=6)
        assert estimator.fit(texts).transform(texts) == [
            summarize(text, config) for text in texts
        ]

    def test_get_params_round_trip(self):
        estimator = TextRankSummarizer(word_budget=90, damping=0.7)
        params = estimator.get_params()
        assert params["word_budget"] == 90
        assert params["damping"] == 0.7
        cloned = clone(estimator)
        assert cloned.get_params() == params

    def test_invalid_params_fail_at_fit(self):
        with pytest.raises(ValueError):
            TextRankSummarizer(word_budget=-1).fit([])
