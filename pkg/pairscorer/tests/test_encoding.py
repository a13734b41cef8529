import random

import pytest
import torch

from pairscorer import (
    CONTROL_TOKENS,
    MAX_SEQUENCE_LENGTH,
    PairExample,
    encode_batch,
    encode_pair,
    estimate_pair_length,
    load_tokenizer,
)


@pytest.fixture(scope="module")
def tokenizer(backbone_dir):
    return load_tokenizer(backbone_dir)


class TestEstimate:
    def test_hand_case(self):
        # 3 control slots + 2*2 + 2*3 word-doubled slots
        assert estimate_pair_length("two words", "three more words") == 13

    def test_empty_pair_is_control_only(self):
        assert estimate_pair_length("", "") == CONTROL_TOKENS


class TestEncodePair:
    def test_structure_of_short_pair(self, tokenizer):
        pair = encode_pair(tokenizer, "marker zmark1", "entry one content")
        assert not pair.truncated
        assert pair.input_ids[0] == tokenizer.cls_token_id
        assert pair.input_ids[-1] == tokenizer.sep_token_id
        assert pair.input_ids.count(tokenizer.sep_token_id) == 2
        sep_at = pair.input_ids.index(tokenizer.sep_token_id)
        assert set(pair.token_type_ids[: sep_at + 1]) == {0}
        assert set(pair.token_type_ids[sep_at + 1 :]) == {1}
        assert pair.attention_mask == (1,) * len(pair)
        assert len(pair.input_ids) == len(pair.token_type_ids)

    def test_long_candidate_is_cut_to_the_budget(self, tokenizer):
        query = "marker zmark1"
        candidate = " ".join(["content"] * 900)
        pair = encode_pair(tokenizer, query, candidate)
        assert pair.truncated
        assert len(pair) == MAX_SEQUENCE_LENGTH
        query_ids = tuple(tokenizer(query, add_special_tokens=False)["input_ids"])
        assert pair.input_ids[1 : 1 + len(query_ids)] == query_ids

    def test_query_side_is_never_shortened(self, tokenizer):
        query = " ".join(["record"] * 200)
        pair = encode_pair(tokenizer, query, " ".join(["content"] * 600))
        query_ids = tuple(tokenizer(query, add_special_tokens=False)["input_ids"])
        assert pair.input_ids[1 : 1 + len(query_ids)] == query_ids
        assert len(pair) <= MAX_SEQUENCE_LENGTH

    def test_oversize_query_is_an_encoding_failure(self, tokenizer):
        query = " ".join(f"unseenword{i}" for i in range(600))
        with pytest.raises(ValueError, match="sequence encoding failure"):
            encode_pair(tokenizer, query, "short")

    def test_budget_holds_over_random_pairs(self, tokenizer):
        rng = random.Random(17)
        words = ["marker", "record", "entry", "content", "routine", "zmark3"]
        for _ in range(50):
            query = " ".join(rng.choices(words, k=rng.randrange(1, 120)))
            candidate = " ".join(rng.choices(words, k=rng.randrange(1, 700)))
            pair = encode_pair(tokenizer, query, candidate)
            assert len(pair) <= MAX_SEQUENCE_LENGTH


class TestEncodeBatch:
    def test_rectangle_padded_with_pad_id(self, tokenizer):
        pairs = [
            PairExample("q", "a", "marker zmark1", "entry one"),
            PairExample("q", "b", "marker zmark1", " ".join(["content"] * 30)),
        ]
        input_ids, token_type_ids, attention_mask = encode_batch(tokenizer, pairs)
        assert input_ids.shape == token_type_ids.shape == attention_mask.shape
        assert input_ids.shape[0] == 2
        short_width = int(attention_mask[0].sum())
        assert torch.all(input_ids[0, short_width:] == tokenizer.pad_token_id)
        assert torch.all(attention_mask[0, short_width:] == 0)
