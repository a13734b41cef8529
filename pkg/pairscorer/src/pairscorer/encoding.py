"""Subword encoding of text pairs under a fixed 512-token sequence budget.

The upstream exporter pre-truncates candidates using a word-count estimate
of two subwords per word.  Encoding here re-applies the cut in true subword
space; whenever the two disagree about the need to cut, a debug line records
the divergence.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import Sequence

import torch

from .pairs import PairExample

MAX_SEQUENCE_LENGTH = 512
# [CLS] text [SEP] text [SEP]
CONTROL_TOKENS = 3
WORD_TO_SUBWORD_FACTOR = 2.0

_WORD_RE = re.compile(r"[^\W_]+")

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EncodedPair:
    """One classifier input: ids, segment ids, and mask, query side intact."""

    input_ids: tuple[int, ...]
    token_type_ids: tuple[int, ...]
    attention_mask: tuple[int, ...]
    truncated: bool

    def __len__(self) -> int:
        return len(self.input_ids)


def estimate_pair_length(query_text: str, candidate_text: str) -> int:
    """The exporter's word-space estimate of the encoded pair length."""
    query_words = len(_WORD_RE.findall(query_text))
    candidate_words = len(_WORD_RE.findall(candidate_text))
    return (
        CONTROL_TOKENS
        + math.ceil(WORD_TO_SUBWORD_FACTOR * query_words)
        + math.ceil(WORD_TO_SUBWORD_FACTOR * candidate_words)
    )


def encode_pair(
    tokenizer, query_text: str, candidate_text: str, max_length: int = MAX_SEQUENCE_LENGTH
) -> EncodedPair:
    """Encode [CLS] query [SEP] candidate [SEP], cutting the candidate tail.

    The query side is never shortened; a query that alone exceeds the
    budget is a sequence encoding failure.
    """
    query_ids = tokenizer(query_text, add_special_tokens=False)["input_ids"]
    candidate_ids = tokenizer(candidate_text, add_special_tokens=False)["input_ids"]
    budget = max_length - CONTROL_TOKENS - len(query_ids)
    if budget < 0:
        raise ValueError(
            f"sequence encoding failure: query occupies {len(query_ids)} of the "
            f"{max_length - CONTROL_TOKENS} subword slots available to the pair"
        )
    truncated = len(candidate_ids) > budget
    estimated = estimate_pair_length(query_text, candidate_text)
    if truncated != (estimated > max_length):
        logger.debug(
            "truncation divergence: word estimate %d vs true length %d for budget %d",
            estimated,
            CONTROL_TOKENS + len(query_ids) + len(candidate_ids),
            max_length,
        )
    kept = candidate_ids[:budget]
    input_ids = (
        [tokenizer.cls_token_id]
        + query_ids
        + [tokenizer.sep_token_id]
        + kept
        + [tokenizer.sep_token_id]
    )
    token_type_ids = [0] * (len(query_ids) + 2) + [1] * (len(kept) + 1)
    return EncodedPair(
        tuple(input_ids), tuple(token_type_ids), (1,) * len(input_ids), truncated
    )


def encode_batch(
    tokenizer, pairs: Sequence[PairExample], max_length: int = MAX_SEQUENCE_LENGTH
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Encode pairs and pad to a rectangle: (input_ids, token_type_ids, mask)."""
    encoded = [encode_pair(tokenizer, p.query_text, p.candidate_text, max_length) for p in pairs]
    width = max(len(e) for e in encoded)
    pad_id = tokenizer.pad_token_id
    input_ids = torch.tensor([list(e.input_ids) + [pad_id] * (width - len(e)) for e in encoded])
    token_type_ids = torch.tensor(
        [list(e.token_type_ids) + [0] * (width - len(e)) for e in encoded]
    )
    attention_mask = torch.tensor(
        [list(e.attention_mask) + [0] * (width - len(e)) for e in encoded]
    )
    return input_ids, token_type_ids, attention_mask
