"""Inference: turn a trained pair classifier into a ranker-ready score file."""

from __future__ import annotations

import math
from pathlib import Path

import torch
from transformers import BertForSequenceClassification

from .encoding import MAX_SEQUENCE_LENGTH, encode_batch
from .model import freeze_eval, load_tokenizer
from .pairs import read_pairs, write_scores
from .runtime import set_deterministic

DEFAULT_SCORE_BATCH = 32


def pair_probabilities(negative_logit: float, positive_logit: float) -> tuple[float, float]:
    """Two-way softmax in float64; the pair sums to 1."""
    peak = max(negative_logit, positive_logit)
    exp_negative = math.exp(negative_logit - peak)
    exp_positive = math.exp(positive_logit - peak)
    total = exp_negative + exp_positive
    return exp_negative / total, exp_positive / total


def positive_probability(negative_logit: float, positive_logit: float) -> float:
    """p(positive), nudged off 0.0 and 1.0 so emitted scores stay in (0, 1)."""
    probability = pair_probabilities(negative_logit, positive_logit)[1]
    if probability >= 1.0:
        return math.nextafter(1.0, 0.0)
    if probability <= 0.0:
        return math.nextafter(0.0, 1.0)
    return probability


def score_pairs(
    checkpoint: str | Path,
    pairs_path: str | Path,
    out_path: str | Path,
    batch_size: int = DEFAULT_SCORE_BATCH,
) -> int:
    """Score every row of a pair TSV, preserving input order.

    Labels in the input, if any, are ignored.  Returns the row count,
    which always equals the input row count.
    """
    if not isinstance(batch_size, int) or isinstance(batch_size, bool) or batch_size <= 0:
        raise ValueError(f"batch_size must be a positive integer, got {batch_size!r}")
    pairs = read_pairs(pairs_path)
    set_deterministic(0)
    tokenizer = load_tokenizer(checkpoint)
    model = freeze_eval(BertForSequenceClassification.from_pretrained(str(checkpoint)))
    rows = []
    with torch.no_grad():
        for start in range(0, len(pairs), batch_size):
            chunk = pairs[start : start + batch_size]
            input_ids, token_type_ids, attention_mask = encode_batch(
                tokenizer, chunk, MAX_SEQUENCE_LENGTH
            )
            logits = model(
                input_ids=input_ids,
                token_type_ids=token_type_ids,
                attention_mask=attention_mask,
            ).logits.double()
            for pair, (negative, positive) in zip(chunk, logits.tolist()):
                rows.append(
                    (pair.query_id, pair.doc_id, positive_probability(negative, positive))
                )
    return write_scores(rows, out_path)
