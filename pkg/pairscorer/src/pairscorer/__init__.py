"""Small transformer pair classifier that plugs into the legalrank score-file interface."""

from .encoding import (
    CONTROL_TOKENS,
    MAX_SEQUENCE_LENGTH,
    EncodedPair,
    encode_batch,
    encode_pair,
    estimate_pair_length,
)
from .model import BackboneSize, build_backbone, load_tokenizer, read_text_lines, train_wordpiece
from .pairs import PairExample, class_counts, read_pairs, write_scores
from .runtime import set_deterministic
from .scoring import pair_probabilities, positive_probability, score_pairs
from .train import (
    FinetuneResult,
    PretrainResult,
    TrainConfig,
    continue_pretraining,
    finetune_classifier,
)

__version__ = "0.1.0"

__all__ = [
    "BackboneSize",
    "CONTROL_TOKENS",
    "EncodedPair",
    "FinetuneResult",
    "MAX_SEQUENCE_LENGTH",
    "PairExample",
    "PretrainResult",
    "TrainConfig",
    "build_backbone",
    "class_counts",
    "continue_pretraining",
    "encode_batch",
    "encode_pair",
    "estimate_pair_length",
    "finetune_classifier",
    "load_tokenizer",
    "pair_probabilities",
    "positive_probability",
    "read_pairs",
    "read_text_lines",
    "score_pairs",
    "set_deterministic",
    "train_wordpiece",
    "write_scores",
]
