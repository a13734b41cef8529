"""Miniature BERT backbone assembled entirely offline.

A WordPiece vocabulary is trained on the task's own texts, then paired with
a freshly seeded encoder small enough to train on a CPU in seconds.  The
resulting directory loads through the standard from_pretrained machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, trainers
from transformers import BertConfig, BertForMaskedLM, BertTokenizerFast

from .runtime import quiet_transformers, set_deterministic

SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")


@dataclass(frozen=True)
class BackboneSize:
    """Encoder dimensions; the defaults train in seconds on one CPU core."""

    vocab_size: int = 400
    hidden_size: int = 64
    num_layers: int = 2
    num_heads: int = 2
    intermediate_size: int = 128

    def __post_init__(self) -> None:
        for name in ("vocab_size", "hidden_size", "num_layers", "num_heads", "intermediate_size"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.hidden_size % self.num_heads != 0:
            raise ValueError(
                f"hidden_size {self.hidden_size} is not divisible by num_heads {self.num_heads}"
            )


def train_wordpiece(lines: Sequence[str], vocab_size: int) -> BertTokenizerFast:
    """Train a lowercasing WordPiece vocabulary on the given lines."""
    quiet_transformers()
    tokenizer = Tokenizer(models.WordPiece(unk_token="[UNK]"))
    tokenizer.normalizer = normalizers.BertNormalizer(lowercase=True)
    tokenizer.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    trainer = trainers.WordPieceTrainer(
        vocab_size=vocab_size, special_tokens=list(SPECIAL_TOKENS), show_progress=False
    )
    tokenizer.train_from_iterator(lines, trainer)
    return BertTokenizerFast(
        tokenizer_object=tokenizer,
        pad_token="[PAD]",
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
        model_max_length=512,
    )


def read_text_lines(path: str | Path) -> list[str]:
    """Non-blank lines of a one-document-per-line text file."""
    lines = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise ValueError(f"{path}: text corpus is empty")
    return lines


def build_backbone(
    lines: Iterable[str],
    out_dir: str | Path,
    size: BackboneSize = BackboneSize(),
    seed: int = 0,
) -> Path:
    """Create a tokenizer plus seeded masked-language model under out_dir."""
    lines = [line for line in (l.strip() for l in lines) if line]
    if not lines:
        raise ValueError("cannot build a backbone from an empty text collection")
    set_deterministic(seed)
    tokenizer = train_wordpiece(lines, size.vocab_size)
    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=size.hidden_size,
        num_hidden_layers=size.num_layers,
        num_attention_heads=size.num_heads,
        intermediate_size=size.intermediate_size,
        max_position_embeddings=512,
        pad_token_id=tokenizer.pad_token_id,
    )
    model = BertForMaskedLM(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir


def load_tokenizer(checkpoint: str | Path) -> BertTokenizerFast:
    quiet_transformers()
    return BertTokenizerFast.from_pretrained(str(checkpoint))


def freeze_eval(model: torch.nn.Module) -> torch.nn.Module:
    """Inference mode: no dropout, no gradients."""
    model.eval()
    for parameter in model.parameters():
        parameter.requires_grad_(False)
    return model
