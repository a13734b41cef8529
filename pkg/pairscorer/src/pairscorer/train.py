"""Training loops: masked-language-model adaptation and pair classification.

Optimizer, learning rate, and batch size defaults live here and are pinned
by the test suite; both loops are single-process and fully seeded.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from transformers import (
    BertForMaskedLM,
    BertForSequenceClassification,
    DataCollatorForLanguageModeling,
)

from .encoding import MAX_SEQUENCE_LENGTH, encode_batch
from .model import load_tokenizer, read_text_lines
from .pairs import PairExample, class_counts, read_pairs
from .runtime import set_deterministic

DEFAULT_EPOCHS = 4
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_BATCH_SIZE = 8
MASK_PROBABILITY = 0.15

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    base_model: str
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE
    batch_size: int = DEFAULT_BATCH_SIZE
    max_length: int = MAX_SEQUENCE_LENGTH
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.base_model:
            raise ValueError("base_model must name a checkpoint directory")
        for name in ("epochs", "batch_size"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not (self.learning_rate > 0):
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate!r}")
        # the pair budget bakes 512 into every downstream file; not tunable
        if self.max_length != MAX_SEQUENCE_LENGTH:
            raise ValueError(
                f"max_length is fixed at {MAX_SEQUENCE_LENGTH}, got {self.max_length!r}"
            )
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class PretrainResult:
    checkpoint: Path
    step_losses: tuple[float, ...]
    config_hash: str


@dataclass(frozen=True)
class FinetuneResult:
    checkpoint: Path
    first_batch_loss: float
    epoch_accuracy: tuple[float, ...]
    config_hash: str


def _save_checkpoint(model, tokenizer, config: TrainConfig, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    record = dict(asdict(config), config_hash=config.config_hash())
    (out_dir / "training_config.json").write_text(
        json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return out_dir


def _batches(order: torch.Tensor, batch_size: int):
    for start in range(0, len(order), batch_size):
        yield order[start : start + batch_size].tolist()


def continue_pretraining(
    corpus_path: str | Path, config: TrainConfig, out_dir: str | Path
) -> PretrainResult:
    """Further masked-language-model training on a one-document-per-line file."""
    lines = read_text_lines(corpus_path)
    set_deterministic(config.seed)
    tokenizer = load_tokenizer(config.base_model)
    model = BertForMaskedLM.from_pretrained(config.base_model)
    model.train()
    collator = DataCollatorForLanguageModeling(
        tokenizer=tokenizer, mlm_probability=MASK_PROBABILITY
    )
    features = [
        dict(input_ids=tokenizer(line, truncation=True, max_length=config.max_length)["input_ids"])
        for line in lines
    ]
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    generator = torch.Generator().manual_seed(config.seed)
    losses = []
    step = 0
    for epoch in range(config.epochs):
        order = torch.randperm(len(features), generator=generator)
        for batch_indexes in _batches(order, config.batch_size):
            batch = collator([features[i] for i in batch_indexes])
            output = model(
                input_ids=batch["input_ids"],
                attention_mask=batch.get(
                    "attention_mask", (batch["input_ids"] != tokenizer.pad_token_id).long()
                ),
                labels=batch["labels"],
            )
            optimizer.zero_grad()
            output.loss.backward()
            optimizer.step()
            step += 1
            loss = float(output.loss.detach())
            losses.append(loss)
            logger.info("pretrain epoch %d step %d: mlm loss %.6f", epoch + 1, step, loss)
    checkpoint = _save_checkpoint(model, tokenizer, config, out_dir)
    return PretrainResult(checkpoint, tuple(losses), config.config_hash())


def _training_accuracy(model, pairs: list[PairExample], tokenizer, config: TrainConfig) -> float:
    model.eval()
    correct = 0
    with torch.no_grad():
        for start in range(0, len(pairs), config.batch_size):
            chunk = pairs[start : start + config.batch_size]
            input_ids, token_type_ids, attention_mask = encode_batch(
                tokenizer, chunk, config.max_length
            )
            logits = model(
                input_ids=input_ids,
                token_type_ids=token_type_ids,
                attention_mask=attention_mask,
            ).logits
            predictions = logits.argmax(dim=-1).tolist()
            correct += sum(int(p == pair.label) for p, pair in zip(predictions, chunk))
    model.train()
    return correct / len(pairs)


def finetune_classifier(
    pairs_path: str | Path, config: TrainConfig, out_dir: str | Path
) -> FinetuneResult:
    """Train a binary relevance head on labeled pairs.

    The head sits on the pooled leading token; the loss is cross-entropy.
    Training accuracy is measured over the full set after every epoch.
    """
    pairs = read_pairs(pairs_path)
    negatives, positives = class_counts(pairs)
    if negatives == 0 or positives == 0:
        present = 1 if positives else 0
        raise ValueError(
            f"single-class data: all {len(pairs)} examples are labeled {present}"
        )
    for label, count in ((0, negatives), (1, positives)):
        if count < 2:
            raise ValueError(f"class {label} has only {count} example(s); at least 2 required")
    set_deterministic(config.seed)
    tokenizer = load_tokenizer(config.base_model)
    model = BertForSequenceClassification.from_pretrained(config.base_model, num_labels=2)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    generator = torch.Generator().manual_seed(config.seed)
    first_batch_loss = None
    accuracies = []
    for epoch in range(config.epochs):
        order = torch.randperm(len(pairs), generator=generator)
        for batch_indexes in _batches(order, config.batch_size):
            chunk = [pairs[i] for i in batch_indexes]
            input_ids, token_type_ids, attention_mask = encode_batch(
                tokenizer, chunk, config.max_length
            )
            labels = torch.tensor([pair.label for pair in chunk])
            output = model(
                input_ids=input_ids,
                token_type_ids=token_type_ids,
                attention_mask=attention_mask,
                labels=labels,
            )
            if first_batch_loss is None:
                first_batch_loss = float(output.loss.detach())
            optimizer.zero_grad()
            output.loss.backward()
            optimizer.step()
        accuracy = _training_accuracy(model, pairs, tokenizer, config)
        accuracies.append(accuracy)
        logger.info("finetune epoch %d: training accuracy %.4f", epoch + 1, accuracy)
    checkpoint = _save_checkpoint(model, tokenizer, config, out_dir)
    return FinetuneResult(
        checkpoint, first_batch_loss, tuple(accuracies), config.config_hash()
    )
