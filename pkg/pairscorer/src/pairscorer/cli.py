"""Command-line front end: init, pretrain, finetune, score."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .model import BackboneSize, build_backbone, read_text_lines
from .scoring import DEFAULT_SCORE_BATCH, score_pairs
from .train import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
    TrainConfig,
    continue_pretraining,
    finetune_classifier,
)


def _train_config(args: argparse.Namespace, default_epochs: int) -> TrainConfig:
    return TrainConfig(
        base_model=args.base,
        epochs=args.epochs if args.epochs is not None else default_epochs,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        seed=args.seed,
    )


def cmd_init(args: argparse.Namespace) -> int:
    lines = read_text_lines(args.texts)
    size = BackboneSize(
        vocab_size=args.vocab_size,
        hidden_size=args.hidden_size,
        num_layers=args.layers,
        num_heads=args.heads,
    )
    out = build_backbone(lines, args.out, size, seed=args.seed)
    print(f"initialized backbone at {out} from {len(lines)} lines")
    return 0


def cmd_pretrain(args: argparse.Namespace) -> int:
    config = _train_config(args, default_epochs=1)
    result = continue_pretraining(args.corpus, config, args.out)
    print(
        f"pretrained {config.epochs} epoch(s), {len(result.step_losses)} steps: "
        f"first loss {result.step_losses[0]:.4f}, last loss {result.step_losses[-1]:.4f}"
    )
    print(f"checkpoint {result.checkpoint} (config {result.config_hash})")
    return 0


def cmd_finetune(args: argparse.Namespace) -> int:
    config = _train_config(args, default_epochs=DEFAULT_EPOCHS)
    result = finetune_classifier(args.pairs, config, args.out)
    print(
        f"finetuned {config.epochs} epoch(s): first batch loss "
        f"{result.first_batch_loss:.4f}, final training accuracy {result.epoch_accuracy[-1]:.4f}"
    )
    print(f"checkpoint {result.checkpoint} (config {result.config_hash})")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    count = score_pairs(args.model, args.pairs, args.out, batch_size=args.batch_size)
    print(f"scored {count} pairs to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairscorer",
        description="train and apply a small transformer pair-relevance classifier",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add_training_flags(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--base", required=True, help="base checkpoint directory")
        sub.add_argument("--out", required=True, help="output checkpoint directory")
        sub.add_argument("--epochs", type=int, default=None)
        sub.add_argument("--learning-rate", type=float, default=DEFAULT_LEARNING_RATE)
        sub.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
        sub.add_argument("--seed", type=int, default=0)

    init = commands.add_parser("init", help="build a fresh miniature backbone")
    init.add_argument("--texts", required=True, help="one-document-per-line text file")
    init.add_argument("--out", required=True)
    init.add_argument("--vocab-size", type=int, default=BackboneSize().vocab_size)
    init.add_argument("--hidden-size", type=int, default=BackboneSize().hidden_size)
    init.add_argument("--layers", type=int, default=BackboneSize().num_layers)
    init.add_argument("--heads", type=int, default=BackboneSize().num_heads)
    init.add_argument("--seed", type=int, default=0)
    init.set_defaults(handler=cmd_init)

    pretrain = commands.add_parser("pretrain", help="continue masked-language-model training")
    pretrain.add_argument("--corpus", required=True, help="one-document-per-line text file")
    add_training_flags(pretrain)
    pretrain.set_defaults(handler=cmd_pretrain)

    finetune = commands.add_parser("finetune", help="train the pair relevance classifier")
    finetune.add_argument("--pairs", required=True, help="labeled pair TSV")
    add_training_flags(finetune)
    finetune.set_defaults(handler=cmd_finetune)

    score = commands.add_parser("score", help="emit a ranker-ready score file")
    score.add_argument("--model", required=True, help="finetuned checkpoint directory")
    score.add_argument("--pairs", required=True, help="pair TSV to score")
    score.add_argument("--out", required=True, help="score TSV path")
    score.add_argument("--batch-size", type=int, default=DEFAULT_SCORE_BATCH)
    score.set_defaults(handler=cmd_score)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
