"""Process-wide switches for quiet, bit-reproducible runs."""

from __future__ import annotations

import os
import random

import torch
import transformers


def quiet_transformers() -> None:
    """Silence load reports and progress bars; force offline model resolution."""
    os.environ.setdefault("HF_HUB_OFFLINE", "1")
    os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")
    transformers.logging.set_verbosity_error()
    transformers.logging.disable_progress_bar()


def set_deterministic(seed: int) -> None:
    """Pin every source of randomness so a rerun reproduces bytes exactly."""
    quiet_transformers()
    random.seed(seed)
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    # single-threaded reductions keep floating-point sums order-stable
    torch.set_num_threads(1)
