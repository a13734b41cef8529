"""Shared fixtures: a small separable pair task and one trained classifier.

Training runs once per session; every test that needs a checkpoint reuses it.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from pairscorer import TrainConfig, build_backbone, finetune_classifier


def toy_rows() -> tuple[list[str], list[str]]:
    """(text lines, pair TSV rows) for 8 queries x 8 candidates, half relevant.

    A candidate is relevant exactly when it shares its query's rare marker
    token, so the task is linearly separable at the vocabulary level.
    """
    texts = []
    rows = []
    for q in range(8):
        query_id = f"q{q}"
        query_text = f"Locate passages citing marker zmark{q} in the record."
        texts.append(query_text)
        for c in range(8):
            doc_id = f"q{q}d{c}"
            if c < 4:
                candidate = (
                    f"This passage cites marker zmark{q} directly, "
                    f"and zmark{q} recurs in entry {c}."
                )
                label = "1"
            else:
                candidate = (
                    f"This passage reviews routine procedural filler content "
                    f"only in entry {c}."
                )
                label = "0"
            texts.append(candidate)
            rows.append(f"{query_id}\t{doc_id}\t{label}\t{query_text}\t{candidate}")
    return texts, rows


@pytest.fixture(scope="session")
def toy_task(tmp_path_factory) -> dict:
    root = tmp_path_factory.mktemp("toy")
    texts, rows = toy_rows()
    texts_path = root / "texts.txt"
    pairs_path = root / "pairs.tsv"
    texts_path.write_text("\n".join(texts) + "\n", encoding="utf-8")
    pairs_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return dict(root=root, texts=texts_path, pairs=pairs_path, lines=texts, rows=rows)


@pytest.fixture(scope="session")
def backbone_dir(toy_task) -> Path:
    return build_backbone(toy_task["lines"], toy_task["root"] / "base", seed=0)


@pytest.fixture(scope="session")
def trained(toy_task, backbone_dir):
    config = TrainConfig(base_model=str(backbone_dir), epochs=20, seed=0)
    result = finetune_classifier(toy_task["pairs"], config, toy_task["root"] / "classifier")
    return result
