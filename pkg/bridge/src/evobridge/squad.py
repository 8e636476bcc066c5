"""Reproducible sampling of question records from a local SQuAD JSON dump."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .errors import BridgeError

DATASET_URLS = (
    "https://rajpurkar.github.io/SQuAD-explorer/dataset/train-v1.1.json",
    "https://rajpurkar.github.io/SQuAD-explorer/dataset/dev-v1.1.json",
)


def load_squad_questions(path: str | Path) -> list[tuple[str, str]]:
    """All (id, question) pairs of a SQuAD v1.x/v2.x JSON file, in document order."""
    path = Path(path)
    if not path.exists():
        raise BridgeError(
            f"dataset file {path} not found; download one of:\n  "
            + "\n  ".join(DATASET_URLS)
            + "\nand pass it via --dataset-file"
        )
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
        articles = payload["data"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise BridgeError(f"{path}: not a SQuAD-format JSON file: {exc}") from exc
    questions: list[tuple[str, str]] = []
    seen: set[str] = set()
    try:
        for article in articles:
            for paragraph in article["paragraphs"]:
                for qa in paragraph["qas"]:
                    qid = str(qa["id"])
                    if qid in seen:
                        continue
                    seen.add(qid)
                    questions.append((qid, str(qa["question"])))
    except (KeyError, TypeError) as exc:
        raise BridgeError(f"{path}: malformed SQuAD structure: {exc}") from exc
    if not questions:
        raise BridgeError(f"{path}: no questions found")
    return questions


def fetch_squad_subset(
    count: int, out_path: str | Path, seed: int, dataset_path: str | Path
) -> int:
    """Sample ``count`` questions reproducibly by seed and write a texts JSONL.

    Asking for more questions than the dataset holds emits the whole dataset
    with a warning. Returns the number of records written.
    """
    if count < 1:
        raise BridgeError(f"count must be positive, got {count}")
    questions = load_squad_questions(dataset_path)
    if count > len(questions):
        print(
            f"warning: requested {count} questions but the dataset has {len(questions)}; "
            "emitting all of them",
            file=sys.stderr,
        )
        count = len(questions)
    rng = np.random.default_rng(seed)
    picks = rng.permutation(len(questions))[:count]
    with open(out_path, "w", encoding="utf-8") as out:
        for idx in picks:
            qid, text = questions[int(idx)]
            out.write(json.dumps({"id": qid, "text": text}, ensure_ascii=False) + "\n")
    return count
