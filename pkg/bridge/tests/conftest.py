from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Sequence

import numpy as np
import pytest


class StubEncoder:
    """Deterministic offline stand-in: 512-dim unit vectors keyed by text hash."""

    def __init__(self, dim: int = 512):
        self.model_id = f"stub-hash-{dim}"
        self.dim = dim

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        rows = []
        for text in texts:
            digest = hashlib.sha256(text.encode("utf-8")).digest()
            key = int.from_bytes(digest[:8], "little")
            rng = np.random.Generator(np.random.Philox(key=key))
            row = rng.standard_normal(self.dim)
            norm = np.linalg.norm(row)
            rows.append(row / norm if norm else row)
        return np.asarray(rows, dtype=np.float32)


class FlakyEncoder(StubEncoder):
    """Raises on any text containing the poison marker; used for skip-path tests."""

    POISON = "@@fail@@"

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        if any(self.POISON in t for t in texts):
            raise RuntimeError("cannot encode poisoned text")
        return super().encode(texts)


def make_squad_file(path: Path, question_count: int, title_count: int = 5) -> None:
    """Synthetic dataset in SQuAD v1.1 JSON structure with the given question count."""
    words = [
        "tower", "river", "battle", "treaty", "engine", "planet", "enzyme",
        "poet", "glacier", "senate", "harbor", "comet", "abbey", "circuit",
    ]
    articles = []
    qid = 0
    per_title = max(1, question_count // title_count)
    while qid < question_count:
        paragraphs = []
        qas = []
        for _ in range(min(per_title, question_count - qid)):
            topic = words[qid % len(words)]
            other = words[(qid * 7 + 3) % len(words)]
            qas.append(
                {
                    "id": f"sq{qid:05d}",
                    "question": f"what is the {topic} next to the {other} number {qid}",
                    "answers": [{"text": topic, "answer_start": 0}],
                }
            )
            qid += 1
        paragraphs.append({"context": "synthetic context paragraph", "qas": qas})
        articles.append({"title": f"article_{len(articles)}", "paragraphs": paragraphs})
    path.write_text(
        json.dumps({"version": "1.1", "data": articles}), encoding="utf-8"
    )


@pytest.fixture
def squad_file(tmp_path) -> Path:
    path = tmp_path / "squad.json"
    make_squad_file(path, question_count=120)
    return path


@pytest.fixture
def texts_file(tmp_path) -> Path:
    path = tmp_path / "texts.jsonl"
    lines = [
        {"id": "t1", "text": "when was the eiffel tower built"},
        {"id": "t2", "text": "how tall is the eiffel tower"},
        {"id": "t3", "text": "who designed the eiffel tower"},
    ]
    path.write_text("\n".join(json.dumps(l) for l in lines) + "\n", encoding="utf-8")
    return path
