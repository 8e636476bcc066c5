"""Encoder backends producing fixed-length sentence embeddings.

The default model is a distilled Universal-Sentence-Encoder-family
sentence-transformers checkpoint emitting 512-dim vectors. Text is fed to the
model as-is (no cleaning or normalization beyond UTF-8 handling).
"""

from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np

from .errors import BridgeError

DEFAULT_MODEL = "sentence-transformers/distiluse-base-multilingual-cased-v1"


class EncoderBackend(Protocol):
    """Anything that batch-encodes texts into a (len(texts), dim) float array."""

    model_id: str

    def encode(self, texts: Sequence[str]) -> np.ndarray: ...


class SentenceTransformerEncoder:
    """sentence-transformers backend; model weights load lazily on first use."""

    def __init__(self, model_id: str = DEFAULT_MODEL):
        self.model_id = model_id
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise BridgeError(
                "sentence-transformers is not installed; "
                "install the bridge with the [encoder] extra"
            ) from exc
        try:
            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise BridgeError(f"failed to load encoder model {model_id!r}: {exc}") from exc

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        vectors = self._model.encode(
            list(texts), convert_to_numpy=True, show_progress_bar=False
        )
        return np.asarray(vectors, dtype=np.float32)


def load_encoder(model_id: str = DEFAULT_MODEL) -> EncoderBackend:
    return SentenceTransformerEncoder(model_id)
