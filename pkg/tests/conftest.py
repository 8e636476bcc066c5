from __future__ import annotations

import numpy as np
import pytest

from evoretrieve.corpus_io import synth_embed
from evoretrieve.model import Corpus, EmbeddingVector, Query


def vec(*values: float) -> EmbeddingVector:
    return EmbeddingVector(np.asarray(values, dtype=np.float64))


def random_corpus(seed: int, count: int, dim: int) -> Corpus:
    """Gaussian random corpus with zero-padded ids (so corpus order == id order)."""
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((count, dim)).astype(np.float32)
    ids = [f"d{i:06d}" for i in range(count)]
    return Corpus.from_arrays(ids, [""] * count, matrix)


def synth_corpus(seed: int, count: int, dim: int, vocab_size: int = 60) -> Corpus:
    """Corpus of synthetic bag-of-words embeddings over generated token texts."""
    rng = np.random.default_rng(seed)
    vocab = [f"tok{i:02d}" for i in range(vocab_size)]
    texts = [" ".join(rng.choice(vocab, size=int(rng.integers(6, 13)))) for _ in range(count)]
    matrix = np.stack([synth_embed(t, dim, seed=42).values for t in texts])
    ids = [f"d{i:06d}" for i in range(count)]
    return Corpus.from_arrays(ids, texts, matrix)


def near_duplicate_query(corpus: Corpus, doc_index: int, dim: int) -> Query:
    """Query whose text is one corpus doc's text with the last token swapped out.

    Close to a unique corpus document without being in the corpus; the
    regime the retrieval pipeline is built for.
    """
    tokens = corpus.docs[doc_index].text.split()
    tokens[-1] = "novelterm"
    text = " ".join(tokens)
    return Query(id="q-near", text=text, embedding=synth_embed(text, dim, seed=42))


@pytest.fixture
def small_corpus() -> Corpus:
    return random_corpus(seed=1, count=30, dim=8)
