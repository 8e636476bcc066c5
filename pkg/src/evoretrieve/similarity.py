"""Fitness function and the exhaustive baseline ranker.

The similarity between two embeddings is the mean absolute coordinate
difference. All arithmetic runs in float64 regardless of storage precision,
through one shared kernel, so baseline scores and engine fitness values are
bit-identical for identical inputs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DimensionMismatchError, EmptyCorpusError, InvalidArgumentError
from .model import Corpus, EmbeddingVector, Query, ResultEntry, ResultList

SimilarityScore = float
"""Mean absolute coordinate difference; non-negative, 0 iff vectors are identical."""

_CHUNK_ROWS = 8192


def _score_block(matrix: np.ndarray, vector64: np.ndarray, out: np.ndarray) -> None:
    buf = np.empty((matrix.shape[0], matrix.shape[1]), dtype=np.float64)
    np.subtract(matrix, vector64, out=buf)
    np.abs(buf, out=buf)
    np.mean(buf, axis=1, out=out)


def manhattan_scores(
    matrix: np.ndarray, vector: np.ndarray, *, threads: int = 1
) -> np.ndarray:
    """Score every row of ``matrix`` against ``vector``; float64 result.

    Rows are processed in chunks; chunking and thread count never change the
    result because each row reduces independently.
    """
    matrix = np.asarray(matrix)
    vector = np.asarray(vector)
    if matrix.ndim != 2 or vector.ndim != 1:
        raise InvalidArgumentError("expected a 2-D matrix and a 1-D vector")
    if matrix.shape[1] != vector.shape[0]:
        raise DimensionMismatchError(
            f"vector dim {vector.shape[0]} does not match matrix dim {matrix.shape[1]}"
        )
    vector64 = vector.astype(np.float64)
    n = matrix.shape[0]
    out = np.empty(n, dtype=np.float64)
    spans = [(s, min(s + _CHUNK_ROWS, n)) for s in range(0, n, _CHUNK_ROWS)]
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(
                pool.map(
                    lambda span: _score_block(matrix[span[0] : span[1]], vector64, out[span[0] : span[1]]),
                    spans,
                )
            )
    else:
        for s, e in spans:
            _score_block(matrix[s:e], vector64, out[s:e])
    return out


def manhattan_similarity(x1: EmbeddingVector, x2: EmbeddingVector) -> SimilarityScore:
    """Mean of |x1[i] - x2[i]| over all coordinates; symmetric in its arguments."""
    if x1.dim != x2.dim:
        raise DimensionMismatchError(f"dim mismatch: {x1.dim} vs {x2.dim}")
    return float(manhattan_scores(x2.values[np.newaxis, :], x1.values)[0])


def top_n_indices(scores: np.ndarray, ids: np.ndarray, n: int) -> np.ndarray:
    """Indices of the ``n`` lowest scores, ties broken by ascending id.

    Uses a partition cutoff so only candidate rows are fully sorted; the
    result is identical to a full (score, id) lexicographic sort.
    """
    count = scores.shape[0]
    n = min(n, count)
    if n <= 0:
        return np.empty(0, dtype=np.intp)
    if n < count:
        cutoff = np.partition(scores, n - 1)[n - 1]
        candidates = np.flatnonzero(scores <= cutoff)
    else:
        candidates = np.arange(count)
    order = np.lexsort((ids[candidates], scores[candidates]))
    return candidates[order][:n]


def rank_exhaustive(query: Query, corpus: Corpus, n: int, *, threads: int = 1) -> ResultList:
    """Scan the whole corpus and return the min(n, |corpus|) most similar documents.

    Entries ascend by score; score ties break by ascending doc id so that
    parallel and serial runs are bit-identical.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    if len(corpus) == 0:
        raise EmptyCorpusError("cannot search an empty corpus")
    if query.embedding.dim != corpus.dim:
        raise DimensionMismatchError(
            f"query dim {query.embedding.dim} does not match corpus dim {corpus.dim}"
        )
    scores = manhattan_scores(corpus.matrix, query.embedding.values, threads=threads)
    top = top_n_indices(scores, corpus.ids, n)
    entries = tuple(
        ResultEntry(doc_id=str(corpus.ids[i]), score=float(scores[i]), rank=rank)
        for rank, i in enumerate(top, start=1)
    )
    return ResultList(query_id=query.id, entries=entries)
