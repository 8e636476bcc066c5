"""Core domain types: vectors, documents, corpora, queries, result lists, judgments.

All types are immutable after construction and safe to share across threads.
Lower similarity score always means more similar; every sorting contract in
this package is ascending-score unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """A fixed-length vector of finite reals; the chromosome and query representation.

    The wrapped array is made read-only. Arrays that are already read-only
    (e.g. rows of a loaded index matrix) are shared without copying.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidArgumentError(
                f"embedding must be a non-empty 1-D vector, got shape {arr.shape}"
            )
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.float64)
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("embedding contains NaN or infinite values")
        if arr.flags.writeable:
            arr = arr.copy()
            arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    @classmethod
    def zeros(cls, dim: int) -> "EmbeddingVector":
        if dim < 1:
            raise InvalidArgumentError(f"dim must be positive, got {dim}")
        return cls(np.zeros(dim, dtype=np.float32))


@dataclass(frozen=True)
class Document:
    """One corpus entry: unique id, source text (may be empty), and its embedding."""

    id: str
    text: str
    embedding: EmbeddingVector


@dataclass(frozen=True)
class Query:
    """A user query: id, text, and the embedding searched against a corpus."""

    id: str
    text: str
    embedding: EmbeddingVector


@dataclass(frozen=True, eq=False)
class Corpus:
    """An ordered collection of documents sharing one embedding dimension.

    Construction is permissive so that :func:`validate_corpus` can report
    invariant violations as data; search operations reject invalid corpora.
    """

    dim: int
    docs: tuple[Document, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidArgumentError(f"corpus dim must be positive, got {self.dim}")
        object.__setattr__(self, "docs", tuple(self.docs))

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.docs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.dim == other.dim and self.docs == other.docs

    @cached_property
    def matrix(self) -> np.ndarray:
        """All embeddings stacked row-wise; raises if any document disagrees on dim."""
        bad = [d.id for d in self.docs if d.embedding.dim != self.dim]
        if bad:
            raise DimensionMismatchError(
                f"documents with embedding dim != corpus dim {self.dim}: {bad[:5]}"
            )
        if not self.docs:
            return np.empty((0, self.dim), dtype=np.float32)
        mat = np.stack([d.embedding.values for d in self.docs])
        mat.setflags(write=False)
        return mat

    @cached_property
    def ids(self) -> np.ndarray:
        return np.asarray([d.id for d in self.docs])

    @cached_property
    def by_id(self) -> Mapping[str, Document]:
        return {d.id: d for d in self.docs}

    @classmethod
    def from_arrays(
        cls,
        ids: Sequence[str],
        texts: Sequence[str],
        matrix: np.ndarray,
    ) -> "Corpus":
        """Build a corpus around one shared matrix without copying per-row.

        The matrix is locked read-only and each document embedding is a view
        into it, which keeps 100k-document corpora cheap to construct.
        """
        matrix = np.asarray(matrix)
        if matrix.ndim != 2:
            raise InvalidArgumentError(f"matrix must be 2-D, got shape {matrix.shape}")
        if len(ids) != matrix.shape[0] or len(texts) != matrix.shape[0]:
            raise InvalidArgumentError("ids, texts and matrix rows must align")
        matrix.setflags(write=False)
        docs = tuple(
            Document(id=i, text=t, embedding=EmbeddingVector(row))
            for i, t, row in zip(ids, texts, matrix)
        )
        corpus = cls(dim=int(matrix.shape[1]), docs=docs)
        corpus.__dict__["matrix"] = matrix
        return corpus


@dataclass(frozen=True)
class ResultEntry:
    """One ranked hit: document id, similarity score, and 1-based rank."""

    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class ResultList:
    """An ordered top-N answer set for one query.

    Invariants checked at construction: ranks are 1..len contiguous and doc
    ids are unique. Scores are non-decreasing with rank for similarity-ranked
    lists; consensus-ordered lists (Borda merges, population projections) are
    ordered by other keys and set ``score_ordered=False``.
    """

    query_id: str
    entries: tuple[ResultEntry, ...]
    score_ordered: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        seen: set[str] = set()
        prev_score = None
        for pos, entry in enumerate(self.entries, start=1):
            if entry.rank != pos:
                raise InvalidArgumentError(
                    f"ranks must be contiguous from 1; entry {pos} has rank {entry.rank}"
                )
            if entry.doc_id in seen:
                raise InvalidArgumentError(f"duplicate doc id in result list: {entry.doc_id}")
            seen.add(entry.doc_id)
            if self.score_ordered and prev_score is not None and entry.score < prev_score:
                raise InvalidArgumentError(
                    f"scores must be non-decreasing with rank; rank {pos} breaks order"
                )
            prev_score = entry.score

    def __len__(self) -> int:
        return len(self.entries)

    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]


@dataclass(frozen=True)
class RelevanceJudgments:
    """Binary relevance assignments per (query_id, doc_id); absent pairs are 0."""

    judgments: Mapping[tuple[str, str], int]

    def __post_init__(self) -> None:
        frozen = dict(self.judgments)
        for key, rel in frozen.items():
            if rel not in (0, 1):
                raise InvalidArgumentError(f"relevance for {key} must be 0 or 1, got {rel!r}")
        object.__setattr__(self, "judgments", frozen)

    def rel(self, query_id: str, doc_id: str) -> int:
        return self.judgments.get((query_id, doc_id), 0)

    def relevant_count(self, query_id: str) -> int:
        return sum(
            1 for (qid, _), rel in self.judgments.items() if qid == query_id and rel == 1
        )

    def __len__(self) -> int:
        return len(self.judgments)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str, int]]) -> "RelevanceJudgments":
        return cls({(qid, did): rel for qid, did, rel in pairs})


@dataclass(frozen=True)
class CorpusViolation:
    """A corpus invariant broken by one document; data, not an exception."""

    doc_id: str
    invariant: str
    message: str


def validate_corpus(corpus: Corpus) -> list[CorpusViolation]:
    """Check corpus invariants and report violations; empty list means valid.

    Read-only and idempotent. Checks id uniqueness and per-document embedding
    dimension against the corpus dimension; element finiteness is already
    enforced by ``EmbeddingVector`` construction.
    """
    violations: list[CorpusViolation] = []
    seen: set[str] = set()
    for doc in corpus.docs:
        if doc.id in seen:
            violations.append(
                CorpusViolation(doc.id, "unique-id", f"duplicate document id {doc.id!r}")
            )
        seen.add(doc.id)
        if doc.embedding.dim != corpus.dim:
            violations.append(
                CorpusViolation(
                    doc.id,
                    "dimension-match",
                    f"document {doc.id!r} has dim {doc.embedding.dim}, corpus dim {corpus.dim}",
                )
            )
    return violations
