"""Corpus ingestion, binary index caching, and the deterministic synthetic embedder.

JSONL corpus schema: one object per line with ``id`` (string), ``text``
(string, optional, default "") and ``embedding`` (array of numbers); the
first record fixes the dimension.

Binary index layout (all little-endian):

    magic   4 bytes  "EVS1"
    dim     u32
    count   u64
    per document:
        id_len    u32     followed by id UTF-8 bytes
        text_len  u32     followed by text UTF-8 bytes
        values    dim x f32

Embeddings are stored as 32-bit floats; all similarity arithmetic upcasts to
float64. A round trip through the binary format is bit-exact.
"""

from __future__ import annotations

import json
import math
import struct
from collections import Counter
from pathlib import Path
from typing import Any

import numpy as np

from .errors import CorpusFormatError, CorruptIndexError, InvalidArgumentError
from .model import Corpus, EmbeddingVector

MAGIC = b"EVS1"
_HEADER = struct.Struct("<4sIQ")
_U32 = struct.Struct("<I")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64_MASK = 0xFFFFFFFFFFFFFFFF


def load_corpus_jsonl(path: str | Path) -> Corpus:
    """Parse a JSONL corpus; errors carry the offending line number."""
    ids: list[str] = []
    texts: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict) or "id" not in obj or "embedding" not in obj:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: each record needs 'id' and 'embedding' fields"
                )
            doc_id = obj["id"]
            if not isinstance(doc_id, str) or not doc_id:
                raise CorpusFormatError(f"{path}: line {lineno}: 'id' must be a non-empty string")
            if doc_id in seen:
                raise CorpusFormatError(f"{path}: line {lineno}: duplicate document id {doc_id!r}")
            try:
                row = np.asarray(obj["embedding"], dtype=np.float32)
            except (TypeError, ValueError) as exc:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: 'embedding' must be an array of numbers"
                ) from exc
            if row.ndim != 1 or row.size == 0:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: 'embedding' must be a non-empty flat array"
                )
            if not np.all(np.isfinite(row)):
                raise CorpusFormatError(
                    f"{path}: line {lineno}: 'embedding' contains NaN or infinite values"
                )
            if dim is None:
                dim = int(row.size)
            elif row.size != dim:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: embedding dim {row.size} differs from corpus dim {dim}"
                )
            seen.add(doc_id)
            ids.append(doc_id)
            texts.append(obj.get("text", "") or "")
            rows.append(row)
    if dim is None:
        return Corpus(dim=1, docs=())
    return Corpus.from_arrays(ids, texts, np.stack(rows))


def save_binary(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus to the binary index format described in the module docstring."""
    matrix = corpus.matrix.astype(np.float32)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, corpus.dim, len(corpus)))
        for doc, row in zip(corpus.docs, matrix):
            id_bytes = doc.id.encode("utf-8")
            text_bytes = doc.text.encode("utf-8")
            fh.write(_U32.pack(len(id_bytes)))
            fh.write(id_bytes)
            fh.write(_U32.pack(len(text_bytes)))
            fh.write(text_bytes)
            fh.write(row.astype("<f4").tobytes())


class _Reader:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, count: int, what: str) -> bytes:
        if self.pos + count > len(self.data):
            raise CorruptIndexError(f"{self.path}: truncated while reading {what}")
        chunk = self.data[self.pos : self.pos + count]
        self.pos += count
        return chunk


def load_binary(path: str | Path) -> Corpus:
    """Read a binary index; bad magic or truncation raises, never crashes."""
    data = Path(path).read_bytes()
    reader = _Reader(data, str(path))
    magic, dim, count = _HEADER.unpack(reader.take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise CorruptIndexError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if dim < 1:
        raise CorruptIndexError(f"{path}: invalid dim {dim}")
    # minimum bytes per doc: two length fields plus the vector; guards against
    # allocating a giant matrix from a corrupt count before truncation surfaces
    if count * (2 * _U32.size + 4 * dim) > len(data) - _HEADER.size:
        raise CorruptIndexError(f"{path}: header count {count} exceeds file size")
    ids: list[str] = []
    texts: list[str] = []
    matrix = np.empty((count, dim), dtype=np.float32)
    row_bytes = 4 * dim
    for i in range(count):
        (id_len,) = _U32.unpack(reader.take(_U32.size, f"id length of doc {i}"))
        ids.append(reader.take(id_len, f"id of doc {i}").decode("utf-8"))
        (text_len,) = _U32.unpack(reader.take(_U32.size, f"text length of doc {i}"))
        texts.append(reader.take(text_len, f"text of doc {i}").decode("utf-8"))
        matrix[i] = np.frombuffer(reader.take(row_bytes, f"vector of doc {i}"), dtype="<f4")
    if reader.pos != len(data):
        raise CorruptIndexError(f"{path}: {len(data) - reader.pos} trailing bytes after {count} docs")
    if count == 0:
        return Corpus(dim=dim, docs=())
    return Corpus.from_arrays(ids, texts, matrix)


def meta_path(index_path: str | Path) -> Path:
    return Path(str(index_path) + ".meta.json")


def save_index_meta(index_path: str | Path, meta: dict[str, Any]) -> None:
    """Write the sidecar metadata (e.g. the synth recipe) next to an index file."""
    meta_path(index_path).write_text(json.dumps(meta, indent=2), encoding="utf-8")


def load_index_meta(index_path: str | Path) -> dict[str, Any] | None:
    p = meta_path(index_path)
    if not p.exists():
        return None
    return json.loads(p.read_text(encoding="utf-8"))


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64_MASK
    return h


def synth_embed(text: str, dim: int, seed: int) -> EmbeddingVector:
    """Deterministic bag-of-words embedding: hashed token vectors, TF-weighted, L2-normalized.

    Each lowercase whitespace token keys a counter-based PRNG (Philox, keyed
    by FNV-1a of the token bytes XOR the seed) that emits a pseudo-Gaussian
    vector; the document vector is the term-frequency-weighted sum, then
    normalized. Tokens are accumulated in sorted order so any permutation of
    the text yields the identical vector. Empty or whitespace-only text maps
    to the zero vector. This embedder exists so the search stack is testable
    without any pretrained encoder; it captures lexical overlap, not
    semantics.
    """
    if dim < 1:
        raise InvalidArgumentError(f"dim must be positive, got {dim}")
    counts = Counter(text.lower().split())
    if not counts:
        return EmbeddingVector.zeros(dim)
    acc = np.zeros(dim, dtype=np.float64)
    for token in sorted(counts):
        key = _fnv1a64(token.encode("utf-8")) ^ (seed & _U64_MASK)
        gen = np.random.Generator(np.random.Philox(key=key))
        acc += counts[token] * gen.standard_normal(dim)
    norm = math.sqrt(float(np.dot(acc, acc)))
    if norm > 0.0:
        acc /= norm
    return EmbeddingVector(acc.astype(np.float32))
