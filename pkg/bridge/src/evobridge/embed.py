"""Batch-embed a texts JSONL into a corpus JSONL plus a manifest.

Input lines carry ``id`` and ``text``; output lines add an ``embedding``
array and are directly ingestible by the search stack. The manifest pins the
model identifier, the embedding dimension, the record count, and the SHA-256
of the input file so results stay attributable to one encoder version.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .encoders import EncoderBackend
from .errors import BridgeError


@dataclass
class EmbedSummary:
    model_id: str
    dim: int
    count: int
    input_sha256: str
    skipped: list[dict] = field(default_factory=list)


def _read_texts(path: Path) -> list[tuple[str, str]]:
    records: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise BridgeError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise BridgeError(f"{path}: line {lineno}: each record needs 'id' and 'text'")
            rec_id = str(obj["id"])
            if rec_id in seen:
                raise BridgeError(f"{path}: line {lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            records.append((rec_id, str(obj["text"])))
    return records


def _encode_batch(
    encoder: EncoderBackend, batch: list[tuple[str, str]], skipped: list[dict]
) -> list[tuple[str, str, np.ndarray]]:
    """Encode a batch; on failure fall back to one-by-one so bad records only skip themselves."""
    texts = [text for _, text in batch]
    try:
        vectors = np.asarray(encoder.encode(texts), dtype=np.float32)
        if vectors.shape[0] != len(batch):
            raise BridgeError(
                f"encoder returned {vectors.shape[0]} vectors for {len(batch)} texts"
            )
        return [(rid, text, vectors[i]) for i, (rid, text) in enumerate(batch)]
    except Exception:
        out: list[tuple[str, str, np.ndarray]] = []
        for rid, text in batch:
            try:
                vec = np.asarray(encoder.encode([text]), dtype=np.float32)[0]
                out.append((rid, text, vec))
            except Exception as exc:
                skipped.append({"id": rid, "error": str(exc)})
        return out


def embed_texts(
    input_path: str | Path,
    out_path: str | Path,
    encoder: EncoderBackend,
    batch_size: int = 64,
    manifest_path: str | Path | None = None,
) -> EmbedSummary:
    """Encode every input record and write the corpus JSONL plus its manifest.

    Records the encoder cannot embed are skipped and listed in the summary;
    everything else is emitted in input order. All emitted embeddings must
    share one dimension or the run aborts.
    """
    if batch_size < 1:
        raise BridgeError(f"batch size must be positive, got {batch_size}")
    input_path = Path(input_path)
    out_path = Path(out_path)
    records = _read_texts(input_path)
    input_sha = hashlib.sha256(input_path.read_bytes()).hexdigest()

    skipped: list[dict] = []
    dim: int | None = None
    count = 0
    with open(out_path, "w", encoding="utf-8") as out:
        for start in range(0, len(records), batch_size):
            batch = records[start : start + batch_size]
            for rec_id, text, vector in _encode_batch(encoder, batch, skipped):
                if vector.ndim != 1 or vector.size == 0 or not np.all(np.isfinite(vector)):
                    skipped.append({"id": rec_id, "error": "encoder returned an invalid vector"})
                    continue
                if dim is None:
                    dim = int(vector.size)
                elif vector.size != dim:
                    raise BridgeError(
                        f"encoder dim drift: record {rec_id!r} got {vector.size}, expected {dim}"
                    )
                line = {
                    "id": rec_id,
                    "text": text,
                    "embedding": [float(x) for x in vector],
                }
                out.write(json.dumps(line, ensure_ascii=False) + "\n")
                count += 1

    summary = EmbedSummary(
        model_id=encoder.model_id,
        dim=dim if dim is not None else 0,
        count=count,
        input_sha256=input_sha,
        skipped=skipped,
    )
    manifest = {
        "model": summary.model_id,
        "dim": summary.dim,
        "count": summary.count,
        "input_sha256": summary.input_sha256,
        "skipped": summary.skipped,
    }
    manifest_file = (
        Path(manifest_path) if manifest_path is not None else out_path.with_suffix(".manifest.json")
    )
    manifest_file.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    for skip in skipped:
        print(f"skipped {skip['id']}: {skip['error']}", file=sys.stderr)
    return summary
