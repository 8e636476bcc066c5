from __future__ import annotations

import json
import subprocess
import sys

import pytest

from evobridge.embed import embed_texts
from evobridge.errors import BridgeError

from conftest import FlakyEncoder, StubEncoder


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


class TestEmbedTexts:
    def test_emits_corpus_jsonl_and_manifest(self, texts_file, tmp_path):
        out = tmp_path / "corpus.jsonl"
        summary = embed_texts(texts_file, out, StubEncoder(), batch_size=2)
        assert summary.count == 3
        assert summary.dim == 512
        records = read_jsonl(out)
        assert [r["id"] for r in records] == ["t1", "t2", "t3"]
        assert all(len(r["embedding"]) == 512 for r in records)
        manifest = json.loads((tmp_path / "corpus.manifest.json").read_text())
        assert manifest["model"] == "stub-hash-512"
        assert manifest["dim"] == 512
        assert manifest["count"] == 3
        assert len(manifest["input_sha256"]) == 64

    def test_deterministic_for_fixed_encoder(self, texts_file, tmp_path):
        out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        embed_texts(texts_file, out1, StubEncoder())
        embed_texts(texts_file, out2, StubEncoder())
        assert out1.read_bytes() == out2.read_bytes()

    def test_failing_records_skipped_and_listed(self, tmp_path, capsys):
        texts = tmp_path / "texts.jsonl"
        lines = [
            {"id": "ok1", "text": "fine text"},
            {"id": "bad", "text": f"poisoned {FlakyEncoder.POISON} text"},
            {"id": "ok2", "text": "more fine text"},
        ]
        texts.write_text("\n".join(json.dumps(l) for l in lines), encoding="utf-8")
        out = tmp_path / "corpus.jsonl"
        summary = embed_texts(texts, out, FlakyEncoder(), batch_size=3)
        assert summary.count == 2
        assert [s["id"] for s in summary.skipped] == ["bad"]
        assert [r["id"] for r in read_jsonl(out)] == ["ok1", "ok2"]
        assert "skipped bad" in capsys.readouterr().err
        manifest = json.loads((tmp_path / "corpus.manifest.json").read_text())
        assert len(manifest["skipped"]) == 1

    def test_duplicate_ids_rejected(self, tmp_path):
        texts = tmp_path / "texts.jsonl"
        texts.write_text(
            '{"id": "x", "text": "a"}\n{"id": "x", "text": "b"}\n', encoding="utf-8"
        )
        with pytest.raises(BridgeError, match="duplicate id"):
            embed_texts(texts, tmp_path / "out.jsonl", StubEncoder())

    def test_malformed_line_names_line_number(self, tmp_path):
        texts = tmp_path / "texts.jsonl"
        texts.write_text('{"id": "x", "text": "a"}\nnope\n', encoding="utf-8")
        with pytest.raises(BridgeError, match="line 2"):
            embed_texts(texts, tmp_path / "out.jsonl", StubEncoder())

    def test_output_ingests_into_search_stack(self, texts_file, tmp_path):
        """Cross-component round trip over the file boundary only."""
        corpus = tmp_path / "corpus.jsonl"
        embed_texts(texts_file, corpus, StubEncoder())
        index = tmp_path / "index.evs"
        proc = subprocess.run(
            [
                sys.executable, "-m", "evoretrieve", "ingest",
                "--input", str(corpus), "--out", str(index),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert "ingested 3 documents (dim 512)" in proc.stdout
