"""Command-line pipeline: ingest a corpus, search it, evaluate and compare runs.

Exit codes: 0 ok, 1 usage, 2 data error, 3 internal. Diagnostics go to
stderr; data goes to files or stdout. Output artifacts are byte-identical
across invocations with the same flags and seeds; wall-clock timings are
therefore printed to stderr and embedded in the results document only when
--timings is passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .assembly import harvest_resultsets, merge_resultsets
from .corpus_io import (
    load_binary,
    load_corpus_jsonl,
    load_index_meta,
    save_binary,
    save_index_meta,
    synth_embed,
)
from .de import DEConfig, de_run
from .errors import CorpusFormatError, EvoRetrieveError, InvalidArgumentError
from .ga import GAConfig, ga_run
from .metrics import EVAL_SCHEMA, average_precision, evaluate_results, load_qrels
from .model import Corpus, EmbeddingVector, Query, ResultEntry, ResultList, validate_corpus
from .similarity import rank_exhaustive
from .trace import RunTrace

RESULTS_SCHEMA = "evoretrieve-results/1"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _resultlist_to_dict(result: ResultList, corpus: Corpus | None) -> dict[str, Any]:
    entries = []
    for e in result.entries:
        doc = corpus.by_id.get(e.doc_id) if corpus is not None else None
        entries.append(
            {
                "rank": e.rank,
                "doc_id": e.doc_id,
                "score": float(e.score),
                "text": doc.text if doc is not None else "",
            }
        )
    return {"query_id": result.query_id, "entries": entries}


def _resultlist_from_dict(data: dict[str, Any]) -> ResultList:
    entries = tuple(
        ResultEntry(doc_id=e["doc_id"], score=float(e["score"]), rank=int(e["rank"]))
        for e in data["entries"]
    )
    return ResultList(query_id=data["query_id"], entries=entries, score_ordered=False)


# ---------------------------------------------------------------- ingest

def cmd_ingest(args: argparse.Namespace) -> int:
    if args.synth:
        corpus = _ingest_synth(args.input, args.dim, args.seed)
    else:
        corpus = load_corpus_jsonl(args.input)
    violations = validate_corpus(corpus)
    if violations:
        for v in violations[:10]:
            print(f"error: {v.message}", file=sys.stderr)
        return 2
    save_binary(corpus, args.out)
    if args.synth:
        save_index_meta(args.out, {"synth": {"dim": args.dim, "seed": args.seed}})
    print(f"ingested {len(corpus)} documents (dim {corpus.dim}) -> {args.out}")
    return 0


def _ingest_synth(path: str, dim: int, seed: int) -> Corpus:
    ids: list[str] = []
    texts: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict) or "id" not in obj:
                raise CorpusFormatError(f"{path}: line {lineno}: each record needs an 'id' field")
            doc_id = obj["id"]
            if not isinstance(doc_id, str) or not doc_id:
                raise CorpusFormatError(f"{path}: line {lineno}: 'id' must be a non-empty string")
            if doc_id in seen:
                raise CorpusFormatError(f"{path}: line {lineno}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            text = obj.get("text", "") or ""
            ids.append(doc_id)
            texts.append(text)
            rows.append(synth_embed(text, dim, seed).values)
    if not ids:
        return Corpus(dim=dim, docs=())
    return Corpus.from_arrays(ids, texts, np.stack(rows))


# ---------------------------------------------------------------- search

def _resolve_query(args: argparse.Namespace, corpus: Corpus, meta: dict | None) -> Query:
    synth = (meta or {}).get("synth")
    if args.query_text is not None:
        if synth is None:
            raise InvalidArgumentError(
                "--query-text needs a synth-embedded index (ingest with --synth); "
                "use --query-file with a precomputed embedding instead"
            )
        emb = synth_embed(args.query_text, int(synth["dim"]), int(synth["seed"]))
        return Query(id=args.query_id, text=args.query_text, embedding=emb)
    data = json.loads(Path(args.query_file).read_text(encoding="utf-8"))
    qid = data.get("id", args.query_id)
    text = data.get("text", "")
    if "embedding" in data:
        emb = EmbeddingVector(np.asarray(data["embedding"], dtype=np.float32))
    elif text and synth is not None:
        emb = synth_embed(text, int(synth["dim"]), int(synth["seed"]))
    else:
        raise InvalidArgumentError(
            f"{args.query_file}: needs an 'embedding' field (or 'text' plus a synth index)"
        )
    return Query(id=qid, text=text, embedding=emb)


def _engine_config(args: argparse.Namespace, algo: str, seed: int) -> "GAConfig | DEConfig | None":
    if algo == "ga":
        return GAConfig(
            mating_pool_size=args.mating_pool,
            elitism_count=args.elitism,
            mutation_fraction=args.mutation_fraction,
            mutation_range=args.mutation_range,
            generations=args.generations,
            stagnation_patience=args.stagnation_patience,
            stagnation_epsilon=args.stagnation_epsilon,
            seed=seed,
        )
    if algo == "de":
        return DEConfig(
            scaling_factor=args.beta,
            crossover_prob=args.cr,
            generations=args.generations,
            stagnation_patience=args.stagnation_patience,
            stagnation_epsilon=args.stagnation_epsilon,
            seed=seed,
        )
    return None


def _run_search(
    corpus: Corpus,
    query: Query,
    algo: str,
    seed: int,
    top_n: int,
    suboptimal: int,
    args: argparse.Namespace,
) -> tuple[dict[str, Any], dict[str, float]]:
    """Run one algorithm and build its results document (dict) plus phase timings."""
    timings: dict[str, float] = {}
    config = _engine_config(args, algo, seed)
    doc: dict[str, Any] = {
        "schema": RESULTS_SCHEMA,
        "query": {"id": query.id, "text": query.text},
        "algorithm": algo,
        "seed": seed,
        "top_n": top_n,
        "config": None if config is None else _config_dict(config),
    }
    t0 = time.perf_counter()
    if algo == "baseline":
        result = rank_exhaustive(query, corpus, top_n, threads=args.threads)
        timings["search"] = (time.perf_counter() - t0) * 1000.0
        t1 = time.perf_counter()
        doc["resultsets"] = {"baseline": _resultlist_to_dict(result, corpus)}
        timings["assemble"] = (time.perf_counter() - t1) * 1000.0
        return doc, timings

    runner = ga_run if algo == "ga" else de_run
    trace: RunTrace = runner(corpus, query, config, threads=args.threads)
    timings["search"] = (time.perf_counter() - t0) * 1000.0
    t1 = time.perf_counter()
    harvested = harvest_resultsets(trace, query, corpus, top_n, suboptimal)
    merged = merge_resultsets([harvested.optimal, *harvested.suboptimal], top_n)
    doc["resultsets"] = {
        "optimal": _resultlist_to_dict(harvested.optimal, corpus),
        "suboptimal": [_resultlist_to_dict(r, corpus) for r in harvested.suboptimal],
        "merged": _resultlist_to_dict(merged, corpus),
    }
    doc["harvest"] = {
        "source_generations": list(harvested.source_generations),
        "suboptimal_shortfall": harvested.suboptimal_shortfall,
        "generations_run": trace.generations[-1].index,
        "champion_fitness": trace.generations[-1].champion_fitness,
    }
    timings["assemble"] = (time.perf_counter() - t1) * 1000.0
    return doc, timings


def _config_dict(config: "GAConfig | DEConfig") -> dict[str, Any]:
    return asdict(config)


def cmd_search(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    corpus = load_binary(args.index)
    meta = load_index_meta(args.index)
    load_ms = (time.perf_counter() - t0) * 1000.0
    query = _resolve_query(args, corpus, meta)
    doc, timings = _run_search(
        corpus, query, args.algo, args.seed, args.top_n, args.suboptimal, args
    )
    timings = {"load": load_ms, **timings}
    if args.timings:
        doc["timing_ms"] = {k: round(v, 3) for k, v in timings.items()}
    payload = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _write_atomic(Path(args.out), payload)
    else:
        sys.stdout.write(payload)
    print(
        "timing: " + " ".join(f"{k}={v:.1f}ms" for k, v in timings.items()),
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------- eval

def _collect_resultsets(doc: dict[str, Any]) -> dict[str, ResultList]:
    out: dict[str, ResultList] = {}
    sets = doc.get("resultsets", {})
    for kind in ("baseline", "optimal", "merged"):
        if kind in sets:
            out[kind] = _resultlist_from_dict(sets[kind])
    for i, sub in enumerate(sets.get("suboptimal", []), start=1):
        out[f"suboptimal_{i}"] = _resultlist_from_dict(sub)
    return out


def _parse_n_values(spec: str) -> list[int]:
    try:
        values = [int(part) for part in spec.split(",") if part.strip()]
    except ValueError as exc:
        raise InvalidArgumentError(f"--n expects comma-separated integers, got {spec!r}") from exc
    if not values or any(v < 1 for v in values):
        raise InvalidArgumentError(f"--n values must be positive integers, got {spec!r}")
    return values


def cmd_eval(args: argparse.Namespace) -> int:
    qrels = load_qrels(args.qrels)
    n_values = _parse_n_values(args.n)
    by_kind: dict[str, list[tuple[str, ResultList]]] = {}
    seen_queries: set[str] = set()
    key_counts: dict[str, int] = {}
    for path in args.results:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("schema") != RESULTS_SCHEMA:
            raise CorpusFormatError(f"{path}: unsupported results schema: {doc.get('schema')!r}")
        qid = doc["query"]["id"]
        seen_queries.add(qid)
        key_counts[qid] = key_counts.get(qid, 0) + 1
        key = qid if key_counts[qid] == 1 else f"{qid}#{key_counts[qid]}"
        for kind, result in _collect_resultsets(doc).items():
            by_kind.setdefault(kind, []).append((key, result))

    for qid in sorted({q for (q, _) in qrels.judgments}):
        if qid not in seen_queries:
            print(f"warning: qrels query {qid!r} not found in results; ignored", file=sys.stderr)

    reports = {
        kind: evaluate_results(items, qrels, n_values) for kind, items in sorted(by_kind.items())
    }
    for report in reports.values():
        for key in report.zero_relevant_queries:
            print(f"warning: query {key!r} has no relevant documents in qrels; AP is 0", file=sys.stderr)

    if args.format == "json":
        out = {
            "schema": EVAL_SCHEMA,
            "n_values": n_values,
            "kinds": {kind: report.to_dict() for kind, report in reports.items()},
        }
        print(json.dumps(out, indent=2))
    else:
        for kind, report in reports.items():
            print(f"[{kind}] MAP={report.map_value:.4f}")
            for key, qe in report.per_query.items():
                pats = " ".join(f"P@{n}={v:.4f}" for n, v in qe.p_at_n)
                print(f"  {key}: AP={qe.ap:.4f} {pats}")
    return 0


# ---------------------------------------------------------------- compare

def _load_queries(path: str, meta: dict | None) -> list[tuple[str, Query | None, str]]:
    """Each item: (query_id, query or None, error message when unresolvable)."""
    synth = (meta or {}).get("synth")
    out: list[tuple[str, Query | None, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from exc
            qid = obj.get("id") or f"line{lineno}"
            text = obj.get("text", "")
            try:
                if "embedding" in obj:
                    emb = EmbeddingVector(np.asarray(obj["embedding"], dtype=np.float32))
                elif text and synth is not None:
                    emb = synth_embed(text, int(synth["dim"]), int(synth["seed"]))
                else:
                    raise InvalidArgumentError(
                        "query has no embedding and the index carries no synth recipe"
                    )
                out.append((qid, Query(id=qid, text=text, embedding=emb), ""))
            except EvoRetrieveError as exc:
                out.append((qid, None, str(exc)))
    return out


def _safe_name(value: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in value)


def cmd_compare(args: argparse.Namespace) -> int:
    corpus = load_binary(args.index)
    meta = load_index_meta(args.index)
    qrels = load_qrels(args.qrels)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for algo in algos:
        if algo not in ("baseline", "ga", "de"):
            raise InvalidArgumentError(f"unknown algorithm {algo!r}")
    queries = _load_queries(args.queries, meta)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    failures: list[dict[str, Any]] = []
    # ap[algo][kind][seed][query_id] = AP; wall[algo] = list of search ms
    ap: dict[str, dict[str, dict[int, dict[str, float]]]] = {}
    wall: dict[str, list[float]] = {}
    n_values = _parse_n_values(args.n)

    for qid, query, err in queries:
        if query is None:
            failures.append({"query_id": qid, "algo": "*", "seed": None, "error": err})
            continue
        for seed_index in range(args.seeds):
            seed = args.seed + seed_index
            for algo in algos:
                try:
                    doc, timings = _run_search(
                        corpus, query, algo, seed, args.top_n, args.suboptimal, args
                    )
                except EvoRetrieveError as exc:
                    failures.append(
                        {"query_id": qid, "algo": algo, "seed": seed, "error": str(exc)}
                    )
                    continue
                name = f"{_safe_name(qid)}_{algo}_seed{seed}.json"
                _write_atomic(out_dir / name, json.dumps(doc, indent=2) + "\n")
                wall.setdefault(algo, []).append(timings["search"])
                for kind, result in _collect_resultsets(doc).items():
                    ap.setdefault(algo, {}).setdefault(kind, {}).setdefault(seed, {})[qid] = (
                        average_precision(result, qrels)
                    )

    summary: dict[str, Any] = {
        "schema": "evoretrieve-compare/1",
        "index": str(args.index),
        "algos": algos,
        "seeds": args.seeds,
        "base_seed": args.seed,
        "top_n": args.top_n,
        "n_values": n_values,
        "map": {},
        "mean_search_ms": {},
        "failures": failures,
    }
    for algo in algos:
        summary["mean_search_ms"][algo] = (
            round(sum(wall[algo]) / len(wall[algo]), 3) if wall.get(algo) else None
        )
        for kind, per_seed in sorted(ap.get(algo, {}).items()):
            maps = [
                sum(queries_ap.values()) / len(queries_ap)
                for _, queries_ap in sorted(per_seed.items())
                if queries_ap
            ]
            if not maps:
                continue
            summary["map"].setdefault(algo, {})[kind] = {
                "mean": sum(maps) / len(maps),
                "min": min(maps),
                "max": max(maps),
            }

    _write_atomic(out_dir / "summary.json", json.dumps(summary, indent=2) + "\n")
    print(f"{'algo':<10}{'resultset':<14}{'MAP mean':>10}{'min':>10}{'max':>10}")
    for algo, kinds in summary["map"].items():
        for kind, stats in kinds.items():
            print(
                f"{algo:<10}{kind:<14}{stats['mean']:>10.4f}{stats['min']:>10.4f}{stats['max']:>10.4f}"
            )
    for algo, ms in summary["mean_search_ms"].items():
        if ms is not None:
            print(f"mean search wall-clock [{algo}]: {ms:.1f} ms")
    if failures:
        print(f"{len(failures)} run(s) failed; see summary.json", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- parser

def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--generations", type=int, default=50, help="generation budget")
    p.add_argument("--mating-pool", type=int, default=100, help="GA mating pool size")
    p.add_argument("--elitism", type=int, default=3, help="GA elite carry-over count")
    p.add_argument("--mutation-fraction", type=float, default=0.10, help="GA fraction of genes mutated")
    p.add_argument("--mutation-range", type=float, default=0.10, help="GA mutation half-width")
    p.add_argument("--beta", type=float, default=0.5, help="DE difference-vector scaling factor")
    p.add_argument("--cr", type=float, default=0.9, help="DE per-gene crossover probability")
    p.add_argument("--stagnation-patience", type=int, default=10)
    p.add_argument("--stagnation-epsilon", type=float, default=1e-9)
    p.add_argument("--suboptimal", type=int, default=2, help="suboptimal resultsets to harvest")
    p.add_argument("--threads", type=int, default=1, help="threads for fitness evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evoretrieve", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="build a binary index from a JSONL corpus")
    p_ingest.add_argument("--input", required=True, help="corpus JSONL path")
    p_ingest.add_argument("--out", required=True, help="binary index output path")
    p_ingest.add_argument("--synth", action="store_true", help="synthesize embeddings from text")
    p_ingest.add_argument("--dim", type=int, default=512, help="synth embedding dimension")
    p_ingest.add_argument("--seed", type=int, default=0, help="synth embedder seed")
    p_ingest.set_defaults(func=cmd_ingest)

    p_search = sub.add_parser("search", help="retrieve the top-N documents for one query")
    p_search.add_argument("--index", required=True)
    group = p_search.add_mutually_exclusive_group(required=True)
    group.add_argument("--query-text", help="query text (synth indexes only)")
    group.add_argument("--query-file", help="JSON file with id/text/embedding")
    p_search.add_argument("--query-id", default="q0", help="query id for --query-text")
    p_search.add_argument("--algo", choices=["baseline", "ga", "de"], default="baseline")
    p_search.add_argument("--top-n", type=int, default=10)
    p_search.add_argument("--seed", type=int, default=0)
    p_search.add_argument("--out", help="results JSON path (stdout when omitted)")
    p_search.add_argument("--timings", action="store_true", help="embed wall-clock timings in the output")
    _add_engine_flags(p_search)
    p_search.set_defaults(func=cmd_search)

    p_eval = sub.add_parser("eval", help="score results files against qrels")
    p_eval.add_argument("--results", nargs="+", required=True)
    p_eval.add_argument("--qrels", required=True)
    p_eval.add_argument("--n", default="1,5,10", help="comma-separated P@n cutoffs")
    p_eval.add_argument("--format", choices=["text", "json"], default="text")
    p_eval.set_defaults(func=cmd_eval)

    p_cmp = sub.add_parser("compare", help="run algorithms over queries and seeds, summarize MAP")
    p_cmp.add_argument("--index", required=True)
    p_cmp.add_argument("--queries", required=True, help="queries JSONL path")
    p_cmp.add_argument("--algos", default="baseline,ga,de")
    p_cmp.add_argument("--qrels", required=True)
    p_cmp.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p_cmp.add_argument("--seed", type=int, default=0, help="base seed")
    p_cmp.add_argument("--top-n", type=int, default=10)
    p_cmp.add_argument("--n", default="1,5,10")
    p_cmp.add_argument("--out", required=True, help="output directory")
    _add_engine_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except EvoRetrieveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
