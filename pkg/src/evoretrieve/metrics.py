"""Ranking evaluation: precision at n, average precision, and their mean.

AP divides by the total number of judged-relevant documents for the query,
not just the retrieved ones; queries with zero relevant judgments score 0 and
are flagged rather than raised so batch evaluation never aborts. Unjudged
documents count as non-relevant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import CorpusFormatError, InvalidArgumentError
from .model import RelevanceJudgments, ResultList

EVAL_SCHEMA = "evoretrieve-eval/1"


def precision_at_n(result: ResultList, qrels: RelevanceJudgments, n: int) -> float:
    """Fraction of the top n ranks holding a relevant document.

    Ranks beyond the list length count as non-relevant; the denominator is
    always n.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    hits = sum(
        1 for e in result.entries if e.rank <= n and qrels.rel(result.query_id, e.doc_id) == 1
    )
    return hits / n


def average_precision(result: ResultList, qrels: RelevanceJudgments) -> float:
    """Mean of P@n over the relevant ranks, divided by the query's total relevant count."""
    total_relevant = qrels.relevant_count(result.query_id)
    if total_relevant == 0:
        return 0.0
    acc = 0.0
    hits = 0
    for e in result.entries:
        if qrels.rel(result.query_id, e.doc_id) == 1:
            hits += 1
            acc += hits / e.rank
    return acc / total_relevant


def mean_average_precision(aps: Sequence[float]) -> float:
    """Arithmetic mean of per-query AP values."""
    if len(aps) == 0:
        raise InvalidArgumentError("cannot average an empty list of AP values")
    return sum(aps) / len(aps)


@dataclass(frozen=True)
class QueryEval:
    """P@n values and AP for one result list."""

    p_at_n: tuple[tuple[int, float], ...]
    ap: float


@dataclass(frozen=True)
class EvalReport:
    """Per-query metrics plus their MAP for one group of result lists."""

    per_query: Mapping[str, QueryEval]
    map_value: float
    n_values: tuple[int, ...]
    zero_relevant_queries: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "per_query": {
                qid: {"p_at_n": [[n, v] for n, v in qe.p_at_n], "ap": qe.ap}
                for qid, qe in self.per_query.items()
            },
            "map": self.map_value,
            "n_values": list(self.n_values),
            "zero_relevant_queries": list(self.zero_relevant_queries),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EvalReport":
        return cls(
            per_query={
                qid: QueryEval(
                    p_at_n=tuple((int(n), float(v)) for n, v in qe["p_at_n"]),
                    ap=float(qe["ap"]),
                )
                for qid, qe in data["per_query"].items()
            },
            map_value=float(data["map"]),
            n_values=tuple(int(n) for n in data["n_values"]),
            zero_relevant_queries=tuple(data.get("zero_relevant_queries", [])),
        )


def evaluate_results(
    results: Iterable[tuple[str, ResultList]],
    qrels: RelevanceJudgments,
    n_values: Sequence[int],
) -> EvalReport:
    """Evaluate labeled result lists and aggregate their AP into MAP.

    ``results`` pairs a report key with its list; keys are usually query ids
    but may be suffixed by the caller when one query appears multiple times.
    """
    per_query: dict[str, QueryEval] = {}
    zero_relevant: list[str] = []
    for key, result in results:
        if qrels.relevant_count(result.query_id) == 0:
            zero_relevant.append(key)
        per_query[key] = QueryEval(
            p_at_n=tuple((n, precision_at_n(result, qrels, n)) for n in n_values),
            ap=average_precision(result, qrels),
        )
    if not per_query:
        raise InvalidArgumentError("no result lists to evaluate")
    return EvalReport(
        per_query=per_query,
        map_value=mean_average_precision([qe.ap for qe in per_query.values()]),
        n_values=tuple(n_values),
        zero_relevant_queries=tuple(zero_relevant),
    )


def load_qrels(path: str | Path) -> RelevanceJudgments:
    """Parse a qrels TSV: ``query_id<TAB>doc_id<TAB>rel`` with rel in {0, 1}.

    Lines starting with ``#`` and blank lines are skipped; anything else
    malformed raises with its line number.
    """
    judgments: dict[tuple[str, str], int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: expected 3 tab-separated fields, got {len(parts)}"
                )
            qid, did, rel_str = parts
            if rel_str not in ("0", "1"):
                raise CorpusFormatError(
                    f"{path}: line {lineno}: rel must be 0 or 1, got {rel_str!r}"
                )
            judgments[(qid, did)] = int(rel_str)
    return RelevanceJudgments(judgments)
