"""From evolved populations to document resultsets.

Evolved chromosomes are free vectors, not documents; the bridge back to the
corpus is nearest-neighbor projection, which is this package's main
interpretive choice. Harvesting picks the best generation plus the next-best
distinct-champion generations, and the Borda merge combines their lists into
one consensus ranking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyCorpusError, InvalidArgumentError
from .model import Corpus, EmbeddingVector, Query, ResultEntry, ResultList
from .similarity import SimilarityScore, manhattan_scores, top_n_indices
from .trace import RunTrace


@dataclass(frozen=True)
class HarvestedResults:
    """Optimal plus suboptimal resultsets of one run and their source generations.

    ``source_generations[0]`` is the optimal's generation; the rest align with
    ``suboptimal``. ``suboptimal_shortfall`` is set when the trace had fewer
    distinct champion fitness values than requested.
    """

    optimal: ResultList
    suboptimal: tuple[ResultList, ...]
    source_generations: tuple[int, ...]
    suboptimal_shortfall: bool = False

    def __post_init__(self) -> None:
        if len(self.source_generations) != 1 + len(self.suboptimal):
            raise InvalidArgumentError("source generations must cover optimal + suboptimal")
        if len(set(self.source_generations)) != len(self.source_generations):
            raise InvalidArgumentError("source generations must be distinct")


def _as_matrix(population: "Sequence[EmbeddingVector] | np.ndarray") -> np.ndarray:
    if isinstance(population, np.ndarray):
        if population.ndim != 2 or population.shape[0] == 0:
            raise InvalidArgumentError("population matrix must be 2-D and non-empty")
        return population
    if len(population) == 0:
        raise InvalidArgumentError("population must be non-empty")
    return np.stack([v.values for v in population])


def project_to_document(
    v: EmbeddingVector, corpus: Corpus
) -> tuple[str, SimilarityScore]:
    """Nearest corpus document to a chromosome, ties by ascending doc id."""
    if len(corpus) == 0:
        raise EmptyCorpusError("cannot project onto an empty corpus")
    scores = manhattan_scores(corpus.matrix, v.values)
    idx = int(top_n_indices(scores, corpus.ids, 1)[0])
    return str(corpus.ids[idx]), float(scores[idx])


def resultset_from_population(
    population: "Sequence[EmbeddingVector] | np.ndarray",
    query: Query,
    corpus: Corpus,
    n: int,
) -> ResultList:
    """Rank a population by fitness and project it onto distinct documents.

    Members are visited in ascending fitness order (ties by population index),
    each projected to its nearest document, duplicates dropped keeping the
    first occurrence, and the list truncated to ``n``. Entry scores are the
    projected documents' own similarity to the query, so lists from different
    algorithms are directly comparable; the entry ORDER, however, follows the
    chromosomes, which is why the list is not marked score-ordered. When the
    population is exactly the corpus (all embeddings distinct), the output
    equals the exhaustive baseline bit-for-bit.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    matrix = _as_matrix(population)
    fitness = manhattan_scores(matrix, query.embedding.values)
    doc_scores = manhattan_scores(corpus.matrix, query.embedding.values)
    positions = {str(doc_id): i for i, doc_id in enumerate(corpus.ids)}

    entries: list[ResultEntry] = []
    seen: set[str] = set()
    for member in np.argsort(fitness, kind="stable"):
        doc_id, _ = project_to_document(EmbeddingVector(matrix[member]), corpus)
        if doc_id in seen:
            continue
        seen.add(doc_id)
        entries.append(
            ResultEntry(
                doc_id=doc_id,
                score=float(doc_scores[positions[doc_id]]),
                rank=len(entries) + 1,
            )
        )
        if len(entries) == n:
            break
    return ResultList(query_id=query.id, entries=tuple(entries), score_ordered=False)


def _population_for_generation(trace: RunTrace, generation: int) -> np.ndarray:
    snapshot = trace.population_snapshots.get(generation)
    if snapshot is not None:
        return snapshot
    if generation == trace.generations[-1].index and trace.final_population:
        return np.stack([v.values for v in trace.final_population])
    raise InvalidArgumentError(
        f"trace carries no population snapshot for generation {generation}"
    )


def harvest_resultsets(
    trace: RunTrace, query: Query, corpus: Corpus, n: int, s: int
) -> HarvestedResults:
    """Build the optimal resultset plus up to ``s`` suboptimal ones from a trace.

    The optimal comes from the earliest generation achieving the globally best
    champion fitness; suboptimals come from the earliest generations of the
    next-best distinct champion fitness values, best first. Fewer than ``s``
    distinct values sets the shortfall flag.
    """
    if s < 0:
        raise InvalidArgumentError(f"s must be non-negative, got {s}")
    fits = trace.champion_fitnesses()
    first_gen_of_value: dict[float, int] = {}
    for gen, fit in enumerate(fits):
        first_gen_of_value.setdefault(fit, gen)

    best_value = min(fits)
    optimal_gen = first_gen_of_value[best_value]
    optimal = resultset_from_population(
        _population_for_generation(trace, optimal_gen), query, corpus, n
    )

    worse_values = sorted(v for v in first_gen_of_value if v > best_value)[:s]
    suboptimal: list[ResultList] = []
    sub_gens: list[int] = []
    for value in worse_values:
        gen = first_gen_of_value[value]
        sub_gens.append(gen)
        suboptimal.append(
            resultset_from_population(_population_for_generation(trace, gen), query, corpus, n)
        )
    return HarvestedResults(
        optimal=optimal,
        suboptimal=tuple(suboptimal),
        source_generations=(optimal_gen, *sub_gens),
        suboptimal_shortfall=len(suboptimal) < s,
    )


def merge_resultsets(lists: Sequence[ResultList], n: int) -> ResultList:
    """Borda-style consensus merge of resultsets for the same query.

    A document at rank r in a list earns (n - r + 1) points there (0 beyond
    rank n); documents order by descending total points, then ascending best
    single-list score, then ascending doc id. Entry scores carry each
    document's best (lowest) similarity across the inputs, so the merged
    order is consensus-driven rather than score-sorted.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    if not lists:
        raise InvalidArgumentError("need at least one resultset to merge")
    query_ids = {lst.query_id for lst in lists}
    if len(query_ids) != 1:
        raise InvalidArgumentError(f"cannot merge resultsets of different queries: {sorted(query_ids)}")

    points: dict[str, int] = {}
    best_score: dict[str, float] = {}
    for lst in lists:
        for entry in lst.entries:
            points[entry.doc_id] = points.get(entry.doc_id, 0) + max(n - entry.rank + 1, 0)
            if entry.doc_id not in best_score or entry.score < best_score[entry.doc_id]:
                best_score[entry.doc_id] = entry.score

    ordered = sorted(points, key=lambda d: (-points[d], best_score[d], d))[:n]
    entries = tuple(
        ResultEntry(doc_id=doc_id, score=best_score[doc_id], rank=rank)
        for rank, doc_id in enumerate(ordered, start=1)
    )
    return ResultList(query_id=lists[0].query_id, entries=entries, score_ordered=False)
