"""Genetic algorithm over an embedding population.

Steady-state (truncation) parent selection, single-point crossover, random
mutation, and elitism. The population starts as the corpus embeddings and the
fitness of an individual is its mean absolute difference to the query vector
(lower is better).

PRNG consumption order is fixed for reproducibility: selection draws nothing;
each mating pair draws one crossover cut point; each kept child then draws
its mutation positions followed by its perturbations. Mating pairs walk the
selected pool in order, (0,1), (2,3), ..., wrapping around.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyCorpusError,
    InvalidArgumentError,
    InvalidConfigError,
)
from .model import Corpus, EmbeddingVector, Query
from .similarity import manhattan_scores
from .trace import GenerationRecord, RunTrace


@dataclass(frozen=True)
class GAConfig:
    """Hyperparameters of one GA run; defaults follow the reference setup."""

    mating_pool_size: int = 100
    elitism_count: int = 3
    crossover: str = "single-point"
    mutation_fraction: float = 0.10
    mutation_range: float = 0.10
    generations: int = 50
    stagnation_patience: int = 10
    stagnation_epsilon: float = 1e-9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mating_pool_size < 2:
            raise InvalidConfigError("mating_pool_size must be at least 2")
        if self.elitism_count < 0:
            raise InvalidConfigError("elitism_count must be non-negative")
        if self.crossover != "single-point":
            raise InvalidConfigError(f"unsupported crossover operator: {self.crossover!r}")
        if not 0.0 < self.mutation_fraction <= 1.0:
            raise InvalidConfigError("mutation_fraction must be in (0, 1]")
        if self.mutation_range < 0.0:
            raise InvalidConfigError("mutation_range must be non-negative")
        if self.generations < 1:
            raise InvalidConfigError("generations must be positive")
        if self.stagnation_patience < 1:
            raise InvalidConfigError("stagnation_patience must be positive")
        if self.stagnation_epsilon < 0.0:
            raise InvalidConfigError("stagnation_epsilon must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")


def select_steady_state(fitnesses: np.ndarray | Sequence[float], k: int) -> list[int]:
    """Indexes of the k lowest-fitness individuals, ties broken by ascending index."""
    fits = np.asarray(fitnesses, dtype=np.float64)
    if k < 1:
        raise InvalidArgumentError(f"k must be positive, got {k}")
    if k > fits.shape[0]:
        raise InvalidArgumentError(f"k={k} exceeds population size {fits.shape[0]}")
    return np.argsort(fits, kind="stable")[:k].tolist()


def _crossover_rows(p1: np.ndarray, p2: np.ndarray, cut: int) -> tuple[np.ndarray, np.ndarray]:
    c1 = np.concatenate([p1[:cut], p2[cut:]])
    c2 = np.concatenate([p2[:cut], p1[cut:]])
    return c1, c2


def crossover_single_point(
    p1: EmbeddingVector, p2: EmbeddingVector, rng: np.random.Generator
) -> tuple[EmbeddingVector, EmbeddingVector]:
    """Splice both parents at one cut point drawn uniformly from [1, dim-1]."""
    if p1.dim != p2.dim:
        raise DimensionMismatchError(f"parent dims differ: {p1.dim} vs {p2.dim}")
    if p1.dim < 2:
        raise InvalidArgumentError("single-point crossover needs dim >= 2")
    cut = int(rng.integers(1, p1.dim))
    c1, c2 = _crossover_rows(p1.values, p2.values, cut)
    return EmbeddingVector(c1), EmbeddingVector(c2)


def _mutate_row(row: np.ndarray, fraction: float, amount: float, rng: np.random.Generator) -> np.ndarray:
    k = math.ceil(fraction * row.shape[0])
    positions = rng.choice(row.shape[0], size=k, replace=False)
    offsets = rng.uniform(-amount, amount, size=k)
    out = row.copy()
    out[positions] += offsets
    return out


def mutate_random(
    child: EmbeddingVector, config: GAConfig, rng: np.random.Generator
) -> EmbeddingVector:
    """Perturb ceil(mutation_fraction * dim) distinct genes by uniform offsets."""
    return EmbeddingVector(
        _mutate_row(child.values, config.mutation_fraction, config.mutation_range, rng)
    )


def ga_run(corpus: Corpus, query: Query, config: GAConfig, *, threads: int = 1) -> RunTrace:
    """Evolve the corpus embeddings toward the query; deterministic given config.seed.

    Generation 0 records the untouched initial population; its champion is the
    first index attaining the minimum fitness, which matches the exhaustive
    baseline's tie-break whenever the corpus is ordered by doc id. Each later
    generation keeps the ``elitism_count`` best individuals unchanged and
    refills the rest with mutated crossover children of the selected pool.
    Stops after ``generations`` breeding steps or once champion improvement
    stays below ``stagnation_epsilon`` for ``stagnation_patience`` consecutive
    generations.
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("cannot run GA on an empty corpus")
    if query.embedding.dim != corpus.dim:
        raise DimensionMismatchError(
            f"query dim {query.embedding.dim} does not match corpus dim {corpus.dim}"
        )
    if corpus.dim < 2:
        raise InvalidConfigError("GA needs corpus dim >= 2 for single-point crossover")
    pop_size = len(corpus)
    if config.mating_pool_size > pop_size:
        raise InvalidConfigError(
            f"mating_pool_size {config.mating_pool_size} exceeds population size {pop_size}"
        )
    if config.elitism_count > pop_size:
        raise InvalidConfigError(
            f"elitism_count {config.elitism_count} exceeds population size {pop_size}"
        )

    rng = np.random.default_rng(config.seed)
    qv = query.embedding.values
    population = corpus.matrix.astype(np.float64)
    fitnesses = manhattan_scores(population, qv, threads=threads)

    records: list[GenerationRecord] = []
    history: list[np.ndarray] = []
    snapshots: dict[int, np.ndarray] = {}
    seen_champion_values: set[float] = set()

    def record_generation(index: int) -> float:
        champ_idx = int(np.argmin(fitnesses))
        champ_fit = float(fitnesses[champ_idx])
        records.append(
            GenerationRecord(
                index=index,
                champion=EmbeddingVector(population[champ_idx].copy()),
                champion_fitness=champ_fit,
            )
        )
        history.append(fitnesses.copy())
        if champ_fit not in seen_champion_values:
            seen_champion_values.add(champ_fit)
            snapshots[index] = population.copy()
        return champ_fit

    champ_fit = record_generation(0)
    stagnant = 0
    n_children = pop_size - config.elitism_count

    for gen in range(1, config.generations + 1):
        pool = select_steady_state(fitnesses, config.mating_pool_size)
        children: list[np.ndarray] = []
        pair = 0
        while len(children) < n_children:
            p1 = population[pool[(2 * pair) % len(pool)]]
            p2 = population[pool[(2 * pair + 1) % len(pool)]]
            cut = int(rng.integers(1, corpus.dim))
            c1, c2 = _crossover_rows(p1, p2, cut)
            children.append(_mutate_row(c1, config.mutation_fraction, config.mutation_range, rng))
            if len(children) < n_children:
                children.append(_mutate_row(c2, config.mutation_fraction, config.mutation_range, rng))
            pair += 1
        if config.elitism_count > 0:
            elites = population[select_steady_state(fitnesses, config.elitism_count)].copy()
            parts = [elites] + ([np.stack(children)] if children else [])
            population = np.concatenate(parts)
        else:
            population = np.stack(children)
        fitnesses = manhattan_scores(population, qv, threads=threads)

        new_champ_fit = record_generation(gen)
        if champ_fit - new_champ_fit < config.stagnation_epsilon:
            stagnant += 1
        else:
            stagnant = 0
        champ_fit = new_champ_fit
        if stagnant >= config.stagnation_patience:
            break

    records[-1] = GenerationRecord(
        index=records[-1].index,
        champion=records[-1].champion,
        champion_fitness=records[-1].champion_fitness,
        final=True,
    )
    return RunTrace(
        algorithm="ga",
        seed=config.seed,
        config=asdict(config),
        generations=tuple(records),
        final_population=tuple(EmbeddingVector(row.copy()) for row in population),
        final_fitnesses=tuple(float(f) for f in fitnesses),
        fitness_history=tuple(history),
        population_snapshots=snapshots,
    )
