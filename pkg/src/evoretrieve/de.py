"""Differential evolution over an embedding population (rand/1/bin scheme).

Each individual is challenged once per generation: a mutant is built from
three distinct random donors, binomial crossover mixes it with the target,
and the trial replaces the target only on strict fitness improvement. The
population starts as the corpus embeddings.

PRNG consumption order per individual: donor indexes (r1, r2, r3) by
rejection until distinct, then the forced crossover gene, then one uniform
draw per gene in index order. Individuals are processed in index order
against the generation-start population, so parallel and serial evaluations
agree.
"""

from __future__ import annotations

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
from .similarity import manhattan_scores, manhattan_similarity
from .trace import GenerationRecord, RunTrace


@dataclass(frozen=True)
class DEConfig:
    """Control parameters of one DE run."""

    scaling_factor: float = 0.5
    crossover_prob: float = 0.9
    generations: int = 50
    stagnation_patience: int = 10
    stagnation_epsilon: float = 1e-9
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.scaling_factor <= 2.0:
            raise InvalidConfigError("scaling_factor must be in (0, 2]")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise InvalidConfigError("crossover_prob must be in [0, 1]")
        if self.generations < 1:
            raise InvalidConfigError("generations must be positive")
        if self.stagnation_patience < 1:
            raise InvalidConfigError("stagnation_patience must be positive")
        if self.stagnation_epsilon < 0.0:
            raise InvalidConfigError("stagnation_epsilon must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")


def _mutant_row(
    population: np.ndarray, i: int, beta: float, rng: np.random.Generator
) -> np.ndarray:
    n = population.shape[0]
    if n < 4:
        raise InvalidArgumentError(f"rand/1 mutation needs population >= 4, got {n}")
    taken = {i}
    donors: list[int] = []
    for _ in range(3):
        r = int(rng.integers(0, n))
        while r in taken:
            r = int(rng.integers(0, n))
        taken.add(r)
        donors.append(r)
    r1, r2, r3 = donors
    assert len({i, r1, r2, r3}) == 4
    return population[r1] + beta * (population[r2] - population[r3])


def de_mutant(
    population: Sequence[EmbeddingVector], i: int, beta: float, rng: np.random.Generator
) -> EmbeddingVector:
    """rand/1 mutant: x_r1 + beta * (x_r2 - x_r3) with r1, r2, r3, i pairwise distinct."""
    matrix = np.stack([v.values for v in population]).astype(np.float64)
    return EmbeddingVector(_mutant_row(matrix, i, beta, rng))


def _binomial_mask(dim: int, crossover_prob: float, rng: np.random.Generator) -> np.ndarray:
    j_rand = int(rng.integers(0, dim))
    mask = rng.random(dim) < crossover_prob
    mask[j_rand] = True
    return mask


def de_crossover_binomial(
    target: EmbeddingVector,
    mutant: EmbeddingVector,
    crossover_prob: float,
    rng: np.random.Generator,
) -> EmbeddingVector:
    """Binomial crossover; the forced gene guarantees at least one mutant coordinate."""
    if target.dim != mutant.dim:
        raise DimensionMismatchError(f"dim mismatch: {target.dim} vs {mutant.dim}")
    mask = _binomial_mask(target.dim, crossover_prob, rng)
    return EmbeddingVector(np.where(mask, mutant.values, target.values))


def de_select(
    target: EmbeddingVector, offspring: EmbeddingVector, query: Query
) -> EmbeddingVector:
    """Greedy survivor rule: offspring wins only on strict improvement; ties keep target."""
    if manhattan_similarity(offspring, query.embedding) < manhattan_similarity(
        target, query.embedding
    ):
        return offspring
    return target


def de_run(corpus: Corpus, query: Query, config: DEConfig, *, threads: int = 1) -> RunTrace:
    """Run DE/rand/1/bin over the corpus embeddings; deterministic given config.seed.

    Per-individual fitness never increases (greedy selection), so the champion
    sequence is non-increasing as well. Stops on the generation budget or when
    champion improvement stays below ``stagnation_epsilon`` for
    ``stagnation_patience`` consecutive generations.
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("cannot run DE on an empty corpus")
    if len(corpus) < 4:
        raise InvalidConfigError(
            f"DE needs at least 4 individuals (target plus 3 donors), got {len(corpus)}"
        )
    if query.embedding.dim != corpus.dim:
        raise DimensionMismatchError(
            f"query dim {query.embedding.dim} does not match corpus dim {corpus.dim}"
        )

    rng = np.random.default_rng(config.seed)
    qv = query.embedding.values.astype(np.float64)
    population = corpus.matrix.astype(np.float64)
    fitnesses = manhattan_scores(population, qv, threads=threads)
    pop_size, dim = population.shape

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

    for gen in range(1, config.generations + 1):
        next_population = population.copy()
        next_fitnesses = fitnesses.copy()
        for i in range(pop_size):
            mutant = _mutant_row(population, i, config.scaling_factor, rng)
            mask = _binomial_mask(dim, config.crossover_prob, rng)
            trial = np.where(mask, mutant, population[i])
            trial_fit = float(manhattan_scores(trial[np.newaxis, :], qv)[0])
            if trial_fit < fitnesses[i]:
                next_population[i] = trial
                next_fitnesses[i] = trial_fit
        population = next_population
        fitnesses = next_fitnesses

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
        algorithm="de",
        seed=config.seed,
        config=asdict(config),
        generations=tuple(records),
        final_population=tuple(EmbeddingVector(row.copy()) for row in population),
        final_fitnesses=tuple(float(f) for f in fitnesses),
        fitness_history=tuple(history),
        population_snapshots=snapshots,
    )
