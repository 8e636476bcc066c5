from __future__ import annotations

import numpy as np
import pytest

from evoretrieve.de import (
    DEConfig,
    de_crossover_binomial,
    de_mutant,
    de_run,
    de_select,
)
from evoretrieve.errors import DimensionMismatchError, InvalidArgumentError, InvalidConfigError
from evoretrieve.model import EmbeddingVector, Query

from conftest import random_corpus, vec


class TestDEConfig:
    def test_reference_defaults(self):
        config = DEConfig()
        assert config.scaling_factor == 0.5
        assert config.crossover_prob == 0.9

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"scaling_factor": 0.0},
            {"scaling_factor": 2.5},
            {"crossover_prob": -0.1},
            {"crossover_prob": 1.1},
            {"generations": 0},
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(InvalidConfigError):
            DEConfig(**kwargs)


class TestDEMutant:
    def test_equal_donor_difference_returns_base(self):
        # all individuals identical, so x_r2 - x_r3 = 0 whatever gets drawn
        population = [vec(2.0, 3.0)] * 5
        mutant = de_mutant(population, 0, 0.5, np.random.default_rng(1))
        assert mutant == vec(2.0, 3.0)

    def test_hand_evaluated_arithmetic(self):
        # mirror the donor draws, then recompute x_r1 + 0.5 (x_r2 - x_r3) by hand
        population = [vec(*row) for row in ([0, 0], [1, 1], [3, 3], [5, 5], [9, 9])]
        matrix = np.stack([v.values for v in population])
        probe = np.random.default_rng(7)
        taken = {0}
        donors = []
        for _ in range(3):
            r = int(probe.integers(0, 5))
            while r in taken:
                r = int(probe.integers(0, 5))
            taken.add(r)
            donors.append(r)
        expected = matrix[donors[0]] + 0.5 * (matrix[donors[1]] - matrix[donors[2]])
        mutant = de_mutant(population, 0, 0.5, np.random.default_rng(7))
        assert np.array_equal(mutant.values, expected)

    def test_zero_beta_returns_base_donor(self):
        rng_probe = np.random.default_rng(3)
        population = [vec(float(i), float(-i)) for i in range(6)]
        taken = {2}
        donors = []
        for _ in range(3):
            r = int(rng_probe.integers(0, 6))
            while r in taken:
                r = int(rng_probe.integers(0, 6))
            taken.add(r)
            donors.append(r)
        # beta=0 is legal for the bare operator (the run config is stricter)
        mutant = de_mutant(population, 2, 0.0, np.random.default_rng(3))
        assert mutant == population[donors[0]]

    def test_population_below_four_rejected(self):
        with pytest.raises(InvalidArgumentError):
            de_mutant([vec(1.0)] * 3, 0, 0.5, np.random.default_rng(0))

    def test_donors_distinct_from_target_and_each_other(self):
        population = [vec(float(i)) for i in range(4)]
        # with population 4 and target i the three donors are forced to be the rest
        for i in range(4):
            mutant = de_mutant(population, i, 1.0, np.random.default_rng(i))
            assert np.isfinite(mutant.values).all()


class TestDECrossoverBinomial:
    def test_full_crossover_returns_mutant(self):
        target, mutant = vec(0, 0, 0, 0), vec(1, 2, 3, 4)
        child = de_crossover_binomial(target, mutant, 1.0, np.random.default_rng(0))
        assert child == mutant

    def test_zero_crossover_keeps_target_except_forced_gene(self):
        target, mutant = vec(0, 0, 0, 0, 0, 0), vec(1, 1, 1, 1, 1, 1)
        probe = np.random.default_rng(4)
        j_rand = int(probe.integers(0, 6))
        child = de_crossover_binomial(target, mutant, 0.0, np.random.default_rng(4))
        diffs = np.flatnonzero(child.values != target.values)
        assert list(diffs) == [j_rand]

    def test_mutant_gene_fraction_matches_probability(self):
        # Monte-Carlo: with p_r = 0.9 and dim 512, the mutant-sourced gene
        # fraction lands within 0.9 +/- 0.01 over 10,000 trials
        rng = np.random.default_rng(5)
        target = EmbeddingVector(np.zeros(512))
        mutant = EmbeddingVector(np.ones(512))
        total = 0
        trials = 10_000
        for _ in range(trials):
            child = de_crossover_binomial(target, mutant, 0.9, rng)
            total += int(child.values.sum())
        fraction = total / (trials * 512)
        assert abs(fraction - 0.9) < 0.01

    def test_dim_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            de_crossover_binomial(vec(1, 2), vec(1, 2, 3), 0.5, np.random.default_rng(0))


class TestDESelect:
    def _query(self):
        return Query(id="q", text="", embedding=vec(0.0, 0.0))

    def test_tie_keeps_target(self):
        target = vec(1.0, 1.0)
        assert de_select(target, vec(1.0, 1.0), self._query()) is target

    def test_strict_improvement_takes_offspring(self):
        offspring = vec(0.1, 0.1)
        assert de_select(vec(0.2, 0.2), offspring, self._query()) is offspring

    def test_optimal_target_never_replaced(self):
        target = vec(0.0, 0.0)
        assert de_select(target, vec(0.001, 0.0), self._query()) is target


def _query_for(corpus, seed=321):
    rng = np.random.default_rng(seed)
    return Query(id="q", text="", embedding=EmbeddingVector(rng.standard_normal(corpus.dim)))


@pytest.fixture(scope="module")
def corpus():
    return random_corpus(seed=31, count=100, dim=16)


class TestDERun:
    def test_identity_query_keeps_zero_fitness(self, corpus):
        query = Query(id="q", text="", embedding=corpus.docs[5].embedding)
        trace = de_run(corpus, query, DEConfig(generations=15, seed=1))
        assert trace.champion_fitnesses()[0] == 0.0
        assert trace.champion_fitnesses()[-1] == 0.0

    def test_every_individual_monotone_non_increasing(self, corpus):
        trace = de_run(corpus, _query_for(corpus), DEConfig(generations=20, seed=2))
        history = trace.fitness_history
        for g in range(len(history) - 1):
            assert np.all(history[g + 1] <= history[g])

    def test_champion_monotone_non_increasing(self, corpus):
        trace = de_run(corpus, _query_for(corpus), DEConfig(generations=20, seed=3))
        fits = trace.champion_fitnesses()
        assert all(b <= a for a, b in zip(fits, fits[1:]))

    def test_final_champion_at_or_below_baseline_top1(self, corpus):
        from evoretrieve.similarity import rank_exhaustive

        query = _query_for(corpus)
        trace = de_run(corpus, query, DEConfig(generations=10, seed=12))
        baseline = rank_exhaustive(query, corpus, 1)
        assert trace.champion_fitnesses()[0] == baseline.entries[0].score
        assert trace.champion_fitnesses()[-1] <= baseline.entries[0].score

    def test_fixed_seed_reproduces_trace_bit_exactly(self, corpus):
        config = DEConfig(generations=10, seed=4)
        query = _query_for(corpus)
        a = de_run(corpus, query, config)
        b = de_run(corpus, query, config)
        assert a.to_json_dict() == b.to_json_dict()
        for fa, fb in zip(a.fitness_history, b.fitness_history):
            assert np.array_equal(fa, fb)

    def test_small_population_rejected(self):
        corpus = random_corpus(seed=32, count=3, dim=4)
        with pytest.raises(InvalidConfigError):
            de_run(corpus, _query_for(corpus), DEConfig())

    def test_trace_metadata(self, corpus):
        trace = de_run(corpus, _query_for(corpus), DEConfig(generations=5, seed=6))
        assert trace.algorithm == "de"
        assert trace.config["scaling_factor"] == 0.5
        assert trace.generations[0].index == 0
        assert trace.generations[-1].final
        assert 0 in trace.population_snapshots
