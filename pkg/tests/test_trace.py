from __future__ import annotations

import numpy as np
import pytest

from evoretrieve.de import DEConfig, de_run
from evoretrieve.errors import InvalidArgumentError
from evoretrieve.ga import GAConfig, ga_run
from evoretrieve.model import EmbeddingVector, Query
from evoretrieve.trace import TRACE_SCHEMA, GenerationRecord, RunTrace

from conftest import random_corpus


@pytest.fixture(scope="module")
def ga_trace():
    corpus = random_corpus(seed=71, count=40, dim=8)
    query = Query(id="q", text="", embedding=EmbeddingVector(np.full(8, 0.2)))
    return ga_run(corpus, query, GAConfig(mating_pool_size=10, generations=6, seed=1))


class TestTraceJson:
    def test_round_trip_preserves_serialized_fields(self, ga_trace, tmp_path):
        path = tmp_path / "trace.json"
        ga_trace.save_json(path)
        loaded = RunTrace.load_json(path)
        assert loaded.to_json_dict() == ga_trace.to_json_dict()
        assert loaded.algorithm == "ga"
        assert loaded.seed == 1
        assert loaded.champion_fitnesses() == ga_trace.champion_fitnesses()
        # population history is an in-memory concern, deliberately not serialized
        assert loaded.fitness_history == ()
        assert dict(loaded.population_snapshots) == {}

    def test_schema_shared_by_both_engines(self, ga_trace):
        corpus = random_corpus(seed=72, count=20, dim=8)
        query = Query(id="q", text="", embedding=EmbeddingVector(np.zeros(8)))
        de_trace = de_run(corpus, query, DEConfig(generations=4, seed=2))
        for trace in (ga_trace, de_trace):
            payload = trace.to_json_dict()
            assert payload["schema"] == TRACE_SCHEMA
            assert set(payload) == {
                "schema", "algorithm", "seed", "config", "generations", "final_population",
            }

    def test_unknown_schema_rejected(self, ga_trace):
        payload = ga_trace.to_json_dict()
        payload["schema"] = "something-else/9"
        with pytest.raises(InvalidArgumentError):
            RunTrace.from_json_dict(payload)


class TestTraceValidation:
    def _record(self, index: int, fitness: float = 0.5) -> GenerationRecord:
        return GenerationRecord(
            index=index,
            champion=EmbeddingVector(np.zeros(4)),
            champion_fitness=fitness,
        )

    def test_indexes_must_be_contiguous_from_zero(self):
        with pytest.raises(InvalidArgumentError):
            RunTrace(
                algorithm="ga",
                seed=0,
                config={},
                generations=(self._record(0), self._record(2)),
                final_population=(),
                final_fitnesses=(),
            )

    def test_needs_at_least_one_generation(self):
        with pytest.raises(InvalidArgumentError):
            RunTrace(
                algorithm="ga",
                seed=0,
                config={},
                generations=(),
                final_population=(),
                final_fitnesses=(),
            )

    def test_best_generation_is_earliest_minimum(self):
        trace = RunTrace(
            algorithm="ga",
            seed=0,
            config={},
            generations=(
                self._record(0, 0.5),
                self._record(1, 0.2),
                self._record(2, 0.2),
            ),
            final_population=(),
            final_fitnesses=(),
        )
        assert trace.best_generation() == 1
