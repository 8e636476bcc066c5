"""Run traces: per-generation champions and fitness history of one evolutionary run.

The JSON form (schema ``evoretrieve-trace/1``, shared by both engines) carries
the champion records, the final population, the config snapshot, and the seed.
Per-generation fitness arrays and population snapshots are in-memory only:
they exist so resultsets can be harvested from past generations and so tests
can assert per-individual monotonicity, and they would dominate the file size
at production scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import InvalidArgumentError
from .model import EmbeddingVector

TRACE_SCHEMA = "evoretrieve-trace/1"


@dataclass(frozen=True)
class GenerationRecord:
    """Champion of one generation; ``final`` marks the last generation of the run."""

    index: int
    champion: EmbeddingVector
    champion_fitness: float
    final: bool = False


@dataclass(frozen=True, eq=False)
class RunTrace:
    """History of one GA or DE run.

    ``fitness_history[g]`` holds the full population fitness vector after
    generation ``g``; ``population_snapshots`` holds end-of-generation
    populations for every generation whose champion fitness value had not
    been seen before (these are exactly the generations a harvest can name).
    """

    algorithm: str
    seed: int
    config: Mapping[str, Any]
    generations: tuple[GenerationRecord, ...]
    final_population: tuple[EmbeddingVector, ...]
    final_fitnesses: tuple[float, ...]
    fitness_history: tuple[np.ndarray, ...] = field(default=(), repr=False)
    population_snapshots: Mapping[int, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self.generations:
            raise InvalidArgumentError("a trace needs at least one generation record")
        for pos, rec in enumerate(self.generations):
            if rec.index != pos:
                raise InvalidArgumentError(
                    f"generation indexes must be contiguous from 0; got {rec.index} at {pos}"
                )
        if len(self.final_population) != len(self.final_fitnesses):
            raise InvalidArgumentError("final population and fitnesses must align")

    def champion_fitnesses(self) -> list[float]:
        return [rec.champion_fitness for rec in self.generations]

    def best_generation(self) -> int:
        """Earliest generation whose champion fitness equals the global best."""
        fits = self.champion_fitnesses()
        best = min(fits)
        return fits.index(best)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "schema": TRACE_SCHEMA,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "config": dict(self.config),
            "generations": [
                {
                    "generation": rec.index,
                    "champion": [float(v) for v in rec.champion.values],
                    "champion_fitness": rec.champion_fitness,
                    "final": rec.final,
                }
                for rec in self.generations
            ],
            "final_population": [
                {"values": [float(v) for v in vec.values], "fitness": fit}
                for vec, fit in zip(self.final_population, self.final_fitnesses)
            ],
        }

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2), encoding="utf-8")

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> "RunTrace":
        if data.get("schema") != TRACE_SCHEMA:
            raise InvalidArgumentError(f"unsupported trace schema: {data.get('schema')!r}")
        return cls(
            algorithm=data["algorithm"],
            seed=int(data["seed"]),
            config=dict(data["config"]),
            generations=tuple(
                GenerationRecord(
                    index=int(g["generation"]),
                    champion=EmbeddingVector(np.asarray(g["champion"], dtype=np.float64)),
                    champion_fitness=float(g["champion_fitness"]),
                    final=bool(g["final"]),
                )
                for g in data["generations"]
            ),
            final_population=tuple(
                EmbeddingVector(np.asarray(m["values"], dtype=np.float64))
                for m in data["final_population"]
            ),
            final_fitnesses=tuple(float(m["fitness"]) for m in data["final_population"]),
        )

    @classmethod
    def load_json(cls, path: str | Path) -> "RunTrace":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))
