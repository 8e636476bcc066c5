"""Evolutionary top-N document retrieval over sentence-embedding populations.

A corpus of embedded documents is searched three ways: an exhaustive
mean-absolute-difference baseline, a genetic algorithm, and differential
evolution, with the evolved populations projected back onto documents and
evaluated with P@n / AP / MAP.
"""

from .assembly import (
    HarvestedResults,
    harvest_resultsets,
    merge_resultsets,
    project_to_document,
    resultset_from_population,
)
from .corpus_io import load_binary, load_corpus_jsonl, save_binary, synth_embed
from .de import DEConfig, de_crossover_binomial, de_mutant, de_run, de_select
from .errors import (
    CorpusFormatError,
    CorruptIndexError,
    DimensionMismatchError,
    EmptyCorpusError,
    EvoRetrieveError,
    InvalidArgumentError,
    InvalidConfigError,
)
from .ga import GAConfig, crossover_single_point, ga_run, mutate_random, select_steady_state
from .metrics import (
    EvalReport,
    average_precision,
    evaluate_results,
    load_qrels,
    mean_average_precision,
    precision_at_n,
)
from .model import (
    Corpus,
    CorpusViolation,
    Document,
    EmbeddingVector,
    Query,
    RelevanceJudgments,
    ResultEntry,
    ResultList,
    validate_corpus,
)
from .similarity import manhattan_scores, manhattan_similarity, rank_exhaustive
from .trace import GenerationRecord, RunTrace

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "CorpusFormatError",
    "CorpusViolation",
    "CorruptIndexError",
    "DEConfig",
    "DimensionMismatchError",
    "Document",
    "EmbeddingVector",
    "EmptyCorpusError",
    "EvalReport",
    "EvoRetrieveError",
    "GAConfig",
    "GenerationRecord",
    "HarvestedResults",
    "InvalidArgumentError",
    "InvalidConfigError",
    "Query",
    "RelevanceJudgments",
    "ResultEntry",
    "ResultList",
    "RunTrace",
    "average_precision",
    "crossover_single_point",
    "de_crossover_binomial",
    "de_mutant",
    "de_run",
    "de_select",
    "evaluate_results",
    "ga_run",
    "harvest_resultsets",
    "load_binary",
    "load_corpus_jsonl",
    "load_qrels",
    "manhattan_scores",
    "manhattan_similarity",
    "mean_average_precision",
    "merge_resultsets",
    "mutate_random",
    "precision_at_n",
    "project_to_document",
    "rank_exhaustive",
    "resultset_from_population",
    "save_binary",
    "select_steady_state",
    "synth_embed",
    "validate_corpus",
]
