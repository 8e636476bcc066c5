"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: any ``EvoRetrieveError`` is a data error
(exit 2); usage problems exit 1; anything else is an internal error (exit 3).
"""


class EvoRetrieveError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(EvoRetrieveError):
    """An operation was called with arguments outside its contract."""


class DimensionMismatchError(InvalidArgumentError):
    """Two vectors (or a vector and a corpus) disagree on dimensionality."""


class EmptyCorpusError(EvoRetrieveError):
    """A search operation was attempted on a corpus with no documents."""


class InvalidConfigError(EvoRetrieveError):
    """An engine configuration violates its invariants or does not fit the population."""


class CorpusFormatError(EvoRetrieveError):
    """A corpus or qrels file could not be parsed; message carries the line number."""


class CorruptIndexError(EvoRetrieveError):
    """A binary index file failed its magic or structural checks."""
