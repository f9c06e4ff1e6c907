"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage errors exit 1, data errors 2,
numerical failures 3.
"""

from __future__ import annotations


class TermTrendsError(Exception):
    """Base class for all toolkit errors."""


class UsageError(TermTrendsError):
    """Invalid command line or configuration values."""


class DataError(TermTrendsError):
    """Malformed or inconsistent input data (corpora, keyword files, models)."""


class NoScorableCasesError(DataError):
    """Every test case in a suite was excluded for out-of-vocabulary words."""


class NumericalError(TermTrendsError):
    """Training or scoring produced a non-finite or degenerate value."""


class OutOfVocabularyError(DataError):
    """A query word is not present in the model vocabulary."""

    def __init__(self, word: str):
        super().__init__(f"word not in vocabulary: {word!r}")
        self.word = word


class DegenerateQueryError(NumericalError):
    """A query expression composed to the zero vector."""

    def __init__(self, expression: str):
        super().__init__(f"degenerate query (zero composed vector): {expression}")
        self.expression = expression
