"""Cosine-similarity queries over an embedding model.

A query expression is a signed word sum ("+king -man +woman"); results are
ranked by cosine to the composed vector with the expression's own words
excluded, ties broken by vocabulary index so output is deterministic.
Zero-norm candidate rows rank last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateQueryError, OutOfVocabularyError
from .models import EmbeddingModel

PLUS = "+"
MINUS = "-"


@dataclass(frozen=True)
class QueryExpression:
    """Ordered signed terms; at least one term and at least one positive."""

    terms: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise DataError("query expression needs at least one term")
        for sign, word in self.terms:
            if sign not in (PLUS, MINUS):
                raise DataError(f"term sign must be '+' or '-', got {sign!r}")
            if not word:
                raise DataError("query term word must be non-empty")
        if not any(sign == PLUS for sign, _ in self.terms):
            raise DataError("query expression needs at least one positive term")

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(word for _, word in self.terms)

    def __str__(self) -> str:
        return " ".join(sign + word for sign, word in self.terms)

    @classmethod
    def parse(cls, text: str) -> "QueryExpression":
        """Whitespace-separated terms; "+word", "-word", or bare word (= plus)."""
        terms = []
        for raw in text.split():
            if raw[0] in (PLUS, MINUS):
                sign, word = raw[0], raw[1:]
            else:
                sign, word = PLUS, raw
            terms.append((sign, word))
        return cls(terms=tuple(terms))


def parse_expression(text: str) -> QueryExpression:
    return QueryExpression.parse(text)


@dataclass(frozen=True)
class RankedNeighbor:
    word: str
    cosine: float
    rank: int


def compose(expr: QueryExpression, model: EmbeddingModel) -> np.ndarray:
    """Signed sum of the term vectors, added in expression order.

    A zero result is allowed here (callers flag or reject it); an
    out-of-vocabulary word raises, naming the word, so evaluation callers
    can exclude the test case.
    """
    index = model.vocabulary.index
    vec = np.zeros(model.dim, dtype=np.float64)
    for sign, word in expr.terms:
        idx = index.get(word)
        if idx is None:
            raise OutOfVocabularyError(word)
        if sign == PLUS:
            vec += model.vectors[idx]
        else:
            vec -= model.vectors[idx]
    return vec


def _ranking(expr: QueryExpression, model: EmbeddingModel) -> tuple[list[int], np.ndarray]:
    """Vocabulary indices in rank order plus all cosines (query words removed)."""
    q = compose(expr, model)
    qnorm = float(np.linalg.norm(q))
    if qnorm == 0.0:
        raise DegenerateQueryError(str(expr))

    norms = model.row_norms()
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = (model.vectors @ q) / (norms * qnorm)
    cos[norms == 0.0] = -np.inf  # degenerate rows never win

    excluded = {model.vocabulary.index[w] for w in expr.words}
    # stable sort keeps ascending vocabulary index among equal cosines
    order = np.argsort(-cos, kind="stable")
    ranked = [int(i) for i in order if int(i) not in excluded]
    return ranked, cos


def top_k(expr: QueryExpression, model: EmbeddingModel, k: int) -> list[RankedNeighbor]:
    """The k nearest vocabulary words to the composed query vector.

    Words in the expression are excluded; fewer than k results come back
    when the vocabulary is too small.
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    ranked, cos = _ranking(expr, model)
    words = model.vocabulary.tokens
    return [
        RankedNeighbor(word=words[i], cosine=float(cos[i]), rank=r)
        for r, i in enumerate(ranked[:k], start=1)
    ]


def rank_of(expr: QueryExpression, model: EmbeddingModel, target: str) -> int | None:
    """1-based position of ``target`` in the exclusion-filtered ranking.

    Returns None when the target is not in the vocabulary (an absent
    result, not a failure). The target must not be a query word.
    """
    if target in expr.words:
        raise DataError(f"target {target!r} is a query word and is excluded from ranking")
    idx = model.vocabulary.index.get(target)
    if idx is None:
        return None
    ranked, _ = _ranking(expr, model)
    return ranked.index(idx) + 1


def prefix_min_rank(
    expr: QueryExpression, model: EmbeddingModel, prefix: str
) -> tuple[int, str] | None:
    """Best rank over all vocabulary words starting with ``prefix``.

    Returns (rank, word) for the closest match, or None when no
    vocabulary word outside the expression carries the prefix.
    """
    if not prefix:
        raise DataError("prefix must be non-empty")
    ranked, _ = _ranking(expr, model)
    words = model.vocabulary.tokens
    for rank, i in enumerate(ranked, start=1):
        if words[i].startswith(prefix):
            return rank, words[i]
    return None
