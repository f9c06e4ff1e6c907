from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from termtrends.models import EmbeddingModel
from termtrends.query import QueryExpression
from termtrends.windows import Vocabulary

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "termtrends" / "data"
DEMO_CORPUS = DATA_DIR / "demo" / "corpus.jsonl"
DEMO_KEYWORDS = DATA_DIR / "demo" / "keywords.txt"


def build_model(words: list[str], vectors, **kwargs) -> EmbeddingModel:
    return EmbeddingModel(
        vocabulary=Vocabulary.from_words(words),
        vectors=np.asarray(vectors, dtype=np.float64),
        **kwargs,
    )


@pytest.fixture
def hand_model() -> EmbeddingModel:
    """Six 2-d integer vectors whose cosine order is checkable by hand.

    alpha=(1,0) beta=(1,1) gamma=(0,1) delta=(-1,1) epsilon=(-1,0)
    zeta=(-1,-1); integer coordinates keep every cosine exact in float64,
    so tie groups are genuine ties.
    """
    return build_model(
        ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"],
        [[1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1]],
    )


def random_model(seed: int, n_words: int, dim: int, *, integer: bool = False) -> EmbeddingModel:
    """Seeded random model; integer mode forces exact arithmetic and ties."""
    rng = np.random.default_rng(seed)
    if integer:
        vectors = rng.integers(-2, 3, size=(n_words, dim)).astype(np.float64)
        # guarantee at least one nonzero row stays queryable
        vectors[0] = np.ones(dim)
    else:
        vectors = rng.uniform(-1.0, 1.0, size=(n_words, dim))
    words = [f"w{i:03d}" for i in range(n_words)]
    return build_model(words, vectors)


def oracle_ranking(model: EmbeddingModel, expr: QueryExpression) -> list[tuple[int, float]]:
    """Exhaustive cosine sort, computed independently of the query module.

    Pure-python accumulation over explicit indices; ties broken by
    vocabulary index via the sort key.
    """
    index = model.vocabulary.index
    q = [0.0] * model.dim
    for sign, word in expr.terms:
        row = model.vectors[index[word]]
        for d in range(model.dim):
            q[d] = q[d] + row[d] if sign == "+" else q[d] - row[d]
    qnorm = math.sqrt(sum(x * x for x in q))
    assert qnorm > 0, "oracle assumes a non-degenerate query"

    excluded = set(expr.words)
    scored: list[tuple[int, float]] = []
    for i, word in enumerate(model.vocabulary.tokens):
        if word in excluded:
            continue
        row = model.vectors[i]
        dot = sum(float(row[d]) * q[d] for d in range(model.dim))
        norm = math.sqrt(sum(float(v) * float(v) for v in row))
        cos = dot / (norm * qnorm) if norm > 0 else -math.inf
        scored.append((i, cos))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored
