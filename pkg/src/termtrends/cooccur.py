"""Sparse co-occurrence statistics over tokenized observations.

Counts are distance-weighted (1/d) within a symmetric context window and
never cross observation boundaries. Out-of-vocabulary tokens keep their
positions, so distances reflect the original text, but they never
contribute entries themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .corpus import Observation
from .errors import DataError
from .windows import Vocabulary


@dataclass
class CooccurrenceTable:
    """Symmetric sparse map (i, j) -> weight with i != j and no zero entries."""

    entries: dict[tuple[int, int], float] = field(default_factory=dict)
    _arrays: tuple[np.ndarray, np.ndarray, np.ndarray] | None = field(
        default=None, repr=False, compare=False
    )

    def weight(self, i: int, j: int) -> float:
        return self.entries.get((i, j), 0.0)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self) -> Iterator[tuple[tuple[int, int], float]]:
        return iter(self.entries.items())

    def total_mass(self) -> float:
        return sum(self.entries.values())

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Entries as (i, j, weight) arrays in canonical (i, j) order.

        The canonical order makes training independent of dict insertion
        history; epoch passes shuffle from this base order.
        """
        if self._arrays is None:
            keys = sorted(self.entries)
            i = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
            j = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
            x = np.fromiter((self.entries[k] for k in keys), dtype=np.float64, count=len(keys))
            self._arrays = (i, j, x)
        return self._arrays


def build_cooccurrence(
    observations: Sequence[Observation],
    vocab: Vocabulary,
    context_window: int,
) -> CooccurrenceTable:
    """Accumulate 1/d for every in-vocabulary token pair within ``context_window``.

    Each unordered occurrence pair is counted once into both mirror
    entries, so the table ends exactly symmetric. Self-co-occurrence
    (same token at both positions) is excluded.
    """
    if context_window < 1:
        raise DataError(f"context_window must be >= 1, got {context_window}")
    entries: dict[tuple[int, int], float] = {}
    index = vocab.index
    for obs in observations:
        ids = [index.get(t, -1) for t in obs.tokens]
        n = len(ids)
        for p in range(n):
            i = ids[p]
            if i < 0:
                continue
            for q in range(p + 1, min(p + context_window, n - 1) + 1):
                j = ids[q]
                if j < 0 or j == i:
                    continue
                w = 1.0 / (q - p)
                entries[(i, j)] = entries.get((i, j), 0.0) + w
                entries[(j, i)] = entries.get((j, i), 0.0) + w
    return CooccurrenceTable(entries=entries)
