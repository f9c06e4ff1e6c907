"""Temporal partitioning and per-window vocabularies.

A sliding year window of fixed width advances in fixed steps over the dated
part of a corpus; each window's observations then get their own vocabulary,
filtered by a minimum distinct-observation frequency.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import Observation
from .errors import DataError


@dataclass(frozen=True, order=True)
class TimeWindow:
    """Inclusive year range."""

    start_year: int
    end_year: int

    def __post_init__(self) -> None:
        if self.end_year < self.start_year:
            raise DataError(f"window end {self.end_year} precedes start {self.start_year}")

    @property
    def width(self) -> int:
        return self.end_year - self.start_year + 1

    @property
    def label(self) -> str:
        return f"{self.start_year}-{self.end_year}"

    def contains(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year


@dataclass(frozen=True)
class Vocabulary:
    """Deterministically ordered token index for one data subset.

    Tokens are ordered by descending distinct-observation frequency, ties
    broken lexicographically, so the same corpus always yields the same
    embedding row order. ``obs_frequency`` counts distinct observations a
    token appears in, not raw occurrences. Vocabularies reloaded from model
    files carry no frequencies (``min_df`` 0, empty ``obs_frequency``).
    """

    tokens: tuple[str, ...]
    index: dict[str, int]
    obs_frequency: dict[str, int]
    min_df: int

    @classmethod
    def from_words(cls, words: Sequence[str]) -> "Vocabulary":
        """Wrap an already-ordered word list (e.g. read from a model file)."""
        words = tuple(words)
        if len(set(words)) != len(words):
            raise DataError("vocabulary words must be unique")
        return cls(tokens=words, index={w: i for i, w in enumerate(words)}, obs_frequency={}, min_df=0)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index


def build_windows(
    observations: Sequence[Observation],
    width: int,
    step: int,
    *,
    anchor_year: int | None = None,
) -> list[tuple[TimeWindow, list[Observation]]]:
    """Partition dated observations into overlapping year windows.

    Windows start at the minimum observation year (or ``anchor_year`` when
    given) and advance by ``step`` while a full-width window still fits
    before the maximum year. Undated observations are excluded. Empty
    windows are emitted so downstream series keep explicit gaps; callers
    may skip them.
    """
    if width < 1 or step < 1:
        raise DataError(f"window width and step must be >= 1, got width={width} step={step}")
    dated = [o for o in observations if o.year is not None]
    if not dated:
        raise DataError("no dated observations: cannot build time windows")

    years = [o.year for o in dated]
    lo = min(years) if anchor_year is None else anchor_year
    hi = max(years)
    starts = list(range(lo, hi - width + 2, step))
    if not starts:
        starts = [lo]  # corpus span shorter than one window

    result: list[tuple[TimeWindow, list[Observation]]] = []
    for start in starts:
        window = TimeWindow(start, start + width - 1)
        members = [o for o in dated if window.contains(o.year)]
        result.append((window, members))
    return result


def build_vocabulary(observations: Sequence[Observation], min_df: int) -> Vocabulary:
    """Index the tokens appearing in at least ``min_df`` distinct observations."""
    if min_df < 1:
        raise DataError(f"min_df must be >= 1, got {min_df}")
    freq: Counter[str] = Counter()
    for obs in observations:
        freq.update(set(obs.tokens))
    kept = sorted(
        (t for t, n in freq.items() if n >= min_df),
        key=lambda t: (-freq[t], t),
    )
    return Vocabulary(
        tokens=tuple(kept),
        index={t: i for i, t in enumerate(kept)},
        obs_frequency={t: freq[t] for t in kept},
        min_df=min_df,
    )
