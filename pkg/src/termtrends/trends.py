"""Rank trends of prefix groups across the per-window best embeddings.

For each time window's model, a prefix group's data point is the minimum
rank any vocabulary word with that prefix achieves against the target
expression. Windows where the target (or the prefix) is unsatisfiable
yield explicitly absent points, so series keep their gaps instead of
aborting — terms are analyzed only once they exist in the corpus.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DataError, DegenerateQueryError, OutOfVocabularyError
from .models import EmbeddingModel, load_model, parse_snapshot_name
from .query import QueryExpression, prefix_min_rank
from .windows import TimeWindow


@dataclass(frozen=True)
class TrendPoint:
    window: TimeWindow
    min_rank: int | None
    matched_word: str | None


@dataclass(frozen=True)
class TrendSeries:
    target: QueryExpression
    prefix: str
    points: tuple[TrendPoint, ...]


def trend(
    models: Sequence[tuple[TimeWindow, EmbeddingModel]],
    target: QueryExpression,
    prefixes: Sequence[str],
) -> list[TrendSeries]:
    """One series per prefix over the chronologically ordered models."""
    if not models:
        raise DataError("no models supplied for trend analysis")
    if not prefixes:
        raise DataError("at least one prefix is required")

    series: list[TrendSeries] = []
    for prefix in prefixes:
        points: list[TrendPoint] = []
        for window, model in models:
            try:
                found = prefix_min_rank(target, model, prefix)
            except (OutOfVocabularyError, DegenerateQueryError):
                found = None
            if found is None:
                points.append(TrendPoint(window=window, min_rank=None, matched_word=None))
            else:
                rank, word = found
                points.append(TrendPoint(window=window, min_rank=rank, matched_word=word))
        series.append(TrendSeries(target=target, prefix=prefix, points=tuple(points)))
    return series


TREND_COLUMNS = ["window_start", "window_end", "prefix", "min_rank", "matched_word"]


def export_trend_csv(series: Sequence[TrendSeries], path: str | Path) -> Path:
    """One row per (window, prefix); absent points leave min_rank empty."""
    if not series:
        raise DataError("no trend series to export")
    path = Path(path)
    try:
        handle = path.open("w", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot write trend CSV {path}: {exc}") from exc
    with handle:
        writer = csv.writer(handle)
        writer.writerow(TREND_COLUMNS)
        for s in series:
            for p in s.points:
                writer.writerow(
                    [
                        p.window.start_year,
                        p.window.end_year,
                        s.prefix,
                        "" if p.min_rank is None else p.min_rank,
                        p.matched_word or "",
                    ]
                )
    return path


def read_trend_csv(path: str | Path) -> dict[str, list[TrendPoint]]:
    """Reconstruct per-prefix points from an exported CSV."""
    path = Path(path)
    out: dict[str, list[TrendPoint]] = defaultdict(list)
    with path.open("r", encoding="utf-8", newline="") as handle:
        rows = [r for r in csv.reader(handle) if r and not r[0].startswith("#")]
    if not rows or rows[0] != TREND_COLUMNS:
        raise DataError(f"{path}: not a trend CSV (unexpected header)")
    for row in rows[1:]:
        start, end, prefix, rank, word = row
        out[prefix].append(
            TrendPoint(
                window=TimeWindow(int(start), int(end)),
                min_rank=int(rank) if rank else None,
                matched_word=word or None,
            )
        )
    return dict(out)


def discover_selected_models(directory: str | Path) -> list[tuple[TimeWindow, Path]]:
    """Find one ``<start>-<end>_epoch<NNN>.vec`` per window, chronologically.

    Directories holding several epochs for the same window are rejected:
    point this at the pipeline's selected-models directory, not at the raw
    snapshots.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"model directory not found: {directory}")
    found: dict[TimeWindow, Path] = {}
    for path in sorted(directory.glob("*.vec")):
        _, window = parse_snapshot_name(path.name)
        if window is None:
            continue
        if window in found:
            raise DataError(
                f"{directory}: multiple models for window {window.label} "
                f"({found[window].name}, {path.name}); use the selected-models directory"
            )
        found[window] = path
    if not found:
        raise DataError(f"{directory}: no window-labelled .vec models found")
    return [(w, found[w]) for w in sorted(found)]


def load_selected_models(directory: str | Path) -> list[tuple[TimeWindow, EmbeddingModel]]:
    return [(window, load_model(path)) for window, path in discover_selected_models(directory)]
