"""Keyword test suite: combinatorial cases, per-case and suite scoring.

Every non-empty proper subset of a keyword's words becomes an input whose
complement is the expected output; a case succeeds to the degree that
expected words show up in the Top-K neighbors of the summed input. Cases
touching words absent from a model's vocabulary are excluded and shrink
the effective suite size instead of failing.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Callable, Sequence

from .errors import DataError, DegenerateQueryError, NoScorableCasesError
from .models import EmbeddingModel, load_model, parse_snapshot_name
from .query import PLUS, QueryExpression, top_k

MIN_KEYWORD_WORDS = 2
MAX_KEYWORD_WORDS = 6
DEFAULT_TOP_K = 20


@dataclass(frozen=True)
class Keyword:
    """A 2-6 word domain phrase; the unit one test case is built from."""

    id: str
    words: tuple[str, ...]

    def __post_init__(self) -> None:
        n = len(self.words)
        if not MIN_KEYWORD_WORDS <= n <= MAX_KEYWORD_WORDS:
            raise DataError(
                f"keyword {self.id!r}: needs {MIN_KEYWORD_WORDS}-{MAX_KEYWORD_WORDS} words, got {n}"
            )
        if len(set(self.words)) != n:
            raise DataError(f"keyword {self.id!r}: words must be distinct")
        for w in self.words:
            if not w or w != w.lower() or any(ch.isspace() for ch in w):
                raise DataError(f"keyword {self.id!r}: invalid word {w!r}")


@dataclass(frozen=True)
class Combination:
    input_words: frozenset[str]
    expected_words: frozenset[str]


@dataclass(frozen=True)
class CaseResult:
    keyword_id: str
    excluded: bool
    score: float | None
    hits: tuple[int, ...] = ()
    expected_counts: tuple[int, ...] = ()


@dataclass(frozen=True)
class SuiteResult:
    results: tuple[CaseResult, ...]
    mean_score: float
    effective_cases: int

    @property
    def excluded_fraction(self) -> float:
        if not self.results:
            return 0.0
        return 1.0 - self.effective_cases / len(self.results)


@dataclass(frozen=True)
class EpochScore:
    epoch: int
    path: Path
    score: float | None
    effective_cases: int = 0


def read_keywords(path: str | Path) -> list[Keyword]:
    """One keyword per line, words space-separated, '#' comments.

    Lines are taken as-is (pre-tokenized); invalid lines raise with their
    line number. The phrase itself serves as the keyword id.
    """
    path = Path(path)
    try:
        raw = path.read_text("utf-8")
    except OSError as exc:
        raise DataError(f"cannot read keywords file {path}: {exc}") from exc
    keywords: list[Keyword] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words = tuple(line.split())
        try:
            keywords.append(Keyword(id=" ".join(words), words=words))
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
    if not keywords:
        raise DataError(f"{path}: no keywords found")
    return keywords


def expand_keyword(kw: Keyword) -> list[Combination]:
    """All non-empty proper subsets as inputs, complements as expectations.

    Emits exactly 2^l - 2 combinations in a deterministic order: subset
    size ascending, then lexicographic.
    """
    words = sorted(kw.words)
    out: list[Combination] = []
    for size in range(1, len(words)):
        for subset in combinations(words, size):
            inputs = frozenset(subset)
            out.append(Combination(input_words=inputs, expected_words=frozenset(words) - inputs))
    return out


def score_case(kw: Keyword, model: EmbeddingModel, k: int = DEFAULT_TOP_K) -> CaseResult:
    """Degree of success for one keyword: hits over total expected words.

    The case is excluded (score None) when any of its words is missing
    from the model vocabulary. Input words can never satisfy themselves:
    Top-K excludes the query words. A combination whose input sums to the
    zero vector scores zero hits.
    """
    if any(w not in model.vocabulary for w in kw.words):
        return CaseResult(keyword_id=kw.id, excluded=True, score=None)

    hits: list[int] = []
    expected_counts: list[int] = []
    for combo in expand_keyword(kw):
        expr = QueryExpression(terms=tuple((PLUS, w) for w in sorted(combo.input_words)))
        try:
            neighbors = {n.word for n in top_k(expr, model, k)}
        except DegenerateQueryError:
            neighbors = set()
        hits.append(len(combo.expected_words & neighbors))
        expected_counts.append(len(combo.expected_words))

    total_expected = sum(expected_counts)
    return CaseResult(
        keyword_id=kw.id,
        excluded=False,
        score=sum(hits) / total_expected,
        hits=tuple(hits),
        expected_counts=tuple(expected_counts),
    )


def score_suite(
    keywords: Sequence[Keyword], model: EmbeddingModel, k: int = DEFAULT_TOP_K
) -> SuiteResult:
    """Mean case score over the non-excluded cases."""
    if not keywords:
        raise DataError("empty keyword list")
    results = tuple(score_case(kw, model, k) for kw in keywords)
    scored = [r.score for r in results if not r.excluded]
    if not scored:
        raise NoScorableCasesError(
            "no scorable test cases: every keyword has out-of-vocabulary words"
        )
    return SuiteResult(
        results=results,
        mean_score=sum(scored) / len(scored),
        effective_cases=len(scored),
    )


ScoreFn = Callable[[EmbeddingModel, Sequence[Keyword], int], SuiteResult]


def select_best_epoch(
    snapshot_paths: Sequence[str | Path],
    keywords: Sequence[Keyword],
    k: int = DEFAULT_TOP_K,
    *,
    score_fn: ScoreFn | None = None,
) -> tuple[Path, list[EpochScore]]:
    """Score every snapshot and return the argmax, ties toward the smaller epoch.

    A snapshot whose suite has no scorable case gets an absent score and
    can never win; if that happens to every snapshot the error propagates.
    ``score_fn`` swaps in an alternative suite scorer (used by tests).
    """
    if not snapshot_paths:
        raise DataError("no snapshots to select from")
    scorer: ScoreFn = score_fn or (lambda m, kws, kk: score_suite(kws, m, kk))

    paths = sorted((Path(p) for p in snapshot_paths), key=lambda p: parse_snapshot_name(p.name)[0])
    table: list[EpochScore] = []
    last_error: NoScorableCasesError | None = None
    for path in paths:
        epoch, _ = parse_snapshot_name(path.name)
        model = load_model(path)
        try:
            suite = scorer(model, keywords, k)
        except NoScorableCasesError as exc:
            table.append(EpochScore(epoch=epoch, path=path, score=None))
            last_error = exc
            continue
        table.append(
            EpochScore(epoch=epoch, path=path, score=suite.mean_score,
                       effective_cases=suite.effective_cases)
        )

    best: EpochScore | None = None
    for entry in table:
        if entry.score is None:
            continue
        if best is None or entry.score > best.score:
            best = entry
    if best is None:
        assert last_error is not None
        raise last_error
    return best.path, table


def write_suite_csv(suite: SuiteResult, path: str | Path, *, comments: Sequence[str] = ()) -> None:
    """Per-case report: keyword_id, excluded, S. Excluded cases leave S empty."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        for comment in comments:
            handle.write(f"# {comment}\n")
        writer = csv.writer(handle)
        writer.writerow(["keyword_id", "excluded", "S"])
        for r in suite.results:
            writer.writerow([r.keyword_id, str(r.excluded).lower(), "" if r.score is None else f"{r.score:.6f}"])


def write_summary_csv(suite: SuiteResult, path: str | Path, *, comments: Sequence[str] = ()) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        for comment in comments:
            handle.write(f"# {comment}\n")
        writer = csv.writer(handle)
        writer.writerow(["D", "T_effective"])
        writer.writerow([f"{suite.mean_score:.6f}", suite.effective_cases])


def write_epoch_csv(table: Sequence[EpochScore], path: str | Path, *, comments: Sequence[str] = ()) -> None:
    """Audit table: epoch, D. Absent scores leave the D cell empty."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        for comment in comments:
            handle.write(f"# {comment}\n")
        writer = csv.writer(handle)
        writer.writerow(["epoch", "D"])
        for entry in table:
            writer.writerow([entry.epoch, "" if entry.score is None else f"{entry.score:.6f}"])
