"""Corpus loading and text preprocessing.

Two corpus styles are supported: JSON Lines files of dated paper records
(title + abstract become one observation) and plain-text books (each
paragraph becomes one undated observation). Both go through the same
tokenizer: lowercase, split on whitespace/punctuation, drop tokens with
digits, keep interior hyphens, remove stopwords. No stemming or
lemmatization is applied, so surface forms are preserved.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError

log = logging.getLogger(__name__)

# Maximal runs of word characters and hyphens; everything else splits.
# Underscores count as word characters in \w and are split out afterwards.
_WORD_RUN = re.compile(r"[\w-]+")


@dataclass(frozen=True)
class Document:
    """A raw dated record: one paper's title and abstract."""

    id: str
    title: str
    abstract: str
    year: int
    venue: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("document id must be non-empty")
        if self.year <= 0:
            raise DataError(f"document {self.id!r}: year must be positive, got {self.year}")


@dataclass(frozen=True)
class Observation:
    """One unit of text after tokenization; the co-occurrence scope.

    ``year`` is None for book corpora. Token order is preserved because
    co-occurrence distances are counted over the original sequence.
    """

    source_id: str
    tokens: tuple[str, ...]
    year: int | None = None

    @property
    def empty(self) -> bool:
        """True when cleaning removed every token; kept but contributes nothing."""
        return not self.tokens


@dataclass(frozen=True)
class TokenizerConfig:
    stopwords: frozenset[str] = frozenset()
    min_token_length: int = 1

    def __post_init__(self) -> None:
        if self.min_token_length < 1:
            raise DataError("min_token_length must be >= 1")
        bad = [w for w in self.stopwords if w != w.lower()]
        if bad:
            raise DataError(f"stopword entries must be lowercase: {sorted(bad)[:5]}")


def tokenize(text: str, config: TokenizerConfig) -> list[str]:
    """Split ``text`` into clean lowercase tokens, preserving order.

    Rules: split on whitespace and punctuation; lowercase; drop any token
    containing a digit; strip punctuation except hyphens interior to a
    token; drop stopwords and tokens shorter than the configured minimum.
    Total function: never raises.
    """
    out: list[str] = []
    for run in _WORD_RUN.findall(text):
        for piece in run.split("_"):
            if not piece:
                continue
            piece = piece.lower()
            if any(ch.isdigit() for ch in piece):
                continue
            piece = piece.strip("-")
            if not piece or len(piece) < config.min_token_length:
                continue
            if piece in config.stopwords:
                continue
            out.append(piece)
    return out


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stopword file (one token per line, ``#`` comments).

    With no path, the bundled English list ships as the default. Entries
    are lowercased so matching stays case-insensitive after tokenization.
    """
    if path is None:
        text = resources.files("termtrends.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        try:
            text = Path(path).read_text("utf-8")
        except OSError as exc:
            raise DataError(f"cannot read stopwords file {path}: {exc}") from exc
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return frozenset(words)


def read_documents(path: str | Path) -> list[Document]:
    """Parse a JSON Lines corpus into documents.

    Each line must carry ``id``, ``title``, ``abstract`` and ``year``;
    ``venue`` is optional. Errors name the offending line.
    """
    path = Path(path)
    try:
        raw = path.read_text("utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus {path}: {exc}") from exc

    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(record, dict):
            raise DataError(f"{path}:{lineno}: expected a JSON object")
        try:
            doc = Document(
                id=_expect_str(record, "id", lineno, path),
                title=_expect_str(record, "title", lineno, path),
                abstract=_expect_str(record, "abstract", lineno, path),
                year=_expect_int(record, "year", lineno, path),
                venue=record.get("venue"),
            )
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        if doc.id in seen:
            raise DataError(f"{path}:{lineno}: duplicate document id {doc.id!r}")
        seen.add(doc.id)
        docs.append(doc)
    return docs


def _expect_str(record: dict, key: str, lineno: int, path: Path) -> str:
    value = record.get(key)
    if not isinstance(value, str):
        raise DataError(f"{path}:{lineno}: missing or non-string field {key!r}")
    return value


def _expect_int(record: dict, key: str, lineno: int, path: Path) -> int:
    value = record.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise DataError(f"{path}:{lineno}: missing or non-integer field {key!r}")
    return value


def ingest_documents(path: str | Path, config: TokenizerConfig) -> list[Observation]:
    """Load a JSON Lines corpus; title + abstract of each record becomes one observation.

    Observations that clean to zero tokens are retained (flagged via
    ``Observation.empty``) so the observation count always matches the
    record count.
    """
    observations = [
        Observation(
            source_id=doc.id,
            tokens=tuple(tokenize(doc.title + " " + doc.abstract, config)),
            year=doc.year,
        )
        for doc in read_documents(path)
    ]
    n_empty = sum(1 for o in observations if o.empty)
    if n_empty:
        log.warning("%d of %d observations are empty after cleaning", n_empty, len(observations))
    return observations


@dataclass(frozen=True)
class SectionMarker:
    """Heading-prefix range excluded from a book corpus.

    Written ``"start"`` or ``"start..end"``. The region opens at the first
    line starting with ``start`` and closes just before the next line
    starting with ``end`` (to end of file when no end marker is given).
    """

    start: str
    end: str | None = None

    @classmethod
    def parse(cls, spec: str) -> "SectionMarker":
        if ".." in spec:
            start, _, end = spec.partition("..")
            start, end = start.strip(), end.strip()
            if not start or not end:
                raise DataError(f"invalid exclusion marker {spec!r}: empty start or end")
            return cls(start, end)
        if not spec.strip():
            raise DataError("exclusion marker must be non-empty")
        return cls(spec.strip())


def ingest_book(
    path: str | Path,
    config: TokenizerConfig,
    excluded_sections: Sequence[str | SectionMarker] = (),
) -> list[Observation]:
    """Load a plain-text book corpus, one observation per paragraph.

    A paragraph is a maximal run of non-blank lines. Lines inside an
    excluded section are dropped before paragraphs are formed; a section
    boundary also breaks the surrounding paragraph. When ``path`` is a
    directory, its files are read in sorted name order with file
    boundaries acting as paragraph breaks. Observations carry no year.
    """
    markers = [m if isinstance(m, SectionMarker) else SectionMarker.parse(m) for m in excluded_sections]
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file())
        if not files:
            raise DataError(f"book corpus directory {path} contains no files")
    else:
        files = [path]

    observations: list[Observation] = []
    for file in files:
        try:
            text = file.read_text("utf-8")
        except OSError as exc:
            raise DataError(f"cannot read book corpus {file}: {exc}") from exc
        observations.extend(_paragraphs_to_observations(text, file.name, markers, config))
    return observations


def _paragraphs_to_observations(
    text: str,
    source_name: str,
    markers: list[SectionMarker],
    config: TokenizerConfig,
) -> list[Observation]:
    observations: list[Observation] = []
    paragraph: list[str] = []
    open_marker: SectionMarker | None = None
    counter = 0

    def flush() -> None:
        nonlocal counter
        if paragraph:
            counter += 1
            tokens = tokenize(" ".join(paragraph), config)
            observations.append(
                Observation(source_id=f"{source_name}:p{counter}", tokens=tuple(tokens))
            )
            paragraph.clear()

    for line in text.splitlines():
        stripped = line.strip()
        if open_marker is not None:
            if open_marker.end is not None and stripped.startswith(open_marker.end):
                open_marker = None
                # fall through: this line belongs to the next section
            else:
                starts = [m for m in markers if stripped.startswith(m.start)]
                if starts:
                    raise DataError(
                        f"overlapping exclusion markers: {starts[0].start!r} opens inside "
                        f"the open section {open_marker.start!r}"
                    )
                continue
        if open_marker is None:
            starts = [m for m in markers if stripped and stripped.startswith(m.start)]
            if len(starts) > 1:
                raise DataError(
                    "overlapping exclusion markers: "
                    f"{starts[0].start!r} and {starts[1].start!r} match the same line"
                )
            if starts:
                flush()  # the heading line terminates the preceding paragraph
                open_marker = starts[0]
                continue
        if not stripped:
            flush()
        else:
            paragraph.append(stripped)
    flush()
    return observations


def write_observations(observations: Iterable[Observation], path: str | Path) -> None:
    """Persist observations as JSON Lines (source_id, year, tokens)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for obs in observations:
            record: dict = {"source_id": obs.source_id, "tokens": list(obs.tokens)}
            if obs.year is not None:
                record["year"] = obs.year
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_observations(path: str | Path) -> list[Observation]:
    """Load observations written by :func:`write_observations`."""
    path = Path(path)
    try:
        raw = path.read_text("utf-8")
    except OSError as exc:
        raise DataError(f"cannot read observations {path}: {exc}") from exc
    out: list[Observation] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
        source_id = record.get("source_id")
        tokens = record.get("tokens")
        year = record.get("year")
        if not isinstance(source_id, str) or not isinstance(tokens, list):
            raise DataError(f"{path}:{lineno}: expected source_id and tokens fields")
        if year is not None and (not isinstance(year, int) or isinstance(year, bool)):
            raise DataError(f"{path}:{lineno}: year must be an integer when present")
        out.append(Observation(source_id=source_id, tokens=tuple(tokens), year=year))
    return out
