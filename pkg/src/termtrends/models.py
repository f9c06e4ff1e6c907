"""Embedding model container and its text file format.

A model file is UTF-8 text: line 1 holds ``<vocab_size> <dim>``, then one
line per word with its vector in vocabulary index order, floats written
with 9 significant digits. Snapshot files follow the naming convention
``<window_label>_epoch<NNN>.vec``; the label ``<start>-<end>`` encodes the
time window and both fields are recovered on load.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, NumericalError
from .windows import TimeWindow, Vocabulary

GLOVE = "glove"
SGNS = "sgns"

_SNAPSHOT_RE = re.compile(r"^(?P<label>.+)_epoch(?P<epoch>\d+)\.vec$")
_WINDOW_LABEL_RE = re.compile(r"^(?P<start>\d+)-(?P<end>\d+)$")


@dataclass(eq=False)
class EmbeddingModel:
    """A vocabulary plus its |V| x dim vector matrix.

    ``vectors`` must stay finite and must not be mutated after queries
    start (row norms are cached); derive a new model instead.
    """

    vocabulary: Vocabulary
    vectors: np.ndarray
    epoch: int = 0
    backend: str = GLOVE
    window: TimeWindow | None = None
    _row_norms: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.vocabulary):
            raise DataError(
                f"vector matrix shape {self.vectors.shape} does not match "
                f"vocabulary size {len(self.vocabulary)}"
            )
        if not np.all(np.isfinite(self.vectors)):
            raise NumericalError("embedding vectors contain non-finite values")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def row_norms(self) -> np.ndarray:
        if self._row_norms is None:
            self._row_norms = np.linalg.norm(self.vectors, axis=1)
        return self._row_norms

    def snapshot_name(self, label: str | None = None) -> str:
        label = label or (self.window.label if self.window else "all")
        return f"{label}_epoch{self.epoch:03d}.vec"


def save_model(model: EmbeddingModel, path: str | Path) -> Path:
    """Write a model file; floats carry 9 significant digits.

    The file is written to ``<path>.partial`` and renamed on success, so
    an interrupted run leaves no truncated ``.vec`` behind.
    """
    path = Path(path)
    tmp = path.with_name(path.name + ".partial")
    vocab = model.vocabulary
    with tmp.open("w", encoding="utf-8") as handle:
        handle.write(f"{len(vocab)} {model.dim}\n")
        for word, row in zip(vocab.tokens, model.vectors):
            handle.write(word + " " + " ".join("%.9g" % v for v in row) + "\n")
    os.replace(tmp, path)
    return path


def load_model(path: str | Path) -> EmbeddingModel:
    """Read a model file back; epoch and window are recovered from the name."""
    path = Path(path)
    try:
        raw = path.read_text("utf-8")
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from exc
    lines = raw.splitlines()
    if not lines:
        raise DataError(f"{path}: empty model file")

    header = lines[0].split()
    if len(header) != 2:
        raise DataError(f"{path}: header must be '<vocab_size> <dim>', got {lines[0]!r}")
    try:
        size, dim = int(header[0]), int(header[1])
    except ValueError:
        raise DataError(f"{path}: non-integer header {lines[0]!r}") from None

    body = [line for line in lines[1:] if line.strip()]
    if len(body) != size:
        raise DataError(f"{path}: header declares {size} words but file has {len(body)}")

    words: list[str] = []
    vectors = np.empty((size, dim), dtype=np.float64)
    for row, line in enumerate(body):
        parts = line.split()
        if len(parts) != dim + 1:
            raise DataError(f"{path}: line {row + 2}: expected {dim} values, got {len(parts) - 1}")
        words.append(parts[0])
        try:
            values = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise DataError(f"{path}: line {row + 2}: {exc}") from None
        if not all(math.isfinite(v) for v in values):
            raise DataError(f"{path}: line {row + 2}: non-finite vector value")
        vectors[row] = values

    epoch, window = parse_snapshot_name(path.name)
    try:
        vocab = Vocabulary.from_words(words)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None
    return EmbeddingModel(vocabulary=vocab, vectors=vectors, epoch=epoch, window=window)


def parse_snapshot_name(name: str) -> tuple[int, TimeWindow | None]:
    """Recover (epoch, window) from ``<label>_epoch<NNN>.vec``; (0, None) otherwise."""
    m = _SNAPSHOT_RE.match(name)
    if not m:
        return 0, None
    epoch = int(m.group("epoch"))
    wm = _WINDOW_LABEL_RE.match(m.group("label"))
    window = None
    if wm:
        start, end = int(wm.group("start")), int(wm.group("end"))
        if start <= end:
            window = TimeWindow(start, end)
    return epoch, window
