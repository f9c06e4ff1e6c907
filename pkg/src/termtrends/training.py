"""Training orchestration: epoch sweep with a snapshot after every epoch.

Snapshots go through a sink (normally a file writer) rather than being held
in memory; a 200-epoch sweep over a real vocabulary would not fit otherwise.
Single-threaded runs with a fixed seed are bit-reproducible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .cooccur import build_cooccurrence
from .corpus import Observation
from .errors import DataError
from .glove import glove_epoch, init_glove_state
from .models import GLOVE, SGNS, EmbeddingModel, save_model
from .sgns import has_training_pairs, init_sgns_state, sgns_epoch, unigram_noise_distribution
from .windows import TimeWindow, Vocabulary

log = logging.getLogger(__name__)

SnapshotSink = Callable[[EmbeddingModel], Path]


@dataclass(frozen=True)
class TrainerConfig:
    """Hyperparameters; defaults follow the conventional values for the method."""

    dim: int = 100
    context_window: int = 10
    x_max: float = 100.0
    alpha: float = 0.75
    learning_rate: float = 0.05
    max_epochs: int = 200
    backend: str = GLOVE
    negative_samples: int = 5
    seed: int = 42

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DataError(f"dim must be >= 1, got {self.dim}")
        if self.context_window < 1:
            raise DataError(f"context_window must be >= 1, got {self.context_window}")
        if self.max_epochs < 1:
            raise DataError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.x_max <= 0:
            raise DataError(f"x_max must be positive, got {self.x_max}")
        if not 0 < self.alpha <= 1:
            raise DataError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.learning_rate <= 0:
            raise DataError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.backend not in (GLOVE, SGNS):
            raise DataError(f"backend must be '{GLOVE}' or '{SGNS}', got {self.backend!r}")
        if self.negative_samples < 0:
            raise DataError(f"negative_samples must be >= 0, got {self.negative_samples}")


class SnapshotWriter:
    """Writes per-epoch snapshots as ``<label>_epoch<NNN>.vec`` files."""

    def __init__(self, directory: str | Path, label: str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.label = label

    def __call__(self, model: EmbeddingModel) -> Path:
        return save_model(model, self.directory / model.snapshot_name(self.label))


def train(
    observations: Sequence[Observation],
    vocab: Vocabulary,
    config: TrainerConfig,
    snapshot_sink: SnapshotSink,
    *,
    window: TimeWindow | None = None,
) -> tuple[list[Path], list[float]]:
    """Run ``max_epochs`` epochs and snapshot the model after each one.

    Returns the snapshot references in epoch order plus the per-epoch
    losses. Raises ``DataError("corpus too small ...")`` when no token
    pair ever falls inside the context window.
    """
    if len(vocab) == 0:
        raise DataError("empty vocabulary: nothing to train")

    if config.backend == GLOVE:
        table = build_cooccurrence(observations, vocab, config.context_window)
        if len(table) == 0:
            raise DataError("corpus too small: no co-occurrence pairs inside the context window")
        state = init_glove_state(len(vocab), config)

        def run_epoch() -> float:
            return glove_epoch(state, table, config)

    else:
        if not has_training_pairs(observations, vocab, config.context_window):
            raise DataError("corpus too small: no co-occurrence pairs inside the context window")
        noise = unigram_noise_distribution(observations, vocab)
        state = init_sgns_state(len(vocab), config, noise)

        def run_epoch() -> float:
            return sgns_epoch(state, observations, vocab, config)

    refs: list[Path] = []
    losses: list[float] = []
    for epoch in range(1, config.max_epochs + 1):
        loss = run_epoch()
        losses.append(loss)
        model = EmbeddingModel(
            vocabulary=vocab,
            vectors=state.vectors(),
            epoch=epoch,
            backend=config.backend,
            window=window,
        )
        refs.append(snapshot_sink(model))
        log.debug("epoch %d: loss %.6f", epoch, loss)
    return refs, losses
