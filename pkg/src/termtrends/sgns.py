"""Skip-gram trainer with negative sampling.

Each in-vocabulary (center, context) pair within the context window gets
one positive update plus ``negative_samples`` noise updates drawn from the
unigram distribution raised to 0.75. Out-of-vocabulary tokens keep their
positions so window distances match the original text. The epoch loss is
the summed negative log-likelihood, evaluated before each update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .corpus import Observation
from .errors import NumericalError
from .windows import Vocabulary

if TYPE_CHECKING:
    from .training import TrainerConfig

NOISE_EXPONENT = 0.75


@dataclass
class SgnsState:
    w_in: np.ndarray
    w_out: np.ndarray
    noise_cdf: np.ndarray
    rng: np.random.Generator

    def vectors(self) -> np.ndarray:
        """Input matrix rows are the published embedding."""
        return self.w_in.copy()


def unigram_noise_distribution(
    observations: Sequence[Observation], vocab: Vocabulary
) -> np.ndarray:
    """Normalized sampling weights: occurrence counts raised to 0.75.

    A token with 8x the count of another is 8^0.75 (about 4.76x) as likely
    to be drawn as a negative sample.
    """
    counts = np.zeros(len(vocab), dtype=np.float64)
    for obs in observations:
        for token in obs.tokens:
            idx = vocab.index.get(token)
            if idx is not None:
                counts[idx] += 1.0
    weights = counts**NOISE_EXPONENT
    total = weights.sum()
    if total == 0.0:
        return weights
    return weights / total


def init_sgns_state(
    vocab_size: int,
    config: "TrainerConfig",
    noise_probs: np.ndarray,
) -> SgnsState:
    rng = np.random.default_rng(config.seed)
    scale = 0.5 / config.dim
    return SgnsState(
        w_in=rng.uniform(-scale, scale, size=(vocab_size, config.dim)),
        w_out=rng.uniform(-scale, scale, size=(vocab_size, config.dim)),
        noise_cdf=np.cumsum(noise_probs),
        rng=rng,
    )


def _log_sigmoid(x: float) -> float:
    # ln sigmoid(x) = -ln(1 + e^-x), stable for large |x|
    return -np.logaddexp(0.0, -x)


def _sigmoid(x: float) -> float:
    return 0.5 * (1.0 + math.tanh(0.5 * x))


def sgns_epoch(
    state: SgnsState,
    observations: Sequence[Observation],
    vocab: Vocabulary,
    config: "TrainerConfig",
) -> float:
    """One SGD pass over all pairs, in corpus order; returns the summed NLL."""
    w_in, w_out = state.w_in, state.w_out
    lr = config.learning_rate
    k_neg = config.negative_samples
    cdf = state.noise_cdf
    rng = state.rng
    index = vocab.index

    total = 0.0
    for obs in observations:
        ids = [index.get(t, -1) for t in obs.tokens]
        n = len(ids)
        for pos in range(n):
            center = ids[pos]
            if center < 0:
                continue
            lo = max(0, pos - config.context_window)
            hi = min(n - 1, pos + config.context_window)
            for cpos in range(lo, hi + 1):
                ctx = ids[cpos]
                # same-token pairs are skipped, mirroring the co-occurrence table
                if cpos == pos or ctx < 0 or ctx == center:
                    continue
                v = w_in[center]
                u = w_out[ctx]
                score = float(v @ u)
                loss = -_log_sigmoid(score)
                grad_v = (_sigmoid(score) - 1.0) * u

                negatives = (
                    np.searchsorted(cdf, rng.random(k_neg)) if k_neg > 0 else ()
                )
                for neg in negatives:
                    neg = int(neg)
                    if neg == ctx:
                        continue  # accidental hit: skip rather than push apart
                    u_neg = w_out[neg]
                    neg_score = float(v @ u_neg)
                    loss += -_log_sigmoid(-neg_score)
                    g_neg = _sigmoid(neg_score)
                    grad_v = grad_v + g_neg * u_neg
                    w_out[neg] = u_neg - lr * g_neg * v

                if not math.isfinite(loss):
                    raise NumericalError(
                        f"non-finite loss at pair (center={center}, context={ctx}) "
                        f"in observation {obs.source_id!r}"
                    )
                total += loss
                w_out[ctx] = u - lr * (_sigmoid(score) - 1.0) * v
                w_in[center] = v - lr * grad_v
    return total


def has_training_pairs(
    observations: Sequence[Observation], vocab: Vocabulary, context_window: int
) -> bool:
    """True when at least one in-vocabulary pair falls inside the window."""
    index = vocab.index
    for obs in observations:
        ids = [index.get(t, -1) for t in obs.tokens]
        n = len(ids)
        for p in range(n):
            if ids[p] < 0:
                continue
            for q in range(p + 1, min(p + context_window, n - 1) + 1):
                if ids[q] >= 0 and ids[q] != ids[p]:
                    return True
    return False
