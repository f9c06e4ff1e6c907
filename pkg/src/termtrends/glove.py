"""Weighted least-squares embedding trainer over co-occurrence statistics.

Minimizes sum_ij f(X_ij) (w_i . wc_j + b_i + bc_j - ln X_ij)^2 with
f(x) = (x / x_max)^alpha clipped at 1, using per-parameter adaptive
gradient steps. One epoch is a single seeded-shuffled pass over all table
entries; the reported loss is the weighted squared error summed before
each update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .cooccur import CooccurrenceTable
from .errors import NumericalError

if TYPE_CHECKING:
    from .training import TrainerConfig


@dataclass
class GloveState:
    """Mutable trainer state: two vector matrices, two bias arrays, accumulators."""

    w_main: np.ndarray
    w_ctx: np.ndarray
    b_main: np.ndarray
    b_ctx: np.ndarray
    acc_w_main: np.ndarray
    acc_w_ctx: np.ndarray
    acc_b_main: np.ndarray
    acc_b_ctx: np.ndarray
    rng: np.random.Generator

    def vectors(self) -> np.ndarray:
        """Composed embedding rows: main + context, the conventional readout."""
        return self.w_main + self.w_ctx


def cooccurrence_weight(x: float, x_max: float, alpha: float) -> float:
    """The loss weighting f: (x / x_max)^alpha for x < x_max, else 1."""
    if x >= x_max:
        return 1.0
    return (x / x_max) ** alpha


def init_glove_state(vocab_size: int, config: "TrainerConfig") -> GloveState:
    """Seeded uniform init in [-0.5/dim, +0.5/dim]; accumulators start at 1."""
    rng = np.random.default_rng(config.seed)
    dim = config.dim
    scale = 0.5 / dim

    def uniform(*shape: int) -> np.ndarray:
        return rng.uniform(-scale, scale, size=shape)

    return GloveState(
        w_main=uniform(vocab_size, dim),
        w_ctx=uniform(vocab_size, dim),
        b_main=uniform(vocab_size),
        b_ctx=uniform(vocab_size),
        # 1.0 bounds the first adaptive step like the reference optimizer
        acc_w_main=np.ones((vocab_size, dim)),
        acc_w_ctx=np.ones((vocab_size, dim)),
        acc_b_main=np.ones(vocab_size),
        acc_b_ctx=np.ones(vocab_size),
        rng=rng,
    )


def entry_loss_and_grads(
    w_i: np.ndarray,
    w_j: np.ndarray,
    b_i: float,
    b_j: float,
    x: float,
    x_max: float,
    alpha: float,
) -> tuple[float, np.ndarray, np.ndarray, float, float]:
    """Per-entry loss f(x) * diff^2 and its analytic gradients.

    Returns (loss, d/dw_i, d/dw_j, d/db_i, d/db_j). Kept separate from the
    epoch pass so the gradients can be checked against finite differences.
    """
    fx = cooccurrence_weight(x, x_max, alpha)
    diff = float(w_i @ w_j) + b_i + b_j - math.log(x)
    loss = fx * diff * diff
    g = 2.0 * fx * diff
    return loss, g * w_j, g * w_i, g, g


def glove_epoch(state: GloveState, table: CooccurrenceTable, config: "TrainerConfig") -> float:
    """One adaptive-gradient pass over all entries in a seeded shuffled order.

    Mutates ``state`` in place and returns the summed weighted squared
    error, each term evaluated before its own update.
    """
    i_idx, j_idx, x_val = table.to_arrays()
    order = state.rng.permutation(len(x_val))
    lr = config.learning_rate
    x_max = config.x_max
    alpha = config.alpha

    w_main, w_ctx = state.w_main, state.w_ctx
    b_main, b_ctx = state.b_main, state.b_ctx
    acc_wm, acc_wc = state.acc_w_main, state.acc_w_ctx
    acc_bm, acc_bc = state.acc_b_main, state.acc_b_ctx

    total = 0.0
    for k in order:
        i = i_idx[k]
        j = j_idx[k]
        x = x_val[k]
        wi = w_main[i]
        wj = w_ctx[j]
        fx = cooccurrence_weight(x, x_max, alpha)
        diff = float(wi @ wj) + b_main[i] + b_ctx[j] - math.log(x)
        loss = fx * diff * diff
        if not math.isfinite(loss):
            raise NumericalError(
                f"non-finite loss at co-occurrence entry (i={int(i)}, j={int(j)}, x={x!r})"
            )
        total += loss

        g = 2.0 * fx * diff
        gw_i = g * wj
        gw_j = g * wi
        acc_wm[i] += gw_i * gw_i
        acc_wc[j] += gw_j * gw_j
        w_main[i] = wi - lr * gw_i / np.sqrt(acc_wm[i])
        w_ctx[j] = wj - lr * gw_j / np.sqrt(acc_wc[j])
        acc_bm[i] += g * g
        acc_bc[j] += g * g
        b_main[i] -= lr * g / math.sqrt(acc_bm[i])
        b_ctx[j] -= lr * g / math.sqrt(acc_bc[j])
    return total
