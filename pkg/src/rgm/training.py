"""Training loop for the map pair: Adam over the empirical objective.

Runs full-batch when ``batch_size`` is 0 (the default, suitable for clouds
of up to a few thousand points); otherwise samples minibatches without
replacement, reshuffling each epoch, independently for the two clouds. The
loss is logged every ``log_every`` iterations, and a final full-batch
evaluation is always appended. Identical data and config (including the
seed) reproduce parameters and trace bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discrepancy import SinkhornConfig
from .errors import DimensionError, DivergenceError
from .kernels import KernelSpec
from .maps import (
    AdamState,
    MapModel,
    ModelSpec,
    adam_step,
    backward,
    forward,
    init_model,
    input_dim,
    output_dim,
    parameters,
)
from .measures import DatasetPair, EmpiricalMeasure
from .objective import LagrangeWeights, LossBreakdown, lagrangian, lagrangian_with_grad
from .rng import make_rng


@dataclass(frozen=True)
class TrainConfig:
    cost_x: KernelSpec
    cost_y: KernelSpec
    kernel_x: KernelSpec
    kernel_y: KernelSpec
    weights: LagrangeWeights
    model_f: ModelSpec
    model_b: ModelSpec
    iterations: int
    learning_rate: float
    halving_period: int = 500
    batch_size: int = 0
    seed: int = 0
    log_every: int = 10
    penalty: SinkhornConfig | None = None

    def __post_init__(self):
        if self.iterations < 0:
            raise DimensionError("iterations must be nonnegative")
        if self.learning_rate < 0:
            raise DimensionError("learning rate must be nonnegative")


@dataclass
class LossTrace:
    """Loss breakdowns at logged iterations; the last entry is full-batch."""

    entries: list[tuple[int, LossBreakdown]] = field(default_factory=list)

    def last(self) -> LossBreakdown:
        return self.entries[-1][1]


class _Batcher:
    """Without-replacement index stream, reshuffled each epoch."""

    def __init__(self, n: int, batch: int, rng: np.random.Generator):
        self.n = n
        self.batch = batch
        self.rng = rng
        self.order = rng.permutation(n)
        self.pos = 0

    def take(self) -> np.ndarray:
        if self.pos + self.batch > self.n:
            self.order = self.rng.permutation(self.n)
            self.pos = 0
        out = self.order[self.pos : self.pos + self.batch]
        self.pos += self.batch
        return out


def train(data: DatasetPair, cfg: TrainConfig) -> tuple[MapModel, MapModel, LossTrace]:
    """Minimize the objective over the two map families.

    Returns the trained forward and backward maps along with the loss trace.
    A non-finite loss aborts with :class:`DivergenceError` carrying the
    iteration index.
    """
    x = data.source.points
    y = data.target.points
    rng = make_rng(cfg.seed)
    model_f = init_model(cfg.model_f, rng)
    model_b = init_model(cfg.model_b, rng)
    if input_dim(model_f) != x.shape[1] or output_dim(model_b) != x.shape[1]:
        raise DimensionError("model dimensions do not match the source cloud")
    if input_dim(model_b) != y.shape[1] or output_dim(model_f) != y.shape[1]:
        raise DimensionError("model dimensions do not match the target cloud")

    adam_f = AdamState(learning_rate=cfg.learning_rate, halving_period=cfg.halving_period)
    adam_b = AdamState(learning_rate=cfg.learning_rate, halving_period=cfg.halving_period)
    trace = LossTrace()

    minibatch = 0 < cfg.batch_size < max(x.shape[0], y.shape[0])
    if minibatch:
        bx = _Batcher(x.shape[0], min(cfg.batch_size, x.shape[0]), rng)
        by_ = _Batcher(y.shape[0], min(cfg.batch_size, y.shape[0]), rng)

    for t in range(cfg.iterations):
        if minibatch:
            xb = x[bx.take()]
            yb = y[by_.take()]
        else:
            xb, yb = x, y
        fx = forward(model_f, xb)
        bys = forward(model_b, yb)
        breakdown, d_fx, d_by = lagrangian_with_grad(
            cfg.cost_x, cfg.cost_y, cfg.kernel_x, cfg.kernel_y, cfg.weights, xb, yb, fx, bys,
            penalty=cfg.penalty,
        )
        if not np.isfinite(breakdown.total):
            raise DivergenceError(f"non-finite loss at iteration {t}", iteration=t)
        if t % cfg.log_every == 0:
            trace.entries.append((t, breakdown))
        grads_f, _ = backward(model_f, xb, d_fx)
        grads_b, _ = backward(model_b, yb, d_by)
        adam_step(adam_f, parameters(model_f), grads_f)
        adam_step(adam_b, parameters(model_b), grads_b)

    final = lagrangian(
        cfg.cost_x, cfg.cost_y, cfg.kernel_x, cfg.kernel_y, cfg.weights,
        x, y, forward(model_f, x), forward(model_b, y), penalty=cfg.penalty,
    )
    trace.entries.append((cfg.iterations, final))
    return model_f, model_b, trace


def evaluate(model_f: MapModel, model_b: MapModel, data: DatasetPair, cfg: TrainConfig) -> LossBreakdown:
    """Full-batch loss breakdown of a trained pair on the given data."""
    x = data.source.points
    y = data.target.points
    return lagrangian(
        cfg.cost_x, cfg.cost_y, cfg.kernel_x, cfg.kernel_y, cfg.weights,
        x, y, forward(model_f, x), forward(model_b, y), penalty=cfg.penalty,
    )


def pushforward(model: MapModel, samples: EmpiricalMeasure) -> EmpiricalMeasure:
    """Apply the map pointwise, producing the image measure's samples."""
    return EmpiricalMeasure(forward(model, samples.points))
