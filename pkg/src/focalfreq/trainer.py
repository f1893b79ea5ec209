"""Desk-scale optimization experiments.

Two experiments drive the loss through plain gradient-based optimization:
direct reconstruction of one image from noise under a chosen frequency
distance, and an MLP autoencoder trained with ``MSE + ffl_weight * FFL``.
Both are deterministic functions of their inputs and seeds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .corpus import CorpusSpec, generate_corpus
from .loss import Distance, LossConfig, batch_ffl, ffl_value_and_grad
from .metrics import MetricReport, evaluate_pair, mean_report
from .mlp import AdamState, MlpAutoencoder, adam_step, mlp_backward, mlp_forward
from .spectral import as_image

logger = logging.getLogger(__name__)

HELD_OUT_FRACTION = 0.1


class DivergenceError(RuntimeError):
    """Raised when a loss value stops being finite."""

    def __init__(self, message, epoch=None, step=None):
        super().__init__(message)
        self.epoch = epoch
        self.step = step


def to_pixels(x):
    """Map ``[-1, 1]`` to the 0-255 metric scale."""
    return (np.asarray(x) + 1.0) * 127.5


def from_pixels(x):
    return np.asarray(x, dtype=np.float64) / 127.5 - 1.0


def initial_image(shape, seed: int = 0) -> np.ndarray:
    """Seeded uniform noise in ``[-0.5, 0.5]``."""
    return np.random.default_rng(seed).uniform(-0.5, 0.5, size=shape)


@dataclass
class ReconResult:
    image: np.ndarray
    trace: list
    snapshots: dict = field(default_factory=dict)


def single_image_reconstruct(
    target,
    distance="full",
    steps: int = 2000,
    lr: float = 0.01,
    seed: int = 0,
    init=None,
    snapshot_every: int | None = None,
) -> ReconResult:
    """Fit a free image to ``target`` by Adam on an unfocused frequency distance.

    ``trace[i]`` is the loss before update ``i``; the last entry is the loss
    of the returned image, so ``len(trace) == steps + 1``.
    """
    target = as_image(target, "target")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    config = LossConfig(distance=Distance(distance), focal=False)
    image = initial_image(target.shape, seed) if init is None else as_image(init, "init").copy()
    state = AdamState(lr=lr)
    trace = []
    snapshots = {}
    for step in range(steps + 1):
        value, grad = ffl_value_and_grad(target, image, config)
        if not np.isfinite(value):
            raise DivergenceError(f"loss became {value} at step {step}", step=step)
        trace.append(value)
        if snapshot_every and step % snapshot_every == 0:
            snapshots[step] = image.copy()
        if step == steps:
            break
        (image,) = adam_step(state, [image], [grad])
    return ReconResult(image=image, trace=trace, snapshots=snapshots)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 128
    seed: int = 0
    ffl_weight: float = 1.0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    hidden: int = 256
    init_std: float = 0.02
    loss: LossConfig = field(default_factory=LossConfig)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if not self.ffl_weight >= 0:
            raise ValueError("ffl_weight must be non-negative")


@dataclass
class TrainResult:
    model: MlpAutoencoder
    report: MetricReport
    traces: list


def split_corpus(images):
    """Deterministic split: the last tenth is held out."""
    n_held = max(int(round(len(images) * HELD_OUT_FRACTION)), 1)
    return images[:-n_held], images[-n_held:]


def composite_loss(model, batch, config: TrainConfig, need_grad=True):
    """``MSE + ffl_weight * FFL`` on a batch, with parameter gradients."""
    recon, cache = mlp_forward(model, batch, return_cache=True)
    resid = recon - batch
    mse = float(np.mean(resid**2))
    ffl, ffl_grad = batch_ffl(batch, recon, config.loss, return_grad=True)
    total = mse + config.ffl_weight * ffl
    if not need_grad:
        return mse, ffl, total, None
    grad_recon = 2.0 * resid / resid.size
    if config.ffl_weight:
        grad_recon = grad_recon + config.ffl_weight * ffl_grad
    return mse, ffl, total, mlp_backward(model, batch, grad_recon, cache)


def held_out_report(model, images) -> MetricReport:
    recon = mlp_forward(model, images)
    return mean_report([evaluate_pair(to_pixels(x), to_pixels(y)) for x, y in zip(images, recon)])


def train_autoencoder(corpus, config: TrainConfig) -> TrainResult:
    """Train the MLP autoencoder on a corpus and score the held-out tenth.

    ``corpus`` is a :class:`CorpusSpec` or a ready ``(N, H, W, C)`` stack in
    ``[-1, 1]``. Traces hold per-epoch means of the MSE, FFL and total loss.
    """
    images = generate_corpus(corpus) if isinstance(corpus, CorpusSpec) else np.asarray(corpus, dtype=np.float64)
    if images.ndim == 3:
        images = images[..., None]
    if len(images) < 2 * config.batch_size:
        raise ValueError(f"corpus of {len(images)} images is smaller than twice the batch size {config.batch_size}")
    train, held = split_corpus(images)
    dim = int(np.prod(images.shape[1:]))
    model = MlpAutoencoder.initialize(dim, config.hidden, config.init_std, config.seed)
    state = AdamState.for_params(model.params(), lr=config.lr, beta1=config.beta1, beta2=config.beta2)
    rng = np.random.default_rng(config.seed + 1)
    traces = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(train))
        sums = np.zeros(3)
        n_steps = 0
        for step, start in enumerate(range(0, len(train), config.batch_size)):
            batch = train[order[start : start + config.batch_size]]
            mse, ffl, total, grads = composite_loss(model, batch, config)
            if not np.isfinite(total):
                raise DivergenceError(f"loss became {total} at epoch {epoch} step {step}", epoch, step)
            model.set_params(adam_step(state, model.params(), grads))
            sums += (mse, ffl, total)
            n_steps += 1
        mse, ffl, total = sums / n_steps
        traces.append({"epoch": epoch, "mse": mse, "ffl": ffl, "total": total})
        logger.debug("epoch %d mse %.6f ffl %.6f", epoch, mse, ffl)
    return TrainResult(model=model, report=held_out_report(model, held), traces=traces)
