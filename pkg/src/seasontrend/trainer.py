"""Representation-learning loop."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .augmentation import AugmentConfig, augment_batch
from .autodiff import OptimState, sgd_step
from .contrastive import DEFAULT_ALPHA, LossBreakdown, MoCoState, momentum_update, step_losses
from .dataset import Series, normalize, split
from .encoder import EncoderConfig, EncoderParams, init_params
from .errors import ConfigError, InsufficientDataError, NumericalError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 256
    iterations: int = 200
    base_lr: float = 1e-3
    momentum: float = 0.9
    weight_decay: float = 1e-4
    alpha: float = DEFAULT_ALPHA
    h: int = 64
    seed: int = 0
    queue_size: int = 256
    m_ema: float = 0.999
    tau: float = 0.07
    augment: AugmentConfig = field(default_factory=AugmentConfig)

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.batch_size < 2:
            raise ConfigError(f"batch_size must be >= 2 for in-batch negatives, got {self.batch_size}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")

    @classmethod
    def desk_scale(cls, **overrides) -> "TrainConfig":
        return cls(**{"batch_size": 32, "iterations": 200, **overrides})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        if "augment" in d and isinstance(d["augment"], dict):
            d["augment"] = AugmentConfig(**d["augment"])
        return cls(**d)


def sample_batch(train_split: np.ndarray, h: int, batch_size: int, rng) -> np.ndarray:
    """``batch_size`` windows at independent uniform offsets inside ``train_split`` (T, m)."""
    train_split = np.asarray(train_split, dtype=np.float64)
    if train_split.ndim == 1:
        train_split = train_split[:, None]
    n_offsets = train_split.shape[0] - h + 1
    if n_offsets < 1:
        raise InsufficientDataError(f"train split of length {train_split.shape[0]} is shorter than h = {h}")
    starts = rng.integers(0, n_offsets, size=batch_size)
    return np.stack([train_split[s : s + h] for s in starts])


class WindowPool:
    """Uniform sampling over the union of every series' valid window offsets."""

    def __init__(self, segments: Sequence[np.ndarray], h: int):
        self.segments = [np.asarray(s, dtype=np.float64).reshape(len(s), -1) for s in segments]
        self.h = h
        counts = [s.shape[0] - h + 1 for s in self.segments]
        if any(c < 1 for c in counts):
            raise InsufficientDataError(f"every training segment needs at least h = {h} steps")
        if len({s.shape[1] for s in self.segments}) != 1:
            raise ConfigError("all series must have the same number of channels")
        self.offsets = np.concatenate([[0], np.cumsum(counts)])

    @property
    def m(self) -> int:
        return self.segments[0].shape[1]

    def sample(self, batch_size: int, rng) -> np.ndarray:
        if len(self.segments) == 1:
            return sample_batch(self.segments[0], self.h, batch_size, rng)
        flat = rng.integers(0, self.offsets[-1], size=batch_size)
        which = np.searchsorted(self.offsets, flat, side="right") - 1
        starts = flat - self.offsets[which]
        return np.stack([self.segments[w][s : s + self.h] for w, s in zip(which, starts)])


@dataclass(frozen=True)
class StepRecord:
    step: int
    lr: float
    losses: LossBreakdown

    def row(self) -> dict:
        b = self.losses
        return {"step": self.step, "lr": self.lr, "l_time": b.l_time, "l_amp": b.l_amp, "l_phase": b.l_phase, "total": b.total}


@dataclass
class TrainResult:
    params: EncoderParams
    log: list[StepRecord]
    moco: MoCoState
    optim: OptimState
    train_segments: list[np.ndarray]


def prepare_training_segments(series: Series | Sequence[Series]) -> list[np.ndarray]:
    """Normalized training segments of one or more series."""
    items = [series] if isinstance(series, Series) else list(series)
    return [split(normalize(s))[0].values for s in items]


def train(
    series: Series | Sequence[Series],
    encoder_cfg: EncoderConfig,
    cfg: TrainConfig,
    on_step: Callable[[StepRecord], None] | None = None,
) -> TrainResult:
    """Train one encoder on the training splits of ``series``."""
    if encoder_cfg.h != cfg.h:
        raise ConfigError(f"encoder window h={encoder_cfg.h} differs from training h={cfg.h}")
    segments = prepare_training_segments(series)
    pool = WindowPool(segments, cfg.h)
    if pool.m != encoder_cfg.m:
        raise ConfigError(f"data has {pool.m} channels, encoder expects {encoder_cfg.m}")

    seeds = np.random.SeedSequence(cfg.seed).spawn(3)
    params = init_params(encoder_cfg, int(seeds[0].generate_state(1)[0]))
    moco = MoCoState.create(params, cfg.queue_size, cfg.m_ema, cfg.tau, np.random.default_rng(seeds[1]))
    rng = np.random.default_rng(seeds[2])
    plist = params.parameters()
    optim = OptimState.create(
        plist,
        base_lr=cfg.base_lr,
        momentum=cfg.momentum,
        weight_decay=cfg.weight_decay,
        total_steps=cfg.iterations,
    )

    records: list[StepRecord] = []
    for step in range(cfg.iterations):
        xb = pool.sample(cfg.batch_size, rng)
        x_q = augment_batch(xb, cfg.augment, rng)
        x_k = augment_batch(xb, cfg.augment, rng)
        t_idx = rng.integers(0, cfg.h, size=cfg.batch_size)

        params.zero_grad()
        losses = step_losses(params, moco, x_q, x_k, t_idx, cfg.alpha)
        vals = [float(t.data) for t in (losses.l_time, losses.l_amp, losses.l_phase, losses.total)]
        if not np.all(np.isfinite(vals)):
            raise NumericalError(
                f"non-finite loss at step {step}: l_time={vals[0]}, l_amp={vals[1]}, l_phase={vals[2]}"
            )
        losses.total.backward()
        lr = optim.lr
        grads = [p.grad if p.grad is not None else np.zeros(p.shape) for p in plist]
        sgd_step(plist, grads, optim)
        momentum_update(params, moco)
        moco.enqueue(losses.keys)

        rec = StepRecord(step, lr, LossBreakdown(*vals[:3], total=vals[3], alpha=cfg.alpha))
        records.append(rec)
        if on_step is not None:
            on_step(rec)
        if step % 20 == 0 or step == cfg.iterations - 1:
            log.info("step %d lr %.3g total %.4f (time %.4f amp %.4f phase %.4f)", step, lr, *vals[3:], *vals[:3])
    params.zero_grad()
    return TrainResult(params, records, moco, optim, segments)
