"""Scaling, shifting and jittering, applied in that order, each behind its own coin flip."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class AugmentConfig:
    # the three sigmas are standard deviations
    sigma_scale: float = 0.5
    sigma_shift: float = 0.5
    sigma_jitter: float = 0.5
    p_apply: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.sigma_scale, self.sigma_shift, self.sigma_jitter) < 0:
            raise ConfigError("augmentation sigmas must be >= 0")
        if not 0.0 <= self.p_apply <= 1.0:
            raise ConfigError(f"p_apply must be in [0, 1], got {self.p_apply}")

    def to_dict(self) -> dict:
        return asdict(self)


def augment(x: np.ndarray, cfg: AugmentConfig, rng) -> np.ndarray:
    """Augment one window of shape (h, m).

    ``rng`` needs ``random()`` and ``normal(loc, scale, size=None)``, e.g. a
    ``numpy.random.Generator``. Draw order per window: scale coin, scale
    factor, shift coin, shift offset, jitter coin, jitter noise; draws for
    inactive augmentations are skipped.
    """
    out = x
    if rng.random() < cfg.p_apply:
        out = rng.normal(0.0, cfg.sigma_scale) * out
    if rng.random() < cfg.p_apply:
        out = out + rng.normal(0.0, cfg.sigma_shift)
    if rng.random() < cfg.p_apply:
        out = out + rng.normal(0.0, cfg.sigma_jitter, size=x.shape)
    return out


def augment_batch(xb: np.ndarray, cfg: AugmentConfig, rng) -> np.ndarray:
    """Independent augmentation of every window in a (batch, h, m) array."""
    return np.stack([augment(x, cfg, rng) for x in xb])
