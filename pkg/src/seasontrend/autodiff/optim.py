"""SGD with momentum, coupled L2 weight decay and a cosine learning-rate schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ConfigError, DimensionError, ScheduleExhaustedError
from .tensor import Tensor


def cosine_lr(base_lr: float, step: int, total_steps: int) -> float:
    """Cosine annealing from ``base_lr`` at step 0 towards 0 at ``total_steps``."""
    return base_lr * 0.5 * (1.0 + math.cos(math.pi * step / total_steps))


@dataclass
class OptimState:
    velocity: list[np.ndarray]
    base_lr: float = 1e-3
    momentum: float = 0.9
    weight_decay: float = 1e-4
    total_steps: int = 1
    step: int = 0

    def __post_init__(self):
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.total_steps < 1:
            raise ConfigError(f"total_steps must be >= 1, got {self.total_steps}")
        if not 0 <= self.step <= self.total_steps:
            raise ConfigError(f"step {self.step} outside [0, {self.total_steps}]")

    @classmethod
    def create(cls, params: Sequence[Tensor], **kwargs) -> "OptimState":
        return cls(velocity=[np.zeros(p.shape) for p in params], **kwargs)

    @property
    def lr(self) -> float:
        return cosine_lr(self.base_lr, self.step, self.total_steps)


def sgd_step(params: Sequence[Tensor], grads: Sequence[np.ndarray], state: OptimState):
    """One in-place update; returns ``(params, state)``.

    ``v <- momentum * v + grad + weight_decay * param`` then
    ``param <- param - lr(step) * v``.
    """
    if state.step >= state.total_steps:
        raise ScheduleExhaustedError(f"step {state.step} reached total_steps={state.total_steps}")
    if len(params) != len(grads) or len(params) != len(state.velocity):
        raise DimensionError(f"got {len(params)} params, {len(grads)} grads, {len(state.velocity)} velocities")
    lr = state.lr
    for p, g, v in zip(params, grads, state.velocity):
        if g is None:
            raise ConfigError(f"missing gradient for parameter of shape {p.shape}")
        v *= state.momentum
        v += g
        if state.weight_decay:
            v += state.weight_decay * p.data
        p.data -= lr * v
    state.step += 1
    return params, state
