"""Time-domain InfoNCE with a momentum encoder and key queue, plus the frequency-domain losses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augmentation import AugmentConfig, augment_batch
from .autodiff import Tensor, as_tensor, concat, logsumexp, no_grad, swapaxes, tsum
from .encoder import EncoderParams, encode, is_time_branch, project, trend_forward
from .errors import CheckpointError, ConfigError, DimensionError, InsufficientDataError
from .spectral import ComplexTensor, amplitude, phase

DEFAULT_ALPHA = 5e-4


def infonce(q, k_pos, negatives, tau: float) -> Tensor:
    """Summed InfoNCE: ``sum_i -log(e^{q_i.k_i/tau} / (e^{q_i.k_i/tau} + sum_j e^{q_i.n_j/tau}))``."""
    if tau <= 0:
        raise ConfigError(f"temperature must be > 0, got {tau}")
    q, k_pos = as_tensor(q), as_tensor(k_pos)
    negatives = as_tensor(negatives)
    if q.shape != k_pos.shape or q.ndim != 2:
        raise DimensionError(f"query {q.shape} and positive keys {k_pos.shape} must be matching (N, p)")
    if negatives.ndim != 2 or (negatives.shape[0] and negatives.shape[1] != q.shape[1]):
        raise DimensionError(f"negatives must be (K, {q.shape[1]}), got {negatives.shape}")
    inv_tau = 1.0 / tau
    pos = tsum(q * k_pos, axis=1) * inv_tau
    if negatives.shape[0] == 0:
        logits = pos.reshape(-1, 1)
    else:
        neg = (q @ swapaxes(negatives, 0, 1)) * inv_tau
        logits = concat([pos.reshape(-1, 1), neg], axis=1)
    return tsum(logsumexp(logits, axis=1) - pos)


class MoCoState:
    """Momentum copy of the time branch plus a FIFO queue of ``K`` unit-norm keys."""

    def __init__(self, momentum_params: EncoderParams, queue: np.ndarray, m_ema: float = 0.999, tau: float = 0.07):
        if not 0.0 <= m_ema <= 1.0:
            raise ConfigError(f"m_ema must be in [0, 1], got {m_ema}")
        if tau <= 0:
            raise ConfigError(f"tau must be > 0, got {tau}")
        self.momentum_params = momentum_params
        self.queue = np.array(queue, dtype=np.float64)
        self.ptr = 0  # index of the oldest entry
        self.m_ema = m_ema
        self.tau = tau

    @classmethod
    def create(cls, online: EncoderParams, K: int = 256, m_ema: float = 0.999, tau: float = 0.07, rng=None) -> "MoCoState":
        rng = np.random.default_rng(0) if rng is None else rng
        dim = online.config.head_dim
        q = rng.standard_normal((K, dim))
        q /= np.maximum(np.linalg.norm(q, axis=1, keepdims=True), 1e-12)
        return cls(online.time_branch(), q, m_ema, tau)

    @property
    def K(self) -> int:
        return self.queue.shape[0]

    def ordered_queue(self) -> np.ndarray:
        """Queue contents from oldest to newest."""
        return np.roll(self.queue, -self.ptr, axis=0)

    def enqueue(self, keys: np.ndarray) -> None:
        """Push ``keys`` (N, p) and drop the ``N`` oldest entries."""
        keys = np.asarray(keys, dtype=np.float64)
        if self.K == 0:
            return
        if keys.ndim != 2 or keys.shape[1] != self.queue.shape[1]:
            raise DimensionError(f"keys must be (N, {self.queue.shape[1]}), got {keys.shape}")
        if keys.shape[0] >= self.K:
            self.queue = keys[-self.K :].copy()
            self.ptr = 0
            return
        idx = (self.ptr + np.arange(keys.shape[0])) % self.K
        self.queue[idx] = keys
        self.ptr = int((self.ptr + keys.shape[0]) % self.K)


def momentum_update(online: EncoderParams, moco: MoCoState) -> EncoderParams:
    """``theta_mom <- m * theta_mom + (1 - m) * theta_online`` over the time branch."""
    m = moco.m_ema
    mom = moco.momentum_params
    for name in mom:
        if name not in online:
            raise CheckpointError(f"online parameters lack {name!r}")
        src = online[name].data
        dst = mom[name].data
        if src.shape != dst.shape:
            raise CheckpointError(f"{name!r}: online shape {src.shape} vs momentum shape {dst.shape}")
        mom[name].data = m * dst + (1.0 - m) * src
    return mom


def momentum_keys(x_k: np.ndarray, t_idx: np.ndarray, moco: MoCoState) -> np.ndarray:
    """Unit-norm keys from the momentum branch at one timestamp per sample."""
    with no_grad():
        v_t = trend_forward(x_k, moco.momentum_params)
        rows = v_t.data[np.arange(len(t_idx)), t_idx]
        return project(rows, moco.momentum_params).data


def time_loss_from_views(v_t_query: Tensor, x_k: np.ndarray, t_idx: np.ndarray, params: EncoderParams, moco: MoCoState):
    """InfoNCE between online queries and momentum keys; returns ``(loss, keys)``."""
    n = len(t_idx)
    q = project(v_t_query[np.arange(n), t_idx], params)
    keys = momentum_keys(x_k, t_idx, moco)
    return infonce(q, keys, moco.queue, moco.tau), keys


def time_domain_loss(batch_x: np.ndarray, params: EncoderParams, moco: MoCoState, rng, aug: AugmentConfig | None = None) -> Tensor:
    """Augment two views, contrast them at a shared random timestamp, then update the queue."""
    aug = AugmentConfig() if aug is None else aug
    batch_x = np.asarray(batch_x, dtype=np.float64)
    x_q = augment_batch(batch_x, aug, rng)
    x_k = augment_batch(batch_x, aug, rng)
    t_idx = rng.integers(0, batch_x.shape[1], size=batch_x.shape[0])
    loss, keys = time_loss_from_views(trend_forward(x_q, params), x_k, t_idx, params, moco)
    moco.enqueue(keys)
    return loss


def _frequency_infonce(a: Tensor, a_aug: Tensor) -> Tensor:
    """Mean over (frequency, sample) of the in-batch InfoNCE on raw dot products.

    ``a`` and ``a_aug`` are (N, F, d_S). Row ``j`` of the per-frequency logit
    matrix holds the positive ``a_j . a'_j`` on the diagonal and ``a_j . a_k``
    (k != j) elsewhere.
    """
    n, f, _ = a.shape
    af = swapaxes(a, 0, 1)  # (F, N, d_S)
    pos = tsum(af * swapaxes(a_aug, 0, 1), axis=-1)  # (F, N)
    sims = af @ swapaxes(af, 1, 2)  # (F, N, N)
    eye = np.eye(n)
    logits = sims * (1.0 - eye) + pos.reshape(f, n, 1) * eye
    return tsum(logsumexp(logits, axis=-1) - pos) * (1.0 / (f * n))


def frequency_loss(f_batch: ComplexTensor, f_batch_aug: ComplexTensor) -> tuple[Tensor, Tensor]:
    """Amplitude and phase contrastive losses over pre-inverse-DFT maps of shape (N, F, d_S)."""
    if f_batch.shape != f_batch_aug.shape:
        raise DimensionError(f"views differ in shape: {f_batch.shape} vs {f_batch_aug.shape}")
    if len(f_batch.shape) != 3:
        raise DimensionError(f"expected (N, F, d_S), got {f_batch.shape}")
    if f_batch.shape[0] < 2:
        raise InsufficientDataError("frequency losses need at least 2 samples for in-batch negatives")
    l_amp = _frequency_infonce(amplitude(f_batch), amplitude(f_batch_aug))
    l_phase = _frequency_infonce(phase(f_batch), phase(f_batch_aug))
    return l_amp, l_phase


def combine_losses(l_time, l_amp, l_phase, alpha: float):
    """``l_time + alpha / 2 * (l_amp + l_phase)``; works on floats and tensors."""
    return l_time + (l_amp + l_phase) * (alpha / 2.0)


@dataclass(frozen=True)
class LossBreakdown:
    l_time: float
    l_amp: float
    l_phase: float
    total: float
    alpha: float


def total_loss(l_time, l_amp, l_phase, alpha: float = DEFAULT_ALPHA) -> LossBreakdown:
    if alpha < 0:
        raise ConfigError(f"alpha must be >= 0, got {alpha}")
    vals = [float(v.data) if isinstance(v, Tensor) else float(v) for v in (l_time, l_amp, l_phase)]
    return LossBreakdown(*vals, total=float(combine_losses(*vals, alpha)), alpha=alpha)


@dataclass
class StepLosses:
    l_time: Tensor
    l_amp: Tensor
    l_phase: Tensor
    total: Tensor
    keys: np.ndarray


def step_losses(params: EncoderParams, moco: MoCoState, x_q: np.ndarray, x_k: np.ndarray, t_idx: np.ndarray, alpha: float) -> StepLosses:
    """Full objective for one batch of already-augmented view pairs.

    Both views go through the online encoder (one batched pass) for the
    frequency losses; the key view also goes through the momentum branch.
    """
    n = x_q.shape[0]
    enc = encode(np.concatenate([x_q, x_k], axis=0), params)
    l_time, keys = time_loss_from_views(enc.V_T[:n], x_k, t_idx, params, moco)
    f_q = ComplexTensor(enc.F_pre.re[:n], enc.F_pre.im[:n])
    f_k = ComplexTensor(enc.F_pre.re[n:], enc.F_pre.im[n:])
    l_amp, l_phase = frequency_loss(f_q, f_k)
    return StepLosses(l_time, l_amp, l_phase, combine_losses(l_time, l_amp, l_phase, alpha), keys)


__all__ = [
    "DEFAULT_ALPHA",
    "LossBreakdown",
    "MoCoState",
    "StepLosses",
    "combine_losses",
    "frequency_loss",
    "infonce",
    "is_time_branch",
    "momentum_keys",
    "momentum_update",
    "step_losses",
    "time_domain_loss",
    "time_loss_from_views",
    "total_loss",
]
