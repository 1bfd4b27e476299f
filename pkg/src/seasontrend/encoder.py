"""Backbone, trend disentangler, seasonal disentangler and projection head."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from .autodiff import (
    Tensor,
    as_tensor,
    causal_dilated_conv1d,
    concat,
    gelu,
    l2_normalize,
    linear,
    pad_front,
)
from .errors import ConfigError, DimensionError
from .spectral import ComplexTensor, FourierLayerParams, fourier_layer, irdft, num_frequencies, rdft


@dataclass(frozen=True)
class EncoderConfig:
    m: int = 1
    h: int = 64
    hidden: int = 32
    blocks: int = 4
    d: int = 64
    proj_dim: int | None = None
    ksize: int = 3
    init_gain: float = 1.0 / math.sqrt(3.0)  # uniform bound = gain * sqrt(3 / fan_in)

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if self.h < 4:
            raise ConfigError(f"h must be >= 4 so the trend mixture has at least two experts, got {self.h}")
        if self.d < 2 or self.d % 2:
            raise ConfigError(f"d must be even and >= 2, got {self.d}")
        if self.hidden < 1 or self.blocks < 0:
            raise ConfigError(f"invalid backbone size hidden={self.hidden}, blocks={self.blocks}")
        if not self.init_gain > 0:
            raise ConfigError(f"init_gain must be > 0, got {self.init_gain}")

    @classmethod
    def full_scale(cls, m: int = 1, h: int = 64) -> "EncoderConfig":
        return cls(m=m, h=h, hidden=64, blocks=10, d=320)

    @property
    def d_T(self) -> int:
        return self.d // 2

    @property
    def d_S(self) -> int:
        return self.d - self.d // 2

    @property
    def L(self) -> int:
        return int(math.floor(math.log2(self.h / 2)))

    @property
    def n_experts(self) -> int:
        return self.L + 1

    @property
    def expert_sizes(self) -> list[int]:
        return [2**i for i in range(self.n_experts)]

    @property
    def n_freq(self) -> int:
        return num_frequencies(self.h)

    @property
    def head_dim(self) -> int:
        return self.d_T if self.proj_dim is None else self.proj_dim

    def to_dict(self) -> dict:
        return asdict(self)


def param_shapes(cfg: EncoderConfig) -> dict[str, tuple[tuple[int, ...], int]]:
    """Ordered ``name -> (shape, fan_in)``; fan_in 0 marks a zero-initialized bias."""
    shapes: dict[str, tuple[tuple[int, ...], int]] = {
        "input.w": ((cfg.m, cfg.hidden), cfg.m),
        "input.b": ((cfg.hidden,), 0),
    }
    for i in range(cfg.blocks):
        for j in (1, 2):
            shapes[f"block{i}.conv{j}.w"] = ((cfg.ksize, cfg.hidden, cfg.hidden), cfg.ksize * cfg.hidden)
            shapes[f"block{i}.conv{j}.b"] = ((cfg.hidden,), 0)
    shapes["output.w"] = ((cfg.hidden, cfg.d), cfg.hidden)
    shapes["output.b"] = ((cfg.d,), 0)
    for i, k in enumerate(cfg.expert_sizes):
        shapes[f"tfd.expert{i}.w"] = ((k, cfg.d, cfg.d_T), k * cfg.d)
        shapes[f"tfd.expert{i}.b"] = ((cfg.d_T,), 0)
    f = cfg.n_freq
    shapes["sfd.A.re"] = ((f, cfg.d, cfg.d_S), cfg.d)
    shapes["sfd.A.im"] = ((f, cfg.d, cfg.d_S), cfg.d)
    shapes["sfd.B.re"] = ((f, cfg.d_S), 0)
    shapes["sfd.B.im"] = ((f, cfg.d_S), 0)
    shapes["head.w"] = ((cfg.d_T, cfg.head_dim), cfg.d_T)
    shapes["head.b"] = ((cfg.head_dim,), 0)
    return shapes


# names the momentum encoder keeps a copy of
def is_time_branch(name: str) -> bool:
    return not name.startswith("sfd.")


@dataclass
class EncoderParams:
    config: EncoderConfig
    tensors: dict[str, Tensor] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def names(self) -> list[str]:
        return list(self.tensors)

    def parameters(self) -> list[Tensor]:
        return list(self.tensors.values())

    def arrays(self) -> dict[str, np.ndarray]:
        return {k: v.data for k, v in self.tensors.items()}

    def copy(self, names=None, requires_grad: bool = False) -> "EncoderParams":
        keep = self.tensors if names is None else {k: self.tensors[k] for k in names}
        return EncoderParams(self.config, {k: Tensor(v.data.copy(), requires_grad) for k, v in keep.items()})

    def time_branch(self, requires_grad: bool = False) -> "EncoderParams":
        return self.copy([k for k in self.tensors if is_time_branch(k)], requires_grad)

    def zero_grad(self) -> None:
        for t in self.tensors.values():
            t.grad = None

    def fourier_params(self) -> FourierLayerParams:
        return FourierLayerParams(
            ComplexTensor(self["sfd.A.re"], self["sfd.A.im"]),
            ComplexTensor(self["sfd.B.re"], self["sfd.B.im"]),
        )

    @classmethod
    def from_arrays(cls, config: EncoderConfig, arrays: dict[str, np.ndarray], requires_grad: bool = True) -> "EncoderParams":
        expected = param_shapes(config)
        for name, (shape, _) in expected.items():
            if name not in arrays:
                raise DimensionError(f"missing parameter {name!r}")
            if tuple(arrays[name].shape) != shape:
                raise DimensionError(f"parameter {name!r} has shape {arrays[name].shape}, expected {shape}")
        return cls(config, {k: Tensor(np.array(arrays[k], dtype=np.float64), requires_grad) for k in expected})


def init_params(cfg: EncoderConfig, seed: int = 0) -> EncoderParams:
    """Kaiming-uniform (fan-in) weights, zero biases.

    The bound is ``init_gain * sqrt(3 / fan_in)``. The default gain gives
    ``1 / sqrt(fan_in)``; the He gain ``sqrt(2)`` blows up the raw-dot-product
    amplitude loss within a few steps on some seeds.
    """
    rng = np.random.default_rng(seed)
    tensors = {}
    for name, (shape, fan_in) in param_shapes(cfg).items():
        if fan_in == 0:
            data = np.zeros(shape)
        else:
            bound = cfg.init_gain * math.sqrt(3.0 / fan_in)
            data = rng.uniform(-bound, bound, size=shape)
        tensors[name] = Tensor(data, requires_grad=True)
    return EncoderParams(cfg, tensors)


def _check_input(x: Tensor, cfg: EncoderConfig) -> None:
    if x.ndim not in (2, 3) or x.shape[-2:] != (cfg.h, cfg.m):
        raise DimensionError(f"encoder expects (h, m) = ({cfg.h}, {cfg.m}) windows, got {x.shape}")


def backbone_forward(x, p: EncoderParams) -> Tensor:
    """Causal TCN: input projection, residual dilated blocks, output projection."""
    cfg = p.config
    x = as_tensor(x)
    _check_input(x, cfg)
    z = linear(x, p["input.w"], p["input.b"])
    for i in range(cfg.blocks):
        dil = 2**i
        res = z
        z = causal_dilated_conv1d(gelu(z), p[f"block{i}.conv1.w"], dil) + p[f"block{i}.conv1.b"]
        z = causal_dilated_conv1d(gelu(z), p[f"block{i}.conv2.w"], dil) + p[f"block{i}.conv2.b"]
        z = z + res
    return linear(z, p["output.w"], p["output.b"])


def tfd_forward(v, p: EncoderParams) -> Tensor:
    """Average of causal-conv experts with kernel sizes 1, 2, ..., 2**L.

    Averaging convolutions equals one convolution with the averaged kernel
    once each expert is front-padded to the longest size, so a single conv
    call is issued.
    """
    cfg = p.config
    sizes = cfg.expert_sizes
    kmax = sizes[-1]
    kernel = None
    bias = None
    for i, k in enumerate(sizes):
        w = pad_front(p[f"tfd.expert{i}.w"], kmax - k, axis=0)
        kernel = w if kernel is None else kernel + w
        b = p[f"tfd.expert{i}.b"]
        bias = b if bias is None else bias + b
    scale = 1.0 / len(sizes)
    return causal_dilated_conv1d(v, kernel * scale, 1) + bias * scale


def tfd_forward_experts(v, p: EncoderParams) -> Tensor:
    """Reference form of ``tfd_forward``: one convolution per expert, then the mean."""
    cfg = p.config
    outs = None
    for i in range(cfg.n_experts):
        o = causal_dilated_conv1d(v, p[f"tfd.expert{i}.w"], 1) + p[f"tfd.expert{i}.b"]
        outs = o if outs is None else outs + o
    return outs * (1.0 / cfg.n_experts)


def sfd_forward(v, p: EncoderParams) -> tuple[Tensor, ComplexTensor]:
    """DFT over time, per-frequency complex affine map, inverse DFT.

    Returns the time-domain seasonal features and the complex map before the
    inverse transform.
    """
    v = as_tensor(v)
    h = v.shape[-2]
    spec = rdft(v, axis=-2)
    f_pre = fourier_layer(spec, p.fourier_params())
    return irdft(f_pre, h, axis=-2), f_pre


@dataclass
class Encoding:
    V: Tensor
    V_T: Tensor
    V_S: Tensor
    F_pre: ComplexTensor


def encode(x, p: EncoderParams) -> Encoding:
    v_tilde = backbone_forward(x, p)
    v_t = tfd_forward(v_tilde, p)
    v_s, f_pre = sfd_forward(v_tilde, p)
    return Encoding(concat([v_t, v_s], axis=-1), v_t, v_s, f_pre)


def trend_forward(x, p: EncoderParams) -> Tensor:
    """Backbone + trend disentangler only (the branch the momentum encoder mirrors)."""
    return tfd_forward(backbone_forward(x, p), p)


def project(v, p: EncoderParams) -> Tensor:
    """Projection head: one affine layer followed by L2 normalization."""
    return l2_normalize(linear(v, p["head.w"], p["head.b"]), axis=-1)
