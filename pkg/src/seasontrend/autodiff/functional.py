"""Layer-level differentiable ops built on the tensor engine."""

from __future__ import annotations

from .. import _kernels
from ..errors import DimensionError
from .tensor import Tensor, as_tensor, clamp_min, matmul, sqrt, tsum


def linear(x, w, b=None) -> Tensor:
    """Affine map along the last axis: ``x @ w + b``."""
    x, w = as_tensor(x), as_tensor(w)
    if w.ndim != 2 or x.shape[-1] != w.shape[0]:
        raise DimensionError(f"linear: input {x.shape} does not match weight {w.shape}")
    squeeze = x.ndim == 1
    if squeeze:
        x = x.reshape(1, -1)
    out = matmul(x, w)
    if b is not None:
        b = as_tensor(b)
        if b.shape != (w.shape[1],):
            raise DimensionError(f"linear: bias {b.shape} does not match weight {w.shape}")
        out = out + b
    if squeeze:
        out = out.reshape(w.shape[1])
    return out


def gelu(x) -> Tensor:
    """Exact GELU, ``x * Phi(x)`` with the standard normal CDF."""
    x = as_tensor(x)
    out, dout = _kernels.gelu(x.data)
    return Tensor._node(out, (x,), lambda g: (g * dout,), "gelu")


def causal_dilated_conv1d(x, kernel, dilation: int = 1) -> Tensor:
    """Causal dilated convolution over time.

    ``x`` is ``(time, in_ch)`` or ``(batch, time, in_ch)``; ``kernel`` is
    ``(ksize, in_ch, out_ch)``. The input is implicitly left-padded with
    ``(ksize - 1) * dilation`` zeros so the output keeps the input length and
    position ``t`` only sees inputs at positions ``<= t``. Kernel tap ``j``
    multiplies the input ``(ksize - 1 - j) * dilation`` steps in the past.
    """
    x, kernel = as_tensor(x), as_tensor(kernel)
    if kernel.ndim != 3:
        raise DimensionError(f"conv kernel must be (ksize, in_ch, out_ch), got {kernel.shape}")
    if x.ndim not in (2, 3):
        raise DimensionError(f"conv input must be (time, ch) or (batch, time, ch), got {x.shape}")
    if x.shape[-1] != kernel.shape[1]:
        raise DimensionError(f"conv channel mismatch: input {x.shape} vs kernel {kernel.shape}")
    if dilation < 1 or kernel.shape[0] < 1:
        raise DimensionError(f"conv needs ksize >= 1 and dilation >= 1, got {kernel.shape[0]}, {dilation}")

    batched = x.ndim == 3
    xd = x.data if batched else x.data[None]
    ksize = kernel.shape[0]
    out = _kernels.conv_forward(xd, kernel.data, dilation)

    def backward(g):
        g3 = g if batched else g[None]
        gx = _kernels.conv_backward_input(g3, kernel.data, dilation) if x.requires_grad else None
        gw = _kernels.conv_backward_weight(xd, g3, ksize, dilation) if kernel.requires_grad else None
        if gx is not None and not batched:
            gx = gx[0]
        return gx, gw

    return Tensor._node(out if batched else out[0], (x, kernel), backward, "conv1d")


def l2_normalize(x, axis: int = -1, eps: float = 1e-12) -> Tensor:
    """Scale to unit Euclidean norm along ``axis``; norms below ``eps`` are clamped."""
    x = as_tensor(x)
    norm = sqrt(tsum(x * x, axis=axis, keepdims=True))
    return x / clamp_min(norm, eps)
