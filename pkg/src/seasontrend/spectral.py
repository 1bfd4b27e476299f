"""Differentiable real DFT, its inverse, amplitude/phase, and the per-frequency complex layer.

Complex values are carried as a pair of real tensors. Gradients are those of a
real-valued loss with respect to the real and imaginary parts separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .autodiff import Tensor, as_tensor, matmul, swapaxes
from .errors import DimensionError


@dataclass
class ComplexTensor:
    re: Tensor
    im: Tensor

    def __post_init__(self):
        self.re, self.im = as_tensor(self.re), as_tensor(self.im)
        if self.re.shape != self.im.shape:
            raise DimensionError(f"real part {self.re.shape} and imaginary part {self.im.shape} differ")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.re.shape

    def numpy(self) -> np.ndarray:
        return self.re.data + 1j * self.im.data

    @classmethod
    def from_numpy(cls, z, requires_grad: bool = False) -> "ComplexTensor":
        z = np.asarray(z, dtype=np.complex128)
        return cls(Tensor(z.real.copy(), requires_grad), Tensor(z.imag.copy(), requires_grad))


def num_frequencies(n: int) -> int:
    return n // 2 + 1


def _to_columns(a: np.ndarray, axis: int) -> tuple[np.ndarray, tuple[int, ...]]:
    moved = np.moveaxis(a, axis, 0)
    return moved.reshape(moved.shape[0], -1), moved.shape


def _from_columns(a: np.ndarray, moved_shape: tuple[int, ...], axis: int) -> np.ndarray:
    return np.moveaxis(a.reshape((a.shape[0],) + moved_shape[1:]), 0, axis)


def _half_spectrum(cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = cols.shape[0]
    re, im = _kernels.dft(cols, np.zeros_like(cols), inverse=False)
    f = num_frequencies(n)
    return re[:f], im[:f]


def _synthesize(re: np.ndarray, im: np.ndarray, n: int) -> np.ndarray:
    """``Re(sum_k z_k exp(+2 pi i k m / n))`` for a half spectrum zero-padded to ``n``."""
    full_re = np.zeros((n, re.shape[1]))
    full_im = np.zeros((n, re.shape[1]))
    full_re[: re.shape[0]] = re
    full_im[: re.shape[0]] = im
    out_re, _ = _kernels.dft(full_re, full_im, inverse=True)
    return out_re


def _irdft_weights(n: int) -> np.ndarray:
    # each non-DC, non-Nyquist bin stands for itself and its conjugate mirror
    w = np.full(num_frequencies(n), 2.0)
    w[0] = 1.0
    if n % 2 == 0:
        w[-1] = 1.0
    return w


def rdft(x, axis: int = 0) -> ComplexTensor:
    """First ``n // 2 + 1`` coefficients of ``c_k = sum_n x_n exp(-2 pi i k n / N)`` along ``axis``."""
    x = as_tensor(x)
    if x.ndim == 0 or x.shape[axis] == 0:
        raise DimensionError(f"rdft needs a non-empty axis, got shape {x.shape}")
    axis = axis % x.ndim
    n = x.shape[axis]
    cols, moved_shape = _to_columns(x.data, axis)
    re, im = _half_spectrum(cols)
    stacked = np.stack([_from_columns(re, moved_shape, axis), _from_columns(im, moved_shape, axis)])

    def backward(g):
        gre, _ = _to_columns(g[0], axis)
        gim, _ = _to_columns(g[1], axis)
        gx = _synthesize(gre, gim, n)
        return (_from_columns(gx, moved_shape, axis),)

    out = Tensor._node(stacked, (x,), backward, "rdft")
    return ComplexTensor(out[0], out[1])


def irdft(c: ComplexTensor, n: int, axis: int = 0) -> Tensor:
    """Real signal of length ``n`` from its half spectrum along ``axis``.

    Imaginary parts of the DC bin (and of the Nyquist bin for even ``n``) do
    not contribute, so their gradient is zero.
    """
    re, im = c.re, c.im
    axis = axis % re.ndim
    if re.shape[axis] != num_frequencies(n):
        raise DimensionError(f"irdft: {re.shape[axis]} coefficients cannot come from a length-{n} signal")
    w = _irdft_weights(n)[:, None]
    re_cols, moved_shape = _to_columns(re.data, axis)
    im_cols, _ = _to_columns(im.data, axis)
    x = _synthesize(w * re_cols, w * im_cols, n) / n
    out_shape = (n,) + moved_shape[1:]

    def backward(g):
        g_cols, _ = _to_columns(g, axis)
        gre, gim = _half_spectrum(g_cols)
        gre *= w / n
        gim *= w / n
        return _from_columns(gre, moved_shape, axis), _from_columns(gim, moved_shape, axis)

    return Tensor._node(_from_columns(x, out_shape, axis), (re, im), backward, "irdft")


def amplitude(c: ComplexTensor) -> Tensor:
    """``sqrt(re^2 + im^2)``; the gradient at the origin is taken as 0."""
    re, im = c.re, c.im
    amp = np.hypot(re.data, im.data)

    def backward(g):
        safe = np.where(amp > 0, amp, 1.0)
        scale = np.where(amp > 0, g / safe, 0.0)
        return scale * re.data, scale * im.data

    return Tensor._node(amp, (re, im), backward, "amplitude")


def phase(c: ComplexTensor) -> Tensor:
    """Quadrant-aware angle in ``(-pi, pi]``; 0 with zero gradient at the origin."""
    re, im = c.re, c.im
    ang = np.arctan2(im.data, re.data)
    ang = np.where(ang == -np.pi, np.pi, ang)
    r2 = re.data**2 + im.data**2

    def backward(g):
        safe = np.where(r2 > 0, r2, 1.0)
        scale = np.where(r2 > 0, g / safe, 0.0)
        return -scale * im.data, scale * re.data

    return Tensor._node(ang, (re, im), backward, "phase")


@dataclass
class FourierLayerParams:
    """Complex weights ``A`` of shape (F, d, d_S) and bias ``B`` of shape (F, d_S)."""

    A: ComplexTensor
    B: ComplexTensor

    def __post_init__(self):
        f, d, ds = self.A.shape
        if self.B.shape != (f, ds):
            raise DimensionError(f"Fourier bias {self.B.shape} does not match weights {self.A.shape}")

    @property
    def n_freq(self) -> int:
        return self.A.shape[0]


def fourier_layer(v: ComplexTensor, params: FourierLayerParams) -> ComplexTensor:
    """``out[..., i, k] = sum_j A[i, j, k] * v[..., i, j] + B[i, k]`` with a separate map per frequency.

    ``v`` is ``(F, d)`` or ``(batch, F, d)``.
    """
    if v.re.ndim not in (2, 3):
        raise DimensionError(f"fourier_layer input must be (F, d) or (batch, F, d), got {v.shape}")
    f, d, _ = params.A.shape
    if v.shape[-2] != f:
        raise DimensionError(f"fourier_layer: input has {v.shape[-2]} frequencies, params have {f}")
    if v.shape[-1] != d:
        raise DimensionError(f"fourier_layer: input width {v.shape[-1]} does not match params {d}")

    batched = v.re.ndim == 3
    if batched:
        # (F, batch, d) @ (F, d, d_S) -> (F, batch, d_S)
        vr, vi = swapaxes(v.re, 0, 1), swapaxes(v.im, 0, 1)
    else:
        vr, vi = v.re.reshape(f, 1, d), v.im.reshape(f, 1, d)
    ar, ai = params.A.re, params.A.im
    out_re = matmul(vr, ar) - matmul(vi, ai)
    out_im = matmul(vr, ai) + matmul(vi, ar)
    if batched:
        out_re, out_im = swapaxes(out_re, 0, 1), swapaxes(out_im, 0, 1)
    else:
        out_re, out_im = out_re.reshape(f, -1), out_im.reshape(f, -1)
    return ComplexTensor(out_re + params.B.re, out_im + params.B.im)
