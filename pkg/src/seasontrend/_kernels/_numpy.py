"""Pure-numpy kernels. Reference path and fallback when numba is unavailable."""

import numpy as np
from scipy.signal import lfilter
from scipy.special import erf


def conv_forward(x, w, dilation):
    """Causal dilated convolution. x: (B, T, Ci), w: (K, Ci, Co) -> (B, T, Co)."""
    B, T, _ = x.shape
    K, _, Co = w.shape
    y = np.zeros((B, T, Co))
    for k in range(K):
        s = (K - 1 - k) * dilation
        if s >= T:
            continue
        y[:, s:, :] += x[:, : T - s, :] @ w[k]
    return y


def conv_backward_input(g, w, dilation):
    B, T, _ = g.shape
    K, Ci, _ = w.shape
    gx = np.zeros((B, T, Ci))
    for k in range(K):
        s = (K - 1 - k) * dilation
        if s >= T:
            continue
        gx[:, : T - s, :] += g[:, s:, :] @ w[k].T
    return gx


def conv_backward_weight(x, g, ksize, dilation):
    B, T, Ci = x.shape
    Co = g.shape[2]
    gw = np.zeros((ksize, Ci, Co))
    for k in range(ksize):
        s = (ksize - 1 - k) * dilation
        if s >= T:
            continue
        gw[k] = np.tensordot(x[:, : T - s, :], g[:, s:, :], axes=([0, 1], [0, 1]))
    return gw


def dft_naive(re, im, inverse):
    """Unnormalized complex DFT along axis 0 by direct summation."""
    N = re.shape[0]
    sign = 1.0 if inverse else -1.0
    kn = np.outer(np.arange(N), np.arange(N)) % N
    ang = sign * 2.0 * np.pi * kn / N
    c, s = np.cos(ang), np.sin(ang)
    return c @ re - s @ im, s @ re + c @ im


def _bitrev(N):
    bits = N.bit_length() - 1
    idx = np.arange(N)
    rev = np.zeros(N, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def dft_radix2(re, im, inverse):
    """Iterative radix-2 FFT along axis 0; N must be a power of two."""
    N, M = re.shape
    sign = 1.0 if inverse else -1.0
    X = (re + 1j * im)[_bitrev(N)]
    size = 2
    while size <= N:
        half = size // 2
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        X = X.reshape(N // size, size, M)
        even = X[:, :half, :]
        odd = X[:, half:, :] * tw[None, :, None]
        X = np.concatenate((even + odd, even - odd), axis=1).reshape(N, M)
        size *= 2
    return np.ascontiguousarray(X.real), np.ascontiguousarray(X.imag)


def arma_filter(ar, ma, e):
    """``x_t = sum_i ar_i x_{t-i} + e_t + sum_j ma_j e_{t-j}`` from a zero state."""
    return lfilter(np.r_[1.0, ma], np.r_[1.0, -np.asarray(ar)], e)


def gelu(x):
    """Exact GELU and its derivative."""
    cdf = 0.5 * (1.0 + erf(x / np.sqrt(2.0)))
    return x * cdf, cdf + x * np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
