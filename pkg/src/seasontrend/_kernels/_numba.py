"""Numba-compiled kernels. Same contracts as the numpy module."""

import math

import numpy as np
from numba import njit

_OPTS = {"cache": True, "fastmath": False}


# The causal shift makes every (sample, tap) pair a dense matmul between
# row-shifted slices, so the loops only walk taps and samples and leave the
# channel contraction to BLAS through np.dot.


@njit(**_OPTS)
def conv_forward(x, w, dilation):
    B, T, Ci = x.shape
    K, _, Co = w.shape
    y = np.zeros((B, T, Co))
    for b in range(B):
        xb = x[b]
        for k in range(K):
            s = (K - 1 - k) * dilation
            if s >= T:
                continue
            y[b, s:] += np.dot(xb[: T - s], w[k])
    return y


@njit(**_OPTS)
def conv_backward_input(g, w, dilation):
    B, T, Co = g.shape
    K, Ci, _ = w.shape
    wt = np.empty((K, Co, Ci))
    for k in range(K):
        wt[k] = w[k].T
    gx = np.zeros((B, T, Ci))
    for b in range(B):
        gb = g[b]
        for k in range(K):
            s = (K - 1 - k) * dilation
            if s >= T:
                continue
            gx[b, : T - s] += np.dot(gb[s:], wt[k])
    return gx


@njit(**_OPTS)
def conv_backward_weight(x, g, ksize, dilation):
    B, T, Ci = x.shape
    Co = g.shape[2]
    gw = np.zeros((ksize, Ci, Co))
    for b in range(B):
        xbt = np.ascontiguousarray(x[b].T)
        gb = g[b]
        for k in range(ksize):
            s = (ksize - 1 - k) * dilation
            if s >= T:
                continue
            gw[k] += np.dot(np.ascontiguousarray(xbt[:, : T - s]), gb[s:])
    return gw


@njit(**_OPTS)
def dft_naive(re, im, inverse):
    N, M = re.shape
    sign = 1.0 if inverse else -1.0
    cos_t = np.empty(N)
    sin_t = np.empty(N)
    for j in range(N):
        ang = sign * 2.0 * np.pi * j / N
        cos_t[j] = np.cos(ang)
        sin_t[j] = np.sin(ang)
    out_re = np.zeros((N, M))
    out_im = np.zeros((N, M))
    for k in range(N):
        for n in range(N):
            j = (k * n) % N
            c = cos_t[j]
            s = sin_t[j]
            for col in range(M):
                out_re[k, col] += c * re[n, col] - s * im[n, col]
                out_im[k, col] += s * re[n, col] + c * im[n, col]
    return out_re, out_im


@njit(**_OPTS)
def dft_radix2(re, im, inverse):
    N, M = re.shape
    sign = 1.0 if inverse else -1.0
    bits = 0
    while (1 << bits) < N:
        bits += 1
    xr = np.empty((N, M))
    xi = np.empty((N, M))
    for i in range(N):
        r = 0
        v = i
        for _ in range(bits):
            r = (r << 1) | (v & 1)
            v >>= 1
        xr[r] = re[i]
        xi[r] = im[i]
    size = 2
    while size <= N:
        half = size // 2
        for j in range(half):
            ang = sign * 2.0 * np.pi * j / size
            wr = np.cos(ang)
            wi = np.sin(ang)
            for start in range(0, N, size):
                a = start + j
                b = a + half
                for col in range(M):
                    tr = wr * xr[b, col] - wi * xi[b, col]
                    ti = wr * xi[b, col] + wi * xr[b, col]
                    xr[b, col] = xr[a, col] - tr
                    xi[b, col] = xi[a, col] - ti
                    xr[a, col] += tr
                    xi[a, col] += ti
        size *= 2
    return xr, xi


@njit(**_OPTS)
def arma_filter(ar, ma, e):
    n = e.shape[0]
    p = ar.shape[0]
    q = ma.shape[0]
    x = np.zeros(n)
    for t in range(n):
        v = e[t]
        for i in range(1, min(p, t) + 1):
            v += ar[i - 1] * x[t - i]
        for j in range(1, min(q, t) + 1):
            v += ma[j - 1] * e[t - j]
        x[t] = v
    return x


@njit(**_OPTS)
def gelu(x):
    flat = x.ravel()
    out = np.empty_like(flat)
    dout = np.empty_like(flat)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    inv_sqrt2pi = 1.0 / math.sqrt(2.0 * math.pi)
    for i in range(flat.size):
        v = flat[i]
        cdf = 0.5 * (1.0 + math.erf(v * inv_sqrt2))
        out[i] = v * cdf
        dout[i] = cdf + v * inv_sqrt2pi * math.exp(-0.5 * v * v)
    return out.reshape(x.shape), dout.reshape(x.shape)
