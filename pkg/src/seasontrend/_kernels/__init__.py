"""Hot kernels with a numba path and a pure-numpy fallback.

Set ``SEASONTREND_BACKEND=numpy`` to force the numpy path. The default is
``numba`` when it imports, otherwise ``numpy``.
"""

import os

import numpy as np

from . import _numpy

_requested = os.environ.get("SEASONTREND_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"SEASONTREND_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_impl = _numpy
BACKEND = "numpy"
if _requested == "numba":
    try:
        from . import _numba

        _impl = _numba
        BACKEND = "numba"
    except ImportError:  # pragma: no cover
        pass


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def conv_forward(x, w, dilation):
    return _impl.conv_forward(_c(x), _c(w), int(dilation))


def conv_backward_input(g, w, dilation):
    return _impl.conv_backward_input(_c(g), _c(w), int(dilation))


def conv_backward_weight(x, g, ksize, dilation):
    return _impl.conv_backward_weight(_c(x), _c(g), int(ksize), int(dilation))


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def dft(re, im, inverse=False):
    """Unnormalized complex DFT along axis 0 of 2-D arrays.

    Power-of-two lengths take the radix-2 path, everything else the O(N^2) sum.
    """
    re, im = _c(re), _c(im)
    if is_power_of_two(re.shape[0]):
        return _impl.dft_radix2(re, im, bool(inverse))
    return _impl.dft_naive(re, im, bool(inverse))


def dft_naive(re, im, inverse=False):
    return _impl.dft_naive(_c(re), _c(im), bool(inverse))


def dft_radix2(re, im, inverse=False):
    if not is_power_of_two(re.shape[0]):
        raise ValueError(f"radix-2 path needs a power-of-two length, got {re.shape[0]}")
    return _impl.dft_radix2(_c(re), _c(im), bool(inverse))


def arma_filter(ar, ma, e):
    """ARMA recursion driven by innovations ``e``, zero initial state."""
    return _impl.arma_filter(_c(ar).reshape(-1), _c(ma).reshape(-1), _c(e))


def gelu(x):
    """``(x * Phi(x), d/dx)`` elementwise."""
    return _impl.gelu(_c(x))
