"""Finite-difference verification of reverse-mode gradients."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import EvaluationError
from .tensor import Tensor, no_grad


def _eval(f, inputs) -> float:
    with no_grad():
        val = f(*inputs)
    v = float(val.data if isinstance(val, Tensor) else val)
    if not np.isfinite(v):
        raise EvaluationError(f"function returned non-finite value {v}")
    return v


def grad_check(
    f: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    h: float = 1e-5,
    return_details: bool = False,
):
    """Max elementwise relative error between reverse-mode and central differences.

    Relative error uses ``max(|a|, |b|, 1e-8)`` as the denominator. ``inputs``
    are mutated in place during probing and restored afterwards.
    """
    inputs = [x if isinstance(x, Tensor) else Tensor(x) for x in inputs]
    for x in inputs:
        x.requires_grad = True
        x.grad = None
    out = f(*inputs)
    if not np.isfinite(out.data).all():
        raise EvaluationError("function returned a non-finite value")
    out.backward()
    worst = 0.0
    details = []
    for x in inputs:
        analytic = np.zeros(x.shape) if x.grad is None else x.grad
        flat = x.data.reshape(-1)
        a_flat = analytic.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            fp = _eval(f, inputs)
            flat[i] = orig - h
            fm = _eval(f, inputs)
            flat[i] = orig
            num = (fp - fm) / (2.0 * h)
            a = a_flat[i]
            err = abs(a - num) / max(abs(a), abs(num), 1e-8)
            worst = max(worst, err)
            if return_details:
                details.append((a, num, err))
    if return_details:
        return worst, details
    return worst
