import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erf

from seasontrend.autodiff import (
    OptimState,
    Tensor,
    causal_dilated_conv1d,
    concat,
    cosine_lr,
    gelu,
    grad_check,
    l2_normalize,
    linear,
    logsumexp,
    no_grad,
    pad_front,
    sgd_step,
    sqrt,
    tsum,
)
from seasontrend.errors import DimensionError, EvaluationError, ScheduleExhaustedError


def T(a):
    return Tensor(np.array(a, dtype=float), requires_grad=True)


# -- linear ----------------------------------------------------------------------


def test_linear_identity():
    out = linear(T([1.0, 2.0]), T(np.eye(2)), T([0.0, 0.0]))
    np.testing.assert_array_equal(out.data, [1.0, 2.0])


def test_linear_hand_case():
    out = linear(T([1.0, 0.0]), T([[2.0], [3.0]]), T([1.0]))
    np.testing.assert_array_equal(out.data, [3.0])


def test_linear_weight_gradient_matches_fd(rng):
    x, w, b = T(rng.standard_normal((5, 3))), T(rng.standard_normal((3, 4))), T(rng.standard_normal(4))
    assert grad_check(lambda x, w, b: tsum(linear(x, w, b)), [x, w, b]) < 1e-6


def test_linear_shape_mismatch_names_both_shapes():
    with pytest.raises(DimensionError, match=r"\(3,\).*\(2, 2\)"):
        linear(T([1.0, 2.0, 3.0]), T(np.eye(2)))


# -- gelu ------------------------------------------------------------------------


def test_gelu_values():
    x = np.array([0.0, -10.0, 1.3, -0.7])
    out = gelu(T(x)).data
    assert out[0] == 0.0
    assert abs(out[1]) < 1e-6
    np.testing.assert_allclose(out, x * 0.5 * (1 + erf(x / math.sqrt(2))), rtol=1e-14, atol=1e-300)


@pytest.mark.parametrize("x0", [-2.0, -0.5, 0.3, 4.0])
def test_gelu_gradient(x0):
    assert grad_check(lambda x: tsum(gelu(x)), [T([x0])]) < 1e-6


# -- causal conv -----------------------------------------------------------------


def test_conv_identity_kernel(rng):
    x = rng.standard_normal((9, 1))
    out = causal_dilated_conv1d(T(x), T([[[1.0]]]), 1)
    np.testing.assert_array_equal(out.data, x)


def test_conv_pairwise_sums():
    out = causal_dilated_conv1d(T([[1.0], [2.0], [3.0], [4.0]]), T([[[1.0]], [[1.0]]]), 1)
    np.testing.assert_array_equal(out.data[:, 0], [1.0, 3.0, 5.0, 7.0])


def test_conv_tap_order():
    # tap 0 multiplies the oldest sample
    out = causal_dilated_conv1d(T([[1.0], [10.0], [100.0]]), T([[[2.0]], [[1.0]]]), 1)
    np.testing.assert_array_equal(out.data[:, 0], [1.0, 12.0, 120.0])


@pytest.mark.parametrize("dilation", [1, 2, 4])
def test_conv_causality(rng, dilation):
    x = rng.standard_normal((16, 3))
    k = T(rng.standard_normal((3, 3, 2)))
    base = causal_dilated_conv1d(T(x), k, dilation).data
    for t in rng.integers(0, 16, size=5):
        xp = x.copy()
        xp[t] += rng.standard_normal(3)
        diff = causal_dilated_conv1d(T(xp), k, dilation).data - base
        assert np.all(diff[:t] == 0.0)


@pytest.mark.parametrize("dilation", [1, 3])
def test_conv_gradients(rng, dilation):
    x = T(rng.standard_normal((2, 10, 3)))
    k = T(rng.standard_normal((3, 3, 2)))
    assert grad_check(lambda x, k: tsum(causal_dilated_conv1d(x, k, dilation) ** 2), [x, k]) < 1e-6


def test_conv_matches_direct_sum(rng):
    x = rng.standard_normal((12, 2))
    w = rng.standard_normal((3, 2, 4))
    d = 2
    out = causal_dilated_conv1d(T(x), T(w), d).data
    ref = np.zeros((12, 4))
    for t in range(12):
        for j in range(3):
            src = t - (2 - j) * d
            if src >= 0:
                ref[t] += x[src] @ w[j]
    np.testing.assert_allclose(out, ref, atol=1e-13)


def test_conv_channel_mismatch():
    with pytest.raises(DimensionError):
        causal_dilated_conv1d(T(np.zeros((4, 2))), T(np.zeros((2, 3, 1))), 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 20), st.integers(1, 4), st.integers(1, 5))
def test_conv_keeps_length(length, ksize, dilation):
    x = np.ones((length, 2))
    assert causal_dilated_conv1d(T(x), T(np.ones((ksize, 2, 3))), dilation).shape == (length, 3)


# -- other ops -------------------------------------------------------------------


@pytest.mark.parametrize(
    "fn",
    [
        lambda a, b: tsum(a * b + a / (b * b + 1.0)),
        lambda a, b: tsum((a @ b.swapaxes(0, 1)).exp()),
        lambda a, b: tsum(logsumexp(a, axis=1) * 3.0) - tsum(b[1:, ::2]),
        lambda a, b: tsum(concat([a, b], axis=0) ** 3),
        lambda a, b: tsum(pad_front(a, 2, axis=0) * pad_front(b, 2, axis=0)),
        lambda a, b: tsum(l2_normalize(a) * b),
        lambda a, b: tsum((a * a + 1.0).log() + sqrt(b * b + 0.5)),
        lambda a, b: tsum(a[np.array([0, 0, 2])] * b[np.array([1, 2, 2])]),
        lambda a, b: (a - b).mean() + tsum(-a.reshape(12)),
    ],
)
def test_op_gradients(rng, fn):
    a, b = T(rng.standard_normal((3, 4))), T(rng.standard_normal((3, 4)))
    assert grad_check(fn, [a, b]) < 1e-6


def test_broadcast_gradient(rng):
    a, b = T(rng.standard_normal((3, 4))), T(rng.standard_normal(4))
    assert grad_check(lambda a, b: tsum((a + b) * (a - b) * b), [a, b]) < 1e-6


def test_sqrt_zero_has_zero_subgradient():
    x = T([0.0, 4.0])
    tsum(sqrt(x)).backward()
    assert x.grad[0] == 0.0 and x.grad[1] == 0.25


def test_l2_normalize_zero_vector_is_finite():
    x = T(np.zeros((2, 3)))
    out = l2_normalize(x)
    tsum(out).backward()
    assert np.all(out.data == 0) and np.all(np.isfinite(x.grad))


def test_backward_accumulates_on_shared_leaf():
    x = T([2.0])
    (x * x + x).sum().backward()
    assert x.grad[0] == 5.0


def test_no_grad_records_nothing():
    x = T([1.0])
    with no_grad():
        y = x * 2.0
    assert not y.requires_grad and y._parents == ()


def test_deep_chain_does_not_recurse():
    x = T([1.0])
    y = x
    for _ in range(5000):
        y = y + 0.0
    y.sum().backward()
    assert x.grad[0] == 1.0


# -- grad_check ------------------------------------------------------------------


def test_grad_check_quadratic():
    a, num, _ = grad_check(lambda x: tsum(x * x), [T([3.0])], return_details=True)[1][0]
    assert a == 6.0 and abs(num - 6.0) < 1e-8


def test_grad_check_constant_function():
    assert grad_check(lambda x: tsum(x * 0.0) + 1.0, [T([1.0, 2.0])]) == 0.0


@pytest.mark.filterwarnings("ignore:invalid value encountered in log:RuntimeWarning")
def test_grad_check_rejects_non_finite():
    with pytest.raises(EvaluationError):
        grad_check(lambda x: tsum(x.log()), [T([-1.0])])


def test_grad_check_catches_wrong_gradient():
    def bad(x):
        return Tensor._node(np.sum(x.data**2), (x,), lambda g: (g * x.data,), "bad")  # should be 2x

    assert grad_check(bad, [T([1.0, 2.0])]) > 0.4


# -- optimizer -------------------------------------------------------------------


def test_cosine_schedule_endpoints():
    assert cosine_lr(0.1, 0, 100) == 0.1
    assert cosine_lr(0.1, 50, 100) == pytest.approx(0.05, abs=1e-15)
    assert cosine_lr(0.1, 99, 100) == pytest.approx(0.1 * 0.5 * (1 + math.cos(math.pi * 99 / 100)))
    lrs = [cosine_lr(1e-3, s, 200) for s in range(200)]
    assert all(b <= a for a, b in zip(lrs, lrs[1:]))


def test_sgd_hand_arithmetic():
    p = T([1.0])
    st_ = OptimState.create([p], base_lr=0.1, momentum=0.0, weight_decay=0.0, total_steps=10)
    sgd_step([p], [np.array([2.0])], st_)
    assert p.data[0] == pytest.approx(0.8, abs=1e-15)
    assert st_.step == 1


def test_sgd_momentum_and_decay_trace():
    p = T([1.0])
    st_ = OptimState.create([p], base_lr=0.5, momentum=0.9, weight_decay=0.1, total_steps=2)
    sgd_step([p], [np.array([1.0])], st_)
    v1 = 1.0 + 0.1 * 1.0
    p1 = 1.0 - 0.5 * v1
    assert p.data[0] == pytest.approx(p1, abs=1e-15)
    sgd_step([p], [np.array([1.0])], st_)
    v2 = 0.9 * v1 + 1.0 + 0.1 * p1
    assert p.data[0] == pytest.approx(p1 - cosine_lr(0.5, 1, 2) * v2, abs=1e-15)


def test_sgd_zero_gradient_is_bitwise_noop(rng):
    p = T(rng.standard_normal(5))
    before = p.data.copy()
    st_ = OptimState.create([p], base_lr=0.1, momentum=0.9, weight_decay=0.0, total_steps=3)
    sgd_step([p], [np.zeros(5)], st_)
    assert np.array_equal(p.data, before)


def test_sgd_schedule_exhausted():
    p = T([1.0])
    st_ = OptimState.create([p], total_steps=1)
    sgd_step([p], [np.zeros(1)], st_)
    with pytest.raises(ScheduleExhaustedError):
        sgd_step([p], [np.zeros(1)], st_)
