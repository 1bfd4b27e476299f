from .functional import causal_dilated_conv1d, gelu, l2_normalize, linear
from .gradcheck import grad_check
from .optim import OptimState, cosine_lr, sgd_step
from .tensor import (
    Tensor,
    as_tensor,
    clamp_min,
    concat,
    exp,
    getitem,
    is_grad_enabled,
    log,
    logsumexp,
    matmul,
    mean,
    moveaxis,
    no_grad,
    pad_front,
    reshape,
    sqrt,
    swapaxes,
    tsum,
)

__all__ = [
    "OptimState",
    "Tensor",
    "as_tensor",
    "causal_dilated_conv1d",
    "clamp_min",
    "concat",
    "cosine_lr",
    "exp",
    "gelu",
    "getitem",
    "grad_check",
    "is_grad_enabled",
    "l2_normalize",
    "linear",
    "log",
    "logsumexp",
    "matmul",
    "mean",
    "moveaxis",
    "no_grad",
    "pad_front",
    "reshape",
    "sgd_step",
    "sqrt",
    "swapaxes",
    "tsum",
]
