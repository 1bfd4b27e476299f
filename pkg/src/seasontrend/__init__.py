"""Contrastive seasonal-trend representation learning for time series forecasting.

Numerical kernels run through numba by default; set ``SEASONTREND_BACKEND=numpy``
before import to use the pure-numpy fallback.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .augmentation import AugmentConfig, augment, augment_batch
from .contrastive import MoCoState, frequency_loss, infonce, momentum_update, step_losses, total_loss
from .dataset import Series, gen_synthetic_corpus, load_csv, normalize, split, window_array
from .downstream import ALPHA_GRID, ForecastModel, evaluate, extract_features, predict, ridge_fit, select_alpha
from .encoder import EncoderConfig, EncoderParams, encode, init_params
from .errors import *  # noqa: F401,F403
from .probe import linear_probe
from .spectral import ComplexTensor, irdft, rdft
from .trainer import TrainConfig, train

__all__ = [
    "ALPHA_GRID",
    "AugmentConfig",
    "BACKEND",
    "ComplexTensor",
    "EncoderConfig",
    "EncoderParams",
    "ForecastModel",
    "MoCoState",
    "Series",
    "TrainConfig",
    "augment",
    "augment_batch",
    "encode",
    "evaluate",
    "extract_features",
    "frequency_loss",
    "gen_synthetic_corpus",
    "infonce",
    "init_params",
    "irdft",
    "linear_probe",
    "load_csv",
    "momentum_update",
    "normalize",
    "predict",
    "rdft",
    "ridge_fit",
    "select_alpha",
    "split",
    "step_losses",
    "total_loss",
    "train",
    "window_array",
]
