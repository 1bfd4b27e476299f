"""Ridge regression on frozen final-timestamp representations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .autodiff import no_grad
from .dataset import num_windows, window_array
from .encoder import EncoderParams, encode
from .errors import DimensionError, InsufficientDataError, SolverError

ALPHA_GRID = (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0)


@dataclass
class ForecastModel:
    weights: np.ndarray  # (d + 1, k * m); last row is the bias
    chosen_alpha: float
    horizon: int
    feature_dim: int
    val_mse: float = float("nan")
    val_scores: dict = field(default_factory=dict)


def encode_final(windows: np.ndarray, params: EncoderParams, chunk: int = 256) -> np.ndarray:
    """Final-timestamp representation ``V[h - 1]`` for each window in (n, h, m)."""
    out = []
    with no_grad():
        for i in range(0, len(windows), chunk):
            out.append(encode(windows[i : i + chunk], params).V.data[:, -1, :])
    return np.concatenate(out, axis=0) if out else np.zeros((0, params.config.d))


def extract_features(values: np.ndarray, params: EncoderParams, h: int, k: int, stride: int = 1, name: str = "split"):
    """Features ``X`` (n, d) and flattened time-major targets ``Y`` (n, k * m) for one split."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if num_windows(values.shape[0], h, k, stride) < 1:
        raise InsufficientDataError(f"{name} has {values.shape[0]} steps, needs at least h + k = {h + k}")
    xw, yw = window_array(values, h, k, stride)
    return encode_final(xw, params), yw.reshape(len(yw), -1)


def raw_lag_features(values: np.ndarray, h: int, k: int, stride: int = 1):
    """The same windows as ``extract_features`` with the raw lagged inputs as features."""
    xw, yw = window_array(np.asarray(values, dtype=np.float64).reshape(len(values), -1), h, k, stride)
    return xw.reshape(len(xw), -1), yw.reshape(len(yw), -1)


def _with_bias(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def ridge_fit(X: np.ndarray, Y: np.ndarray, alpha: float) -> np.ndarray:
    """``(X~'X~ + alpha * I')^{-1} X~'Y`` with an unpenalized bias row appended last."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.ndim != 2 or X.shape[0] != Y.shape[0] or X.shape[0] < 1:
        raise DimensionError(f"ridge_fit needs X (n, d) and Y (n, q) with n >= 1, got {X.shape} and {Y.shape}")
    if alpha < 0:
        raise SolverError(f"alpha must be >= 0, got {alpha}")
    Xt = _with_bias(X)
    gram = Xt.T @ Xt
    d = X.shape[1]
    gram[np.arange(d), np.arange(d)] += alpha
    try:
        factor = cho_factor(gram, lower=True)
    except LinAlgError:
        raise SolverError(f"normal equations are singular at alpha={alpha}; use alpha > 0") from None
    W = cho_solve(factor, Xt.T @ Y)
    if not np.all(np.isfinite(W)):
        raise SolverError(f"non-finite ridge solution at alpha={alpha}; use alpha > 0")
    return W


def ridge_objective(X: np.ndarray, Y: np.ndarray, W: np.ndarray, alpha: float) -> float:
    resid = _with_bias(X) @ W - Y
    return float(np.sum(resid**2) + alpha * np.sum(W[:-1] ** 2))


def predict(model: ForecastModel | np.ndarray, X: np.ndarray) -> np.ndarray:
    W = model.weights if isinstance(model, ForecastModel) else np.asarray(model)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] + 1 != W.shape[0]:
        raise DimensionError(f"features {X.shape} do not match weights {W.shape}")
    return _with_bias(X) @ W


def evaluate(Y_hat: np.ndarray, Y: np.ndarray) -> tuple[float, float]:
    """(MSE, MAE) over every entry."""
    Y_hat, Y = np.asarray(Y_hat, dtype=np.float64), np.asarray(Y, dtype=np.float64)
    if Y_hat.shape != Y.shape:
        raise DimensionError(f"prediction {Y_hat.shape} and target {Y.shape} differ")
    err = Y_hat - Y
    return float(np.mean(err**2)), float(np.mean(np.abs(err)))


def select_alpha(X_train, Y_train, X_val, Y_val, grid=ALPHA_GRID, horizon: int | None = None) -> ForecastModel:
    """Pick the grid value with the lowest validation MSE (ties go to the smaller alpha)."""
    if len(X_val) == 0:
        raise InsufficientDataError("validation set is empty")
    scores = {}
    best = None
    for a in sorted(grid):
        W = ridge_fit(X_train, Y_train, a)
        mse, _ = evaluate(predict(W, X_val), Y_val)
        scores[a] = mse
        if best is None or mse < scores[best]:
            best = a
    W = ridge_fit(X_train, Y_train, best)
    Y_train = np.asarray(Y_train)
    out_dim = 1 if Y_train.ndim == 1 else Y_train.shape[1]
    return ForecastModel(
        weights=W,
        chosen_alpha=best,
        horizon=out_dim if horizon is None else horizon,
        feature_dim=np.asarray(X_train).shape[1],
        val_mse=scores[best],
        val_scores=scores,
    )
