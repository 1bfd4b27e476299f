"""Linear-probe clusterability score for frozen representations."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError


def stratified_halves(labels: np.ndarray, rng) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays splitting every class in half (odd counts put the extra item in the first half)."""
    first, second = [], []
    for c in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == c))
        cut = (len(idx) + 1) // 2
        first.append(idx[:cut])
        second.append(idx[cut:])
    return np.concatenate(first), np.concatenate(second)


def linear_probe(representations: np.ndarray, labels: np.ndarray, seed: int = 0) -> float:
    """Held-out accuracy of a one-vs-rest least-squares classifier on a 50/50 stratified split."""
    X = np.asarray(representations, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2 or len(X) != len(y):
        raise ConfigError(f"representations {X.shape} and labels {y.shape} do not align")
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise ConfigError("linear probe needs at least two classes")
    if counts.min() < 2:
        raise ConfigError("every class needs at least two samples")
    rng = np.random.default_rng(seed)
    tr, te = stratified_halves(y, rng)
    # standardize with training statistics so the tiny ridge term is scale-free
    mu = X[tr].mean(axis=0)
    sd = X[tr].std(axis=0)
    sd[sd == 0] = 1.0
    Z = (X - mu) / sd
    Zt = np.hstack([Z, np.ones((len(Z), 1))])
    targets = (y[:, None] == classes[None, :]).astype(np.float64)
    A = Zt[tr]
    W = np.linalg.solve(A.T @ A + 1e-6 * np.eye(A.shape[1]), A.T @ targets[tr])
    pred = classes[np.argmax(Zt[te] @ W, axis=1)]
    return float(np.mean(pred == y[te]))
