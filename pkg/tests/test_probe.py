import numpy as np
import pytest

from seasontrend.errors import ConfigError
from seasontrend.probe import linear_probe, stratified_halves


def test_separable_clusters_score_one(rng):
    centers = np.eye(6) * 10
    X = np.repeat(centers, 20, axis=0) + 0.1 * rng.standard_normal((120, 6))
    y = np.repeat(np.arange(6), 20)
    assert linear_probe(X, y, seed=0) == 1.0


def test_noise_scores_near_chance(rng):
    X = rng.standard_normal((3000, 4))
    y = np.repeat(np.arange(6), 500)
    assert abs(linear_probe(X, y, seed=1) - 1 / 6) < 0.05


def test_stratified_halves_balance():
    labels = np.array([0] * 7 + [1] * 4)
    a, b = stratified_halves(labels, np.random.default_rng(0))
    assert sorted(np.r_[a, b]) == list(range(11))
    assert (labels[a] == 0).sum() == 4 and (labels[b] == 0).sum() == 3
    assert (labels[a] == 1).sum() == 2


def test_seeded(rng):
    X, y = rng.standard_normal((60, 3)), np.repeat([0, 1, 2], 20)
    assert linear_probe(X, y, seed=4) == linear_probe(X, y, seed=4)


def test_scale_invariance(rng):
    X, y = rng.standard_normal((60, 3)), np.repeat([0, 1, 2], 20)
    assert linear_probe(X, y, 2) == linear_probe(X * np.array([1e4, 1e-4, 3.0]), y, 2)


def test_probe_validation(rng):
    with pytest.raises(ConfigError):
        linear_probe(rng.standard_normal((4, 2)), np.zeros(4))
    with pytest.raises(ConfigError):
        linear_probe(rng.standard_normal((4, 2)), np.array([0, 0, 0, 1]))
    with pytest.raises(ConfigError):
        linear_probe(rng.standard_normal((4, 2)), np.array([0, 1]))
