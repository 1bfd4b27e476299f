import numpy as np
import pytest

from seasontrend.augmentation import AugmentConfig, augment, augment_batch
from seasontrend.errors import ConfigError


class ScriptedRng:
    """Feeds fixed coin flips and normal draws so each augmentation path can be forced."""

    def __init__(self, coins, normals=()):
        self.coins = list(coins)
        self.normals = list(normals)

    def random(self):
        return self.coins.pop(0)

    def normal(self, loc, scale, size=None):
        if size is None:
            return loc + scale * self.normals.pop(0)
        return loc + scale * np.asarray(self.normals.pop(0)).reshape(size)


def test_all_off_returns_input_unchanged():
    x = np.arange(6.0).reshape(3, 2)
    out = augment(x, AugmentConfig(), ScriptedRng([0.9, 0.9, 0.9]))
    assert out is x


def test_forced_scale_only():
    x = np.arange(6.0).reshape(3, 2)
    out = augment(x, AugmentConfig(), ScriptedRng([0.1, 0.9, 0.9], [1.4]))
    np.testing.assert_array_equal(out, 0.7 * x)  # eps = 0.5 * 1.4


def test_order_is_scale_shift_jitter():
    x = np.ones((2, 1))
    noise = np.array([0.2, -0.4])
    out = augment(x, AugmentConfig(), ScriptedRng([0.0, 0.0, 0.0], [2.0, 1.0, noise]))
    np.testing.assert_allclose(out, (1.0 * x + 0.5) + 0.5 * noise.reshape(2, 1))


def test_scale_uses_one_scalar(rng):
    x = rng.standard_normal((8, 3))
    cfg = AugmentConfig(sigma_shift=0.0, sigma_jitter=0.0, p_apply=1.0)
    out = augment(x, cfg, np.random.default_rng(5))
    ratio = out / x
    assert np.allclose(ratio, ratio[0, 0])


def test_seeded_replay(rng):
    x = rng.standard_normal((10, 2))
    a = augment_batch(np.stack([x, x]), AugmentConfig(), np.random.default_rng(9))
    b = augment_batch(np.stack([x, x]), AugmentConfig(), np.random.default_rng(9))
    assert np.array_equal(a, b) and a.shape == (2, 10, 2)


def test_p_apply_zero_is_identity(rng):
    x = rng.standard_normal((5, 2))
    for seed in range(5):
        assert np.array_equal(augment(x, AugmentConfig(p_apply=0.0), np.random.default_rng(seed)), x)


def test_jitter_statistics():
    # zero input, shift disabled, every coin forced on: output is the jitter noise alone
    cfg = AugmentConfig(sigma_shift=0.0, p_apply=1.0)
    out = augment_batch(np.zeros((100_000, 2, 1)), cfg, np.random.default_rng(0))
    n, sigma = 100_000, 0.5
    assert np.all(np.abs(out.mean(axis=0)) <= 4 * sigma / np.sqrt(n))
    assert np.all(np.abs(out.std(axis=0) / sigma - 1) <= 0.02)


def test_config_validation():
    with pytest.raises(ConfigError):
        AugmentConfig(sigma_jitter=-1.0)
    with pytest.raises(ConfigError):
        AugmentConfig(p_apply=1.5)
