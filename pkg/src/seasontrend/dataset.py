"""Series container, CSV ingestion, normalization, splitting, windowing and synthetic generators."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from scipy.special import expit

from . import _kernels
from .errors import ConfigError, InsufficientDataError, ParseError, SimulationDivergenceError

# -- series ------------------------------------------------------------------


@dataclass
class Series:
    values: np.ndarray  # (T, m)
    channel_names: list[str] = field(default_factory=list)
    target_channel: int = 0
    train_frac: float = 0.6
    val_frac: float = 0.2
    test_frac: float = 0.2
    norm_means: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise ConfigError(f"series values must be (T, m), got shape {v.shape}")
        self.values = v
        if not self.channel_names:
            self.channel_names = [f"ch{i}" for i in range(v.shape[1])]
        if len(self.channel_names) != v.shape[1]:
            raise ConfigError(f"{len(self.channel_names)} channel names for {v.shape[1]} channels")
        if abs(self.train_frac + self.val_frac + self.test_frac - 1.0) > 1e-9:
            raise ConfigError("split fractions must sum to 1")

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def split_bounds(self) -> tuple[int, int]:
        """End indices (exclusive) of the train and validation segments."""
        n_train = int(self.T * self.train_frac)
        n_val = int(self.T * self.val_frac)
        return n_train, n_train + n_val


def normalize(s: Series) -> Series:
    """Subtract per-channel means of the training segment (no variance scaling)."""
    n_train, _ = s.split_bounds()
    if n_train < 1:
        raise InsufficientDataError(f"series of length {s.T} has an empty training split")
    means = s.values[:n_train].mean(axis=0)
    return replace(s, values=s.values - means, norm_means=means)


def denormalize(s: Series) -> Series:
    if s.norm_means is None:
        return s
    return replace(s, values=s.values + s.norm_means, norm_means=None)


def split(s: Series) -> tuple[Series, Series, Series]:
    """Contiguous train / validation / test segments."""
    a, b = s.split_bounds()
    return tuple(replace(s, values=s.values[lo:hi], meta={**s.meta, "split": name}) for name, lo, hi in (("train", 0, a), ("val", a, b), ("test", b, s.T)))


def num_windows(length: int, h: int, k: int, stride: int = 1) -> int:
    if length < h + k:
        return 0
    return (length - h - k) // stride + 1


def windows(s: Series | np.ndarray, h: int, k: int, stride: int = 1) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(input (h, m), target (k, m))`` pairs with the target right after the input."""
    values = s.values if isinstance(s, Series) else np.asarray(s, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if h < 1 or k < 0 or stride < 1:
        raise ConfigError(f"invalid window geometry h={h}, k={k}, stride={stride}")
    if values.shape[0] < h + k:
        raise InsufficientDataError(f"segment of length {values.shape[0]} is shorter than h + k = {h + k}")
    for start in range(0, values.shape[0] - h - k + 1, stride):
        yield values[start : start + h], values[start + h : start + h + k]


def window_array(values: np.ndarray, h: int, k: int, stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """All windows stacked: ``(n, h, m)`` inputs and ``(n, k, m)`` targets."""
    pairs = list(windows(values, h, k, stride))
    m = pairs[0][0].shape[1]
    return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs]).reshape(len(pairs), k, m)


# -- CSV ------------------------------------------------------------------------


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path: str | Path, target: str | int | None = None) -> Series:
    """Read a header + numeric columns CSV; a non-numeric first column is taken as timestamps."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    if not body:
        raise ParseError(f"{path}: no data rows")
    skip = 0 if _is_number(body[0][0]) else 1
    names = header[skip:]
    if not names:
        raise ParseError(f"{path}: no value columns")
    values = np.empty((len(body), len(names)))
    for i, row in enumerate(body):
        lineno = i + 2
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        for j, cell in enumerate(row[skip:]):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric value {cell!r} in column {names[j]!r}") from None
    if target is None:
        tgt = len(names) - 1
    elif isinstance(target, int):
        tgt = target
    else:
        if target not in names:
            raise ConfigError(f"target column {target!r} not in {names}")
        tgt = names.index(target)
    return Series(values, channel_names=list(names), target_channel=tgt, meta={"source": str(path)})


# -- synthetic generators ----------------------------------------------------

LOGISTIC_BETA0 = 0.2
LOGISTIC_BETA1 = 60.0
LOGISTIC_NOISE_STD = 0.3

# (AR coefficients, MA coefficients) of the three summed components
ARMA_COMPONENTS = (
    ((0.9, -0.1), (0.2, -0.5)),
    ((0.1, 0.2, 0.3), (0.1, 0.65, -0.45)),
    ((0.3, 0.5, -0.5, -0.3), (0.1, 0.1, -0.2, -0.3)),
)
ARMA_BURN_IN = 200

# period, phase (radians), amplitude
SEASONAL_SPECS = {
    "s20": (20.0, 0.0, 3.0),
    "s50": (50.0, 0.2, 3.0),
    "s100": (100.0, 0.5, 3.0),
}
MASKED_SPECS = {
    "masked3of10": ((3.0, 0.0, 10.0), (1, 1, 1, 0, 0, 0, 0, 0, 0, 0)),
    "masked2of10": ((10.0, 0.5, 15.0), (1, 1, 0, 0, 0, 0, 0, 0, 0, 0)),
}
TREND_IDS = ("logistic", "arma_mix")
SEASON_IDS = ("s20", "s50", "s100", "none", "masked3of10", "masked2of10")
DEFAULT_SEASONS = ("s20", "s50", "s100")
COMPLEX_SEASONS = ("none", "masked3of10", "masked2of10")


def logistic_curve(T: int) -> np.ndarray:
    t = np.arange(T, dtype=np.float64)
    return expit(-LOGISTIC_BETA0 * (t - LOGISTIC_BETA1))  # 1 / (1 + exp(b0 (t - b1))) without overflow


def gen_trend_logistic(T: int, seed: int | None = 0, noise: bool = True) -> np.ndarray:
    """Saturating logistic decay plus Gaussian noise (std 0.3)."""
    y = logistic_curve(T)
    if noise:
        y = y + np.random.default_rng(seed).normal(0.0, LOGISTIC_NOISE_STD, size=T)
    return y


def simulate_arma(ar: Sequence[float], ma: Sequence[float], innovations: np.ndarray, limit: float = 1e6) -> np.ndarray:
    """``x_t = sum_i ar_i x_{t-i} + e_t + sum_j ma_j e_{t-j}`` from a zero initial state."""
    x = _kernels.arma_filter(np.asarray(ar, dtype=np.float64), np.asarray(ma, dtype=np.float64), innovations)
    bad = np.flatnonzero(~(np.abs(x) <= limit))
    if bad.size:
        raise SimulationDivergenceError(f"ARMA trajectory reached {x[bad[0]]} at step {bad[0]}")
    return x


def gen_trend_arma(T: int, seed: int | None = 0, innovation_std: float = 1.0, burn_in: int = ARMA_BURN_IN) -> np.ndarray:
    """Sum of three independent ARMA simulations after discarding a burn-in."""
    rng = np.random.default_rng(seed)
    total = np.zeros(T)
    for ar, ma in ARMA_COMPONENTS:
        e = rng.normal(0.0, 1.0, size=T + burn_in) * innovation_std
        total += simulate_arma(ar, ma, e)[burn_in:]
    return total


def gen_seasonal(period: float, phase: float, amplitude: float, T: int) -> np.ndarray:
    if period <= 0:
        raise ConfigError(f"period must be > 0, got {period}")
    t = np.arange(T, dtype=np.float64)
    return amplitude * np.sin(2.0 * math.pi * t / period + phase)


def gen_masked_seasonal(variant: str, T: int) -> np.ndarray:
    """Sine multiplied by a repeating binary mask starting at t = 0."""
    if variant not in MASKED_SPECS:
        raise ConfigError(f"unknown masked seasonal variant {variant!r}")
    (period, ph, amp), mask = MASKED_SPECS[variant]
    return gen_seasonal(period, ph, amp, T) * np.resize(np.array(mask, dtype=np.float64), T)


def seasonal_component(season_id: str, T: int) -> np.ndarray:
    if season_id == "none":
        return np.zeros(T)
    if season_id in SEASONAL_SPECS:
        return gen_seasonal(*SEASONAL_SPECS[season_id], T)
    if season_id in MASKED_SPECS:
        return gen_masked_seasonal(season_id, T)
    raise ConfigError(f"unknown season_id {season_id!r}")


@dataclass(frozen=True)
class SynthSpec:
    trend_id: str
    season_id: str
    length: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.trend_id not in TREND_IDS:
            raise ConfigError(f"unknown trend_id {self.trend_id!r}")
        if self.season_id not in SEASON_IDS:
            raise ConfigError(f"unknown season_id {self.season_id!r}")


def trend_component(trend_id: str, T: int, seed: int | None) -> np.ndarray:
    if trend_id == "logistic":
        return gen_trend_logistic(T, seed)
    if trend_id == "arma_mix":
        return gen_trend_arma(T, seed)
    raise ConfigError(f"unknown trend_id {trend_id!r}")


def _trend_seed(seed: int, trend_id: str) -> int:
    return int(np.random.SeedSequence([seed, TREND_IDS.index(trend_id)]).generate_state(1)[0])


def generate(spec: SynthSpec) -> Series:
    g = trend_component(spec.trend_id, spec.length, _trend_seed(spec.seed, spec.trend_id))
    s = seasonal_component(spec.season_id, spec.length)
    return Series(
        g + s,
        channel_names=["value"],
        meta={"trend_id": spec.trend_id, "season_id": spec.season_id, "seed": spec.seed},
    )


def gen_synthetic_corpus(seed: int = 0, complex_seasonality: bool = False, length: int = 1000) -> list[Series]:
    """Every (trend, season) pair; each trend realization is shared by its seasonal variants."""
    seasons = COMPLEX_SEASONS if complex_seasonality else DEFAULT_SEASONS
    return [generate(SynthSpec(t, s, length, seed)) for t in TREND_IDS for s in seasons]


def write_synthetic_csv(series: Series, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "value", "trend_id", "season_id"])
        for t, v in enumerate(series.values[:, 0]):
            w.writerow([t, repr(float(v)), series.meta["trend_id"], series.meta["season_id"]])


def read_synthetic_csv(path: str | Path) -> Series:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t", "value", "trend_id", "season_id"]:
        raise ParseError(f"{path}: expected header t,value,trend_id,season_id")
    vals = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise ParseError(f"{path}:{i}: expected 4 fields, got {len(row)}")
        try:
            vals.append(float(row[1]))
        except ValueError:
            raise ParseError(f"{path}:{i}: non-numeric value {row[1]!r}") from None
    if not vals:
        raise ParseError(f"{path}: no data rows")
    return Series(np.array(vals), channel_names=["value"], meta={"trend_id": rows[1][2], "season_id": rows[1][3], "source": str(path)})
