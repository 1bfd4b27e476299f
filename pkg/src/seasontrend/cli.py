"""Command-line entry point: ``synth``, ``train``, ``encode`` and ``eval``.

Every command reads one JSON config (``--config``; all keys optional) and an
optional ``--seed`` that overrides the config's seed. Exit codes: 0 success,
2 configuration / input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .checkpoint import load_encoder, save_encoder, save_forecast_model
from .dataset import (
    Series,
    gen_synthetic_corpus,
    load_csv,
    normalize,
    read_synthetic_csv,
    split,
    window_array,
    write_synthetic_csv,
)
from .downstream import encode_final, evaluate, extract_features, predict, select_alpha
from .encoder import EncoderConfig, init_params
from .errors import ConfigError, NumericalError, SeasonTrendError
from .trainer import TrainConfig, train

log = logging.getLogger("seasontrend")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
METRICS_SCHEMA = "seasontrend.metrics/1"
SYNTH_HEADER = ["t", "value", "trend_id", "season_id"]


# -- config helpers ------------------------------------------------------------


def _read_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    try:
        cfg = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}: invalid JSON ({e})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{p}: top level must be a JSON object")
    return cfg


def _build(cls, section: dict | None, what: str, **overrides):
    section = dict(section or {})
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(section) - known)
    if unknown:
        raise ConfigError(f"unknown {what} keys: {', '.join(unknown)}")
    section.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return cls.from_dict(section) if hasattr(cls, "from_dict") else cls(**section)
    except TypeError as e:
        raise ConfigError(f"bad {what} section: {e}") from None


def _out_dir(cfg: dict, override: str | None, default: str) -> Path:
    out = Path(override or cfg.get("out_dir", default))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _seed(cfg: dict, flag: int | None) -> int:
    seed = flag if flag is not None else cfg.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    return seed


def _load_one(path: Path, target) -> Series:
    if not path.exists():
        raise ConfigError(f"data file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    return read_synthetic_csv(path) if header == SYNTH_HEADER else load_csv(path, target)


def load_data(cfg: dict, seed: int) -> list[Series]:
    """Resolve ``data`` (CSV path, list of paths, or a synth manifest) or fall back to ``synth``."""
    data = cfg.get("data")
    target = cfg.get("target")
    if data is None:
        synth = cfg.get("synth", {})
        return gen_synthetic_corpus(seed, bool(synth.get("complex", False)), int(synth.get("length", 1000)))
    paths = [data] if isinstance(data, str) else list(data)
    out = []
    for p in map(Path, paths):
        if p.suffix == ".json":
            manifest = _read_config(str(p))
            out.extend(_load_one(p.parent / f, target) for f in manifest.get("files", []))
        else:
            out.append(_load_one(p, target))
    if not out:
        raise ConfigError("data section resolves to no series")
    return out


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- commands ------------------------------------------------------------------


def cmd_synth(cfg: dict, seed: int, out: str | None = None) -> Path:
    out_dir = _out_dir(cfg, out, "synth")
    complex_ = bool(cfg.get("complex", False))
    length = int(cfg.get("length", 1000))
    corpus = gen_synthetic_corpus(seed, complex_, length)
    files = []
    for s in corpus:
        name = f"{s.meta['trend_id']}_{s.meta['season_id']}.csv"
        write_synthetic_csv(s, out_dir / name)
        files.append(name)
    manifest = {"seed": seed, "complex": complex_, "length": length, "files": files,
                "series": [{"trend_id": s.meta["trend_id"], "season_id": s.meta["season_id"]} for s in corpus]}
    _dump_json(out_dir / "manifest.json", manifest)
    log.info("wrote %d series to %s", len(files), out_dir)
    return out_dir


def cmd_train(cfg: dict, seed: int, out: str | None = None) -> Path:
    out_dir = _out_dir(cfg, out, "run")
    series = load_data(cfg, seed)
    tcfg = _build(TrainConfig, cfg.get("train"), "train", seed=seed)
    ecfg = _build(EncoderConfig, cfg.get("encoder"), "encoder", m=series[0].m, h=tcfg.h)
    result = train(series, ecfg, tcfg)
    save_encoder(out_dir / "encoder.ckpt", result.params, {"train": tcfg.to_dict(), "n_series": len(series)})
    rows = [r.row() for r in result.log]
    cols = ["step", "lr", "l_time", "l_amp", "l_phase", "total"]
    _write_csv(out_dir / "loss_log.csv", cols, ([r[c] if c == "step" else repr(float(r[c])) for c in cols] for r in rows))
    log.info("trained %d steps, final loss %.4f", len(rows), rows[-1]["total"])
    return out_dir


def _encoder_from(cfg: dict, series: list[Series], seed: int):
    if cfg.get("checkpoint"):
        params, _ = load_encoder(cfg["checkpoint"])
        return params
    # no checkpoint: frozen random-feature baseline
    ecfg = _build(EncoderConfig, cfg.get("encoder"), "encoder", m=series[0].m)
    return init_params(ecfg, seed)


def cmd_encode(cfg: dict, seed: int, out: str | None = None) -> Path:
    out_dir = _out_dir(cfg, out, "encode")
    series = load_data(cfg, seed)
    params = _encoder_from(cfg, series, seed)
    h = params.config.h
    stride = int(cfg.get("stride", 1))
    part = cfg.get("split", "all")
    parts = {"all": None, "train": 0, "val": 1, "test": 2}
    if part not in parts:
        raise ConfigError(f"split must be one of {sorted(parts)}, got {part!r}")
    rows = []
    for idx, s in enumerate(series):
        s = normalize(s)
        values = s.values if parts[part] is None else split(s)[parts[part]].values
        xw, _ = window_array(values, h, 0, stride)
        reps = encode_final(xw, params)
        label = f"{s.meta.get('trend_id', '')}/{s.meta.get('season_id', '')}" if "trend_id" in s.meta else ""
        for w, r in enumerate(reps):
            rows.append([idx, label, w * stride, *map(repr, r.tolist())])
    header = ["series", "label", "start"] + [f"v{i}" for i in range(params.config.d)]
    _write_csv(out_dir / "representations.csv", header, rows)
    log.info("encoded %d windows", len(rows))
    return out_dir


def cmd_eval(cfg: dict, seed: int, out: str | None = None) -> Path:
    out_dir = _out_dir(cfg, out, "eval")
    horizons = cfg.get("horizons", [24, 48])
    if not horizons or not all(isinstance(k, int) and k >= 1 for k in horizons):
        raise ConfigError(f"horizons must be a non-empty list of integers >= 1, got {horizons!r}")
    series = load_data(cfg, seed)
    params = _encoder_from(cfg, series, seed)
    h = params.config.h
    stride = int(cfg.get("stride", 1))
    metrics, details = [], []
    for k in horizons:
        mse, mae = [], []
        for idx, s in enumerate(series):
            tr, va, te = split(normalize(s))
            Xtr, Ytr = extract_features(tr.values, params, h, k, stride, "train")
            Xva, Yva = extract_features(va.values, params, h, k, stride, "val")
            Xte, Yte = extract_features(te.values, params, h, k, stride, "test")
            model = select_alpha(Xtr, Ytr, Xva, Yva, horizon=k)
            e = evaluate(predict(model, Xte), Yte)
            if not np.all(np.isfinite(e)):
                raise NumericalError(f"non-finite test metrics at horizon {k}, series {idx}")
            mse.append(e[0])
            mae.append(e[1])
            details.append({"series": idx, "horizon": k, "alpha": model.chosen_alpha, "mse": e[0], "mae": e[1]})
            save_forecast_model(out_dir / f"forecast_s{idx}_h{k}", model, {"series": idx})
        metrics.append({"horizon": k, "metric": "mse", "value": float(np.mean(mse))})
        metrics.append({"horizon": k, "metric": "mae", "value": float(np.mean(mae))})
    report = {
        "schema": METRICS_SCHEMA,
        "seed": seed,
        "checkpoint": cfg.get("checkpoint"),
        "n_series": len(series),
        "metrics": metrics,
        "details": details,
    }
    _dump_json(out_dir / "metrics.json", report)
    _write_csv(out_dir / "metrics.csv", ["horizon", "metric", "value"], ([m["horizon"], m["metric"], repr(m["value"])] for m in metrics))
    for m in metrics:
        log.info("horizon %d %s %.4f", m["horizon"], m["metric"], m["value"])
    return out_dir


COMMANDS = {"synth": cmd_synth, "train": cmd_train, "encode": cmd_encode, "eval": cmd_eval}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="seasontrend", description="Seasonal-trend contrastive representations for forecasting.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        p.add_argument("--out-dir", help="overrides the config out_dir")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _read_config(args.config)
        out = COMMANDS[args.command](cfg, _seed(cfg, args.seed), args.out_dir)
    except (NumericalError, FloatingPointError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except SeasonTrendError as e:
        code = EXIT_NUMERIC if isinstance(e, RuntimeError) else EXIT_CONFIG
        print(f"error: {e}", file=sys.stderr)
        return code
    except OSError as e:
        print(f"error: {e.filename or ''}: {e.strerror or e}", file=sys.stderr)
        return EXIT_CONFIG
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
