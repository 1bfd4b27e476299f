import csv
import json

import pytest

from seasontrend.checkpoint import load_encoder
from seasontrend.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main

SMALL = {
    "synth": {"length": 240},
    "train": {"batch_size": 4, "iterations": 3, "h": 16, "queue_size": 8},
    "encoder": {"hidden": 8, "blocks": 2, "d": 8},
}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_synth_writes_manifest(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["synth", "--config", write_cfg(tmp_path, {"length": 50}), "--seed", "2", "--out-dir", str(out)]) == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 2 and len(manifest["files"]) == 6
    rows = read_rows(out / manifest["files"][0])
    assert rows[0] == ["t", "value", "trend_id", "season_id"] and len(rows) == 51
    assert capsys.readouterr().out.strip() == str(out)


def test_train_encode_eval_pipeline(tmp_path):
    run = tmp_path / "run"
    assert main(["train", "--config", write_cfg(tmp_path, SMALL), "--out-dir", str(run)]) == EXIT_OK
    params, meta = load_encoder(run / "encoder.ckpt")
    assert params.config.h == 16 and meta["train"]["iterations"] == 3
    log = read_rows(run / "loss_log.csv")
    assert log[0] == ["step", "lr", "l_time", "l_amp", "l_phase", "total"] and len(log) == 4

    cfg = {"synth": {"length": 240}, "checkpoint": str(run / "encoder.ckpt"), "stride": 8, "split": "test"}
    assert main(["encode", "--config", write_cfg(tmp_path, cfg, "e.json"), "--out-dir", str(tmp_path / "enc")]) == EXIT_OK
    reps = read_rows(tmp_path / "enc" / "representations.csv")
    # 48-step test split, h=16, stride 8 -> 5 windows per series
    assert len(reps) == 1 + 6 * 5 and len(reps[0]) == 3 + 8
    assert reps[1][1] == "logistic/s20"

    cfg = {"synth": {"length": 240}, "checkpoint": str(run / "encoder.ckpt"), "horizons": [4, 8]}
    assert main(["eval", "--config", write_cfg(tmp_path, cfg, "v.json"), "--out-dir", str(tmp_path / "ev")]) == EXIT_OK
    report = json.loads((tmp_path / "ev" / "metrics.json").read_text())
    assert report["schema"] == "seasontrend.metrics/1" and len(report["metrics"]) == 4
    assert {(m["horizon"], m["metric"]) for m in report["metrics"]} == {(4, "mse"), (4, "mae"), (8, "mse"), (8, "mae")}
    assert (tmp_path / "ev" / "forecast_s0_h4.json").exists()


def test_eval_from_synth_manifest_without_checkpoint(tmp_path):
    main(["synth", "--config", write_cfg(tmp_path, {"length": 200}), "--out-dir", str(tmp_path / "s")])
    cfg = {"data": str(tmp_path / "s" / "manifest.json"), "encoder": {"h": 16, "hidden": 4, "blocks": 1, "d": 8}, "horizons": [2]}
    assert main(["eval", "--config", write_cfg(tmp_path, cfg), "--out-dir", str(tmp_path / "ev")]) == EXIT_OK
    assert json.loads((tmp_path / "ev" / "metrics.json").read_text())["n_series"] == 6


@pytest.mark.parametrize(
    "cfg",
    [
        {"train": {"bogus": 1}},
        {"train": {"iterations": 0}},
        {"seed": -3},
        {"data": "missing.csv"},
    ],
)
def test_config_errors_exit_2(tmp_path, cfg, capsys):
    assert main(["train", "--config", write_cfg(tmp_path, cfg), "--out-dir", str(tmp_path / "o")]) == EXIT_CONFIG
    assert capsys.readouterr().err.startswith("error:")


def test_unreadable_config_exits_2(tmp_path):
    assert main(["train", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["train", "--config", str(bad)]) == EXIT_CONFIG


def test_bad_horizons_exit_2(tmp_path):
    assert main(["eval", "--config", write_cfg(tmp_path, {"horizons": [0]}), "--out-dir", str(tmp_path / "o")]) == EXIT_CONFIG


def test_numeric_failure_exits_3(tmp_path):
    # a huge learning rate makes the raw dot-product losses overflow within a few steps
    cfg = {**SMALL, "train": {**SMALL["train"], "base_lr": 1e6, "iterations": 20}}
    assert main(["train", "--config", write_cfg(tmp_path, cfg), "--out-dir", str(tmp_path / "o")]) == EXIT_NUMERIC


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0 and "0.1.0" in capsys.readouterr().out
