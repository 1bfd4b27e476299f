"""Binary container for named float64 arrays.

Layout (all integers little-endian)::

    offset 0   8 bytes   magic b"STCKPT01"
    offset 8   8 bytes   uint64 header length H
    offset 16  H bytes   UTF-8 JSON header
    offset 16+H          array payloads, float64 little-endian, C order,
                         concatenated in header order

The header is ``{"arrays": [{"name", "shape", "offset"}...], "meta": {...}}``
where ``offset`` counts bytes from the start of the payload section. Keys are
sorted and the encoding is fixed, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .encoder import EncoderConfig, EncoderParams
from .errors import CheckpointError

MAGIC = b"STCKPT01"


def save_arrays(path: str | Path, arrays: dict[str, np.ndarray], meta: dict | None = None) -> None:
    entries = []
    offset = 0
    for name, a in arrays.items():
        a = np.asarray(a, dtype=np.float64)
        entries.append({"name": name, "shape": list(a.shape), "offset": offset})
        offset += a.size * 8
    header = json.dumps({"arrays": entries, "meta": meta or {}}, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with Path(path).open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for a in arrays.values():
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_arrays(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    (hlen,) = struct.unpack("<Q", raw[8:16])
    try:
        header = json.loads(raw[16 : 16 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: corrupt header ({e})") from None
    payload = raw[16 + hlen :]
    arrays = {}
    for e in header["arrays"]:
        n = int(np.prod(e["shape"], dtype=np.int64))
        lo = e["offset"]
        if lo + 8 * n > len(payload):
            raise CheckpointError(f"{path}: array {e['name']!r} runs past the end of the file")
        arrays[e["name"]] = np.frombuffer(payload, dtype="<f8", count=n, offset=lo).reshape(e["shape"]).astype(np.float64)
    return arrays, header.get("meta", {})


def save_encoder(path: str | Path, params: EncoderParams, extra: dict | None = None) -> None:
    meta = {"kind": "encoder", "config": params.config.to_dict(), **(extra or {})}
    save_arrays(path, params.arrays(), meta)


def load_encoder(path: str | Path) -> tuple[EncoderParams, dict]:
    arrays, meta = load_arrays(path)
    if meta.get("kind") != "encoder" or "config" not in meta:
        raise CheckpointError(f"{path}: not an encoder checkpoint")
    cfg = EncoderConfig(**meta["config"])
    try:
        params = EncoderParams.from_arrays(cfg, arrays, requires_grad=False)
    except ValueError as e:
        raise CheckpointError(f"{path}: {e}") from None
    return params, meta


def save_forecast_model(stem: str | Path, model, extra: dict | None = None) -> tuple[Path, Path]:
    """Write ``<stem>.json`` (metadata) and ``<stem>.bin`` (weights in the container format)."""
    stem = Path(stem)
    meta = {
        "kind": "forecast",
        "chosen_alpha": model.chosen_alpha,
        "horizon": model.horizon,
        "feature_dim": model.feature_dim,
        "val_mse": model.val_mse,
        "val_scores": {repr(float(a)): s for a, s in model.val_scores.items()},
        **(extra or {}),
    }
    bin_path, json_path = stem.with_suffix(".bin"), stem.with_suffix(".json")
    save_arrays(bin_path, {"weights": model.weights}, {"kind": "forecast"})
    json_path.write_text(json.dumps({**meta, "weights_file": bin_path.name}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return json_path, bin_path


def load_forecast_model(json_path: str | Path):
    from .downstream import ForecastModel

    json_path = Path(json_path)
    try:
        meta = json.loads(json_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise CheckpointError(f"{json_path}: invalid JSON ({e})") from None
    if meta.get("kind") != "forecast":
        raise CheckpointError(f"{json_path}: not a forecast model")
    arrays, _ = load_arrays(json_path.parent / meta["weights_file"])
    W = arrays["weights"]
    if W.shape[0] != meta["feature_dim"] + 1:
        raise CheckpointError(f"{json_path}: weights {W.shape} do not match feature_dim {meta['feature_dim']}")
    return ForecastModel(
        weights=W,
        chosen_alpha=meta["chosen_alpha"],
        horizon=meta["horizon"],
        feature_dim=meta["feature_dim"],
        val_mse=meta["val_mse"],
        val_scores={float(a): s for a, s in meta["val_scores"].items()},
    )
