"""Recording file formats.

Two interchangeable on-disk formats carry multichannel recordings:

* CSV: one column per channel, one row per time sample, a single header row
  of channel names.  Values are written with ``%.17g`` so that a round trip
  is bit-exact for IEEE doubles.
* Raw binary: little-endian IEEE 754 float64, C-order array of shape
  ``(d, R, T)`` (``layout: "channel-major"``: channel varies slowest, time
  fastest), accompanied by a JSON sidecar
  ``{"d": ..., "T": ..., "R": ..., "sampling_rate_hz": ...,
  "layout": "channel-major"}``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bands import EpochTensor

__all__ = [
    "write_recording_csv",
    "read_recording_csv",
    "write_recording_binary",
    "read_recording_binary",
    "sidecar_path",
]


def write_recording_csv(path, streams: np.ndarray, channel_names: list[str] | None = None) -> None:
    """Write per-channel sample streams (shape ``(d, n)``) as CSV."""
    arr = np.atleast_2d(np.asarray(streams, dtype=float))
    d = arr.shape[0]
    names = channel_names if channel_names is not None else [f"ch{i}" for i in range(d)]
    if len(names) != d:
        raise ValueError("channel_names length must match the channel count")
    header = ",".join(names)
    np.savetxt(path, arr.T, delimiter=",", header=header, comments="", fmt="%.17g")


def read_recording_csv(path) -> tuple[np.ndarray, list[str]]:
    """Read a CSV recording; returns ``(streams (d, n), channel_names)``."""
    p = Path(path)
    with p.open() as fh:
        names = [c.strip() for c in fh.readline().strip().split(",")]
    data = np.loadtxt(p, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(names):
        raise ValueError(f"{p}: header lists {len(names)} channels but rows have {data.shape[1]} columns")
    return data.T.copy(), names


def sidecar_path(data_path) -> Path:
    return Path(data_path).with_suffix(".json")


def write_recording_binary(path, tensor: EpochTensor) -> None:
    """Write an epoch tensor as raw float64 plus a JSON sidecar."""
    p = Path(path)
    arr = np.ascontiguousarray(tensor.samples, dtype="<f8")
    p.write_bytes(arr.tobytes())
    meta = {
        "d": tensor.n_channels,
        "R": tensor.n_epochs,
        "T": tensor.n_samples,
        "sampling_rate_hz": tensor.sampling_rate_hz,
        "layout": "channel-major",
    }
    sidecar_path(p).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def read_recording_binary(path) -> EpochTensor:
    """Read a raw float64 recording with its JSON sidecar."""
    p = Path(path)
    meta_file = sidecar_path(p)
    if not meta_file.exists():
        raise FileNotFoundError(f"missing sidecar {meta_file}")
    meta = json.loads(meta_file.read_text())
    if meta.get("layout") != "channel-major":
        raise ValueError(f"unsupported layout {meta.get('layout')!r}")
    d, n_epochs, n_samples = int(meta["d"]), int(meta["R"]), int(meta["T"])
    raw = np.frombuffer(p.read_bytes(), dtype="<f8")
    expected = d * n_epochs * n_samples
    if raw.size != expected:
        raise ValueError(f"{p}: expected {expected} float64 values, found {raw.size}")
    samples = raw.reshape(d, n_epochs, n_samples).copy()
    return EpochTensor(samples=samples, sampling_rate_hz=float(meta["sampling_rate_hz"]))
