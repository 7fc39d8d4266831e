"""Command line interface.

Subcommands: ``simulate``, ``calibrate``, ``detect``, ``compare-prepost``
and ``compare-channels``.  Options resolve with precedence
command line > config file (``--config``, JSON) > built-in defaults, and the
fully resolved configuration is embedded in every report for provenance.
Channel-by-band jobs run on a process pool (``--jobs``); results are merged
in deterministic order, and per-task seed streams make the numbers
independent of worker count.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bands import BandSpec, EpochTensor, default_bands, segment_epochs
from .io import (
    read_recording_binary,
    read_recording_csv,
    write_recording_binary,
    write_recording_csv,
)
from .ks import DetectionConfig, detect_changepoints
from .marginals import BootstrapConfig
from .reports import (
    read_threshold_table,
    write_changepoint_csv,
    write_clarke_matrix_csv,
    write_json,
    write_threshold_table,
)
from .simulate import (
    DgpSpec,
    calibrate_thresholds,
    collect_null_statistics,
    default_threshold_table,
    dgp2_band_specs,
    simulate,
)
from .vines import CompareConfig, compare_channels, compare_prepost

__all__ = ["main"]


class CliError(Exception):
    """Validation problem; maps to exit code 2."""


_DGP_KINDS = ["dgp1-a", "dgp1-b", "dgp1-power"] + [f"dgp2-{i}" for i in range(1, 7)]

_DEFAULTS = {
    "seed": 0,
    "jobs": max(1, os.cpu_count() or 1),
    "out_dir": ".",
    "grid": 101,
    "alpha": 0.01,
    "blocks": 20,
    "reps": 200,
    "truncation": 2,
    "rho": 0.97,
    "points": 1000,
    "fs": 1000.0,
    "epochs": 100,
    "runs": 2,
    "channels": None,
    "bands": None,
    "band": "gamma",
    "thresholds": None,
    "compare": "joint",
    "format": "csv",
    "dgp": None,
    "input": None,
    "split": None,
    "noise_var": 0.1,
    "noise_as_sd": False,
    "no_figures": False,
    "no_notch": False,
    "name": "recording",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specdep",
        description="Copula-based dependence changepoint analysis of multichannel recordings.",
    )
    parser.add_argument("--version", action="version", version=f"specdep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=str, help="JSON config file; flags override its entries")
        p.add_argument("--seed", type=int, help="root random seed (default 0)")
        p.add_argument("--jobs", type=int, help="worker processes (default 1)")
        p.add_argument("--out-dir", type=str, help="output directory (default .)")
        p.add_argument("--grid", type=int, help="KS evaluation grid points per axis (default 101)")
        p.add_argument("--alpha", type=float, help="significance level (default 0.01)")
        p.add_argument("--blocks", type=int, help="bootstrap blocks per epoch (default 20)")
        p.add_argument("--reps", type=int, help="bootstrap replicates per epoch (default 200)")
        p.add_argument("--truncation", type=int, help="vine truncation level (default 2)")
        p.add_argument("--rho", type=float, help="AR(2) root modulus for dgp2 (default 0.97)")
        p.add_argument("--no-figures", action="store_true", default=None, help="skip PNG rendering")
        p.add_argument("--no-notch", action="store_true", default=None, help="keep the 60 Hz bin in the gamma band")

    p_sim = sub.add_parser("simulate", help="write a synthetic recording")
    common(p_sim)
    p_sim.add_argument("--dgp", choices=_DGP_KINDS, help="generator kind")
    p_sim.add_argument("--epochs", type=int, help="epochs to generate (default 100)")
    p_sim.add_argument("--points", type=int, help="samples per epoch (default 1000)")
    p_sim.add_argument("--fs", type=float, help="sampling rate in Hz (default 1000)")
    p_sim.add_argument("--channels", type=str, help="number of independent channels (default 1)")
    p_sim.add_argument("--format", choices=["csv", "binary"], help="output format (default csv)")
    p_sim.add_argument("--noise-var", type=float, help="dgp1 noise variance (default 0.1)")
    p_sim.add_argument("--noise-as-sd", action="store_true", default=None,
                       help="interpret --noise-var as a standard deviation")
    p_sim.add_argument("--name", type=str, help="output file stem (default recording)")

    p_cal = sub.add_parser("calibrate", help="calibrate per-band KS thresholds from a null DGP")
    common(p_cal)
    p_cal.add_argument("--dgp", choices=["dgp1", "dgp2"], help="null process family")
    p_cal.add_argument("--epochs", type=int, help="epochs per run (default 100)")
    p_cal.add_argument("--runs", type=int, help="independent runs pooled per band (default 2)")
    p_cal.add_argument("--points", type=int, help="samples per epoch (default 1000)")
    p_cal.add_argument("--fs", type=float, help="sampling rate in Hz (default 1000)")
    p_cal.add_argument("--bands", type=str, help="comma-separated band names (default: all)")

    p_det = sub.add_parser("detect", help="detect dependence changepoints per channel and band")
    common(p_det)
    p_det.add_argument("--input", type=str, help="recording file (.csv, or binary with .json sidecar)")
    p_det.add_argument("--points", type=int, help="samples per epoch for CSV input (default 1000)")
    p_det.add_argument("--fs", type=float, help="sampling rate for CSV input (default 1000)")
    p_det.add_argument("--thresholds", type=str, help="threshold table JSON (default: built-in table)")
    p_det.add_argument("--bands", type=str, help="comma-separated band names (default: all)")
    p_det.add_argument("--channels", type=str, help="comma-separated channel indices (default: all)")
    p_det.add_argument("--compare", choices=["joint", "copula"],
                       help="compare joint CDFs (default) or bare copulas")

    p_pre = sub.add_parser("compare-prepost", help="compare dependence before and after a split epoch")
    common(p_pre)
    p_pre.add_argument("--input", type=str, help="recording file")
    p_pre.add_argument("--points", type=int, help="samples per epoch for CSV input")
    p_pre.add_argument("--fs", type=float, help="sampling rate for CSV input")
    p_pre.add_argument("--split", type=int,
                       help="last epoch (1-based) of the first regime; must halve the range")
    p_pre.add_argument("--bands", type=str, help="comma-separated band names (default: all)")
    p_pre.add_argument("--channels", type=str, help="comma-separated channel indices (default: all)")

    p_cmp = sub.add_parser("compare-channels", help="compare dependence between channel pairs")
    common(p_cmp)
    p_cmp.add_argument("--input", type=str, help="recording file")
    p_cmp.add_argument("--points", type=int, help="samples per epoch for CSV input")
    p_cmp.add_argument("--fs", type=float, help="sampling rate for CSV input")
    p_cmp.add_argument("--channels", type=str, help="comma-separated channel indices (at least two)")
    p_cmp.add_argument("--band", type=str, help="band name (default gamma)")

    return parser


def _resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags (increasing precedence)."""
    resolved = dict(_DEFAULTS)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        path = Path(cfg_path)
        if not path.exists():
            raise CliError(f"config file not found: {path}")
        try:
            file_cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CliError(f"invalid JSON in {path}: {exc}") from exc
        unknown = set(file_cfg) - set(_DEFAULTS)
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(file_cfg)
    for key in _DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _parse_int_list(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(t) for t in str(text).split(",") if t != ""]
    except ValueError as exc:
        raise CliError(f"expected comma-separated integers, got {text!r}") from exc


def _select_bands(cfg: dict) -> list[BandSpec]:
    table = {b.name: b for b in default_bands(include_notch=not cfg["no_notch"])}
    if cfg["bands"] is None:
        return list(table.values())
    names = [n.strip() for n in str(cfg["bands"]).split(",") if n.strip()]
    missing = [n for n in names if n not in table]
    if missing:
        raise CliError(f"unknown bands: {missing}; available: {list(table)}")
    return [table[n] for n in names]


def _load_recording(cfg: dict) -> tuple[np.ndarray, float]:
    """Return (samples (d, R, T), sampling_rate_hz) for any input format."""
    if not cfg["input"]:
        raise CliError("--input is required")
    path = Path(cfg["input"])
    if not path.exists():
        raise CliError(f"input file not found: {path}")
    if path.suffix.lower() == ".csv":
        streams, _ = read_recording_csv(path)
        tensor = segment_epochs(streams, int(cfg["points"]), float(cfg["fs"]))
        return tensor.samples, tensor.sampling_rate_hz
    tensor = read_recording_binary(path)
    return tensor.samples, tensor.sampling_rate_hz


def _detection_config(cfg: dict) -> DetectionConfig:
    return DetectionConfig(
        bootstrap=BootstrapConfig(
            n_blocks=int(cfg["blocks"]),
            n_replicates=int(cfg["reps"]),
            seed=int(cfg["seed"]),
        ),
        grid_size=int(cfg["grid"]),
        compare_joint=(cfg["compare"] == "joint"),
    )


def _compare_config(cfg: dict) -> CompareConfig:
    return CompareConfig(
        bootstrap=BootstrapConfig(
            n_blocks=int(cfg["blocks"]),
            n_replicates=int(cfg["reps"]),
            seed=int(cfg["seed"]),
        ),
        truncation_level=int(cfg["truncation"]),
    )


def _meta(command: str, cfg: dict) -> dict:
    meta_cfg = {k: cfg[k] for k in sorted(cfg) if cfg[k] is not None}
    return {"tool": "specdep", "version": __version__, "command": command, "config": meta_cfg}


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- workers (top level for picklability) ---------------------------------

_WORK: dict = {}


def _detect_worker(task):
    channel, band_name = task
    ctx = _WORK
    band = ctx["bands"][band_name]
    report = detect_changepoints(
        ctx["samples"][channel],
        band,
        ctx["fs"],
        ctx["config"],
        threshold=ctx["thresholds"][band_name],
        channel=channel,
        alpha=ctx["alpha"],
    )
    return report


def _calibrate_worker(task):
    band_name, spec_key = task
    ctx = _WORK
    band = ctx["bands"][band_name]
    return collect_null_statistics([ctx["specs"][spec_key]], band, ctx["fs"], ctx["config"])


def _prepost_worker(task):
    channel, band_name = task
    ctx = _WORK
    band = ctx["bands"][band_name]
    return compare_prepost(
        ctx["samples"][channel], band, ctx["fs"], ctx["pre"], ctx["post"],
        ctx["config"], channel=channel,
    )


def _channels_worker(task):
    (ch_a, ch_b), band_name = task
    ctx = _WORK
    band = ctx["bands"][band_name]
    return compare_channels(ctx["samples"], band, ctx["fs"], ch_a, ch_b, ctx["config"])


def _set_context(ctx: dict):
    global _WORK
    _WORK = ctx


def _run_pool(worker, tasks, jobs, ctx):
    """Dispatch tasks with a shared read-only context (fork-safe via initializer)."""
    if jobs <= 1 or len(tasks) <= 1:
        _set_context(ctx)
        return {t: worker(t) for t in tasks}
    results = {}
    with ProcessPoolExecutor(max_workers=jobs, initializer=_set_context, initargs=(ctx,)) as pool:
        futures = {pool.submit(worker, t): t for t in tasks}
        for fut, task in futures.items():
            results[task] = fut.result()
    return results


# --- commands ---------------------------------------------------------------


def _cmd_simulate(cfg: dict) -> int:
    if not cfg["dgp"]:
        raise CliError("--dgp is required")
    kind = cfg["dgp"]
    n_channels = int(cfg["channels"] or 1)
    if n_channels < 1:
        raise CliError("--channels must be >= 1")
    n_epochs = int(cfg["epochs"])
    n_samples = int(cfg["points"])
    seed = int(cfg["seed"])

    def spec_for(k: str, epochs: int, ch: int) -> DgpSpec:
        return DgpSpec(
            k, epochs, n_samples, seed=seed + ch,
            rho=float(cfg["rho"]), noise_var=float(cfg["noise_var"]),
            noise_is_sd=bool(cfg["noise_as_sd"]),
        )

    chans = []
    for ch in range(n_channels):
        if kind == "dgp1-power":
            half = n_epochs // 2
            if half < 1 or n_epochs != 2 * half:
                raise CliError("dgp1-power needs an even, positive --epochs")
            epochs = np.concatenate(
                [simulate(spec_for("dgp1-a", half, ch)), simulate(spec_for("dgp1-b", half, ch))],
                axis=0,
            )
        else:
            epochs = simulate(spec_for(kind, n_epochs, ch))
        chans.append(epochs)
    samples = np.stack(chans, axis=0)

    out = _out_dir(cfg)
    stem = str(cfg["name"])
    tensor = EpochTensor(samples=samples, sampling_rate_hz=float(cfg["fs"]))
    if cfg["format"] == "binary":
        data_path = out / f"{stem}.bin"
        write_recording_binary(data_path, tensor)
    else:
        data_path = out / f"{stem}.csv"
        streams = samples.reshape(samples.shape[0], -1)
        write_recording_csv(data_path, streams)
    manifest = _meta("simulate", cfg)
    manifest["output"] = data_path.name
    manifest["shape"] = {"d": tensor.n_channels, "R": tensor.n_epochs, "T": tensor.n_samples}
    write_json(out / f"{stem}.manifest.json", manifest)
    print(f"wrote {data_path}")
    return 0


def _cmd_calibrate(cfg: dict) -> int:
    if cfg["dgp"] not in ("dgp1", "dgp2"):
        raise CliError("--dgp must be dgp1 or dgp2")
    n_runs = int(cfg["runs"])
    if n_runs < 1:
        raise CliError("--runs must be >= 1")
    n_epochs = int(cfg["epochs"])
    if n_epochs < 3:
        raise CliError("--epochs must be >= 3")
    bands = _select_bands(cfg)
    fs = float(cfg["fs"])
    n_samples = int(cfg["points"])
    seed = int(cfg["seed"])
    config = _detection_config(cfg)

    specs: dict[str, DgpSpec] = {}
    band_spec_keys: dict[str, list[str]] = {}
    if cfg["dgp"] == "dgp1":
        for run in range(n_runs):
            specs[f"run{run}"] = DgpSpec(
                "dgp1-a", n_epochs, n_samples, seed=seed + run,
                noise_var=float(cfg["noise_var"]), noise_is_sd=bool(cfg["noise_as_sd"]),
            )
        for band in bands:
            band_spec_keys[band.name] = list(specs)
    else:
        for run in range(n_runs):
            per_band = dgp2_band_specs(
                n_epochs, n_samples, seed + 100 * run, rho=float(cfg["rho"]),
                bands=tuple(bands),
            )
            for band_name, blist in per_band.items():
                for spec in blist:
                    key = f"{spec.kind}-run{run}"
                    specs[key] = spec
                    band_spec_keys.setdefault(band_name, []).append(key)
        missing = [b.name for b in bands if b.name not in band_spec_keys]
        if missing:
            raise CliError(f"no dgp2 process peaks inside bands {missing}")

    ctx = {"bands": {b.name: b for b in bands}, "specs": specs, "fs": fs, "config": config}
    tasks = [(band, key) for band, keys in sorted(band_spec_keys.items()) for key in keys]
    results = _run_pool(_calibrate_worker, tasks, int(cfg["jobs"]), ctx)

    stats_by_band = {
        band: np.concatenate([results[(band, key)] for key in keys])
        for band, keys in sorted(band_spec_keys.items())
    }
    table = calibrate_thresholds(stats_by_band, float(cfg["alpha"]), source=cfg["dgp"])

    out = _out_dir(cfg)
    write_threshold_table(out / "thresholds.json", table)
    for band, stats in stats_by_band.items():
        lines = ["ks_statistic"] + [f"{s:.17g}" for s in stats]
        (out / f"null_stats_{band}.csv").write_text("\n".join(lines) + "\n")
    write_json(out / "calibrate.meta.json", _meta("calibrate", cfg))
    if not cfg["no_figures"]:
        from .figures import save_calibration_figure

        save_calibration_figure(stats_by_band, table, out / "calibration.png")
    print(f"wrote {out / 'thresholds.json'}")
    return 0


def _cmd_detect(cfg: dict) -> int:
    samples, fs = _load_recording(cfg)
    bands = _select_bands(cfg)
    channels = _parse_int_list(cfg["channels"]) or list(range(samples.shape[0]))
    for ch in channels:
        if not 0 <= ch < samples.shape[0]:
            raise CliError(f"channel {ch} out of range (recording has {samples.shape[0]})")
    if cfg["thresholds"]:
        tpath = Path(cfg["thresholds"])
        if not tpath.exists():
            raise CliError(f"threshold file not found: {tpath}")
        table = read_threshold_table(tpath)
        threshold_source = str(tpath)
    else:
        table = default_threshold_table()
        threshold_source = "builtin-dgp2-defaults"
    missing = [b.name for b in bands if b.name not in table.thresholds]
    if missing:
        raise CliError(f"threshold table lacks bands {missing}")

    config = _detection_config(cfg)
    ctx = {
        "bands": {b.name: b for b in bands},
        "samples": samples,
        "fs": fs,
        "config": config,
        "thresholds": table.thresholds,
        "alpha": table.alpha,
    }
    tasks = [(ch, b.name) for ch in channels for b in bands]
    results = _run_pool(_detect_worker, tasks, int(cfg["jobs"]), ctx)

    out = _out_dir(cfg)
    meta = _meta("detect", cfg)
    meta["threshold_source"] = threshold_source
    for ch, band_name in sorted(results):
        report = results[(ch, band_name)]
        payload = report.to_dict()
        payload["meta"] = meta
        stem = f"detect_ch{ch}_{band_name}"
        write_json(out / f"{stem}.json", payload)
        write_changepoint_csv(out / f"{stem}.csv", report)
        if not cfg["no_figures"]:
            from .figures import save_ks_figure

            save_ks_figure(report, out / f"{stem}.png")
    print(f"wrote {len(results)} reports to {out}")
    return 0


def _cmd_compare_prepost(cfg: dict) -> int:
    samples, fs = _load_recording(cfg)
    n_epochs = samples.shape[1]
    split = cfg["split"]
    if split is None:
        raise CliError("--split is required (last epoch of the first regime, 1-based)")
    split = int(split)
    if not 1 <= split < n_epochs:
        raise CliError(f"--split must lie in 1..{n_epochs - 1}")
    if split != n_epochs - split:
        raise CliError(
            f"ranges must hold equally many epochs; split {split} leaves {n_epochs - split}"
        )
    pre = (0, split)
    post = (split, n_epochs)
    bands = _select_bands(cfg)
    channels = _parse_int_list(cfg["channels"]) or list(range(samples.shape[0]))
    config = _compare_config(cfg)

    ctx = {
        "bands": {b.name: b for b in bands},
        "samples": samples,
        "fs": fs,
        "pre": pre,
        "post": post,
        "config": config,
    }
    tasks = [(ch, b.name) for ch in channels for b in bands]
    results = _run_pool(_prepost_worker, tasks, int(cfg["jobs"]), ctx)

    out = _out_dir(cfg)
    meta = _meta("compare-prepost", cfg)
    for band in bands:
        by_channel = {ch: results[(ch, band.name)] for ch in channels}
        payload = {
            "band": band.name,
            "split": split,
            "results": {str(ch): res.to_dict() for ch, res in by_channel.items()},
            "meta": meta,
        }
        write_json(out / f"prepost_{band.name}.json", payload)
        lines = ["channel,xi,n,p_value"]
        for ch in channels:
            res = by_channel[ch]
            lines.append(f"{ch},{res.xi},{res.n},{res.p_value:.17g}")
        (out / f"prepost_{band.name}.csv").write_text("\n".join(lines) + "\n")
        if not cfg["no_figures"]:
            from .figures import save_prepost_figure

            save_prepost_figure(by_channel, out / f"prepost_{band.name}.png")
    print(f"wrote {len(bands)} pre/post reports to {out}")
    return 0


def _cmd_compare_channels(cfg: dict) -> int:
    samples, fs = _load_recording(cfg)
    channels = _parse_int_list(cfg["channels"])
    if not channels or len(channels) < 2:
        raise CliError("--channels must list at least two channel indices")
    if len(set(channels)) != len(channels):
        raise CliError("--channels contains duplicates")
    for ch in channels:
        if not 0 <= ch < samples.shape[0]:
            raise CliError(f"channel {ch} out of range (recording has {samples.shape[0]})")
    band_table = {b.name: b for b in default_bands(include_notch=not cfg["no_notch"])}
    band_name = str(cfg["band"])
    if band_name not in band_table:
        raise CliError(f"unknown band {band_name!r}; available: {list(band_table)}")
    band = band_table[band_name]
    config = _compare_config(cfg)

    pairs = [(a, b) for i, a in enumerate(channels) for b in channels[i + 1 :]]
    ctx = {"bands": {band.name: band}, "samples": samples, "fs": fs, "config": config}
    tasks = [(pair, band.name) for pair in pairs]
    results_raw = _run_pool(_channels_worker, tasks, int(cfg["jobs"]), ctx)
    results = {pair: results_raw[(pair, band.name)] for pair in pairs}

    out = _out_dir(cfg)
    payload = {
        "band": band.name,
        "results": {f"{a}-{b}": res.to_dict() for (a, b), res in sorted(results.items())},
        "meta": _meta("compare-channels", cfg),
    }
    write_json(out / f"channels_{band.name}.json", payload)
    write_clarke_matrix_csv(out / f"channels_{band.name}.csv", channels, results)
    if not cfg["no_figures"]:
        from .figures import save_clarke_matrix_figure

        save_clarke_matrix_figure(channels, results, out / f"channels_{band.name}.png")
    print(f"wrote {len(pairs)} pair comparisons to {out}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "calibrate": _cmd_calibrate,
    "detect": _cmd_detect,
    "compare-prepost": _cmd_compare_prepost,
    "compare-channels": _cmd_compare_channels,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
