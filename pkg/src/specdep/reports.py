"""Machine-readable report files.

All JSON output is canonical: keys sorted, two-space indent, trailing
newline, floats via Python ``repr``.  Re-running a command with the same
inputs, configuration and seed therefore reproduces reports byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

from .ks import ChangepointReport
from .simulate import ThresholdTable
from .vines import ClarkeResult

__all__ = [
    "canonical_json",
    "write_json",
    "changepoint_report_dict",
    "write_changepoint_csv",
    "write_threshold_table",
    "read_threshold_table",
    "write_clarke_matrix_csv",
]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_json(obj))


def changepoint_report_dict(report: ChangepointReport, *, meta: dict | None = None) -> dict:
    out = report.to_dict()
    if meta:
        out["meta"] = meta
    return out


def write_changepoint_csv(path, report: ChangepointReport) -> None:
    """Two-column CSV: epoch index and its KS statistic."""
    lines = ["epoch,ks_statistic"]
    for epoch, stat in zip(report.ks.epochs, report.ks.stats):
        lines.append(f"{int(epoch)},{float(stat):.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_threshold_table(path, table: ThresholdTable) -> None:
    write_json(path, table.to_dict())


def read_threshold_table(path) -> ThresholdTable:
    return ThresholdTable.from_dict(json.loads(Path(path).read_text()))


def write_clarke_matrix_csv(path, labels: list[int], results: dict[tuple[int, int], ClarkeResult]) -> None:
    """Channel-by-channel matrix of Clarke statistics and p-values.

    ``results`` maps unordered channel pairs (a < b) to test results; the
    diagonal is left empty.
    """
    header = "channel," + ",".join(f"ch{c}_xi,ch{c}_p" for c in labels)
    lines = [header]
    for a in labels:
        cells = [f"ch{a}"]
        for b in labels:
            if a == b:
                cells.extend(["", ""])
                continue
            key = (a, b) if (a, b) in results else (b, a)
            res = results[key]
            cells.extend([str(res.xi), f"{res.p_value:.17g}"])
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")
