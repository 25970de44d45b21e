"""Report emission: structured JSON plus a flat CSV table.

Both artifacts are deterministic byte for byte: keys are sorted, floats are
rounded to six decimals before serialization, and rows are emitted in a
stable order. A report echoes the complete resolved configuration, so the
run that produced it can be reproduced from the report alone.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from . import __version__
from .sim import SplitSummary

CSV_COLUMNS = ("model", "parameters", "balanced_accuracy", "itr")


def fixed(value: float) -> float:
    """Six-decimal fixed precision, as a float for clean JSON output."""
    return float(f"{value:.6f}")


def build_report(
    command: str,
    seed: int,
    config_echo: dict,
    model_kind: str,
    parameter_count: int,
    summary: SplitSummary,
) -> dict:
    return {
        "tool": "rsvptyping",
        "tool_version": __version__,
        "command": command,
        "seed": seed,
        "config": config_echo,
        "model": {"kind": model_kind, "parameters": parameter_count},
        "splits": [
            {
                "split": row.split_index,
                "balanced_accuracy": fixed(row.balanced_accuracy),
                "typing_accuracy": fixed(row.typing_accuracy),
                "itr_bits_per_symbol": fixed(row.itr_bits_per_symbol),
            }
            for row in summary.per_split
        ],
        "aggregate": {
            "balanced_accuracy": {
                "mean": fixed(summary.mean_balanced_accuracy),
                "std": fixed(summary.std_balanced_accuracy),
            },
            "itr_bits_per_symbol": {
                "mean": fixed(summary.mean_itr),
                "std": fixed(summary.std_itr),
            },
        },
    }


def write_report_json(path, report: dict) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def read_report_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def report_csv_row(report: dict) -> dict:
    """The flat per-model row used for size-vs-performance tables."""
    return {
        "model": report["model"]["kind"],
        "parameters": report["model"]["parameters"],
        "balanced_accuracy": f"{report['aggregate']['balanced_accuracy']['mean']:.6f}",
        "itr": f"{report['aggregate']['itr_bits_per_symbol']['mean']:.6f}",
    }


def write_csv(path, rows: Sequence[dict]) -> None:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buffer.getvalue())


def csv_path_for(report_path) -> str:
    text = str(report_path)
    if text.endswith(".json"):
        return text[: -len(".json")] + ".csv"
    return text + ".csv"
