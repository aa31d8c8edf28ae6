"""Render MSE-vs-uncertainty charts from sweep CSV files.

The input is the CSV written by the `aircomp-fa sweep` command:

    scheme,theta0,snr_db,N,K,L,mse_mean,mse_std,num_geometries,rng_seed

One line is drawn per (scheme, group value), where the group column is one
of snr_db, N, or L; the x-axis is theta0 and the y-axis is mse_mean with
mse_std error bars.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

GROUP_COLUMNS = ("snr_db", "N", "L")
REQUIRED_COLUMNS = ("scheme", "theta0", "mse_mean", "mse_std")

_GROUP_LABELS = {
    "snr_db": lambda v: f"SNR={v:g} dB",
    "N": lambda v: f"N={v:g}",
    "L": lambda v: f"L={v:g}",
}


class SchemaError(ValueError):
    """The CSV does not carry the columns this renderer needs."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    group_by: str
    output_image_path: str
    log_y: bool = True

    def __post_init__(self):
        if self.group_by not in GROUP_COLUMNS:
            raise SchemaError(
                f"group_by must be one of {', '.join(GROUP_COLUMNS)}, got {self.group_by!r}"
            )


def read_rows(csv_path: str, group_by: str) -> list[dict]:
    """Parse the sweep CSV, checking that every needed column is present."""
    with open(csv_path, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [c for c in (*REQUIRED_COLUMNS, group_by) if c not in header]
        if missing:
            raise SchemaError(f"CSV is missing columns: {', '.join(sorted(missing))}")
        rows = []
        for record in reader:
            rows.append(
                {
                    "scheme": record["scheme"],
                    "theta0": float(record["theta0"]),
                    "group": float(record[group_by]),
                    "mse_mean": float(record["mse_mean"]),
                    "mse_std": float(record["mse_std"]),
                }
            )
    return rows


def render(spec: PlotSpec):
    """Draw the chart and write it to spec.output_image_path.

    Returns the matplotlib Figure (useful for inspecting line and legend
    counts). A CSV with no data rows produces an empty-axes figure and a
    warning on stderr.
    """
    rows = read_rows(spec.csv_path, spec.group_by)

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    groups = sorted({(r["scheme"], r["group"]) for r in rows})
    label_of = _GROUP_LABELS[spec.group_by]
    for scheme, group_value in groups:
        series = sorted(
            (r for r in rows if r["scheme"] == scheme and r["group"] == group_value),
            key=lambda r: r["theta0"],
        )
        ax.errorbar(
            [r["theta0"] for r in series],
            [r["mse_mean"] for r in series],
            yerr=[r["mse_std"] for r in series],
            marker="o",
            capsize=2.0,
            label=f"{scheme}, {label_of(group_value)}",
        )
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("uncertainty level (rad)")
    ax.set_ylabel("computation MSE")
    ax.grid(True, which="both", alpha=0.3)
    if groups:
        ax.legend()
    else:
        print(f"warning: {spec.csv_path} has no data rows; empty chart", file=sys.stderr)
    fig.tight_layout()
    fig.savefig(spec.output_image_path)
    return fig
