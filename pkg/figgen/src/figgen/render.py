"""Figure rendering from sweep CSVs.

The input contract is the simulator's CSV schema (one aggregated row per
sweep value and receiver); nothing else of the simulator is imported, so
the two tools only share the file format. Four figure kinds are supported:

``nmse_vs_snr``
    channel NMSE against SNR, one line per (receiver, port count);
``ser_vs_snr``
    symbol error rate against SNR, rows without an SER value (receivers
    that do not decode data) are skipped;
``pilot_compare``
    NMSE against SNR restricted to the semi-blind and pilot receivers;
``nmse_vs_ports``
    channel NMSE against the port count, one line per (experiment, receiver).

Series data is taken verbatim from the CSV; rendering the same bytes twice
plots identical series.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # file output only; never require a display

import matplotlib.pyplot as plt

REQUIRED_COLUMNS = (
    "experiment",
    "receiver",
    "axis",
    "axis_value",
    "n_ports",
    "n_antennas",
    "n_users",
    "n_blocks",
    "n_slots",
    "mod_order",
    "n_trials",
    "nmse_mean",
    "ser_mean",
    "iter_mean",
    "converged_fraction",
)

FIGURE_KINDS = ("nmse_vs_snr", "ser_vs_snr", "pilot_compare", "nmse_vs_ports")


class FiggenError(Exception):
    """Base error for figure generation."""


class MissingColumnError(FiggenError):
    """The CSV header does not match the expected schema."""


class EmptySelectionError(FiggenError):
    """No CSV row matches the requested figure kind."""


@dataclass(frozen=True)
class FigureRequest:
    csv_path: str
    figure_kind: str
    output_image_path: str


def read_rows(csv_path: str) -> list[dict]:
    """Load the CSV and verify the schema; returns one dict per data row."""
    with open(csv_path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise MissingColumnError(
                f"CSV header is missing required column(s): {', '.join(missing)}"
            )
        return list(reader)


def _series(kind: str, rows: list[dict]):
    """Group, sort, and label the data series for one figure kind."""
    if kind == "nmse_vs_ports":
        selected = [r for r in rows if r["axis"] == "n_ports"]
        groups: dict[tuple, list] = {}
        for r in selected:
            key = (r["experiment"], r["receiver"])
            groups.setdefault(key, []).append(
                (int(r["axis_value"]), float(r["nmse_mean"]))
            )
        labels = {k: f"{k[0]}, {k[1]}" for k in groups}
        xlabel, ylabel = "number of ports N", "NMSE"
    else:
        selected = [r for r in rows if r["axis"] == "snr_db"]
        if kind == "pilot_compare":
            selected = [r for r in selected if r["receiver"] in ("semi-blind", "pilot")]
        ycol = "ser_mean" if kind == "ser_vs_snr" else "nmse_mean"
        if kind == "ser_vs_snr":
            selected = [r for r in selected if r["ser_mean"] != ""]
        groups = {}
        for r in selected:
            key = (r["receiver"], int(r["n_ports"]))
            groups.setdefault(key, []).append(
                (float(r["axis_value"]), float(r[ycol]))
            )
        labels = {k: f"{k[0]}, N={k[1]}" for k in groups}
        xlabel = "SNR (dB)"
        ylabel = "SER" if kind == "ser_vs_snr" else "NMSE"

    series = []
    for key in sorted(groups):
        points = sorted(groups[key])
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        series.append((labels[key], xs, ys))
    return series, xlabel, ylabel


def build_figure(req: FigureRequest):
    """Build (but do not save) the matplotlib figure for ``req``."""
    if req.figure_kind not in FIGURE_KINDS:
        raise FiggenError(
            f"unknown figure kind {req.figure_kind!r}; choose from {FIGURE_KINDS}"
        )
    rows = read_rows(req.csv_path)
    series, xlabel, ylabel = _series(req.figure_kind, rows)
    if not series:
        raise EmptySelectionError(
            f"no rows of {req.csv_path} match figure kind {req.figure_kind!r}"
        )
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    markers = ("o", "s", "^", "v", "D", "x", "*", "P")
    for i, (label, xs, ys) in enumerate(series):
        ax.plot(xs, ys, marker=markers[i % len(markers)], label=label)
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    fig.tight_layout()
    return fig


def render(req: FigureRequest) -> Path:
    """Render the figure to ``req.output_image_path`` and return the path."""
    fig = build_figure(req)
    try:
        fig.savefig(req.output_image_path, dpi=150)
    finally:
        plt.close(fig)
    return Path(req.output_image_path)
