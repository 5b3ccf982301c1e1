from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGSIZE = (6.4, 4.2)
DPI = 130


class PlotInputError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    """One figure: one or more series, a model, and a reference rate."""

    csv_paths: tuple
    model: str                   # power | exponential
    out_path: str
    reference: float | None = None
    labels: tuple = ()
    scale_by_t: bool = False
    title: str = ""


def read_series(path):
    if not os.path.exists(path):
        raise PlotInputError(f"series file not found: {path}")
    t, v = [], []
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise PlotInputError(f"empty series file: {path}")
        for row in reader:
            if len(row) < 2:
                continue
            t.append(float(row[0]))
            v.append(float(row[1]))
    if not t:
        raise PlotInputError(f"series has no samples: {path}")
    return np.asarray(t), np.asarray(v)


def _guide(ax, t, v, model, reference):
    """Reference line anchored at the series midpoint."""
    mid = len(t) // 2
    t_mid, v_mid = t[mid], v[mid]
    if model == "power":
        ref = v_mid * (t / t_mid) ** reference
        label = f"reference slope {reference:g}"
    else:
        ref = v_mid * np.exp(-reference * (t - t_mid))
        label = f"reference rate {reference:g}"
    ax.plot(t, ref, "k--", linewidth=1.2, label=label)


def plot_series(spec: PlotSpec) -> str:
    """Render one figure; returns the image path."""
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    t_ref = v_ref = None
    for k, path in enumerate(spec.csv_paths):
        t, v = read_series(path)
        if spec.scale_by_t:
            v = v * t
        label = spec.labels[k] if k < len(spec.labels) else os.path.basename(path)
        ax.plot(t, v, marker="o", markersize=2.5, linewidth=1.0, label=label)
        if t_ref is None:
            t_ref, v_ref = t, v
    if spec.reference is not None:
        _guide(ax, t_ref, v_ref, spec.model, spec.reference)
    if spec.model == "power":
        ax.set_xscale("log")
        ax.set_yscale("log")
    else:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    kind = os.path.basename(spec.csv_paths[0]).rsplit(".", 1)[0]
    ax.set_ylabel(("t * " if spec.scale_by_t else "") + kind)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    os.makedirs(os.path.dirname(spec.out_path) or ".", exist_ok=True)
    fig.savefig(spec.out_path)
    plt.close(fig)
    return spec.out_path


def _read_summary(path, expected_header_start):
    if not os.path.exists(path):
        raise PlotInputError(f"summary file not found: {path}")
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or not rows[0][0].startswith(expected_header_start):
        raise PlotInputError(f"unrecognized summary format: {path}")
    header = rows[0]
    return [dict(zip(header, r)) for r in rows[1:] if r]


def plot_run_dir(run_dir: str, out_dir: str) -> list:
    """Render one figure per fit and per bound recorded in a run directory.

    The reference exponent/rate is the `expect` column of fits.csv (falling
    back to the fitted value when no expectation was declared); bound figures
    use the verified threshold.
    """
    images = []
    fits = _read_summary(os.path.join(run_dir, "fits.csv"), "name")
    for row in fits:
        series_path = os.path.join(run_dir, row["series"] + ".csv")
        reference = float(row["expect"]) if row["expect"] else float(row["value"])
        spec = PlotSpec(
            csv_paths=(series_path,),
            model=row["model"],
            reference=reference,
            out_path=os.path.join(out_dir, f"fit_{row['name']}.png"),
            title=f"{row['name']}: fitted {float(row['value']):.4g}"
                  f" (r2 = {float(row['r2']):.5g})",
        )
        images.append(plot_series(spec))
    bounds = _read_summary(os.path.join(run_dir, "bounds.csv"), "name")
    for row in bounds:
        series_path = os.path.join(run_dir, row["series"] + ".csv")
        scale = row["scale_by_t"] == "1"
        exponent = float(row["exponent"])
        spec = PlotSpec(
            csv_paths=(series_path,),
            model="power" if exponent != 0.0 else "exponential",
            reference=None,
            out_path=os.path.join(out_dir, f"bound_{row['name']}.png"),
            scale_by_t=scale,
            title=f"{row['name']}: threshold {float(row['threshold']):.4g}",
        )
        # draw the series plus the verified threshold curve
        fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
        t, v = read_series(series_path)
        if scale:
            v = v * t
        ax.plot(t, v, marker="o", markersize=2.5, linewidth=1.0,
                label=os.path.basename(series_path).rsplit(".", 1)[0])
        thr = float(row["threshold"]) * t ** exponent
        ax.plot(t, thr, "k--", linewidth=1.2, label="verified bound")
        ax.set_xscale("log")
        if exponent != 0.0:
            ax.set_yscale("log")
        ax.set_xlabel("t")
        ax.set_ylabel(("t * " if scale else "") + row["series"])
        ax.set_title(spec.title)
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.25)
        fig.tight_layout()
        os.makedirs(out_dir, exist_ok=True)
        fig.savefig(spec.out_path)
        plt.close(fig)
        images.append(spec.out_path)
    return images
