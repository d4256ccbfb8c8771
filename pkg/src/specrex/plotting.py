"""Figure rendering for spectra, maps, and evaluation reports.

All output is SVG through the Agg-free vector backend with a pinned hash
salt and no timestamp metadata, so the same inputs produce byte-identical
files on every run.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "specrex"

import matplotlib.pyplot as plt
import numpy as np

from .core import Spectrum
from .evaluate import EvalReport
from .fileio import fmt_float

_SAVE_KW = {"format": "svg", "metadata": {"Date": None}}

TRUTH_COLOR = "#f2c14e"
EXPLANATION_COLOR = "#2a9d8f"
MAP_COLOR = "#7a4fbf"
SPECTRUM_COLOR = "#33424f"


def render_spectrum_figure(
    spectrum: Spectrum,
    out_path,
    map_values=None,
    intervals_cm=None,
    title=None,
):
    """Spectrum with truth bands, plus the responsibility map when given."""
    x = spectrum.axis.wavenumbers
    n_rows = 2 if map_values is not None else 1
    fig, axes = plt.subplots(
        n_rows, 1, figsize=(9.0, 3.0 * n_rows), sharex=True, squeeze=False
    )
    top = axes[0][0]
    top.plot(x, spectrum.intensities, color=SPECTRUM_COLOR, linewidth=0.9)
    top.set_ylabel("intensity (A.U.)")
    if title:
        top.set_title(title)
    for lo, hi in spectrum.ground_truth or ():
        top.axvspan(lo, hi, color=TRUTH_COLOR, alpha=0.35, linewidth=0)
    for lo, hi in intervals_cm or ():
        top.axvspan(lo, hi, color=EXPLANATION_COLOR, alpha=0.30, linewidth=0)

    if map_values is not None:
        bottom = axes[1][0]
        bottom.fill_between(x, np.asarray(map_values, dtype=np.float64),
                            color=MAP_COLOR, alpha=0.8, linewidth=0)
        bottom.set_ylabel("responsibility")
        bottom.set_ylim(-0.02, 1.05)
    axes[-1][0].set_xlabel("wavenumber (1/cm)")
    fig.tight_layout()
    fig.savefig(out_path, **_SAVE_KW)
    plt.close(fig)


def write_plot_csv(path, spectrum: Spectrum, map_values=None):
    """Per-bin table next to the figure: wavenumber, intensity, map value."""
    x = spectrum.axis.wavenumbers
    with_map = map_values is not None
    header = "wavenumber,intensity" + (",responsibility" if with_map else "")
    lines = [header]
    for i in range(spectrum.axis.n_bins):
        cells = [fmt_float(x[i]), fmt_float(spectrum.intensities[i])]
        if with_map:
            cells.append(fmt_float(float(map_values[i])))
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def render_report_figure(report: EvalReport, out_path):
    """Two panels: localization rates and peak-count statistics per class."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(9.0, 3.6))

    rated = [c for c in report.classes if c.argmax_hit_rate is not None]
    pos = np.arange(len(rated))
    if rated:
        left.bar(pos - 0.18, [c.argmax_hit_rate for c in rated], width=0.36,
                 color=MAP_COLOR, label="argmax hit")
        all_rates = [
            c.all_hits_rate if c.all_hits_rate is not None else 0.0 for c in rated
        ]
        left.bar(pos + 0.18, all_rates, width=0.36,
                 color=EXPLANATION_COLOR, label="all intervals hit")
        left.set_xticks(pos, [f"class {c.class_id}" for c in rated])
    left.set_ylim(0, 1.05)
    left.set_ylabel("rate over correct predictions")
    left.legend(loc="lower right", frameon=False)

    counted = [c for c in report.classes if c.peak_count_mean is not None]
    pos = np.arange(len(counted))
    if counted:
        right.bar(
            pos,
            [c.peak_count_mean for c in counted],
            yerr=[c.peak_count_sd or 0.0 for c in counted],
            width=0.5, color=SPECTRUM_COLOR, capsize=3,
        )
        right.set_xticks(pos, [f"class {c.class_id}" for c in counted])
    right.set_ylabel("map peaks (mean, sd)")

    fig.suptitle(f"{report.dataset}: {report.n_correct}/{report.n_spectra} correct")
    fig.tight_layout()
    fig.savefig(out_path, **_SAVE_KW)
    plt.close(fig)
