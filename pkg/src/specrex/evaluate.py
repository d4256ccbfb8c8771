"""Scoring of responsibility maps and explanations against known truth.

A map is judged two ways: how many peaks it contains (fewer is sharper)
and whether it points where the class marker actually sits. Localization
comes in two modes: argmax (the single strongest bin falls inside some
ground-truth interval) and all-peaks (every ground-truth interval is
touched by some explanation interval).

Rates are taken over correctly classified spectra only: an explanation of
a wrong decision has no business matching the truth of the right one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Spectrum


@dataclass(frozen=True)
class PeakCountConfig:
    """Peak detection knobs: relative prominence floor and minimum spacing."""

    prominence_frac: float = 0.10
    min_separation_bins: int = 5

    def __post_init__(self):
        if not (0 <= self.prominence_frac <= 1):
            raise ValueError("prominence_frac must be in [0, 1]")
        if self.min_separation_bins < 1:
            raise ValueError("min_separation_bins must be at least 1")


def _prominence(values: np.ndarray, p: int) -> float:
    """Topographic prominence of the strict local maximum at `p`.

    Walk each side until a strictly higher sample (or the array edge),
    tracking the minimum seen; the higher of the two minima is the base.
    """
    h = values[p]
    left_min = h
    i = p - 1
    while i >= 0 and values[i] <= h:
        if values[i] < left_min:
            left_min = values[i]
        i -= 1
    right_min = h
    j = p + 1
    n = len(values)
    while j < n and values[j] <= h:
        if values[j] < right_min:
            right_min = values[j]
        j += 1
    return float(h - max(left_min, right_min))


def find_map_peaks(values, config: PeakCountConfig | None = None) -> tuple[int, ...]:
    """Indices of prominent, well-separated strict local maxima.

    Candidates need both neighbours strictly lower, so plateaus and array
    endpoints never count; a constant map has no peaks. The prominence
    floor is relative to the value range, which makes the count invariant
    under positive affine rescaling. When two candidates sit closer than
    the minimum separation, the more prominent one survives (lower index
    on a tie).
    """
    config = config or PeakCountConfig()
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if len(v) < 3:
        return ()
    span = float(v.max() - v.min())
    if span <= 0.0:
        return ()

    interior = np.arange(1, len(v) - 1)
    is_peak = (v[interior] > v[interior - 1]) & (v[interior] > v[interior + 1])
    candidates = interior[is_peak]
    floor = config.prominence_frac * span
    scored = []
    for p in candidates:
        prom = _prominence(v, int(p))
        if prom >= floor:
            scored.append((int(p), prom))

    accepted: list[int] = []
    for p, _ in sorted(scored, key=lambda t: (-t[1], t[0])):
        if all(abs(int(p) - a) >= config.min_separation_bins for a in accepted):
            accepted.append(int(p))
    return tuple(sorted(accepted))


def count_peaks(values, config: PeakCountConfig | None = None) -> int:
    return len(find_map_peaks(values, config))


def argmax_hit(map_values, axis, ground_truth) -> bool:
    """True when the strongest map bin's wavenumber lies in some truth interval."""
    v = np.asarray(map_values, dtype=np.float64)
    w = axis.wavenumber_of(int(np.argmax(v)))
    return any(lo <= w <= hi for lo, hi in ground_truth)


def all_intervals_hit(intervals_cm, ground_truth) -> bool:
    """True when every truth interval overlaps some explanation interval."""
    return all(
        any(a <= hi and lo <= b for a, b in intervals_cm)
        for lo, hi in ground_truth
    )


@dataclass(frozen=True)
class ExplanationRecord:
    """The evaluated facts about one explained spectrum."""

    spectrum_id: str
    true_label: int | None
    predicted_label: int
    intervals_cm: tuple[tuple[float, float], ...]
    map_values: np.ndarray
    mutant_queries: int


@dataclass(frozen=True)
class ClassEval:
    class_id: int
    n_spectra: int
    n_correct: int
    peak_count_mean: float | None
    peak_count_sd: float | None
    argmax_hit_rate: float | None
    all_hits_rate: float | None
    mean_width_cm: float | None
    queries_mean: float | None
    queries_min: int | None
    queries_max: int | None

    def to_dict(self) -> dict:
        return {
            "class_id": self.class_id,
            "n_spectra": self.n_spectra,
            "n_correct": self.n_correct,
            "peak_count_mean": self.peak_count_mean,
            "peak_count_sd": self.peak_count_sd,
            "argmax_hit_rate": self.argmax_hit_rate,
            "all_hits_rate": self.all_hits_rate,
            "mean_width_cm": self.mean_width_cm,
            "queries_mean": self.queries_mean,
            "queries_min": self.queries_min,
            "queries_max": self.queries_max,
        }


@dataclass(frozen=True)
class EvalReport:
    dataset: str
    classes: tuple[ClassEval, ...]
    n_spectra: int
    n_correct: int

    @property
    def accuracy(self) -> float | None:
        if self.n_spectra == 0:
            return None
        return self.n_correct / self.n_spectra

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "n_spectra": self.n_spectra,
            "n_correct": self.n_correct,
            "accuracy": self.accuracy,
            "classes": [c.to_dict() for c in self.classes],
        }


CSV_COLUMNS = (
    "class_id", "n_spectra", "n_correct", "peak_count_mean", "peak_count_sd",
    "argmax_hit_rate", "all_hits_rate", "mean_width_cm",
    "queries_mean", "queries_min", "queries_max",
)


def report_csv_rows(report: EvalReport) -> list[list]:
    rows = [list(CSV_COLUMNS)]
    for c in report.classes:
        d = c.to_dict()
        rows.append([d[k] for k in CSV_COLUMNS])
    return rows


def _mean(xs) -> float | None:
    xs = list(xs)
    return float(np.mean(xs)) if xs else None


def _sd(xs) -> float | None:
    xs = list(xs)
    return float(np.std(xs)) if xs else None


def _rate(hits) -> float | None:
    hits = list(hits)
    return sum(hits) / len(hits) if hits else None


def evaluate_records(
    spectra: list[Spectrum],
    records: list[ExplanationRecord],
    dataset: str = "",
    peak_config: PeakCountConfig | None = None,
) -> EvalReport:
    """Aggregate per-class metrics over paired spectra and explanations.

    Localization rates skip spectra without ground truth (the catch-all
    class) and spectra the model got wrong; peak counts and query stats
    cover every correctly classified spectrum of the class.
    """
    if len(spectra) != len(records):
        raise ValueError("spectra and records must pair up one to one")
    peak_config = peak_config or PeakCountConfig()

    class_ids = sorted({s.label for s in spectra if s.label is not None})
    evals = []
    n_correct_total = 0
    for cid in class_ids:
        pairs = [(s, r) for s, r in zip(spectra, records) if s.label == cid]
        correct = [(s, r) for s, r in pairs if r.predicted_label == s.label]
        n_correct_total += len(correct)

        peak_counts = [count_peaks(r.map_values, peak_config) for _, r in correct]
        widths = [
            sum(b - a for a, b in r.intervals_cm) for _, r in correct
        ]
        queries = [r.mutant_queries for _, r in correct]
        with_truth = [(s, r) for s, r in correct if s.ground_truth]
        argmax_hits = [
            argmax_hit(r.map_values, s.axis, s.ground_truth) for s, r in with_truth
        ]
        all_hits = [
            all_intervals_hit(r.intervals_cm, s.ground_truth) for s, r in with_truth
        ]
        evals.append(ClassEval(
            class_id=cid,
            n_spectra=len(pairs),
            n_correct=len(correct),
            peak_count_mean=_mean(peak_counts),
            peak_count_sd=_sd(peak_counts),
            argmax_hit_rate=_rate(argmax_hits),
            all_hits_rate=_rate(all_hits),
            mean_width_cm=_mean(widths),
            queries_mean=_mean(queries),
            queries_min=min(queries) if queries else None,
            queries_max=max(queries) if queries else None,
        ))
    return EvalReport(
        dataset=dataset,
        classes=tuple(evals),
        n_spectra=len(spectra),
        n_correct=n_correct_total,
    )


def _fmt_cell(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        return f"{x:.3f}" if math.isfinite(x) else str(x)
    return str(x)


def format_report_table(report: EvalReport) -> str:
    """Fixed-width text table for terminal output."""
    header = ["class", "n", "correct", "peaks", "peaks sd", "argmax hit",
              "all hits", "width 1/cm", "queries"]
    rows = [header]
    for c in report.classes:
        rows.append([
            str(c.class_id), str(c.n_spectra), str(c.n_correct),
            _fmt_cell(c.peak_count_mean), _fmt_cell(c.peak_count_sd),
            _fmt_cell(c.argmax_hit_rate), _fmt_cell(c.all_hits_rate),
            _fmt_cell(c.mean_width_cm), _fmt_cell(c.queries_mean),
        ])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    acc = _fmt_cell(report.accuracy)
    lines.append(f"overall accuracy {acc} ({report.n_correct}/{report.n_spectra})")
    return "\n".join(lines)
