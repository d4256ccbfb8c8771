"""Core domain types: wavenumber axes, spectra, predictions, maps, explanations.

All types here are immutable after construction; arrays are stored as
read-only float64 views so shared instances are safe to pass around.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import AxisMismatchError, BadIntervalError, NonFiniteError

MIN_AXIS_BINS = 8


def frozen_array(values, dtype=np.float64) -> np.ndarray:
    """Copy `values` into a read-only ndarray."""
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WavenumberAxis:
    """Uniform grid of Raman-shift positions, in 1/cm, over [start, end]."""

    start: float
    end: float
    n_bins: int

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "end", float(self.end))
        object.__setattr__(self, "n_bins", int(self.n_bins))
        if not self.end > self.start:
            raise ValueError(f"axis end ({self.end}) must exceed start ({self.start})")
        if self.n_bins < MIN_AXIS_BINS:
            raise ValueError(f"axis needs at least {MIN_AXIS_BINS} bins, got {self.n_bins}")

    @property
    def step(self) -> float:
        return (self.end - self.start) / (self.n_bins - 1)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        # linspace pins both endpoints exactly; accumulating steps does not.
        return frozen_array(np.linspace(self.start, self.end, self.n_bins))

    def wavenumber_of(self, bin_index: int) -> float:
        return float(self.wavenumbers[bin_index])

    def bin_of(self, wavenumber: float) -> int:
        """Index of the bin nearest to `wavenumber`, clipped to the axis."""
        i = round((wavenumber - self.start) / self.step)
        return int(min(max(i, 0), self.n_bins - 1))

    def contains(self, wavenumber: float) -> bool:
        return self.start <= wavenumber <= self.end


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One spectrum on an axis, with optional class label and truth intervals.

    `ground_truth` holds [lo, hi] wavenumber intervals around the features
    that define the labelled class; None means no intervals are known.
    """

    axis: WavenumberAxis
    intensities: np.ndarray
    id: str = ""
    label: int | None = None
    ground_truth: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "intensities", frozen_array(self.intensities))
        if self.label is not None:
            object.__setattr__(self, "label", int(self.label))
        if self.ground_truth is not None:
            gt = tuple((float(lo), float(hi)) for lo, hi in self.ground_truth)
            object.__setattr__(self, "ground_truth", gt)

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            self.axis == other.axis
            and self.id == other.id
            and self.label == other.label
            and self.ground_truth == other.ground_truth
            and np.array_equal(self.intensities, other.intensities)
        )

    __hash__ = None


def validate_spectrum(s: Spectrum) -> None:
    """Raise unless `s` satisfies every structural invariant.

    NonFiniteError for NaN or infinite intensities, AxisMismatchError when
    the array length disagrees with the axis, BadIntervalError for truth
    intervals that are malformed, out of range, or not pairwise disjoint.
    """
    if s.intensities.ndim != 1 or len(s.intensities) != s.axis.n_bins:
        raise AxisMismatchError(
            f"spectrum {s.id!r} has {len(s.intensities)} intensities "
            f"but the axis has {s.axis.n_bins} bins"
        )
    if not np.all(np.isfinite(s.intensities)):
        raise NonFiniteError(f"spectrum {s.id!r} contains non-finite intensities")
    if s.ground_truth is not None:
        for lo, hi in s.ground_truth:
            if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
                raise BadIntervalError(f"bad ground-truth interval [{lo}, {hi}]")
            if lo < s.axis.start or hi > s.axis.end:
                raise BadIntervalError(
                    f"ground-truth interval [{lo}, {hi}] leaves the axis "
                    f"[{s.axis.start}, {s.axis.end}]"
                )
        ordered = sorted(s.ground_truth)
        for (_, prev_hi), (next_lo, _) in zip(ordered, ordered[1:]):
            if next_lo <= prev_hi:
                raise BadIntervalError("ground-truth intervals overlap")


@dataclass(frozen=True)
class PeakSpec:
    """One realized Gaussian band: centre, height factor, width, and role."""

    mu: float
    height: float
    width: float
    discriminating: bool = False

    def __post_init__(self):
        if not self.height > 0:
            raise ValueError(f"peak height must be positive, got {self.height}")
        if not self.width > 0:
            raise ValueError(f"peak width must be positive, got {self.width}")


@dataclass(frozen=True, eq=False)
class Prediction:
    """A classifier verdict: integer label, optional class probabilities."""

    label: int
    probabilities: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "label", int(self.label))
        if self.label < 0:
            raise ValueError(f"label must be non-negative, got {self.label}")
        if self.probabilities is not None:
            p = frozen_array(self.probabilities)
            if p.ndim != 1 or len(p) <= self.label:
                raise ValueError("probability vector does not cover the label")
            if not np.all(np.isfinite(p)):
                raise ValueError("probabilities must be finite")
            if np.any(p < -1e-9) or np.any(p > 1 + 1e-9):
                raise ValueError("probabilities must lie in [0, 1]")
            if abs(float(p.sum()) - 1.0) > 1e-6:
                raise ValueError(f"probabilities sum to {p.sum()}, not 1")
            if p[self.label] < p.max() - 1e-12:
                raise ValueError("label must index a maximal probability")
            object.__setattr__(self, "probabilities", p)

    def probability_of(self, label: int, n_classes: int) -> float:
        """Probability for `label`, treating an absent vector as uniform."""
        if self.probabilities is None:
            return 1.0 / n_classes
        return float(self.probabilities[label])


@dataclass(frozen=True, eq=False)
class ResponsibilityMap:
    """Per-bin responsibility in [0, 1]; 1 marks the most responsible bins."""

    axis: WavenumberAxis
    values: np.ndarray

    def __post_init__(self):
        v = frozen_array(self.values)
        if v.ndim != 1 or len(v) != self.axis.n_bins:
            raise AxisMismatchError(
                f"map has {len(v)} values but the axis has {self.axis.n_bins} bins"
            )
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("responsibility values must be finite")
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("responsibility values must lie in [0, 1]")
        object.__setattr__(self, "values", v)

    @property
    def argmax_bin(self) -> int:
        return int(np.argmax(self.values))

    @property
    def argmax_wavenumber(self) -> float:
        return self.axis.wavenumber_of(self.argmax_bin)


@dataclass(frozen=True)
class Explanation:
    """A minimal sufficient set of retained bin intervals for one decision.

    `intervals` are inclusive [lo, hi] bin-index pairs, sorted and disjoint.
    `mutant_queries` counts every classifier call spent producing this result.
    """

    intervals: tuple[tuple[int, int], ...]
    label: int
    map: ResponsibilityMap
    mutant_queries: int

    def __post_init__(self):
        ivs = tuple((int(lo), int(hi)) for lo, hi in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "label", int(self.label))
        object.__setattr__(self, "mutant_queries", int(self.mutant_queries))
        if self.mutant_queries < 0:
            raise ValueError("mutant_queries must be non-negative")
        n = self.map.axis.n_bins
        for lo, hi in ivs:
            if not (0 <= lo <= hi < n):
                raise BadIntervalError(f"bin interval [{lo}, {hi}] leaves the axis")
        for (_, prev_hi), (next_lo, _) in zip(ivs, ivs[1:]):
            if next_lo <= prev_hi:
                raise BadIntervalError("explanation intervals must be sorted and disjoint")

    def intervals_cm(self) -> list[tuple[float, float]]:
        ax = self.map.axis
        return [(ax.wavenumber_of(lo), ax.wavenumber_of(hi)) for lo, hi in self.intervals]

    @property
    def width_bins(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    @property
    def width_cm(self) -> float:
        return self.width_bins * self.map.axis.step
