"""Responsibility maps and minimal explanations by interpolation occlusion.

The search repeatedly hides parts of a spectrum and asks the classifier
whether its decision survives. Hidden runs are not zeroed: each maximal
occluded run is replaced by the straight line joining its nearest retained
(or array-boundary) flank values, optionally perturbed by Gaussian noise,
so mutants stay plausible spectra instead of gaining sharp cliffs.

One restart walks down a refinement path: split the current interval at
random cut points, build one mutant per sub-interval that keeps only that
sub-interval (the rest of the current interval is re-occluded on top of
the parent mutant), classify all of them, credit every mutant that keeps
the target label, and descend into the narrowest passing sub-interval.
Credits of 1 / width per retained bin accumulate across restarts; the map
is the accumulated credit divided by its maximum.

Extraction then grows a retained set chunk-wise in responsibility order
until the noise-free occlusion of its complement keeps the target label,
and shrinks it chunk-wise from the least responsible end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classify import CountingClassifier
from .core import Explanation, ResponsibilityMap, Spectrum
from .errors import (
    BudgetExhaustedError,
    NoSufficientSetError,
    TargetUnstableError,
    UnsplittableError,
)

_SEARCH_STREAM = 0
_SPLIT_ATTEMPTS = 100


def intervals_to_mask(intervals, n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    for lo, hi in intervals:
        if not (0 <= lo <= hi < n):
            raise ValueError(f"interval ({lo}, {hi}) leaves [0, {n})")
        mask[lo : hi + 1] = True
    return mask


def merge_bins_to_intervals(mask: np.ndarray) -> tuple[tuple[int, int], ...]:
    """Collapse a boolean bin mask into sorted inclusive (lo, hi) runs."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 1:
        raise ValueError("mask must be one-dimensional")
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    starts, ends = edges[0::2], edges[1::2] - 1
    return tuple((int(a), int(b)) for a, b in zip(starts, ends))


def occlude_values(values, keep, sigma=0.0, rng=None) -> np.ndarray:
    """Replace non-kept runs by flank-to-flank lines, plus optional noise.

    Kept bins come through bit-exact. A hidden run's line joins the values
    at its nearest kept neighbours; runs touching an array edge anchor on
    the original edge value itself, so hiding everything yields the line
    through the two endpoint values. Noise N(0, sigma^2) lands only on
    hidden bins.
    """
    values = np.asarray(values, dtype=np.float64)
    keep = np.asarray(keep, dtype=bool)
    if values.shape != keep.shape or values.ndim != 1:
        raise ValueError("values and keep must be equal-length 1-d arrays")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma > 0 and rng is None:
        raise ValueError("noisy occlusion needs an rng")

    out = values.copy()
    n = len(values)
    for lo, hi in merge_bins_to_intervals(~keep):
        left = lo - 1 if lo > 0 else lo
        right = hi + 1 if hi < n - 1 else hi
        if left == right:
            line = np.full(hi - lo + 1, values[left])
        else:
            t = (np.arange(lo, hi + 1) - left) / (right - left)
            line = values[left] + (values[right] - values[left]) * t
        out[lo : hi + 1] = line
    if sigma > 0:
        hidden = ~keep
        count = int(hidden.sum())
        if count:
            out[hidden] += sigma * rng.standard_normal(count)
    return out


def occlude(values, retained_intervals, sigma=0.0, rng=None) -> np.ndarray:
    """Occlusion with the retained region given as inclusive bin intervals."""
    values = np.asarray(values, dtype=np.float64)
    return occlude_values(values, intervals_to_mask(retained_intervals, len(values)),
                          sigma=sigma, rng=rng)


def split_segment(lo: int, hi: int, n_splits: int, min_bins: int, rng) -> tuple[tuple[int, int], ...]:
    """Cut [lo, hi] into up to n_splits + 1 pieces of at least min_bins each.

    Cut points are drawn uniformly without replacement; after 100 failed
    draws the cut count drops by one. A single deterministic cut at
    lo + min_bins always works once the interval holds two minimal pieces.
    """
    width = hi - lo + 1
    if min_bins < 1 or n_splits < 1:
        raise ValueError("n_splits and min_bins must be positive")
    if width < 2 * min_bins:
        raise UnsplittableError(
            f"interval [{lo}, {hi}] is {width} bins, need {2 * min_bins} to split"
        )

    k = min(n_splits, width // min_bins - 1)
    while k >= 1:
        for _ in range(_SPLIT_ATTEMPTS):
            cuts = np.sort(rng.choice(np.arange(lo + 1, hi + 1), size=k, replace=False))
            bounds = np.concatenate(([lo], cuts, [hi + 1]))
            if np.all(np.diff(bounds) >= min_bins):
                return tuple(
                    (int(bounds[i]), int(bounds[i + 1] - 1)) for i in range(len(bounds) - 1)
                )
        k -= 1
    return ((lo, lo + min_bins - 1), (lo + min_bins, hi))


@dataclass(frozen=True)
class Mutant:
    """One occluded variant: realized values and the interval under test."""

    values: np.ndarray
    retained: tuple[tuple[int, int], ...]

    @property
    def retained_width(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.retained)


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the responsibility search and extraction."""

    n_restarts: int = 20
    n_splits: int = 4
    max_depth: int = 10
    min_segment_bins: int = 4
    sigma_occlusion: float = 0.001
    seed: int = 0
    query_budget: int = 10000
    chunk_frac: float = 0.02
    credit_all_passing: bool = True

    def __post_init__(self):
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be at least 1")
        if self.n_splits < 1:
            raise ValueError("n_splits must be at least 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.min_segment_bins < 1:
            raise ValueError("min_segment_bins must be at least 1")
        if self.sigma_occlusion < 0:
            raise ValueError("sigma_occlusion must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if not (0 < self.chunk_frac <= 1):
            raise ValueError("chunk_frac must be in (0, 1]")
        floor = self.n_restarts * (self.n_splits + 1)
        if self.query_budget < floor:
            raise ValueError(
                f"query_budget {self.query_budget} cannot cover one level per "
                f"restart, need at least {floor}"
            )


class ResponsibilityAccumulator:
    """Collects per-mutant credits; materializes them in a canonical order.

    Credits are stored as (width, intervals) events and summed sorted by
    that key, so the raw map is a pure function of the credit multiset,
    not of discovery order.
    """

    def __init__(self, n_bins: int):
        self.n_bins = n_bins
        self._events: list[tuple[int, tuple[tuple[int, int], ...]]] = []
        self.passing_mutants = 0

    def credit(self, mutant: Mutant):
        self._events.append((mutant.retained_width, mutant.retained))
        self.passing_mutants += 1

    def raw(self) -> np.ndarray:
        out = np.zeros(self.n_bins, dtype=np.float64)
        for width, intervals in sorted(self._events):
            share = 1.0 / width
            for lo, hi in intervals:
                out[lo : hi + 1] += share
        return out


def normalize(raw: np.ndarray) -> np.ndarray:
    peak = float(raw.max()) if len(raw) else 0.0
    if peak <= 0.0:
        return np.zeros_like(raw)
    return raw / peak


@dataclass(frozen=True)
class SearchResult:
    target_label: int
    map_values: np.ndarray
    raw: np.ndarray
    passing_mutants: int
    queries_used: int
    budget_exhausted: bool
    restarts_completed: int


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit

    def spend(self) -> bool:
        if self.exhausted:
            return False
        self.used += 1
        return True


def _descend(values, target, classifier, config, acc, rng, budget) -> bool:
    """One restart. Returns False when the budget ran dry mid-walk."""
    n = len(values)
    lo, hi = 0, n - 1
    base = values
    for _ in range(config.max_depth):
        if hi - lo + 1 < 2 * config.min_segment_bins:
            return True
        pieces = split_segment(lo, hi, config.n_splits, config.min_segment_bins, rng)
        outside = np.ones(n, dtype=bool)
        outside[lo : hi + 1] = False

        passing = []
        for seg in pieces:
            keep = outside.copy()
            keep[seg[0] : seg[1] + 1] = True
            mutant = Mutant(
                values=occlude_values(base, keep, sigma=config.sigma_occlusion, rng=rng),
                retained=(seg,),
            )
            if not budget.spend():
                return False
            pred = classifier.predict(mutant.values)
            if pred.label == target:
                passing.append((mutant, pred))
                if config.credit_all_passing:
                    acc.credit(mutant)

        if not passing:
            return True
        chosen, chosen_pred = min(
            passing,
            key=lambda mp: (
                mp[0].retained_width,
                -mp[1].probability_of(target, classifier.n_classes),
                mp[0].retained[0][0],
            ),
        )
        if not config.credit_all_passing:
            acc.credit(chosen)
        (lo, hi), base = chosen.retained[0], chosen.values
    return True


def specrex_search(values, classifier, config: SearchConfig, target_label=None) -> SearchResult:
    """Run the full multi-restart search over one spectrum's intensities.

    The original values are classified first; that decision is the target
    every mutant is tested against. Passing a `target_label` asserts what
    the decision must be and raises TargetUnstableError on disagreement.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or len(values) < 2 * config.min_segment_bins:
        raise ValueError("values must be a 1-d array long enough to split")

    budget = _Budget(config.query_budget)
    budget.spend()
    observed = classifier.predict(values).label
    if target_label is not None and observed != target_label:
        raise TargetUnstableError(
            f"classifier answered {observed}, caller expected {target_label}"
        )
    target = observed

    acc = ResponsibilityAccumulator(len(values))
    restarts_completed = 0
    ran_dry = False
    for r in range(config.n_restarts):
        seq = np.random.SeedSequence(entropy=config.seed, spawn_key=(_SEARCH_STREAM, r))
        rng = np.random.default_rng(seq)
        if not _descend(values, target, classifier, config, acc, rng, budget):
            ran_dry = True
            break
        restarts_completed += 1

    raw = acc.raw()
    return SearchResult(
        target_label=target,
        map_values=normalize(raw),
        raw=raw,
        passing_mutants=acc.passing_mutants,
        queries_used=budget.used,
        budget_exhausted=ran_dry,
        restarts_completed=restarts_completed,
    )


def _chunks_by_responsibility(map_values: np.ndarray, chunk_frac: float) -> list[np.ndarray]:
    """Bin indices sorted by falling responsibility, cut into chunks."""
    n = len(map_values)
    order = np.lexsort((np.arange(n), -map_values))
    size = max(1, math.ceil(chunk_frac * n))
    return [order[i : i + size] for i in range(0, n, size)]


def _keeps_label(values, mask, target, classifier, budget) -> bool:
    if not budget.spend():
        raise BudgetExhaustedError(
            f"query budget ({budget.limit}) ran out during extraction"
        )
    return classifier.predict(occlude_values(values, mask, sigma=0.0)).label == target


def extract_minimal(values, target_label, map_values, classifier, config, budget=None) -> tuple[tuple[int, int], ...]:
    """Find a small retained-bin set whose noise-free occlusion keeps the label.

    Grows chunk by chunk in responsibility order, then walks the grown set
    from the least responsible chunk, dropping each chunk whose removal
    preserves the decision. The last remaining chunk is never dropped, so
    the result always holds at least one interval.
    """
    values = np.asarray(values, dtype=np.float64)
    map_values = np.asarray(map_values, dtype=np.float64)
    if values.shape != map_values.shape:
        raise ValueError("values and map_values must have equal shapes")
    if budget is None:
        budget = _Budget(config.query_budget)

    chunks = _chunks_by_responsibility(map_values, config.chunk_frac)
    n = len(values)
    mask = np.zeros(n, dtype=bool)
    grown = 0
    sufficient = False
    for chunk in chunks:
        mask[chunk] = True
        grown += 1
        if _keeps_label(values, mask, target_label, classifier, budget):
            sufficient = True
            break
    if not sufficient:
        raise NoSufficientSetError(
            f"no retained set keeps label {target_label}, even the full spectrum"
        )

    # Shrink: retry each grown chunk from the least responsible end.
    kept = list(range(grown))
    for idx in reversed(range(grown)):
        if len(kept) == 1:
            break
        trial = mask.copy()
        trial[chunks[idx]] = False
        if _keeps_label(values, trial, target_label, classifier, budget):
            mask = trial
            kept.remove(idx)
    return merge_bins_to_intervals(mask)


def explain_spectrum(spectrum: Spectrum, classifier, config: SearchConfig) -> Explanation:
    """Search plus extraction for one spectrum, with shared query accounting."""
    counting = CountingClassifier(classifier)
    result = specrex_search(spectrum.intensities, counting, config)

    budget = _Budget(config.query_budget)
    budget.used = result.queries_used
    intervals = extract_minimal(
        spectrum.intensities,
        result.target_label,
        result.map_values,
        counting,
        config,
        budget=budget,
    )
    return Explanation(
        intervals=intervals,
        label=result.target_label,
        map=ResponsibilityMap(axis=spectrum.axis, values=result.map_values),
        mutant_queries=counting.count,
    )
