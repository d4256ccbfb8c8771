"""Synthetic Raman-like spectra with known ground truth.

A spectrum is a smooth spline baseline plus Gaussian bands plus white noise.
Classes 0 and 1 carry fixed discriminating bands at known positions; class 2
is the catch-all built by deleting discriminating bands from a base class.
Three ready-made families are provided:

  single   one discriminating band per class (250 vs 750 1/cm), one
           randomly placed faux band per spectrum
  double   two discriminating bands per class (250 and 750 vs 150 and 650)
  complex  eighteen bands per class of varying breadth, only one of which
           discriminates (370 vs 1100 1/cm), with stronger noise

Band height uses a height factor H and width W: the band is scaled by
SF = H / sqrt(2 pi W) and drawn as SF / (W sqrt(2 pi)) * exp(-((x - mu)/W)^2 / 2),
so the band maximum is H / (2 pi W^(3/2)). The optional normalized-height
mode rescales each band so its maximum is exactly H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import PeakSpec, Spectrum, WavenumberAxis, frozen_array
from .errors import PlacementFailureError
from .spline import NaturalCubicSpline

SINGLE, DOUBLE, COMPLEX = "single", "double", "complex"
DATASET_NAMES = (SINGLE, DOUBLE, COMPLEX)

# Sub-stream tags so train, test, and calibration spectra never share draws.
TAG_TRAIN, TAG_TEST, TAG_CALIBRATION = 0, 1, 2
_SPLIT_TAGS = {"train": TAG_TRAIN, "test": TAG_TEST, "calibration": TAG_CALIBRATION}

FAUX_PLACEMENT_ATTEMPTS = 1000
SEPARATION_FACTOR = 4.0


@dataclass(frozen=True)
class PeakTemplate:
    """A fixed band position with per-spectrum height and width sampling ranges."""

    mu: float
    height_range: tuple[float, float]
    width_range: tuple[float, float]
    discriminating: bool = False

    def __post_init__(self):
        for name, (lo, hi) in (("height", self.height_range), ("width", self.width_range)):
            if not (0 < lo <= hi):
                raise ValueError(f"bad {name} range ({lo}, {hi})")


@dataclass(frozen=True)
class ClassSpec:
    """Generation recipe for one class.

    Fixed bands sit at template positions; faux bands get a fresh random
    position per spectrum, kept at least SEPARATION_FACTOR times the larger
    width away from every fixed band and from every listed exclusion zone
    (the discriminating positions of the other classes, so a faux band can
    never impersonate a class marker).
    """

    class_id: int
    fixed_peaks: tuple[PeakTemplate, ...]
    n_faux_peaks: int
    faux_mu_range: tuple[float, float]
    faux_height_range: tuple[float, float]
    faux_width_range: tuple[float, float]
    noise_scale: float
    everything_else: bool = False
    faux_exclusions: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be non-negative")
        if self.n_faux_peaks < 0:
            raise ValueError("n_faux_peaks must be non-negative")
        peaks = self.fixed_peaks
        for i, a in enumerate(peaks):
            for b in peaks[i + 1 :]:
                gap = abs(a.mu - b.mu)
                need = SEPARATION_FACTOR * max(a.width_range[1], b.width_range[1])
                if gap < need:
                    raise ValueError(
                        f"fixed bands at {a.mu} and {b.mu} are {gap} apart, "
                        f"need at least {need}"
                    )

    @property
    def discriminating_peaks(self) -> tuple[PeakTemplate, ...]:
        return tuple(t for t in self.fixed_peaks if t.discriminating)


@dataclass(frozen=True)
class Baseline:
    """Realized baseline of one spectrum: anchors plus the spline through them."""

    anchor_x: np.ndarray
    anchor_y: np.ndarray
    spline: NaturalCubicSpline

    def __post_init__(self):
        object.__setattr__(self, "anchor_x", frozen_array(self.anchor_x))
        object.__setattr__(self, "anchor_y", frozen_array(self.anchor_y))


@dataclass(frozen=True)
class SpectrumParts:
    """Everything that went into one spectrum besides the noise."""

    baseline: Baseline
    peaks: tuple[PeakSpec, ...]


@dataclass(frozen=True)
class DatasetSpec:
    """Full recipe for one dataset: axis, three class specs, sizes, seed."""

    name: str
    axis: WavenumberAxis
    class_specs: tuple[ClassSpec, ClassSpec, ClassSpec]
    n_train: int
    n_test: int
    seed: int
    n_anchors: int = 5
    baseline_y_range: tuple[float, float] = (0.1, 1.0)
    normalized_height: bool = False
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.class_specs) != 3:
            raise ValueError("a dataset needs exactly three class specs")
        if self.n_train < 1 or self.n_test < 1:
            raise ValueError("n_train and n_test must be at least 1")
        if self.n_anchors < 2:
            raise ValueError("baseline needs at least 2 anchors")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        for cid in (0, 1):
            if not self.class_specs[cid].discriminating_peaks:
                raise ValueError(f"class {cid} needs at least one discriminating band")

    @property
    def n_classes(self) -> int:
        return 3


BASELINE_ANCHOR_ATTEMPTS = 1000


def sample_baseline(axis, rng, n_anchors=5, y_range=(0.1, 1.0)) -> Baseline:
    """Draw anchor positions (both endpoints forced) and heights, fit the spline.

    Interior anchors are uniform but rejected until every pair sits at least
    span / (2 (n_anchors - 1)) apart. Without that floor, two anchors landing
    close together bend the spline into a sharp bump the same size and shape
    as a real band, and no classifier can tell them apart.
    """
    min_gap = (axis.end - axis.start) / (2.0 * (n_anchors - 1))
    for _ in range(BASELINE_ANCHOR_ATTEMPTS):
        interior = rng.uniform(axis.start, axis.end, size=n_anchors - 2)
        xs = np.sort(np.concatenate(([axis.start], interior, [axis.end])))
        if np.all(np.diff(xs) >= min_gap):
            break
    else:  # pragma: no cover - acceptance odds make this effectively unreachable
        raise PlacementFailureError(
            f"no admissible anchor layout after {BASELINE_ANCHOR_ATTEMPTS} attempts"
        )
    ys = rng.uniform(y_range[0], y_range[1], size=n_anchors)
    return Baseline(anchor_x=xs, anchor_y=ys, spline=NaturalCubicSpline(xs, ys))


def peak_profile(axis, peak: PeakSpec, normalized_height=False) -> np.ndarray:
    """Evaluate one Gaussian band over the axis bins."""
    if not axis.contains(peak.mu):
        raise ValueError(f"peak position {peak.mu} leaves the axis")
    sf = peak.height / math.sqrt(2.0 * math.pi * peak.width)
    amplitude = sf / (peak.width * math.sqrt(2.0 * math.pi))
    if normalized_height:
        amplitude = peak.height
    z = (axis.wavenumbers - peak.mu) / peak.width
    return amplitude * np.exp(-0.5 * z * z)


def _sample_peaks(cs: ClassSpec, axis, rng) -> tuple[PeakSpec, ...]:
    """Realize fixed bands, then place faux bands by rejection sampling."""
    realized = []
    for t in cs.fixed_peaks:
        height = float(rng.uniform(*t.height_range))
        width = float(rng.uniform(*t.width_range))
        realized.append(PeakSpec(t.mu, height, width, t.discriminating))

    for _ in range(cs.n_faux_peaks):
        width = float(rng.uniform(*cs.faux_width_range))
        height = float(rng.uniform(*cs.faux_height_range))
        obstacles = [(p.mu, p.width) for p in realized]
        obstacles += [(mu, w) for mu, w in cs.faux_exclusions]
        for _ in range(FAUX_PLACEMENT_ATTEMPTS):
            mu = float(rng.uniform(*cs.faux_mu_range))
            ok = all(
                abs(mu - omu) >= SEPARATION_FACTOR * max(width, ow)
                for omu, ow in obstacles
            )
            if ok:
                realized.append(PeakSpec(mu, height, width, False))
                break
        else:
            raise PlacementFailureError(
                f"no admissible faux-band position after {FAUX_PLACEMENT_ATTEMPTS} attempts"
            )
    return tuple(realized)


def synth_spectrum(
    cs: ClassSpec,
    axis: WavenumberAxis,
    rng: np.random.Generator,
    *,
    n_anchors=5,
    baseline_y_range=(0.1, 1.0),
    normalized_height=False,
    spectrum_id="",
    with_parts=False,
):
    """Generate one labelled spectrum from a class spec.

    Draw order is fixed (baseline anchors, fixed bands, faux bands, noise),
    so one seed always reproduces the identical spectrum. Ground truth is
    [mu - 2W, mu + 2W] for each realized discriminating band, clipped to
    the axis; classes without discriminating bands get no ground truth.
    """
    baseline = sample_baseline(axis, rng, n_anchors=n_anchors, y_range=baseline_y_range)
    peaks = _sample_peaks(cs, axis, rng)

    values = np.asarray(baseline.spline(axis.wavenumbers), dtype=np.float64)
    for p in peaks:
        values = values + peak_profile(axis, p, normalized_height=normalized_height)
    if cs.noise_scale > 0:
        values = values + cs.noise_scale * rng.standard_normal(axis.n_bins)

    truth = sorted(
        (max(axis.start, p.mu - 2.0 * p.width), min(axis.end, p.mu + 2.0 * p.width))
        for p in peaks
        if p.discriminating
    )
    spectrum = Spectrum(
        axis=axis,
        intensities=values,
        id=spectrum_id,
        label=cs.class_id,
        ground_truth=tuple(truth) if truth else None,
    )
    if with_parts:
        return spectrum, SpectrumParts(baseline=baseline, peaks=peaks)
    return spectrum


def _everything_else_spec(ds: DatasetSpec, rng) -> ClassSpec:
    """Per-spectrum recipe for class 2: a base class minus some class markers.

    The base class is drawn uniformly from classes 0 and 1, then a uniformly
    chosen non-empty subset of its discriminating bands is removed. Whatever
    discriminating bands survive are kept as plain bands, so the spectrum
    genuinely belongs to no class.
    """
    base = ds.class_specs[int(rng.integers(0, 2))]
    disc_count = len(base.discriminating_peaks)
    removal_mask = int(rng.integers(1, 2**disc_count))
    kept = []
    disc_index = 0
    for t in base.fixed_peaks:
        if t.discriminating:
            if not (removal_mask >> disc_index) & 1:
                kept.append(replace(t, discriminating=False))
            disc_index += 1
        else:
            kept.append(t)
    return replace(base, class_id=2, fixed_peaks=tuple(kept), everything_else=True)


def _spectrum_rng(ds: DatasetSpec, tag: int, class_id: int, index: int):
    seq = np.random.SeedSequence(entropy=ds.seed, spawn_key=(tag, class_id, index))
    return np.random.default_rng(seq)


def dataset_spectrum(ds: DatasetSpec, split: str, class_id: int, index: int) -> Spectrum:
    """Generate the spectrum at (split, class, index) of a dataset.

    Each position owns an independent seed stream derived from the dataset
    seed, so any single spectrum can be regenerated without the others.
    """
    tag = _SPLIT_TAGS[split]
    rng = _spectrum_rng(ds, tag, class_id, index)
    cs = ds.class_specs[class_id] if class_id < 2 else _everything_else_spec(ds, rng)
    sid = f"{ds.name}-{split}-c{class_id}-{index:05d}"
    return synth_spectrum(
        cs,
        ds.axis,
        rng,
        n_anchors=ds.n_anchors,
        baseline_y_range=ds.baseline_y_range,
        normalized_height=ds.normalized_height,
        spectrum_id=sid,
    )


def build_dataset(ds: DatasetSpec, out_dir) -> dict:
    """Write manifest.json, train.jsonl, and test.jsonl under `out_dir`."""
    from pathlib import Path

    from .fileio import write_dataset, write_json

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    counts = {}
    for split, n in (("train", ds.n_train), ("test", ds.n_test)):
        spectra = [
            dataset_spectrum(ds, split, cid, i)
            for cid in range(ds.n_classes)
            for i in range(n)
        ]
        write_dataset(out / f"{split}.jsonl", spectra)
        counts[split] = len(spectra)
    write_json(out / "manifest.json", manifest_dict(ds))
    return {
        "manifest": str(out / "manifest.json"),
        "train": str(out / "train.jsonl"),
        "test": str(out / "test.jsonl"),
        "counts": counts,
    }


def _template_dict(t: PeakTemplate) -> dict:
    return {
        "mu": t.mu,
        "height_range": list(t.height_range),
        "width_range": list(t.width_range),
        "discriminating": t.discriminating,
    }


def _class_dict(cs: ClassSpec) -> dict:
    return {
        "class_id": cs.class_id,
        "everything_else": cs.everything_else,
        "fixed_peaks": [_template_dict(t) for t in cs.fixed_peaks],
        "n_faux_peaks": cs.n_faux_peaks,
        "faux_mu_range": list(cs.faux_mu_range),
        "faux_height_range": list(cs.faux_height_range),
        "faux_width_range": list(cs.faux_width_range),
        "faux_exclusions": [list(e) for e in cs.faux_exclusions],
        "noise_scale": cs.noise_scale,
    }


def manifest_dict(ds: DatasetSpec) -> dict:
    return {
        "axis": {"start": ds.axis.start, "end": ds.axis.end, "n_bins": ds.axis.n_bins},
        "dataset": ds.name,
        "classes": [_class_dict(cs) for cs in ds.class_specs],
        "seed": ds.seed,
        "n_train": ds.n_train,
        "n_test": ds.n_test,
        "n_anchors": ds.n_anchors,
        "baseline_y_range": list(ds.baseline_y_range),
        "normalized_height": ds.normalized_height,
        "files": {"train": "train.jsonl", "test": "test.jsonl"},
        "notes": list(ds.notes),
    }


def _template_from_dict(d: dict) -> PeakTemplate:
    return PeakTemplate(
        mu=float(d["mu"]),
        height_range=tuple(d["height_range"]),
        width_range=tuple(d["width_range"]),
        discriminating=bool(d["discriminating"]),
    )


def _class_from_dict(d: dict) -> ClassSpec:
    return ClassSpec(
        class_id=int(d["class_id"]),
        fixed_peaks=tuple(_template_from_dict(t) for t in d["fixed_peaks"]),
        n_faux_peaks=int(d["n_faux_peaks"]),
        faux_mu_range=tuple(d["faux_mu_range"]),
        faux_height_range=tuple(d["faux_height_range"]),
        faux_width_range=tuple(d["faux_width_range"]),
        noise_scale=float(d["noise_scale"]),
        everything_else=bool(d["everything_else"]),
        faux_exclusions=tuple(tuple(e) for e in d["faux_exclusions"]),
    )


def dataset_from_manifest(manifest: dict) -> DatasetSpec:
    axis = WavenumberAxis(
        start=manifest["axis"]["start"],
        end=manifest["axis"]["end"],
        n_bins=manifest["axis"]["n_bins"],
    )
    return DatasetSpec(
        name=manifest["dataset"],
        axis=axis,
        class_specs=tuple(_class_from_dict(c) for c in manifest["classes"]),
        n_train=int(manifest["n_train"]),
        n_test=int(manifest["n_test"]),
        seed=int(manifest["seed"]),
        n_anchors=int(manifest.get("n_anchors", 5)),
        baseline_y_range=tuple(manifest.get("baseline_y_range", (0.1, 1.0))),
        normalized_height=bool(manifest.get("normalized_height", False)),
        notes=tuple(manifest.get("notes", ())),
    )


# Default band parameters. The height factor range is set so realized band
# maxima land around 0.25 to 1.25 A.U., clearly dominant over the baseline
# wiggle and the noise floor; widths follow the band tables below.
FIXED_HEIGHT = (150.0, 250.0)
FIXED_WIDTH = (10.0, 20.0)
NOISE_SCALE = {SINGLE: 0.002, DOUBLE: 0.002, COMPLEX: 0.006}

# Seventeen shared bands for the complex family as (position, max width).
# Widths vary per band; every adjacent pair keeps 4 * max(width) separation,
# which caps the widest bands at 27 on this axis.
COMPLEX_SHARED_BANDS = (
    (50.0, 15.0), (140.0, 20.0), (230.0, 15.0), (310.0, 10.0),
    (440.0, 15.0), (520.0, 20.0), (610.0, 22.0), (710.0, 25.0),
    (820.0, 27.0), (930.0, 20.0), (1020.0, 15.0), (1180.0, 15.0),
    (1270.0, 22.0), (1370.0, 25.0), (1480.0, 27.0), (1590.0, 25.0),
    (1700.0, 12.0),
)
COMPLEX_DISC_WIDTH = (10.0, 14.0)
COMPLEX_DISC_MU = {0: 370.0, 1: 1100.0}

DOUBLE_POSITION_NOTE = (
    "double dataset class-1 bands sit at 150 and 650 1/cm; an alternative "
    "convention places them at 150 and 750, which this generator does not use"
)


def _simple_class(cid, positions, axis, exclusions, noise) -> ClassSpec:
    fixed = tuple(
        PeakTemplate(mu, FIXED_HEIGHT, FIXED_WIDTH, discriminating=True)
        for mu in positions
    )
    margin = 3.0 * FIXED_WIDTH[1]
    return ClassSpec(
        class_id=cid,
        fixed_peaks=fixed,
        n_faux_peaks=1,
        faux_mu_range=(axis.start + margin, axis.end - margin),
        faux_height_range=FIXED_HEIGHT,
        faux_width_range=FIXED_WIDTH,
        noise_scale=noise,
        faux_exclusions=exclusions,
    )


def _complex_class(cid, axis, exclusions) -> ClassSpec:
    shared = tuple(
        PeakTemplate(mu, FIXED_HEIGHT, (0.7 * w, w), discriminating=False)
        for mu, w in COMPLEX_SHARED_BANDS
    )
    disc = (PeakTemplate(COMPLEX_DISC_MU[cid], FIXED_HEIGHT, COMPLEX_DISC_WIDTH, True),)
    return ClassSpec(
        class_id=cid,
        fixed_peaks=tuple(sorted(shared + disc, key=lambda t: t.mu)),
        n_faux_peaks=0,
        faux_mu_range=(axis.start, axis.end),
        faux_height_range=FIXED_HEIGHT,
        faux_width_range=COMPLEX_DISC_WIDTH,
        noise_scale=NOISE_SCALE[COMPLEX],
        faux_exclusions=exclusions,
    )


def dataset_spec(name, *, seed=0, n_train=100, n_test=100, normalized_height=False) -> DatasetSpec:
    """Build the spec for one of the ready-made dataset families."""
    if name not in DATASET_NAMES:
        raise ValueError(f"unknown dataset {name!r}, expected one of {DATASET_NAMES}")

    notes = []
    if name == COMPLEX:
        axis = WavenumberAxis(0.0, 1750.0, 1750)
        exclusions = tuple((mu, COMPLEX_DISC_WIDTH[1]) for mu in COMPLEX_DISC_MU.values())
        cs0 = _complex_class(0, axis, exclusions)
        cs1 = _complex_class(1, axis, exclusions)
        noise = NOISE_SCALE[COMPLEX]
    else:
        axis = WavenumberAxis(0.0, 1000.0, 1000)
        positions = {
            SINGLE: ((250.0,), (750.0,)),
            DOUBLE: ((250.0, 750.0), (150.0, 650.0)),
        }[name]
        if name == DOUBLE:
            notes.append(DOUBLE_POSITION_NOTE)
        all_disc = tuple(
            (mu, FIXED_WIDTH[1]) for group in positions for mu in group
        )
        noise = NOISE_SCALE[name]
        cs0 = _simple_class(0, positions[0], axis, all_disc, noise)
        cs1 = _simple_class(1, positions[1], axis, all_disc, noise)

    catch_all = ClassSpec(
        class_id=2,
        fixed_peaks=(),
        n_faux_peaks=cs0.n_faux_peaks,
        faux_mu_range=cs0.faux_mu_range,
        faux_height_range=cs0.faux_height_range,
        faux_width_range=cs0.faux_width_range,
        noise_scale=noise,
        everything_else=True,
        faux_exclusions=cs0.faux_exclusions,
    )
    return DatasetSpec(
        name=name,
        axis=axis,
        class_specs=(cs0, cs1, catch_all),
        n_train=n_train,
        n_test=n_test,
        seed=seed,
        normalized_height=normalized_height,
        notes=tuple(notes),
    )
