import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from specrex.core import PeakSpec, WavenumberAxis
from specrex.errors import PlacementFailureError
from specrex.fileio import read_dataset, read_json
from specrex.simulate import (
    COMPLEX_DISC_MU,
    DATASET_NAMES,
    SEPARATION_FACTOR,
    ClassSpec,
    PeakTemplate,
    build_dataset,
    dataset_from_manifest,
    dataset_spec,
    dataset_spectrum,
    manifest_dict,
    peak_profile,
    sample_baseline,
    synth_spectrum,
    _everything_else_spec,
    _sample_peaks,
)


class TestPeakProfile:
    def test_unit_height_unit_width_maximum(self, axis):
        # Height factor 1 at width 1 tops out at 1 / (2 pi): the scale factor
        # is 1/sqrt(2 pi) and the Gaussian prefactor contributes the rest.
        peak = PeakSpec(mu=500.0, height=1.0, width=1.0)
        dense = WavenumberAxis(499.0, 501.0, 2001)
        values = peak_profile(dense, peak)
        assert abs(values.max() - 1.0 / (2.0 * math.pi)) < 1e-12

    def test_maximum_scales_as_h_over_w_to_three_halves(self):
        dense = WavenumberAxis(400.0, 600.0, 20001)
        for h, w in ((2.0, 1.0), (1.0, 4.0), (150.0, 10.0)):
            values = peak_profile(dense, PeakSpec(mu=500.0, height=h, width=w))
            expected = h / (2.0 * math.pi * w**1.5)
            assert values.max() == pytest.approx(expected, rel=1e-9)

    def test_normalized_height_mode(self):
        dense = WavenumberAxis(400.0, 600.0, 20001)
        peak = PeakSpec(mu=500.0, height=0.7, width=12.0)
        values = peak_profile(dense, peak, normalized_height=True)
        assert values.max() == pytest.approx(0.7, rel=1e-12)

    def test_shape_is_gaussian(self):
        axis = WavenumberAxis(0.0, 1000.0, 1000)
        peak = PeakSpec(mu=250.0, height=200.0, width=15.0)
        values = peak_profile(axis, peak)
        x = axis.wavenumbers
        amp = 200.0 / math.sqrt(2 * math.pi * 15.0) / (15.0 * math.sqrt(2 * math.pi))
        expected = amp * np.exp(-0.5 * ((x - 250.0) / 15.0) ** 2)
        np.testing.assert_allclose(values, expected, rtol=0, atol=1e-15)

    def test_off_axis_position_rejected(self, axis):
        with pytest.raises(ValueError):
            peak_profile(axis, PeakSpec(mu=2000.0, height=1.0, width=1.0))


class TestBaseline:
    def test_reproduces_anchors(self, axis, rng):
        for _ in range(30):
            b = sample_baseline(axis, rng)
            np.testing.assert_allclose(b.spline(b.anchor_x), b.anchor_y,
                                       atol=1e-12, rtol=0)

    def test_endpoints_are_anchored(self, axis, rng):
        b = sample_baseline(axis, rng)
        assert b.anchor_x[0] == axis.start
        assert b.anchor_x[-1] == axis.end
        assert len(b.anchor_x) == 5

    def test_anchor_minimum_gap(self, axis, rng):
        min_gap = (axis.end - axis.start) / 8.0
        for _ in range(200):
            b = sample_baseline(axis, rng)
            assert np.diff(b.anchor_x).min() >= min_gap

    def test_heights_within_range(self, axis, rng):
        for _ in range(50):
            b = sample_baseline(axis, rng, y_range=(0.1, 1.0))
            assert np.all(b.anchor_y >= 0.1) and np.all(b.anchor_y <= 1.0)

    def test_matches_reference_spline(self, axis, rng):
        b = sample_baseline(axis, rng)
        ref = CubicSpline(b.anchor_x, b.anchor_y, bc_type="natural")
        np.testing.assert_allclose(
            b.spline(axis.wavenumbers), ref(axis.wavenumbers), atol=1e-10, rtol=0
        )


def simple_class(noise=0.0, n_faux=1):
    return ClassSpec(
        class_id=0,
        fixed_peaks=(PeakTemplate(250.0, (150.0, 250.0), (10.0, 20.0), True),),
        n_faux_peaks=n_faux,
        faux_mu_range=(60.0, 940.0),
        faux_height_range=(150.0, 250.0),
        faux_width_range=(10.0, 20.0),
        noise_scale=noise,
        faux_exclusions=((250.0, 20.0), (750.0, 20.0)),
    )


class TestSynthSpectrum:
    def test_noise_free_equals_parts_sum(self, axis, rng):
        s, parts = synth_spectrum(simple_class(noise=0.0), axis, rng, with_parts=True)
        rebuilt = np.asarray(parts.baseline.spline(axis.wavenumbers))
        for p in parts.peaks:
            rebuilt = rebuilt + peak_profile(axis, p)
        np.testing.assert_allclose(s.intensities, rebuilt, atol=1e-12, rtol=0)

    def test_ground_truth_is_two_widths_each_side(self, axis, rng):
        s, parts = synth_spectrum(simple_class(noise=0.0), axis, rng, with_parts=True)
        disc = [p for p in parts.peaks if p.discriminating]
        assert len(disc) == 1
        (lo, hi), = s.ground_truth
        assert lo == pytest.approx(disc[0].mu - 2 * disc[0].width)
        assert hi == pytest.approx(disc[0].mu + 2 * disc[0].width)

    def test_ground_truth_clipped_to_axis(self, rng):
        axis = WavenumberAxis(0.0, 1000.0, 1000)
        cs = ClassSpec(
            class_id=0,
            fixed_peaks=(PeakTemplate(15.0, (150.0, 250.0), (10.0, 20.0), True),),
            n_faux_peaks=0,
            faux_mu_range=(60.0, 940.0),
            faux_height_range=(150.0, 250.0),
            faux_width_range=(10.0, 20.0),
            noise_scale=0.0,
        )
        s = synth_spectrum(cs, axis, rng)
        (lo, _), = s.ground_truth
        assert lo == 0.0

    def test_noise_scale_perturbs_at_right_magnitude(self, axis):
        rng_a = np.random.default_rng(5)
        rng_b = np.random.default_rng(5)
        quiet = synth_spectrum(simple_class(noise=0.0), axis, rng_a)
        loud = synth_spectrum(simple_class(noise=0.002), axis, rng_b)
        residual = loud.intensities - quiet.intensities
        assert 0.0015 < residual.std() < 0.0025

    def test_faux_peaks_respect_exclusions(self, axis, rng):
        cs = simple_class(noise=0.0)
        for _ in range(200):
            peaks = _sample_peaks(cs, axis, rng)
            faux = [p for p in peaks if not p.discriminating]
            assert len(faux) == 1
            f = faux[0]
            for mu, w in ((250.0, 20.0), (750.0, 20.0)):
                assert abs(f.mu - mu) >= SEPARATION_FACTOR * max(f.width, w)

    def test_placement_failure_when_no_room(self, axis, rng):
        cs = ClassSpec(
            class_id=0,
            fixed_peaks=(PeakTemplate(250.0, (150.0, 250.0), (10.0, 20.0), True),),
            n_faux_peaks=1,
            faux_mu_range=(245.0, 255.0),  # entirely inside the exclusion zone
            faux_height_range=(150.0, 250.0),
            faux_width_range=(10.0, 20.0),
            noise_scale=0.0,
        )
        with pytest.raises(PlacementFailureError):
            _sample_peaks(cs, axis, rng)

    def test_separation_validator_rejects_close_bands(self):
        with pytest.raises(ValueError):
            ClassSpec(
                class_id=0,
                fixed_peaks=(
                    PeakTemplate(250.0, (1.0, 2.0), (10.0, 20.0), True),
                    PeakTemplate(300.0, (1.0, 2.0), (10.0, 20.0), True),
                ),
                n_faux_peaks=0,
                faux_mu_range=(0.0, 1000.0),
                faux_height_range=(1.0, 2.0),
                faux_width_range=(10.0, 20.0),
                noise_scale=0.0,
            )


class TestEverythingElse:
    def test_drops_at_least_one_marker(self):
        ds = dataset_spec("double", seed=3)
        rng = np.random.default_rng(0)
        for _ in range(100):
            cs = _everything_else_spec(ds, rng)
            assert cs.class_id == 2
            assert cs.everything_else
            assert not cs.discriminating_peaks
            base_positions = {t.mu for spec in ds.class_specs[:2]
                              for t in spec.discriminating_peaks}
            kept = {t.mu for t in cs.fixed_peaks if t.mu in base_positions}
            # A double-class base has two markers; at least one must be gone.
            assert len(kept) < 2

    def test_single_dataset_class2_has_no_markers(self):
        ds = dataset_spec("single", seed=3)
        rng = np.random.default_rng(1)
        for _ in range(50):
            cs = _everything_else_spec(ds, rng)
            marker_positions = {250.0, 750.0}
            assert not any(t.mu in marker_positions for t in cs.fixed_peaks)

    def test_class2_spectrum_has_no_ground_truth(self):
        ds = dataset_spec("single", seed=3)
        s = dataset_spectrum(ds, "test", 2, 0)
        assert s.ground_truth is None
        assert s.label == 2


class TestDatasetSpecs:
    def test_family_axes(self):
        assert dataset_spec("single").axis == WavenumberAxis(0.0, 1000.0, 1000)
        assert dataset_spec("double").axis == WavenumberAxis(0.0, 1000.0, 1000)
        assert dataset_spec("complex").axis == WavenumberAxis(0.0, 1750.0, 1750)

    def test_discriminating_positions(self):
        single = dataset_spec("single")
        assert [t.mu for t in single.class_specs[0].discriminating_peaks] == [250.0]
        assert [t.mu for t in single.class_specs[1].discriminating_peaks] == [750.0]
        double = dataset_spec("double")
        assert [t.mu for t in double.class_specs[0].discriminating_peaks] == [250.0, 750.0]
        assert [t.mu for t in double.class_specs[1].discriminating_peaks] == [150.0, 650.0]

    def test_complex_band_counts(self):
        ds = dataset_spec("complex")
        for cid in (0, 1):
            cs = ds.class_specs[cid]
            assert len(cs.fixed_peaks) == 18
            disc = cs.discriminating_peaks
            assert len(disc) == 1
            assert disc[0].mu == COMPLEX_DISC_MU[cid]
            assert cs.n_faux_peaks == 0

    def test_complex_bands_fit_axis(self):
        ds = dataset_spec("complex")
        for cs in ds.class_specs[:2]:
            for t in cs.fixed_peaks:
                assert t.mu - 3 * t.width_range[1] >= ds.axis.start
                assert t.mu + 3 * t.width_range[1] <= ds.axis.end

    def test_noise_scales(self):
        assert dataset_spec("single").class_specs[0].noise_scale == 0.002
        assert dataset_spec("double").class_specs[0].noise_scale == 0.002
        assert dataset_spec("complex").class_specs[0].noise_scale == 0.006

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            dataset_spec("mystery")

    @pytest.mark.parametrize("name", DATASET_NAMES)
    def test_manifest_round_trip(self, name):
        ds = dataset_spec(name, seed=9, n_train=7, n_test=3)
        back = dataset_from_manifest(manifest_dict(ds))
        assert back == ds


class TestDeterminism:
    def test_same_seed_same_spectrum(self):
        ds = dataset_spec("single", seed=42)
        a = dataset_spectrum(ds, "train", 1, 5)
        b = dataset_spectrum(ds, "train", 1, 5)
        assert np.array_equal(a.intensities, b.intensities)
        assert a.ground_truth == b.ground_truth

    def test_splits_and_indices_differ(self):
        ds = dataset_spec("single", seed=42)
        train = dataset_spectrum(ds, "train", 0, 0)
        test = dataset_spectrum(ds, "test", 0, 0)
        nxt = dataset_spectrum(ds, "train", 0, 1)
        assert not np.array_equal(train.intensities, test.intensities)
        assert not np.array_equal(train.intensities, nxt.intensities)

    def test_build_dataset_files_byte_identical(self, tmp_path):
        ds = dataset_spec("single", seed=11, n_train=3, n_test=2)
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        build_dataset(ds, a_dir)
        build_dataset(ds, b_dir)
        for name in ("manifest.json", "train.jsonl", "test.jsonl"):
            assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()

    def test_written_dataset_reads_back(self, tmp_path):
        ds = dataset_spec("double", seed=5, n_train=2, n_test=2)
        out = build_dataset(ds, tmp_path / "d")
        manifest = read_json(out["manifest"])
        back = dataset_from_manifest(manifest)
        axis = back.axis
        train = read_dataset(out["train"], axis)
        assert len(train) == 6  # 3 classes x 2
        regenerated = dataset_spectrum(back, "train", 0, 0)
        assert np.array_equal(train[0].intensities, regenerated.intensities)
        assert train[0].id == "double-train-c0-00000"
