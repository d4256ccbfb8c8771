import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specrex.core import Explanation, ResponsibilityMap, Spectrum, WavenumberAxis
from specrex.errors import ParseError
from specrex.fileio import (
    fmt_float,
    read_dataset,
    read_explanation_json,
    read_map_csv,
    write_dataset,
    write_explanation_json,
    write_map_csv,
)

AXIS = WavenumberAxis(0.0, 1000.0, 1000)

finite_floats = st.floats(
    allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12
)


@given(finite_floats)
def test_float_format_round_trips_exactly(x):
    assert float(fmt_float(x)) == x


def test_float_format_handles_negative_zero():
    assert float(fmt_float(-0.0)) == 0.0


class TestDatasetJsonl:
    def _spectra(self, rng, n=5):
        out = []
        for i in range(n):
            gt = ((200.0, 300.0),) if i % 2 == 0 else None
            out.append(Spectrum(
                axis=AXIS,
                intensities=rng.standard_normal(AXIS.n_bins) * 1e-3 + 0.5,
                id=f"sp-{i:03d}",
                label=i % 3,
                ground_truth=gt,
            ))
        return out

    def test_round_trip_bit_exact(self, tmp_path, rng):
        spectra = self._spectra(rng)
        path = tmp_path / "data.jsonl"
        write_dataset(path, spectra)
        back = read_dataset(path, AXIS)
        assert len(back) == len(spectra)
        for a, b in zip(spectra, back):
            assert a.id == b.id and a.label == b.label
            assert np.array_equal(a.intensities, b.intensities)
            assert a.ground_truth == b.ground_truth

    def test_lines_are_json(self, tmp_path, rng):
        path = tmp_path / "data.jsonl"
        write_dataset(path, self._spectra(rng, 2))
        for line in path.read_text().splitlines():
            obj = json.loads(line)
            assert set(obj) == {"id", "label", "intensities", "ground_truth"}

    def test_blank_lines_skipped(self, tmp_path, rng):
        path = tmp_path / "data.jsonl"
        write_dataset(path, self._spectra(rng, 2))
        padded = tmp_path / "padded.jsonl"
        padded.write_text("\n" + path.read_text() + "\n\n")
        assert len(read_dataset(padded, AXIS)) == 2

    def test_empty_file_is_empty_dataset(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert read_dataset(path, AXIS) == []

    def test_parse_error_carries_line_number(self, tmp_path, rng):
        path = tmp_path / "data.jsonl"
        write_dataset(path, self._spectra(rng, 2))
        lines = path.read_text().splitlines()
        lines.insert(1, "{not json")
        broken = tmp_path / "broken.jsonl"
        broken.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as exc:
            read_dataset(broken, AXIS)
        assert exc.value.line == 2
        assert "line 2" in str(exc.value)

    def test_missing_key_is_parse_error(self, tmp_path):
        path = tmp_path / "data.jsonl"
        path.write_text('{"id": "a", "label": 0}\n')
        with pytest.raises(ParseError):
            read_dataset(path, AXIS)


class TestMapCsv:
    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
                    min_size=8, max_size=40))
    def test_round_trip(self, values):
        import tempfile, os
        axis = WavenumberAxis(0.0, 100.0, len(values))
        fd, path = tempfile.mkstemp(suffix=".csv")
        os.close(fd)
        try:
            write_map_csv(path, axis, np.array(values))
            back_axis, back = read_map_csv(path)
            assert back_axis.n_bins == axis.n_bins
            assert back_axis.start == axis.start and back_axis.end == axis.end
            assert np.array_equal(back, np.array(values))
        finally:
            os.unlink(path)

    def test_header_line(self, tmp_path):
        path = tmp_path / "m.csv"
        write_map_csv(path, AXIS, np.zeros(AXIS.n_bins))
        assert path.read_text().splitlines()[0] == "wavenumber,responsibility"

    def test_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n0.0,0.5\n1.0,0.5\n" * 4)
        with pytest.raises(ParseError) as exc:
            read_map_csv(path)
        assert exc.value.line == 1

    def test_rejects_non_numeric_cell(self, tmp_path):
        path = tmp_path / "m.csv"
        write_map_csv(path, WavenumberAxis(0.0, 9.0, 10), np.zeros(10))
        lines = path.read_text().splitlines()
        lines[3] = "2.0,spam"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as exc:
            read_map_csv(path)
        assert exc.value.line == 4

    def test_accepts_values_outside_unit_interval(self, tmp_path):
        # External tools may hand over signed or unnormalized maps.
        path = tmp_path / "m.csv"
        values = np.linspace(-3.0, 5.0, 20)
        write_map_csv(path, WavenumberAxis(0.0, 19.0, 20), values)
        _, back = read_map_csv(path)
        assert np.array_equal(back, values)


class TestExplanationJson:
    def _explanation(self):
        v = np.zeros(AXIS.n_bins)
        v[100:130] = 1.0
        return Explanation(
            intervals=((100, 129), (400, 449)),
            label=1,
            map=ResponsibilityMap(axis=AXIS, values=v),
            mutant_queries=321,
        )

    def test_schema_is_exactly_three_keys(self, tmp_path):
        path = tmp_path / "e.json"
        write_explanation_json(path, self._explanation())
        obj = json.loads(path.read_text())
        assert set(obj) == {"label", "intervals_cm", "mutant_queries"}

    def test_round_trip(self, tmp_path):
        e = self._explanation()
        path = tmp_path / "e.json"
        write_explanation_json(path, e)
        back = read_explanation_json(path)
        assert back["label"] == e.label
        assert back["mutant_queries"] == e.mutant_queries
        expected = [(a, b) for a, b in e.intervals_cm()]
        assert [tuple(p) for p in back["intervals_cm"]] == expected

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "e.json"
        path.write_text('{"label": 0, "intervals_cm": []}')
        with pytest.raises(ParseError):
            read_explanation_json(path)
