"""On-disk formats: spectra as JSON lines, maps as CSV, explanations as JSON.

Every floating point field is written with 17 significant digits, which is
enough for a write/read round trip to reproduce the exact same doubles.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Spectrum, WavenumberAxis, validate_spectrum
from .errors import ParseError

_FLOAT_FMT = ".17g"


def fmt_float(x: float) -> str:
    return format(float(x), _FLOAT_FMT)


def _spectrum_line(s: Spectrum) -> str:
    label = "null" if s.label is None else str(s.label)
    ints = ",".join(fmt_float(v) for v in s.intensities)
    if s.ground_truth is None:
        gt = "null"
    else:
        gt = "[" + ",".join(f"[{fmt_float(lo)},{fmt_float(hi)}]" for lo, hi in s.ground_truth) + "]"
    return (
        f'{{"id":{json.dumps(s.id)},"label":{label},'
        f'"intensities":[{ints}],"ground_truth":{gt}}}'
    )


def write_dataset(path, spectra) -> None:
    """Write spectra to a JSON-lines file, one record per spectrum."""
    path = Path(path)
    for s in spectra:
        validate_spectrum(s)
    with path.open("w", encoding="utf-8") as fh:
        for s in spectra:
            fh.write(_spectrum_line(s))
            fh.write("\n")


def _spectrum_from_obj(obj, axis: WavenumberAxis, line_no: int) -> Spectrum:
    if not isinstance(obj, dict):
        raise ParseError("record is not a JSON object", line=line_no)
    try:
        gt = obj.get("ground_truth")
        s = Spectrum(
            axis=axis,
            intensities=obj["intensities"],
            id=obj.get("id", ""),
            label=obj.get("label"),
            ground_truth=None if gt is None else tuple((lo, hi) for lo, hi in gt),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad spectrum record: {exc}", line=line_no) from exc
    validate_spectrum(s)
    return s


def read_dataset(path, axis: WavenumberAxis) -> list[Spectrum]:
    """Read a JSON-lines spectra file. An empty file yields an empty list."""
    path = Path(path)
    spectra = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=line_no) from exc
            spectra.append(_spectrum_from_obj(obj, axis, line_no))
    return spectra


MAP_CSV_HEADER = "wavenumber,responsibility"


def write_map_csv(path, axis: WavenumberAxis, values) -> None:
    """Write one row per bin under a `wavenumber,responsibility` header.

    Accepts any per-bin value array so externally produced saliency maps,
    which may be negative or unnormalized, share the format.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or len(values) != axis.n_bins:
        raise ParseError(f"map length {len(values)} does not match axis ({axis.n_bins} bins)")
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(MAP_CSV_HEADER + "\n")
        for i, v in enumerate(values):
            fh.write(f"{fmt_float(axis.wavenumber_of(i))},{fmt_float(v)}\n")


def read_map_csv(path) -> tuple[WavenumberAxis, np.ndarray]:
    """Read a map CSV; the axis is reconstructed from the wavenumber column."""
    path = Path(path)
    wavenumbers = []
    values = []
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != MAP_CSV_HEADER:
            raise ParseError(f"expected header {MAP_CSV_HEADER!r}, got {header!r}", line=1)
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError("expected two comma-separated columns", line=line_no)
            try:
                wavenumbers.append(float(parts[0]))
                values.append(float(parts[1]))
            except ValueError as exc:
                raise ParseError(f"bad float: {exc}", line=line_no) from exc
    if not values:
        raise ParseError("map file has no data rows")
    axis = WavenumberAxis(start=wavenumbers[0], end=wavenumbers[-1], n_bins=len(values))
    return axis, np.asarray(values, dtype=np.float64)


def write_explanation_json(path, explanation) -> None:
    """Write `{"label", "intervals_cm", "mutant_queries"}` for one explanation."""
    ivs = ",".join(
        f"[{fmt_float(lo)},{fmt_float(hi)}]" for lo, hi in explanation.intervals_cm()
    )
    text = (
        f'{{"label":{explanation.label},"intervals_cm":[{ivs}],'
        f'"mutant_queries":{explanation.mutant_queries}}}\n'
    )
    Path(path).write_text(text, encoding="utf-8")


def read_explanation_json(path) -> dict:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg}") from exc
    for key in ("label", "intervals_cm", "mutant_queries"):
        if key not in obj:
            raise ParseError(f"explanation file {path} lacks {key!r}")
    obj["intervals_cm"] = [(float(lo), float(hi)) for lo, hi in obj["intervals_cm"]]
    return obj


def write_json(path, obj) -> None:
    """Deterministic JSON dump used for manifests and reports."""
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg}") from exc
