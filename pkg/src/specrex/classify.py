"""Classifiers over spectra.

Two implementations share the Classifier protocol (an object with
`n_classes` and `predict(intensities) -> Prediction`):

  MatchedFilterModel  built-in template correlator, calibrated offline
  ExternalClassifier  child process speaking newline-delimited JSON

The matched filter scores a band position by slicing the window
[mu - 3w, mu + 3w], subtracting the straight line through the window's
endpoint values, and taking the dot product with a unit-normalized,
likewise endpoint-corrected Gaussian template. A class fires when all of
its templates score above the threshold; the label is the unique firing
class, or the catch-all class when zero or both fire.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
from dataclasses import dataclass

import numpy as np

from .core import Prediction, WavenumberAxis, frozen_array
from .errors import (
    EmptyInputError,
    ExternalProtocolError,
    HandshakeError,
    IdMismatchError,
    NonFiniteError,
    SpawnError,
    WindowOutOfRangeError,
)
from .simulate import DatasetSpec, dataset_spectrum

WINDOW_HALF_WIDTHS = 3.0


def _endpoint_line(values: np.ndarray) -> np.ndarray:
    n = len(values)
    if n == 1:
        return values.copy()
    t = np.linspace(0.0, 1.0, n)
    return values[0] + (values[-1] - values[0]) * t


@dataclass(frozen=True)
class Template:
    """One matched-filter probe: a Gaussian band shape at a fixed position."""

    mu: float
    width: float
    lo_bin: int
    hi_bin: int
    shape: np.ndarray  # unit norm, endpoint-corrected

    @staticmethod
    def build(axis: WavenumberAxis, mu: float, width: float) -> "Template":
        if width <= 0:
            raise ValueError("template width must be positive")
        lo = axis.bin_of(mu - WINDOW_HALF_WIDTHS * width)
        hi = axis.bin_of(mu + WINDOW_HALF_WIDTHS * width)
        if hi - lo < 2:
            raise WindowOutOfRangeError(
                f"window around {mu} spans {hi - lo + 1} bins, need at least 3"
            )
        x = axis.wavenumbers[lo : hi + 1]
        raw = np.exp(-0.5 * ((x - mu) / width) ** 2)
        corrected = raw - _endpoint_line(raw)
        norm = float(np.linalg.norm(corrected))
        if norm == 0.0:
            raise WindowOutOfRangeError(f"window around {mu} has a degenerate template")
        return Template(mu=mu, width=width, lo_bin=lo, hi_bin=hi,
                        shape=frozen_array(corrected / norm))


def matched_filter_score(intensities: np.ndarray, template: Template) -> float:
    """Endpoint-corrected window dotted with the template shape."""
    window = np.asarray(intensities, dtype=np.float64)[template.lo_bin : template.hi_bin + 1]
    corrected = window - _endpoint_line(window)
    return float(corrected @ template.shape)


@dataclass(frozen=True)
class CalibrationResult:
    """Threshold fit summary.

    When present and absent score populations overlap, `separable` is False
    and the threshold minimizes the number of misordered training windows
    instead of sitting at the midpoint of the gap.
    """

    threshold: float
    separable: bool
    present_min: float
    absent_max: float
    n_present: int
    n_absent: int
    training_errors: int = 0


def calibrate_threshold(present: np.ndarray, absent: np.ndarray) -> CalibrationResult:
    """Pick a score threshold splitting present-band from absent-band windows."""
    present = np.asarray(present, dtype=np.float64)
    absent = np.asarray(absent, dtype=np.float64)
    if present.size == 0 or absent.size == 0:
        raise EmptyInputError("calibration needs both present and absent window scores")
    if not (np.all(np.isfinite(present)) and np.all(np.isfinite(absent))):
        raise NonFiniteError("calibration scores must be finite")

    p_min = float(present.min())
    a_max = float(absent.max())
    if a_max < p_min:
        return CalibrationResult(
            threshold=0.5 * (a_max + p_min),
            separable=True,
            present_min=p_min,
            absent_max=a_max,
            n_present=present.size,
            n_absent=absent.size,
        )

    # Overlap: scan candidate cuts for the fewest misclassified windows.
    candidates = np.unique(np.concatenate((present, absent)))
    best_theta, best_err = candidates[0], present.size + absent.size
    for c in candidates:
        err = int(np.sum(present <= c)) + int(np.sum(absent > c))
        if err < best_err:
            best_theta, best_err = c, err
    return CalibrationResult(
        threshold=float(best_theta),
        separable=False,
        present_min=p_min,
        absent_max=a_max,
        n_present=present.size,
        n_absent=absent.size,
        training_errors=best_err,
    )


@dataclass(frozen=True)
class MatchedFilterModel:
    """Template correlator over a fixed axis with one template set per class."""

    axis: WavenumberAxis
    class_templates: tuple[tuple[Template, ...], ...]  # for classes 0 and 1
    threshold: float
    calibration: CalibrationResult | None = None
    catch_all: int = 2

    @property
    def n_classes(self) -> int:
        return 3

    def scores(self, intensities) -> tuple[tuple[float, ...], ...]:
        values = np.asarray(intensities, dtype=np.float64)
        if values.shape != (self.axis.n_bins,):
            raise ValueError(f"expected {self.axis.n_bins} intensities, got {values.shape}")
        return tuple(
            tuple(matched_filter_score(values, t) for t in templates)
            for templates in self.class_templates
        )

    def fires(self, intensities) -> tuple[bool, bool]:
        return decide_fires(self.scores(intensities), self.threshold)

    def predict(self, intensities) -> Prediction:
        scores = self.scores(intensities)
        label = decide_label(decide_fires(scores, self.threshold), self.catch_all)
        return Prediction(label=label)


def decide_fires(scores, threshold: float) -> tuple[bool, bool]:
    return tuple(all(s > threshold for s in class_scores) for class_scores in scores)


def decide_label(fires: tuple[bool, bool], catch_all: int = 2) -> int:
    if fires[0] and not fires[1]:
        return 0
    if fires[1] and not fires[0]:
        return 1
    return catch_all


# Template width per dataset family: the midpoint of each family's
# discriminating-band width range, so the probe matches typical bands.
def _template_width(ds: DatasetSpec, mu: float) -> float:
    for cs in ds.class_specs[:2]:
        for t in cs.discriminating_peaks:
            if t.mu == mu:
                return 0.5 * (t.width_range[0] + t.width_range[1])
    raise ValueError(f"no discriminating band at {mu}")


N_CALIBRATION_PER_CLASS = 40


def model_from_dataset_spec(ds: DatasetSpec, n_calibration=N_CALIBRATION_PER_CLASS) -> MatchedFilterModel:
    """Build and calibrate a matched filter for a dataset family.

    Calibration spectra come from a dedicated seed stream, disjoint from
    train and test by construction. Windows at a class's own positions
    count as present; windows at the other class's positions count as
    absent, measured on that spectrum.
    """
    templates = tuple(
        tuple(
            Template.build(ds.axis, t.mu, _template_width(ds, t.mu))
            for t in cs.discriminating_peaks
        )
        for cs in ds.class_specs[:2]
    )
    present, absent = [], []
    for cid in (0, 1):
        own = templates[cid]
        other = templates[1 - cid]
        for i in range(n_calibration):
            s = dataset_spectrum(ds, "calibration", cid, i)
            for t in own:
                present.append(matched_filter_score(s.intensities, t))
            for t in other:
                absent.append(matched_filter_score(s.intensities, t))
    cal = calibrate_threshold(np.array(present), np.array(absent))
    return MatchedFilterModel(
        axis=ds.axis,
        class_templates=templates,
        threshold=cal.threshold,
        calibration=cal,
    )


def builtin_from_manifest(manifest_path) -> MatchedFilterModel:
    from .fileio import read_json
    from .simulate import dataset_from_manifest

    return model_from_dataset_spec(dataset_from_manifest(read_json(manifest_path)))


class ExternalClassifier:
    """Classifier served by a child process over stdin/stdout JSON lines.

    On start the child sends a hello message carrying its axis and class
    count; we answer with ready. After that, each classify request gets
    exactly one prediction reply with a matching id. Requests are issued
    one at a time with strictly increasing ids.
    """

    def __init__(self, argv, axis: WavenumberAxis, n_classes: int, timeout=30.0):
        self.axis = axis
        self.n_classes = n_classes
        self.timeout = timeout
        self._next_id = 0
        self._lock = threading.Lock()
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,
                text=True,
                bufsize=1,
            )
        except OSError as e:
            raise SpawnError(f"could not start {argv[0]!r}: {e}") from e
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        try:
            self._handshake()
        except Exception:
            self._proc.kill()
            self._proc.wait()
            raise

    def _pump(self):
        try:
            for line in self._proc.stdout:
                self._lines.put(line)
        finally:
            self._lines.put(None)

    def _next_message(self) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise ExternalProtocolError(
                f"no reply from classifier within {self.timeout} seconds"
            ) from None
        if line is None:
            code = self._proc.poll()
            raise ExternalProtocolError(
                f"classifier closed its output (exit status {code})"
            )
        line = line.strip()
        if not line:
            return self._next_message()
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ExternalProtocolError(f"classifier sent invalid JSON: {line[:200]!r}") from e
        if not isinstance(obj, dict):
            raise ExternalProtocolError(f"classifier sent a non-object message: {line[:200]!r}")
        return obj

    def _send(self, obj: dict):
        try:
            self._proc.stdin.write(json.dumps(obj) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise ExternalProtocolError(f"classifier pipe closed: {e}") from e

    def _handshake(self):
        msg = self._next_message()
        if msg.get("type") != "hello":
            raise HandshakeError(f"expected hello, got {msg.get('type')!r}")
        try:
            remote_axis = WavenumberAxis(
                start=msg["axis"]["start"],
                end=msg["axis"]["end"],
                n_bins=msg["axis"]["n_bins"],
            )
            remote_classes = int(msg["n_classes"])
        except (KeyError, TypeError, ValueError) as e:
            raise HandshakeError(f"malformed hello: {e}") from e
        if remote_axis != self.axis:
            raise HandshakeError(
                f"axis mismatch: classifier serves {remote_axis}, expected {self.axis}"
            )
        if remote_classes != self.n_classes:
            raise HandshakeError(
                f"class count mismatch: classifier serves {remote_classes}, "
                f"expected {self.n_classes}"
            )
        self._send({"type": "ready", "n_classes": self.n_classes})

    def predict(self, intensities) -> Prediction:
        values = np.asarray(intensities, dtype=np.float64)
        if values.shape != (self.axis.n_bins,):
            raise ValueError(f"expected {self.axis.n_bins} intensities, got {values.shape}")
        with self._lock:
            request_id = self._next_id
            self._next_id += 1
            self._send({
                "type": "classify",
                "id": request_id,
                "intensities": [float(v) for v in values],
            })
            msg = self._next_message()
        if msg.get("type") != "prediction":
            raise ExternalProtocolError(f"expected prediction, got {msg.get('type')!r}")
        if msg.get("id") != request_id:
            raise IdMismatchError(
                f"reply id {msg.get('id')!r} does not match request id {request_id}"
            )
        if "label" not in msg:
            raise ExternalProtocolError("prediction carries no label")
        label = msg["label"]
        if not isinstance(label, int) or isinstance(label, bool):
            raise ExternalProtocolError(f"label must be an integer, got {label!r}")
        if not (0 <= label < self.n_classes):
            raise ExternalProtocolError(
                f"label {label} outside [0, {self.n_classes})"
            )
        probs = msg.get("probabilities")
        if probs is not None:
            if not isinstance(probs, list) or len(probs) != self.n_classes:
                raise ExternalProtocolError(
                    f"probabilities must list {self.n_classes} values"
                )
            probs = np.asarray(probs, dtype=np.float64)
        return Prediction(label=label, probabilities=probs)

    def close(self):
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=5.0)
            except subprocess.TimeoutExpired:
                proc.terminate()
                try:
                    proc.wait(timeout=5.0)
                except subprocess.TimeoutExpired:
                    proc.kill()
                    proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def open_external(argv, axis, n_classes=3, timeout=30.0) -> ExternalClassifier:
    return ExternalClassifier(argv, axis=axis, n_classes=n_classes, timeout=timeout)


@dataclass
class CountingClassifier:
    """Wrapper counting predict calls; the search reports its query usage with it."""

    inner: object
    count: int = 0

    @property
    def n_classes(self) -> int:
        return self.inner.n_classes

    def predict(self, intensities) -> Prediction:
        self.count += 1
        return self.inner.predict(intensities)
