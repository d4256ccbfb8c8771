import numpy as np
import pytest

from specrex.core import Spectrum, WavenumberAxis

# Criterion results registered by the acceptance tests; printed at the end
# of the run so each criterion gets one visible PASS/FAIL line.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_criterion(name: str, ok: bool, detail: str):
    ACCEPTANCE_RESULTS.append((name, ok, detail))
    assert ok, f"{name}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{name} {status}: {detail}")


@pytest.fixture
def axis():
    return WavenumberAxis(0.0, 1000.0, 1000)


@pytest.fixture
def small_axis():
    return WavenumberAxis(0.0, 100.0, 101)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def smooth_spectrum(axis, rng, label=0, ground_truth=None, spectrum_id="s"):
    """A plausible, fully synthetic spectrum for tests that need one fast."""
    x = axis.wavenumbers
    base = 0.4 + 0.2 * np.sin(2 * np.pi * x / (axis.end - axis.start))
    bump = 0.8 * np.exp(-0.5 * ((x - 0.3 * axis.end) / 12.0) ** 2)
    noise = 0.002 * rng.standard_normal(axis.n_bins)
    return Spectrum(
        axis=axis,
        intensities=base + bump + noise,
        id=spectrum_id,
        label=label,
        ground_truth=ground_truth,
    )
