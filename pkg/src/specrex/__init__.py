"""Simulate labelled Raman-like spectra, explain classifier decisions by
interpolation occlusion, and score the explanations against ground truth."""

from .classify import (
    CalibrationResult,
    ExternalClassifier,
    MatchedFilterModel,
    Template,
    builtin_from_manifest,
    calibrate_threshold,
    matched_filter_score,
    model_from_dataset_spec,
    open_external,
)
from .core import (
    Explanation,
    PeakSpec,
    Prediction,
    ResponsibilityMap,
    Spectrum,
    WavenumberAxis,
    validate_spectrum,
)
from .errors import SpecrexError
from .evaluate import (
    EvalReport,
    ExplanationRecord,
    PeakCountConfig,
    all_intervals_hit,
    argmax_hit,
    count_peaks,
    evaluate_records,
    find_map_peaks,
)
from .explain import (
    SearchConfig,
    SearchResult,
    explain_spectrum,
    extract_minimal,
    merge_bins_to_intervals,
    occlude,
    occlude_values,
    specrex_search,
    split_segment,
)
from .fileio import (
    read_dataset,
    read_explanation_json,
    read_map_csv,
    write_dataset,
    write_explanation_json,
    write_map_csv,
)
from .simulate import (
    Baseline,
    ClassSpec,
    DatasetSpec,
    PeakTemplate,
    build_dataset,
    dataset_from_manifest,
    dataset_spec,
    dataset_spectrum,
    peak_profile,
    sample_baseline,
    synth_spectrum,
)
from .spline import NaturalCubicSpline

__version__ = "0.1.0"

__all__ = [
    "Baseline",
    "CalibrationResult",
    "ClassSpec",
    "DatasetSpec",
    "EvalReport",
    "Explanation",
    "ExplanationRecord",
    "ExternalClassifier",
    "MatchedFilterModel",
    "NaturalCubicSpline",
    "PeakCountConfig",
    "PeakSpec",
    "PeakTemplate",
    "Prediction",
    "ResponsibilityMap",
    "SearchConfig",
    "SearchResult",
    "Spectrum",
    "SpecrexError",
    "Template",
    "WavenumberAxis",
    "all_intervals_hit",
    "argmax_hit",
    "build_dataset",
    "builtin_from_manifest",
    "calibrate_threshold",
    "count_peaks",
    "dataset_from_manifest",
    "dataset_spec",
    "dataset_spectrum",
    "evaluate_records",
    "explain_spectrum",
    "extract_minimal",
    "find_map_peaks",
    "matched_filter_score",
    "merge_bins_to_intervals",
    "model_from_dataset_spec",
    "occlude",
    "occlude_values",
    "open_external",
    "peak_profile",
    "read_dataset",
    "read_explanation_json",
    "read_map_csv",
    "sample_baseline",
    "specrex_search",
    "split_segment",
    "synth_spectrum",
    "validate_spectrum",
    "write_dataset",
    "write_explanation_json",
    "write_map_csv",
]
