"""Command-line front end.

Subcommands:

  simulate  write a labelled dataset (manifest + train/test JSONL)
  explain   run the search over a dataset and write maps + explanations
  eval      score maps and explanations against ground truth
  plot      render spectra (optionally with their maps) to SVG and CSV

Exit status: 0 on success, 1 on usage errors, 2 on runtime failures.
Thread count for the built-in classifier comes from --threads or the
SPECREX_THREADS environment variable; external classifiers answer one
request at a time, so they always run single-threaded.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .classify import builtin_from_manifest, open_external
from .core import WavenumberAxis
from .errors import SpecrexError
from .evaluate import (
    ExplanationRecord,
    PeakCountConfig,
    evaluate_records,
    format_report_table,
    report_csv_rows,
)
from .explain import SearchConfig, explain_spectrum
from .fileio import (
    fmt_float,
    read_dataset,
    read_explanation_json,
    read_json,
    read_map_csv,
    write_explanation_json,
    write_json,
    write_map_csv,
)
from .simulate import DATASET_NAMES, build_dataset, dataset_spec


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _axis_from_manifest(manifest: dict) -> WavenumberAxis:
    a = manifest["axis"]
    return WavenumberAxis(start=a["start"], end=a["end"], n_bins=a["n_bins"])


def _default_threads() -> int:
    raw = os.environ.get("SPECREX_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _load_spectra(args, manifest):
    axis = _axis_from_manifest(manifest)
    data_path = Path(args.data) if args.data else Path(args.manifest).parent / "test.jsonl"
    spectra = read_dataset(data_path, axis)
    if args.ids:
        wanted = set(args.ids.split(","))
        spectra = [s for s in spectra if s.id in wanted]
        missing = wanted - {s.id for s in spectra}
        if missing:
            raise _UsageError(f"ids not in {data_path}: {', '.join(sorted(missing))}")
    if args.limit is not None:
        spectra = spectra[: args.limit]
    if not spectra:
        raise _UsageError(f"no spectra selected from {data_path}")
    return axis, spectra


def _open_model(spec: str, axis: WavenumberAxis):
    """Resolve a --model string: builtin:MANIFEST or cmd:PROGRAM ARGS."""
    if spec.startswith("builtin:"):
        model = builtin_from_manifest(spec[len("builtin:"):])
        if model.axis != axis:
            raise _UsageError("model manifest axis differs from the data axis")
        return model, False
    if spec.startswith("cmd:"):
        argv = shlex.split(spec[len("cmd:"):])
        if not argv:
            raise _UsageError("cmd: model needs a program to run")
        return open_external(argv, axis=axis), True
    raise _UsageError(f"model must start with builtin: or cmd:, got {spec!r}")


def cmd_simulate(args) -> int:
    ds = dataset_spec(
        args.dataset,
        seed=args.seed,
        n_train=args.n_train,
        n_test=args.n_test,
        normalized_height=args.normalized_height,
    )
    written = build_dataset(ds, args.out)
    for split in ("train", "test"):
        print(f"{split}: {written[split]} ({written['counts'][split]} spectra)")
    print(f"manifest: {written['manifest']}")
    return 0


def _spectrum_seed(base: int, index: int) -> int:
    seq = np.random.SeedSequence(entropy=base, spawn_key=(index,))
    return int(seq.generate_state(1)[0])


def cmd_explain(args) -> int:
    manifest = read_json(args.manifest)
    axis, spectra = _load_spectra(args, manifest)
    sigma = args.sigma
    if sigma is None:
        sigma = 0.5 * float(manifest["classes"][0]["noise_scale"])

    model, external = _open_model(args.model, axis)
    threads = args.threads if args.threads is not None else _default_threads()
    if external and threads > 1:
        print("external classifiers answer one request at a time, using one thread")
        threads = 1

    out = Path(args.out)
    maps_dir = out / "maps"
    expl_dir = out / "explanations"
    maps_dir.mkdir(parents=True, exist_ok=True)
    expl_dir.mkdir(parents=True, exist_ok=True)

    def run_one(item):
        index, spectrum = item
        config = SearchConfig(
            n_restarts=args.restarts,
            n_splits=args.splits,
            max_depth=args.depth,
            min_segment_bins=args.min_bins,
            sigma_occlusion=sigma,
            seed=_spectrum_seed(args.seed, index),
            query_budget=args.budget,
            chunk_frac=args.chunk_frac,
            credit_all_passing=not args.credit_path_only,
        )
        return explain_spectrum(spectrum, model, config)

    items = list(enumerate(spectra))
    try:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                explanations = list(pool.map(run_one, items))
        else:
            explanations = [run_one(item) for item in items]
    finally:
        if external:
            model.close()

    total_queries = 0
    for spectrum, explanation in zip(spectra, explanations):
        write_map_csv(maps_dir / f"{spectrum.id}.csv", axis, explanation.map.values)
        write_explanation_json(expl_dir / f"{spectrum.id}.json", explanation)
        total_queries += explanation.mutant_queries
        if args.verbose:
            spans = ", ".join(f"[{lo:.0f}, {hi:.0f}]" for lo, hi in explanation.intervals_cm())
            print(f"{spectrum.id}: label {explanation.label}, "
                  f"{explanation.mutant_queries} queries, kept {spans}")
    print(f"explained {len(spectra)} spectra, {total_queries} classifier queries, "
          f"output under {out}")
    return 0


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def cmd_eval(args) -> int:
    manifest = read_json(args.manifest)
    axis, spectra = _load_spectra(args, manifest)
    expl_root = Path(args.explanations)
    maps_dir = expl_root / "maps"
    expl_dir = expl_root / "explanations"

    records, kept = [], []
    skipped = 0
    for s in spectra:
        map_path = maps_dir / f"{s.id}.csv"
        expl_path = expl_dir / f"{s.id}.json"
        if not (map_path.exists() and expl_path.exists()):
            skipped += 1
            continue
        map_axis, values = read_map_csv(map_path)
        if map_axis.n_bins != axis.n_bins:
            raise SpecrexError(
                f"{map_path} has {map_axis.n_bins} bins, data axis has {axis.n_bins}"
            )
        if args.abs:
            values = np.abs(values)
        expl = read_explanation_json(expl_path)
        records.append(ExplanationRecord(
            spectrum_id=s.id,
            true_label=s.label,
            predicted_label=int(expl["label"]),
            intervals_cm=tuple(expl["intervals_cm"]),
            map_values=values,
            mutant_queries=int(expl["mutant_queries"]),
        ))
        kept.append(s)
    if not records:
        raise SpecrexError(f"no explanation output found under {expl_root}")
    if skipped:
        print(f"skipped {skipped} spectra without explanation output")

    peak_config = PeakCountConfig(
        prominence_frac=args.prominence,
        min_separation_bins=args.min_separation,
    )
    report = evaluate_records(
        kept, records, dataset=manifest.get("dataset", ""), peak_config=peak_config
    )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "report.json", report.to_dict())
    csv_lines = [",".join(_csv_cell(c) for c in row) for row in report_csv_rows(report)]
    (out / "report.csv").write_text("\n".join(csv_lines) + "\n")

    from .plotting import render_report_figure

    render_report_figure(report, out / "report.svg")
    print(format_report_table(report))
    print(f"report written under {out}")
    return 0


def cmd_plot(args) -> int:
    manifest = read_json(args.manifest)
    axis, spectra = _load_spectra(args, manifest)

    from .plotting import render_spectrum_figure, write_plot_csv

    expl_root = Path(args.explanations) if args.explanations else None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for s in spectra:
        map_values = None
        intervals = None
        if expl_root is not None:
            map_path = expl_root / "maps" / f"{s.id}.csv"
            expl_path = expl_root / "explanations" / f"{s.id}.json"
            if map_path.exists():
                _, map_values = read_map_csv(map_path)
            if expl_path.exists():
                intervals = read_explanation_json(expl_path)["intervals_cm"]
        render_spectrum_figure(
            s, out / f"{s.id}.svg",
            map_values=map_values, intervals_cm=intervals,
            title=f"{s.id} (label {s.label})",
        )
        write_plot_csv(out / f"{s.id}.csv", s, map_values=map_values)
    print(f"plotted {len(spectra)} spectra under {out}")
    return 0


def _add_selection_flags(p: argparse.ArgumentParser):
    p.add_argument("--data", help="dataset JSONL (default: test.jsonl next to the manifest)")
    p.add_argument("--ids", help="comma-separated spectrum ids to keep")
    p.add_argument("--limit", type=int, help="process at most this many spectra")


def build_parser() -> _Parser:
    parser = _Parser(prog="specrex", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a labelled dataset")
    p.add_argument("--dataset", required=True, choices=DATASET_NAMES)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-train", type=int, default=100, help="spectra per class")
    p.add_argument("--n-test", type=int, default=100, help="spectra per class")
    p.add_argument("--normalized-height", action="store_true",
                   help="scale each band so its maximum equals the height factor")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("explain", help="run the search over spectra")
    p.add_argument("--manifest", required=True, help="dataset manifest.json")
    _add_selection_flags(p)
    p.add_argument("--model", required=True,
                   help="builtin:MANIFEST or cmd:PROGRAM ARGS...")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="base seed; each spectrum derives its own")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--splits", type=int, default=4)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--min-bins", type=int, default=4)
    p.add_argument("--sigma", type=float, default=None,
                   help="occlusion noise scale (default: half the dataset noise)")
    p.add_argument("--budget", type=int, default=10000)
    p.add_argument("--chunk-frac", type=float, default=0.02)
    p.add_argument("--credit-path-only", action="store_true",
                   help="credit only the sub-interval chosen at each level")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for the built-in model (default: SPECREX_THREADS or 1)")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("eval", help="score explanation output against ground truth")
    p.add_argument("--manifest", required=True)
    _add_selection_flags(p)
    p.add_argument("--explanations", required=True,
                   help="directory produced by the explain command")
    p.add_argument("--out", required=True)
    p.add_argument("--abs", action="store_true",
                   help="take absolute map values before counting peaks")
    p.add_argument("--prominence", type=float, default=0.10)
    p.add_argument("--min-separation", type=int, default=5)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="render spectra to SVG and CSV")
    p.add_argument("--manifest", required=True)
    _add_selection_flags(p)
    p.add_argument("--explanations", help="overlay maps and kept intervals from this directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (SpecrexError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
