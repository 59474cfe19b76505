"""Command-line front end: ``skyblur {classify,calibrate,evaluate,synth}``.

Exit codes: 0 success, 1 operational error, 2 usage or config error.
Reports go to files or stdout; diagnostics and summaries go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .classify import ClassifierConfig, calibrate, evaluate
from .errors import (
    ConfigInvalid,
    DirectoryNotFound,
    EmptyCalibrationSet,
    ManifestParseError,
    SkyBlurError,
)
from .imaging import RoiRect
from .metrics import FftParams, MetricKind
from .pipeline import (
    load_config,
    load_manifest,
    parse_report,
    report_to_csv,
    report_to_json,
    run_batch,
    save_config,
    score_file,
)
from .synth import SceneParams, generate_corpus

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class _UsageError(Exception):
    pass


def _err(message: str) -> None:
    print(f"skyblur: {message}", file=sys.stderr)


def _pair(text: str, cast=float) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi but got {text!r}")
    try:
        return tuple(cast(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a numeric pair: {text!r}") from None


def _roi(text: str) -> RoiRect:
    try:
        return RoiRect.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_classify(args) -> int:
    try:
        config = load_config(args.config)
    except OSError as exc:
        _err(f"cannot read config {args.config}: {exc.strerror or exc}")
        return EXIT_USAGE
    except ConfigInvalid as exc:
        _err(f"invalid config {args.config}: {exc}")
        return EXIT_USAGE

    try:
        report = run_batch(args.dir, config, parallelism=args.jobs)
    except DirectoryNotFound as exc:
        _err(str(exc))
        return EXIT_FAILURE

    text = report_to_json(report) if args.format == "json" else report_to_csv(report)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            _err(f"cannot write report {args.out}: {exc.strerror or exc}")
            return EXIT_FAILURE
    else:
        sys.stdout.write(text)

    s = report.summary
    print(
        f"classified: {s['classified']}, blurred: {s['blurred']}, errors: {s['errors']}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    try:
        manifest = load_manifest(args.manifest)
    except OSError as exc:
        _err(f"cannot read manifest {args.manifest}: {exc.strerror or exc}")
        return EXIT_FAILURE
    except ManifestParseError as exc:
        _err(f"invalid manifest {args.manifest}: {exc}")
        return EXIT_FAILURE

    root = args.image_root or os.path.dirname(os.path.abspath(args.manifest))
    metric = MetricKind(args.metric)
    probe = ClassifierConfig(metric=metric, roi=args.roi, fft_params=FftParams(args.fft_low_freq_fraction))

    scores = []
    for entry in manifest:
        record = score_file(os.path.join(root, entry.path), probe, display_path=entry.path)
        if not record.ok:
            _err(f"cannot score {entry.path}: {record.error}")
            return EXIT_FAILURE
        scores.append((record.score, entry.blurred))

    try:
        result = calibrate(scores)
    except EmptyCalibrationSet as exc:
        _err(str(exc))
        return EXIT_FAILURE

    config = ClassifierConfig(
        metric=metric, threshold=result.threshold, roi=args.roi, fft_params=probe.fft_params
    )
    try:
        save_config(config, args.out_config)
    except OSError as exc:
        _err(f"cannot write config {args.out_config}: {exc.strerror or exc}")
        return EXIT_FAILURE
    print(f"threshold: {result.threshold!r}, train_accuracy: {result.train_accuracy!r}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    try:
        manifest = load_manifest(args.manifest)
        with open(args.report, encoding="utf-8", newline="") as fh:
            records = parse_report(fh.read())
    except OSError as exc:
        _err(f"cannot read input: {exc}")
        return EXIT_FAILURE
    except (ManifestParseError, ValueError, KeyError) as exc:
        _err(f"invalid input: {exc}")
        return EXIT_FAILURE

    by_path = {r["path"]: r for r in records}
    pairs = []
    for entry in manifest:
        record = by_path.get(entry.path)
        if record is None:
            _err(f"manifest path not in report: {entry.path}")
            return EXIT_FAILURE
        if record["error"] or record["blurred"] is None:
            _err(f"report has no verdict for {entry.path}: {record['error']}")
            return EXIT_FAILURE
        pairs.append((bool(record["blurred"]), entry.blurred))

    try:
        result = evaluate(pairs)
    except SkyBlurError as exc:
        _err(str(exc))
        return EXIT_FAILURE
    print(json.dumps(result.to_dict(), indent=2))
    return EXIT_OK


def cmd_synth(args) -> int:
    lo, hi = args.sigma
    if lo > hi or lo < 0:
        raise _UsageError(f"--sigma needs 0 <= lo <= hi, got {lo},{hi}")
    nlo, nhi = args.noise
    if nlo > nhi or nlo < 0:
        raise _UsageError(f"--noise needs 0 <= lo <= hi, got {nlo},{nhi}")
    try:
        params = SceneParams(
            width=args.width,
            height=args.height,
            sky_top_luma=args.sky_top,
            sky_bottom_luma=args.sky_bottom,
            cloud_octaves=args.cloud_octaves,
            cloud_opacity=args.cloud_opacity,
            marker=args.marker if args.marker is not None else SceneParams().marker,
            marker_luma=args.marker_luma,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from None

    try:
        manifest = generate_corpus(
            args.out_dir,
            args.n_sharp,
            args.n_blurred,
            params,
            sigma_range=(lo, hi),
            seed=args.seed,
            noise_range=(nlo, nhi),
        )
    except OSError as exc:
        _err(f"cannot write corpus to {args.out_dir}: {exc.strerror or exc}")
        return EXIT_FAILURE
    print(
        f"wrote {len(manifest)} images to {args.out_dir}; marker ROI {_roi_text(params.marker_roi())}",
        file=sys.stderr,
    )
    return EXIT_OK


def _roi_text(roi: RoiRect) -> str:
    return f"{roi.x},{roi.y},{roi.width},{roi.height}"


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skyblur", description="Marker-based blur detection for sky camera images."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="score and classify every image in a directory")
    p.add_argument("--dir", required=True, help="image directory (walked recursively)")
    p.add_argument("--config", required=True, help="classifier config JSON")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("calibrate", help="learn a threshold from a labeled manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--image-root", help="directory manifest paths are relative to (default: manifest's directory)")
    p.add_argument("--metric", choices=[m.value for m in MetricKind], default="laplacian")
    p.add_argument("--roi", type=_roi, help="marker crop as x,y,w,h (default: whole image)")
    p.add_argument("--fft-low-freq-fraction", type=float, default=FftParams().low_freq_fraction)
    p.add_argument("--out-config", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("evaluate", help="score a classify report against a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--report", required=True, help="JSON or CSV report from `classify`")
    p.set_defaults(func=cmd_evaluate)

    defaults = SceneParams()
    p = sub.add_parser("synth", help="generate a labeled synthetic sky corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n-sharp", type=_count, default=50)
    p.add_argument("--n-blurred", type=_count, default=50)
    p.add_argument("--sigma", type=_pair, default=(2.0, 5.0), help="blur sigma range lo,hi")
    p.add_argument("--noise", type=_pair, default=(0.0, 0.0), help="sensor noise std range lo,hi")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=_positive_int, default=defaults.width)
    p.add_argument("--height", type=_positive_int, default=defaults.height)
    p.add_argument("--sky-top", type=float, default=defaults.sky_top_luma)
    p.add_argument("--sky-bottom", type=float, default=defaults.sky_bottom_luma)
    p.add_argument("--cloud-octaves", type=_positive_int, default=defaults.cloud_octaves)
    p.add_argument("--cloud-opacity", type=float, default=defaults.cloud_opacity)
    p.add_argument("--marker", type=_roi, help="marker rectangle x,y,w,h")
    p.add_argument("--marker-luma", type=float, default=defaults.marker_luma)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        _err(str(exc))
        return EXIT_USAGE
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
