"""Batch scoring of an image directory plus config, manifest and report I/O."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .classify import ClassifierConfig, LabeledManifest, ManifestEntry, classify
from .errors import (
    ConfigInvalid,
    ConfigParseError,
    DirectoryNotFound,
    ManifestParseError,
    SkyBlurError,
)
from .imaging import RoiRect, load_image, to_grayscale
from .metrics import FftParams, MetricKind

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")

_CONFIG_KEYS = ("metric", "threshold", "roi", "fft_low_freq_fraction")
_ROI_KEYS = ("x", "y", "width", "height")


# --------------------------------------------------------------------------
# Config
# --------------------------------------------------------------------------


def config_to_dict(config: ClassifierConfig) -> dict:
    return {
        "metric": config.metric.value,
        "threshold": config.threshold,
        "roi": config.roi.to_dict() if config.roi is not None else None,
        "fft_low_freq_fraction": config.fft_params.low_freq_fraction,
    }


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _line_of(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return None


def parse_config(text: str) -> ClassifierConfig:
    """Strictly parse a JSON config; unknown keys are rejected."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigParseError("top level must be a JSON object", line=1)

    def fail(key, message):
        return ConfigParseError(message, field=key, line=_line_of(text, key))

    for key in raw:
        if key not in _CONFIG_KEYS:
            raise fail(key, f"unknown field (allowed: {', '.join(_CONFIG_KEYS)})")

    if "metric" not in raw:
        raise ConfigParseError("missing required field", field="metric")
    try:
        metric = MetricKind(raw["metric"])
    except ValueError:
        raise fail("metric", f"must be 'laplacian' or 'fft', got {raw['metric']!r}") from None

    threshold = raw.get("threshold")
    if threshold is not None and (not _is_number(threshold) or not math.isfinite(threshold)):
        raise fail("threshold", f"must be a finite number, got {threshold!r}")

    roi = raw.get("roi")
    if roi is not None:
        if not isinstance(roi, dict):
            raise fail("roi", "must be an object with x, y, width, height")
        extra = set(roi) - set(_ROI_KEYS)
        missing = set(_ROI_KEYS) - set(roi)
        if extra or missing:
            raise fail("roi", f"needs exactly {', '.join(_ROI_KEYS)}")
        if not all(isinstance(roi[k], int) and not isinstance(roi[k], bool) for k in _ROI_KEYS):
            raise fail("roi", "components must be integers")
        try:
            roi = RoiRect(**{k: roi[k] for k in _ROI_KEYS})
        except ValueError as exc:
            raise fail("roi", str(exc)) from None

    fraction = raw.get("fft_low_freq_fraction", FftParams().low_freq_fraction)
    if not _is_number(fraction):
        raise fail("fft_low_freq_fraction", f"must be a number, got {fraction!r}")
    try:
        fft_params = FftParams(float(fraction))
    except ValueError as exc:
        raise fail("fft_low_freq_fraction", str(exc)) from None

    try:
        return ClassifierConfig(
            metric=metric,
            threshold=None if threshold is None else float(threshold),
            roi=roi,
            fft_params=fft_params,
        )
    except ValueError as exc:
        # the only check left at this point is the minimum scoring ROI size
        raise fail("roi", str(exc)) from None


def load_config(path) -> ClassifierConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def save_config(config: ClassifierConfig, path) -> None:
    data = config_to_dict(config)
    if data["roi"] is None:
        del data["roi"]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------
# Manifest: headerless CSV "path,label" with labels true|false
# --------------------------------------------------------------------------


def parse_manifest(text: str) -> LabeledManifest:
    entries = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise ManifestParseError(f"line {lineno}: expected 'path,label', got {row!r}")
        path, label = row[0], row[1].strip().lower()
        if label not in ("true", "false"):
            raise ManifestParseError(f"line {lineno}: label must be true or false, got {row[1]!r}")
        if not path:
            raise ManifestParseError(f"line {lineno}: empty path")
        entries.append(ManifestEntry(path, label == "true"))
    return LabeledManifest(entries)


def load_manifest(path) -> LabeledManifest:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_manifest(fh.read())


def save_manifest(manifest: LabeledManifest, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for entry in manifest:
            writer.writerow([entry.path, "true" if entry.blurred else "false"])


# --------------------------------------------------------------------------
# Batch run
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RunRecord:
    path: str
    score: float | None
    metric: MetricKind
    blurred: bool | None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass
class RunReport:
    records: list[RunRecord]
    config: ClassifierConfig
    started: str = ""
    finished: str = ""
    summary: dict = field(init=False)

    def __post_init__(self):
        self.summary = {
            "classified": len(self.records),
            "blurred": sum(1 for r in self.records if r.blurred),
            "errors": sum(1 for r in self.records if r.error),
        }

    def to_dict(self) -> dict:
        return {
            "config": config_to_dict(self.config),
            "started": self.started,
            "finished": self.finished,
            "records": [
                {
                    "path": r.path,
                    "score": r.score,
                    "metric": r.metric.value,
                    "blurred": r.blurred,
                    "error": r.error,
                }
                for r in self.records
            ],
        }


def find_images(directory) -> list[str]:
    """Relative POSIX paths of every PNG/JPEG under ``directory``, sorted."""
    root = Path(directory)
    found = []
    for dirpath, _, filenames in os.walk(root):
        for name in filenames:
            if name.lower().endswith(IMAGE_EXTENSIONS):
                found.append((Path(dirpath) / name).relative_to(root).as_posix())
    return sorted(found)


def score_file(path, config: ClassifierConfig, display_path: str | None = None) -> RunRecord:
    display_path = display_path if display_path is not None else str(path)
    try:
        verdict = classify(to_grayscale(load_image(path)), config)
    except (SkyBlurError, OSError) as exc:
        return RunRecord(display_path, None, config.metric, None, f"{type(exc).__name__}: {exc}")
    return RunRecord(display_path, verdict.score.value, config.metric, verdict.blurred)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def run_batch(directory, config: ClassifierConfig, parallelism: int = 1) -> RunReport:
    """Score every image in ``directory``; per-file failures become error records."""
    if not os.path.isdir(directory):
        raise DirectoryNotFound(f"no such directory: {directory}")
    if not isinstance(config, ClassifierConfig):
        raise ConfigInvalid(f"expected a ClassifierConfig, got {type(config).__name__}")
    if parallelism < 1:
        raise ConfigInvalid(f"parallelism must be >= 1, got {parallelism}")

    started = _now()
    paths = find_images(directory)

    def work(rel):
        return score_file(os.path.join(directory, rel), config, display_path=rel)

    if parallelism == 1:
        records = [work(p) for p in paths]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(work, paths))
    return RunReport(records, config, started, _now())


# --------------------------------------------------------------------------
# Report serialization
# --------------------------------------------------------------------------


def report_to_json(report: RunReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def report_to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["path", "score", "verdict", "error"])
    for r in report.records:
        score = "" if r.score is None else repr(r.score)
        verdict = "" if r.blurred is None else ("true" if r.blurred else "false")
        writer.writerow([r.path, score, verdict, r.error])
    return buf.getvalue()


def parse_report(text: str) -> list[dict]:
    """Records of a JSON or CSV report as dicts with path/score/blurred/error."""
    if text.lstrip().startswith("{"):
        records = json.loads(text)["records"]
        return [
            {k: r.get(k) for k in ("path", "score", "blurred", "error")} for r in records
        ]
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        verdict = row.get("verdict", "")
        out.append(
            {
                "path": row["path"],
                "score": float(row["score"]) if row.get("score") else None,
                "blurred": None if verdict == "" else verdict == "true",
                "error": row.get("error", ""),
            }
        )
    return out
