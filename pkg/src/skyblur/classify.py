"""Threshold classification, calibration and accuracy evaluation.

Blurred is the positive class. An image is blurred iff its score is strictly
below the threshold, for both metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicatePath, EmptyCalibrationSet, EmptyEvaluationSet
from .imaging import MIN_SCORING_ROI, RoiRect, crop
from .metrics import BlurScore, FftParams, MetricKind, score

# Hand-tuned by the method's authors for their own camera; recalibrate per deployment.
DEFAULT_THRESHOLDS = {
    MetricKind.LAPLACIAN: 12.0,
    MetricKind.FFT: -4.0,
}


@dataclass(frozen=True)
class ClassifierConfig:
    metric: MetricKind = MetricKind.LAPLACIAN
    threshold: float | None = None
    roi: RoiRect | None = None
    fft_params: FftParams = field(default_factory=FftParams)

    def __post_init__(self):
        object.__setattr__(self, "metric", MetricKind(self.metric))
        if self.threshold is None:
            object.__setattr__(self, "threshold", DEFAULT_THRESHOLDS[self.metric])
        if not math.isfinite(self.threshold):
            raise ValueError(f"threshold must be finite, got {self.threshold!r}")
        if self.roi is not None and min(self.roi.width, self.roi.height) < MIN_SCORING_ROI:
            raise ValueError(
                f"ROI must be at least {MIN_SCORING_ROI}x{MIN_SCORING_ROI}, "
                f"got {self.roi.width}x{self.roi.height}"
            )


@dataclass(frozen=True)
class Verdict:
    blurred: bool
    score: BlurScore


@dataclass(frozen=True)
class CalibrationResult:
    threshold: float
    train_accuracy: float


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    true_positives: int
    true_negatives: int
    false_positives: int
    false_negatives: int
    n: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "true_positives": self.true_positives,
            "true_negatives": self.true_negatives,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "n": self.n,
        }


def is_blurred(value: float, threshold: float) -> bool:
    return value < threshold


def score_image(img: np.ndarray, config: ClassifierConfig) -> BlurScore:
    if config.roi is not None:
        img = crop(img, config.roi)
    return score(img, config.metric, config.fft_params)


def classify(img: np.ndarray, config: ClassifierConfig) -> Verdict:
    s = score_image(img, config)
    return Verdict(is_blurred(s.value, config.threshold), s)


def candidate_thresholds(values: Iterable[float]) -> list[float]:
    """Midpoints between consecutive distinct values, plus min - 1 and max + 1."""
    distinct = sorted(set(float(v) for v in values))
    mids = []
    for a, b in zip(distinct, distinct[1:]):
        mid = a / 2.0 + b / 2.0
        # adjacent floats have no representable midpoint; b itself splits them the same way
        mids.append(mid if a < mid <= b else b)
    low = distinct[0] - 1.0
    if low == distinct[0]:
        low = math.nextafter(low, -math.inf)
    high = distinct[-1] + 1.0
    if high == distinct[-1]:
        high = math.nextafter(high, math.inf)
    return [low, *mids, high]


def calibrate(scores: Sequence[tuple[float, bool]]) -> CalibrationResult:
    """Pick the accuracy-maximizing threshold; ties go to the smallest one.

    ``scores`` holds ``(value, blurred)`` pairs with low values meaning blurred.
    """
    if len(scores) == 0:
        raise EmptyCalibrationSet("cannot calibrate on an empty set")
    values = np.array([float(v) for v, _ in scores])
    labels = np.array([bool(b) for _, b in scores])
    n = len(values)

    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    sorted_labels = labels[order]
    # threshold placed after the first k sorted values labels exactly those k blurred
    blurred_before = np.concatenate([[0], np.cumsum(sorted_labels)])
    sharp_after = np.concatenate([np.cumsum(~sorted_labels[::-1])[::-1], [0]])
    correct = blurred_before + sharp_after

    # only cut positions between distinct values are realisable
    cuts = [0] + [k for k in range(1, n) if sorted_values[k] != sorted_values[k - 1]] + [n]
    thresholds = candidate_thresholds(values)
    best = max(range(len(cuts)), key=lambda i: (correct[cuts[i]], -i))
    return CalibrationResult(
        threshold=float(thresholds[best]),
        train_accuracy=float(correct[cuts[best]]) / n,
    )


def evaluate(pairs: Sequence[tuple[bool, bool]]) -> EvalReport:
    """Confusion counts for ``(predicted, actual)`` pairs, blurred = positive."""
    if len(pairs) == 0:
        raise EmptyEvaluationSet("cannot evaluate an empty set")
    tp = tn = fp = fn = 0
    for predicted, actual in pairs:
        if predicted and actual:
            tp += 1
        elif not predicted and not actual:
            tn += 1
        elif predicted:
            fp += 1
        else:
            fn += 1
    n = len(pairs)
    return EvalReport((tp + tn) / n, tp, tn, fp, fn, n)


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    blurred: bool


@dataclass(frozen=True)
class LabeledManifest:
    """Ground-truth labels; ``path`` values are relative to an image root."""

    entries: tuple[ManifestEntry, ...] = ()

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        seen = set()
        for entry in entries:
            if entry.path in seen:
                raise DuplicatePath(f"duplicate manifest path {entry.path!r}")
            seen.add(entry.path)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def labels(self) -> dict[str, bool]:
        return {e.path: e.blurred for e in self.entries}
