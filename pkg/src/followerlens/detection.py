"""Manipulation verdicts from prediction/displayed deviation, plus evaluation.

A user is flagged as a customer when the relative deviation between displayed
and predicted follower count exceeds a threshold (default 10%). The deviation
denominator is the displayed count floored at 1: it is the one number both
sides of the comparison can see.

The tolerance score measures how much an estimator moves when followers are
injected into a trace: |change in estimate| / |injected amount|, clamped to
[0, 1]. 0.0 means the estimator ignored the injection entirely (perfect
tolerance); 1.0 means it absorbed the full injected amount (zero tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import math
from pathlib import Path

from .errors import InsufficientDataError, MissingLabelError
from .model import Rejection
from .neighborhood import Prediction

DEFAULT_THRESHOLD = 0.10
DEFAULT_BANDS = (10.0, 50.0, 100.0, 500.0, 1000.0, 5000.0, 10000.0)

VERDICT_CUSTOMER = "customer"
VERDICT_ORGANIC = "organic"

_EPS = 1e-9

GROUP_G1 = "G1"
GROUP_G2 = "G2"
GROUP_G3 = "G3"


@dataclass(frozen=True, slots=True)
class DetectionReport:
    user_id: str
    displayed: int
    predicted: float
    relative_deviation: float
    threshold: float
    verdict: str
    neighbor_count: int


@dataclass(frozen=True, slots=True)
class ToleranceScore:
    group: str
    score: float


@dataclass(frozen=True, slots=True)
class PrecisionRecall:
    """Precision/recall of customer verdicts; None marks an undefined ratio.

    Precision is undefined when nothing was flagged, recall when no customers
    exist in the ground truth. Undefined is reported as None, never as 0.
    """

    precision: float | None
    recall: float | None
    true_positives: int
    false_positives: int
    false_negatives: int
    true_negatives: int


def _predicted_value(prediction: Prediction | float) -> float:
    if isinstance(prediction, Prediction):
        return prediction.predicted_followers
    return float(prediction)


def detect(
    prediction: Prediction | float,
    displayed: int,
    threshold: float = DEFAULT_THRESHOLD,
    user_id: str = "",
    neighbor_count: int = 0,
) -> DetectionReport:
    """Flag a user whose displayed count deviates from the predicted one.

    relative_deviation = |displayed - predicted| / max(displayed, 1); the
    verdict is customer exactly when it exceeds the threshold.
    """
    if displayed < 0:
        raise ValueError("displayed count must be >= 0")
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    predicted = _predicted_value(prediction)
    if isinstance(prediction, Prediction):
        user_id = prediction.user_id or user_id
        neighbor_count = prediction.neighbor_count
    deviation = abs(displayed - predicted) / max(displayed, 1)
    verdict = VERDICT_CUSTOMER if deviation > threshold else VERDICT_ORGANIC
    return DetectionReport(
        user_id=user_id,
        displayed=displayed,
        predicted=predicted,
        relative_deviation=deviation,
        threshold=threshold,
        verdict=verdict,
        neighbor_count=neighbor_count,
    )


def tolerance_score(
    before: Prediction | float,
    after: Prediction | float,
    expected_change: float,
) -> float:
    """Fraction of an injected follower change absorbed by the estimator.

    score = |after - before| / max(|expected_change|, eps), clamped to [0, 1].
    An estimator that does not move scores 0.0 (perfect tolerance); one that
    tracks the full injected amount scores 1.0 (zero tolerance).
    """
    moved = abs(_predicted_value(after) - _predicted_value(before))
    score = moved / max(abs(expected_change), _EPS)
    return min(1.0, max(0.0, score))


def bucket_for_count(followers: int) -> str:
    """Follower-count bucket: G1 <= 1000 < G2 < 10000 <= G3."""
    if followers <= 1000:
        return GROUP_G1
    if followers < 10000:
        return GROUP_G2
    return GROUP_G3


def evaluate_accuracy(
    predictions: list[tuple[float, float]], tolerance_band: float
) -> float:
    """Fraction of (predicted, displayed) pairs outside an absolute band."""
    if not predictions:
        raise InsufficientDataError("cannot evaluate an empty prediction list")
    if tolerance_band <= 0:
        raise ValueError("tolerance band must be positive")
    misses = sum(
        1 for predicted, displayed in predictions
        if abs(predicted - displayed) > tolerance_band
    )
    return misses / len(predictions)


def sweep_error_rates(
    predictions: list[tuple[float, float]],
    bands: tuple[float, ...] = DEFAULT_BANDS,
) -> list[tuple[float, float]]:
    """Error rate at each tolerance band, for the accuracy-vs-band curve."""
    return [(band, evaluate_accuracy(predictions, band)) for band in bands]


def precision_recall(
    reports: list[DetectionReport], labels: dict[str, str]
) -> PrecisionRecall:
    """Precision/recall of customer verdicts against ground-truth labels."""
    tp = fp = fn = tn = 0
    for report in reports:
        if report.user_id not in labels:
            raise MissingLabelError(report.user_id)
        truth_customer = labels[report.user_id] == VERDICT_CUSTOMER
        flagged = report.verdict == VERDICT_CUSTOMER
        if flagged and truth_customer:
            tp += 1
        elif flagged:
            fp += 1
        elif truth_customer:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if (tp + fp) else None
    recall = tp / (tp + fn) if (tp + fn) else None
    return PrecisionRecall(
        precision=precision,
        recall=recall,
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
        true_negatives=tn,
    )


# -- detection report export --------------------------------------------------


def write_detection_report(
    path: str | Path,
    reports: list[DetectionReport],
    summary: dict | None = None,
) -> None:
    """Write report lines plus an optional trailing summary record."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(
                json.dumps(
                    {
                        "user_id": report.user_id,
                        "displayed": report.displayed,
                        "predicted": report.predicted,
                        "relative_deviation": report.relative_deviation,
                        "threshold": report.threshold,
                        "verdict": report.verdict,
                        "neighbor_count": report.neighbor_count,
                    }
                )
                + "\n"
            )
        if summary is not None:
            fh.write(json.dumps({"summary": summary}) + "\n")


def read_detection_report(
    path: str | Path,
) -> tuple[list[DetectionReport], dict | None, list[Rejection]]:
    reports: list[DetectionReport] = []
    summary: dict | None = None
    rejections: list[Rejection] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if "summary" in obj:
                    summary = obj["summary"]
                    continue
                report = DetectionReport(
                    user_id=str(obj["user_id"]),
                    displayed=int(obj["displayed"]),
                    predicted=float(obj["predicted"]),
                    relative_deviation=float(obj["relative_deviation"]),
                    threshold=float(obj["threshold"]),
                    verdict=str(obj["verdict"]),
                    neighbor_count=int(obj["neighbor_count"]),
                )
                if not math.isfinite(report.predicted):
                    raise ValueError("predicted is not finite")
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                rejections.append(Rejection(line_no, "record", str(exc)))
                continue
            reports.append(report)
    return reports, summary, rejections
