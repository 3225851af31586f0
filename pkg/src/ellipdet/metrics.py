"""Point-level detection quality metrics."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class DetectionMetrics:
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float
    recall: float
    accuracy: float
    f_measure: float
    undefined: bool = False  # some ratio had a zero denominator


def detection_metrics(tp: int, fp: int, tn: int, fn: int) -> DetectionMetrics:
    """Precision/recall/accuracy/F-measure; undefined ratios report as 0."""
    undefined = False

    def ratio(num, den):
        nonlocal undefined
        if den == 0:
            undefined = True
            return 0.0
        return num / den

    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    accuracy = ratio(tp + tn, tp + tn + fp + fn)
    f_measure = ratio(2 * precision * recall, precision + recall)
    return DetectionMetrics(tp, fp, tn, fn, precision, recall, accuracy, f_measure, undefined)


def metrics_from_masks(predicted, truth) -> DetectionMetrics:
    """Metrics from boolean point masks (predicted elliptic vs truth)."""
    import numpy as np

    predicted = np.asarray(predicted, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if predicted.shape != truth.shape:
        raise ValueError("mask shapes differ")
    tp = int(np.sum(predicted & truth))
    fp = int(np.sum(predicted & ~truth))
    tn = int(np.sum(~predicted & ~truth))
    fn = int(np.sum(~predicted & truth))
    return detection_metrics(tp, fp, tn, fn)
