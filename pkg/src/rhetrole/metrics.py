"""Confusion-matrix construction and macro-averaged precision/recall/F1.

Everything here is plain-Python integer counting and float arithmetic;
inputs are label index lists. Division conventions: any 0/0 denominator
yields 0.0, macro values are unweighted means over ALL classes (zero-support
classes included), and macro F1 is the mean of per-class F1 scores, not the
F1 of macro precision/recall.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError


def confusion_matrix(
    gold: Sequence[int], pred: Sequence[int], num_labels: int
) -> list[list[int]]:
    """K x K count matrix; entry (i, j) = gold label i predicted as j."""
    if len(gold) != len(pred):
        raise InputError(f"gold has {len(gold)} labels but pred has {len(pred)}")
    if len(gold) == 0:
        raise InputError("cannot build a confusion matrix from empty label lists")
    cm = [[0] * num_labels for _ in range(num_labels)]
    for g, p in zip(gold, pred):
        if not (0 <= g < num_labels and 0 <= p < num_labels):
            raise InputError(f"label index ({g}, {p}) outside 0..{num_labels - 1}")
        cm[g][p] += 1
    return cm


@dataclass
class PerClassMetrics:
    precision: list[float]
    recall: list[float]
    f1: list[float]
    support: list[int]


@dataclass
class MetricsReport:
    per_class: PerClassMetrics
    macro_precision: float
    macro_recall: float
    macro_f1: float


def per_class_prf(cm: Sequence[Sequence[int]]) -> PerClassMetrics:
    """Per-class precision, recall, F1, and support from a confusion matrix."""
    k = len(cm)
    precision, recall, f1, support = [], [], [], []
    for c in range(k):
        tp = cm[c][c]
        fp = sum(cm[i][c] for i in range(k)) - tp
        fn = sum(cm[c]) - tp
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        precision.append(p)
        recall.append(r)
        f1.append(f)
        support.append(tp + fn)
    return PerClassMetrics(precision, recall, f1, support)


def macro_metrics(per_class: PerClassMetrics) -> MetricsReport:
    """Unweighted means over all K classes, zero-support classes included."""
    k = len(per_class.f1)
    if k < 1:
        raise InputError("need at least one class")
    return MetricsReport(
        per_class=per_class,
        macro_precision=sum(per_class.precision) / k,
        macro_recall=sum(per_class.recall) / k,
        macro_f1=sum(per_class.f1) / k,
    )


def evaluate_predictions(
    gold: Sequence[int], pred: Sequence[int], num_labels: int
) -> tuple[list[list[int]], MetricsReport]:
    cm = confusion_matrix(gold, pred, num_labels)
    return cm, macro_metrics(per_class_prf(cm))


def report_to_json(
    report: MetricsReport, cm: Sequence[Sequence[int]], labels: Sequence[str]
) -> str:
    """Metrics JSON document: per-class block keyed by label, macro block,
    and the confusion matrix as a row-major integer array-of-arrays."""
    pc = report.per_class
    doc = {
        "labels": list(labels),
        "per_class": {
            label: {
                "precision": pc.precision[i],
                "recall": pc.recall[i],
                "f1": pc.f1[i],
                "support": pc.support[i],
            }
            for i, label in enumerate(labels)
        },
        "macro": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f1": report.macro_f1,
        },
        "confusion_matrix": [list(row) for row in cm],
        "total": sum(sum(row) for row in cm),
    }
    return json.dumps(doc, indent=2) + "\n"
