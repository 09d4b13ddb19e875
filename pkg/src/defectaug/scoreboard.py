"""Confusion matrices and Accuracy/Recall/Precision/F1 for binary
(defect vs. free) and multi-class prediction files.

Metrics are percentages; degenerate ratios (empty denominator) are
reported as absent (None) rather than 0 or NaN, and rendered "—".
Printed values round half-up to two decimals.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


class MetricsError(ValueError):
    """Invalid labels or matrix shape."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """k x k counts; rows are the true class, columns the predicted."""

    labels: Tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.counts, dtype=np.int64)
        k = len(self.labels)
        if a.shape != (k, k):
            raise MetricsError(f"counts must be {k}x{k}, got {a.shape}")
        if (a < 0).any():
            raise MetricsError("counts must be non-negative")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "counts", a)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def binary(cls, tp: int, fn: int, fp: int, tn: int,
               labels: Sequence[str] = ("defect", "free")) -> "ConfusionMatrix":
        """2x2 matrix with the first label as the positive (defect) class."""
        return cls(labels=tuple(labels), counts=np.array([[tp, fn], [fp, tn]]))


@dataclass
class MetricsReport:
    """Percentages in [0, 100]; None marks an undefined (absent) metric."""

    accuracy: Optional[float]
    recall: Optional[float]
    precision: Optional[float]
    f1: Optional[float]
    per_class: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)
    mean_recall: Optional[float] = None
    mean_precision: Optional[float] = None
    mode: str = "binary"


def tally(truth: Sequence[str], pred: Sequence[str],
          labels: Sequence[str]) -> ConfusionMatrix:
    """Count (true, predicted) label pairs into a confusion matrix."""
    if len(truth) != len(pred):
        raise MetricsError(f"truth ({len(truth)}) and pred ({len(pred)}) length mismatch")
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise MetricsError("duplicate labels")
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(truth, pred):
        if t not in index:
            raise MetricsError(f"unknown truth label {t!r}")
        if p not in index:
            raise MetricsError(f"unknown predicted label {p!r}")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(labels=tuple(labels), counts=counts)


def _pct(num: float, den: float) -> Optional[float]:
    return None if den == 0 else 100.0 * num / den


def _f1(recall: Optional[float], precision: Optional[float]) -> Optional[float]:
    if recall is None or precision is None or recall + precision == 0:
        return None
    return 2.0 * recall * precision / (recall + precision)


def binary_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Defect-class metrics of a 2x2 matrix (first label positive)."""
    if len(cm.labels) != 2:
        raise MetricsError(f"binary_metrics needs a 2x2 matrix, got {len(cm.labels)} classes")
    tp, fn = int(cm.counts[0, 0]), int(cm.counts[0, 1])
    fp, tn = int(cm.counts[1, 0]), int(cm.counts[1, 1])
    recall = _pct(tp, tp + fn)
    precision = _pct(tp, tp + fp)
    return MetricsReport(
        accuracy=_pct(tp + tn, tp + fp + tn + fn),
        recall=recall, precision=precision, f1=_f1(recall, precision),
        per_class={cm.labels[0]: {"recall": recall, "precision": precision}},
        mode="binary")


def pool_binary(cm: ConfusionMatrix, free_label: str) -> ConfusionMatrix:
    """Collapse all non-free classes into one positive defect class."""
    if free_label not in cm.labels:
        raise MetricsError(f"free label {free_label!r} not in {cm.labels}")
    free = cm.labels.index(free_label)
    defect = [i for i in range(len(cm.labels)) if i != free]
    c = cm.counts
    tp = int(c[np.ix_(defect, defect)].sum())
    fn = int(c[defect, free].sum())
    fp = int(c[free, defect].sum())
    tn = int(c[free, free])
    return ConfusionMatrix.binary(tp, fn, fp, tn)


def multiclass_metrics(cm: ConfusionMatrix, mode: str = "per-class-macro",
                       free_label: str = "Free") -> MetricsReport:
    """Multi-class scoring.

    ``pooled-binary`` collapses all defect classes into one positive
    class and scores it as binary. ``per-class-macro`` computes recall
    and precision per class, unweighted means MR/MP over the classes,
    and F1 = 2*MR*MP/(MR+MP).
    """
    if len(cm.labels) < 2:
        raise MetricsError("need at least 2 classes")
    if mode == "pooled-binary":
        return binary_metrics(pool_binary(cm, free_label))
    if mode != "per-class-macro":
        raise MetricsError(f"unknown mode {mode!r}")
    c = cm.counts
    diag = np.diag(c).astype(np.float64)
    per_class: Dict[str, Dict[str, Optional[float]]] = {}
    recalls: List[float] = []
    precisions: List[float] = []
    for i, lab in enumerate(cm.labels):
        r = _pct(diag[i], c[i, :].sum())
        p = _pct(diag[i], c[:, i].sum())
        per_class[lab] = {"recall": r, "precision": p}
        if r is not None:
            recalls.append(r)
        if p is not None:
            precisions.append(p)
    mr = float(np.mean(recalls)) if recalls else None
    mp = float(np.mean(precisions)) if precisions else None
    return MetricsReport(
        accuracy=_pct(diag.sum(), c.sum()),
        recall=mr, precision=mp, f1=_f1(mr, mp),
        per_class=per_class, mean_recall=mr, mean_precision=mp,
        mode="per-class-macro")


def macro_f1(mean_recall: float, mean_precision: float) -> float:
    """F1 of unweighted mean recall/precision percentages."""
    return 2.0 * mean_recall * mean_precision / (mean_recall + mean_precision)


def render_pct(value: Optional[float]) -> str:
    """Two-decimal, half-up percentage rendering; absent shows as an
    em-dash placeholder."""
    if value is None:
        return "—"
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def format_report(report: MetricsReport) -> Tuple[str, dict]:
    """Human-readable table plus a machine record of a metrics report."""
    rows = [("Accuracy", report.accuracy), ("Recall", report.recall),
            ("Precision", report.precision), ("F1", report.f1)]
    if report.mode == "per-class-macro":
        rows += [("Mean recall (MR)", report.mean_recall),
                 ("Mean precision (MP)", report.mean_precision)]
    width = max(len(name) for name, _ in rows)
    lines = [f"{name:<{width}}  {render_pct(value):>7}" for name, value in rows]
    for lab, vals in report.per_class.items():
        lines.append(f"{lab:<{width}}  R={render_pct(vals['recall'])} "
                     f"P={render_pct(vals['precision'])}")
    record = {
        "mode": report.mode,
        "accuracy": report.accuracy,
        "recall": report.recall,
        "precision": report.precision,
        "f1": report.f1,
        "mean_recall": report.mean_recall,
        "mean_precision": report.mean_precision,
        "per_class": report.per_class,
        "rendered": {name.lower().split(" ")[0]: render_pct(value) for name, value in rows},
    }
    return "\n".join(lines) + "\n", record


def read_predictions(path) -> Tuple[List[str], List[str], List[str]]:
    """Read an ``id,truth,pred`` CSV; returns (ids, truth, pred)."""
    ids, truth, pred = [], [], []
    with Path(path).open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        required = {"id", "truth", "pred"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise MetricsError(f"prediction CSV must have columns {sorted(required)}")
        for row in reader:
            ids.append(row["id"])
            truth.append(row["truth"])
            pred.append(row["pred"])
    return ids, truth, pred
