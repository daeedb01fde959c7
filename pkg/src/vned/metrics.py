"""Evaluation: confusion matrices, per-class metrics, IoU box matching.

Per-class accuracy is row recall on the confusion matrix; micro accuracy
is trace over total. Classes with zero support contribute 0.0 to macro
averages and are flagged rather than dropped, so reports over the same
vocabulary stay comparable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .clustering import (
    ClusterAssignment,
    cut_linkage,
    kmeans,
    majority_assign,
    total_within_cluster_ss,
    ward_linkage,
)
from .core import BoundingBox, DetectionRecord
from .errors import EvaluationError
from .seeds import derive_seed
from .vocab import EntityVocabulary


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are ground truth, columns are predictions."""

    classes: tuple[str, ...]
    counts: np.ndarray  # (C, C) int64

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def row(self, name: str) -> np.ndarray:
        return self.counts[self.classes.index(name)]


@dataclass(frozen=True)
class MetricReport:
    classes: tuple[str, ...]
    support: tuple[int, ...]
    predicted: tuple[int, ...]
    per_class_accuracy: tuple[float, ...]
    per_class_precision: tuple[float, ...]
    per_class_f1: tuple[float, ...]
    micro_accuracy: float
    macro_accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    zero_support: tuple[str, ...]
    zero_predicted: tuple[str, ...]

    def accuracy_for(self, name: str) -> float:
        return self.per_class_accuracy[self.classes.index(name)]

    def as_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "support": list(self.support),
            "predicted": list(self.predicted),
            "per_class_accuracy": list(self.per_class_accuracy),
            "per_class_precision": list(self.per_class_precision),
            "per_class_f1": list(self.per_class_f1),
            "micro_accuracy": self.micro_accuracy,
            "macro_accuracy": self.macro_accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "zero_support": list(self.zero_support),
            "zero_predicted": list(self.zero_predicted),
        }


def confusion(
    gt_labels: Mapping[str, str],
    pred_labels: Mapping[str, str],
    classes: Sequence[str],
) -> ConfusionMatrix:
    """Tally (gt, pred) pairs over a shared id set.

    The two mappings must cover exactly the same detection ids; a mismatch
    means the caller is comparing different datasets.
    """
    if set(gt_labels) != set(pred_labels):
        missing = sorted(set(gt_labels) ^ set(pred_labels))
        raise ValueError(
            f"gt/prediction id sets differ on {len(missing)} ids "
            f"(first: {missing[0]!r})"
        )
    if not gt_labels:
        raise EvaluationError("cannot evaluate an empty label set")
    index = {name: i for i, name in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for det_id, gt in gt_labels.items():
        pred = pred_labels[det_id]
        if gt not in index:
            raise ValueError(f"ground-truth label {gt!r} not in class list")
        if pred not in index:
            raise ValueError(f"predicted label {pred!r} not in class list")
        counts[index[gt], index[pred]] += 1
    return ConfusionMatrix(classes=tuple(classes), counts=counts)


def metrics(cm: ConfusionMatrix) -> MetricReport:
    counts = cm.counts.astype(np.float64)
    if counts.sum() <= 0:
        raise EvaluationError("confusion matrix is empty")
    support = counts.sum(axis=1)
    predicted = counts.sum(axis=0)
    diag = np.diag(counts)

    recall = np.divide(diag, support, out=np.zeros_like(diag, dtype=np.float64),
                       where=support > 0)
    precision = np.divide(diag, predicted, out=np.zeros_like(diag, dtype=np.float64),
                          where=predicted > 0)
    pr_sum = precision + recall
    f1 = np.divide(2.0 * precision * recall, pr_sum,
                   out=np.zeros_like(pr_sum), where=pr_sum > 0)

    zero_support = tuple(n for n, s in zip(cm.classes, support) if s == 0)
    zero_predicted = tuple(n for n, p in zip(cm.classes, predicted) if p == 0)
    return MetricReport(
        classes=cm.classes,
        support=tuple(int(s) for s in support),
        predicted=tuple(int(p) for p in predicted),
        per_class_accuracy=tuple(float(r) for r in recall),
        per_class_precision=tuple(float(p) for p in precision),
        per_class_f1=tuple(float(v) for v in f1),
        micro_accuracy=float(diag.sum() / counts.sum()),
        macro_accuracy=float(recall.mean()),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        zero_support=zero_support,
        zero_predicted=zero_predicted,
    )


def evaluate_labels(
    gt_labels: Mapping[str, str],
    pred_labels: Mapping[str, str],
    vocab: EntityVocabulary,
) -> MetricReport:
    """Confusion + metrics in one step, projecting gt into the vocabulary."""
    projected = {i: vocab.project_gt(g) for i, g in gt_labels.items()}
    return metrics(confusion(projected, pred_labels, vocab.classes()))


# ---------------------------------------------------------------------------
# Box-level matching, for predictions that come with their own geometry.

def iou(a: BoundingBox, b: BoundingBox) -> float:
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = float(ix) * float(iy)
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[tuple[str, str, float], ...]  # (pred_id, gt_id, iou)
    unmatched_pred: tuple[str, ...]
    unmatched_gt: tuple[str, ...]


def match_predictions_to_gt(
    predicted: Iterable[DetectionRecord],
    ground_truth: Iterable[DetectionRecord],
    threshold: float = 0.0,
) -> MatchResult:
    """Greedy one-to-one matching by descending IoU, within each frame.

    Pairs must overlap (IoU strictly above the threshold, and above zero:
    disjoint boxes never match, even at threshold 0). Ties break on
    (pred id, gt id) so the result is order-independent. Unmatched ground
    truth should be scored as a predicted ``unknown`` by the caller.
    """
    preds = list(predicted)
    gts = list(ground_truth)
    candidates = []
    by_frame: dict = {}
    for g in gts:
        by_frame.setdefault(g.frame, []).append(g)
    for p in preds:
        for g in by_frame.get(p.frame, ()):
            ov = iou(p.box, g.box)
            if ov > threshold and ov > 0.0:
                candidates.append((-ov, p.id, g.id, ov))
    candidates.sort()

    used_pred: set[str] = set()
    used_gt: set[str] = set()
    pairs = []
    for _, pid, gid, ov in candidates:
        if pid in used_pred or gid in used_gt:
            continue
        used_pred.add(pid)
        used_gt.add(gid)
        pairs.append((pid, gid, ov))
    return MatchResult(
        pairs=tuple(pairs),
        unmatched_pred=tuple(p.id for p in preds if p.id not in used_pred),
        unmatched_gt=tuple(g.id for g in gts if g.id not in used_gt),
    )


# ---------------------------------------------------------------------------
# Cluster-count sweep: how sensitive is the agreement stage to k?

def sweep_clusters(
    embeddings: Mapping[str, np.ndarray],
    weak,
    gt_labels: Mapping[str, str],
    vocab: EntityVocabulary,
    k_values: Sequence[int],
    method: str = "ward",
    seed: int = 0,
) -> dict[int, MetricReport]:
    """Run the agreement stage at several cluster counts.

    With ward linkage the merge tree is built once and cut per k; k-means
    reruns per k with a k-derived seed.
    """
    ids = sorted(embeddings)
    reports: dict[int, MetricReport] = {}
    linkage = None
    if method == "ward":
        X = np.stack([np.asarray(embeddings[i], dtype=np.float64) for i in ids])
        linkage = ward_linkage(X)
    elif method != "kmeans":
        raise ValueError(f"unknown clustering method {method!r}")

    for k in k_values:
        if method == "ward":
            flat = cut_linkage(linkage, len(ids), k)
            clusters = ClusterAssignment(
                k=k,
                assignment={i: int(c) for i, c in zip(ids, flat)},
                centroids=None,
                objective=total_within_cluster_ss(X, flat),
            )
        else:
            clusters = kmeans(embeddings, k, seed=derive_seed(seed, "sweep", k))
        cleansed = majority_assign(clusters, weak, vocab)
        reports[k] = evaluate_labels(gt_labels, cleansed.labels, vocab)
    return reports
