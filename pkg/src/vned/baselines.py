"""Comparison methods: direct matching, weak/supervised linear heads, random.

The two trainers are plain batch-SGD linear models over the frozen
embeddings -- a one-vs-rest logistic head for the weak multi-label setting
and a softmax head for the supervised oracle. Loss/gradient functions are
module-level and pure so tests can check them against finite differences.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .bipartite import BipartiteGraph, WeakLabelSet, weak_labels
from .clustering import agglomerative_ward, kmeans, majority_assign
from .core import Dataset
from .errors import DataError
from .seeds import derive_seed
from .vocab import EntityVocabulary


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 256
    learning_rate: float = 0.0012
    weight_decay: float = 1e-4
    decay_factor: float = 0.1
    decay_epoch: int = 95
    seed: int = 0


@dataclass(frozen=True, eq=False)
class LinearClassifier:
    classes: tuple[str, ...]
    weights: np.ndarray  # (C, d)
    bias: np.ndarray  # (C,)
    config: TrainConfig

    def scores(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights.T + self.bias

    def predict(self, embeddings: Mapping[str, np.ndarray]) -> dict[str, str]:
        ids = sorted(embeddings)
        X = np.stack([np.asarray(embeddings[i], dtype=np.float64) for i in ids])
        picks = self.scores(X).argmax(axis=1)
        return {i: self.classes[c] for i, c in zip(ids, picks)}

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "classes": list(self.classes),
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "config": {
                "epochs": self.config.epochs,
                "batch_size": self.config.batch_size,
                "learning_rate": self.config.learning_rate,
                "weight_decay": self.config.weight_decay,
                "decay_factor": self.config.decay_factor,
                "decay_epoch": self.config.decay_epoch,
                "seed": self.config.seed,
            },
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "LinearClassifier":
        cfg = TrainConfig(**payload["config"])
        return cls(
            classes=tuple(payload["classes"]),
            weights=np.asarray(payload["weights"], dtype=np.float64),
            bias=np.asarray(payload["bias"], dtype=np.float64),
            config=cfg,
        )


def chronological_split(ds: Dataset, train_fraction: float = 0.8
                        ) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """First 80% of detections by (frame, id) order train, the rest evaluate."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    ordered = [d.id for d in sorted(ds.detections, key=lambda d: (d.frame, d.id))]
    cut = int(len(ordered) * train_fraction)
    if cut == 0 or cut == len(ordered):
        raise ValueError("split leaves an empty side; dataset too small")
    return tuple(ordered[:cut]), tuple(ordered[cut:])


# ---------------------------------------------------------------------------
# Losses. Stable forms; weight decay applies to weights, not bias.

def ovr_loss_and_grad(W, b, X, Y, weight_decay):
    """One-vs-rest logistic loss, summed over classes, averaged over samples."""
    S = X @ W.T + b
    # log(1 + e^s) - y*s, computed without overflow
    loss = float((np.logaddexp(0.0, S) - Y * S).sum(axis=1).mean())
    loss += 0.5 * weight_decay * float((W * W).sum())
    resid = 1.0 / (1.0 + np.exp(-S)) - Y
    n = X.shape[0]
    gW = resid.T @ X / n + weight_decay * W
    gb = resid.mean(axis=0)
    return loss, gW, gb


def softmax_loss_and_grad(W, b, X, y_idx, weight_decay):
    """Multi-class cross entropy averaged over samples."""
    S = X @ W.T + b
    S = S - S.max(axis=1, keepdims=True)
    logZ = np.log(np.exp(S).sum(axis=1))
    n = X.shape[0]
    loss = float((logZ - S[np.arange(n), y_idx]).mean())
    loss += 0.5 * weight_decay * float((W * W).sum())
    P = np.exp(S - logZ[:, None])
    P[np.arange(n), y_idx] -= 1.0
    gW = P.T @ X / n + weight_decay * W
    gb = P.mean(axis=0)
    return loss, gW, gb


def _sgd(loss_grad, X, target, n_classes, cfg: TrainConfig, tag: str
         ) -> tuple[np.ndarray, np.ndarray, list[float]]:
    rng = np.random.default_rng(derive_seed(cfg.seed, "train", tag))
    n, d = X.shape
    W = np.zeros((n_classes, d))
    b = np.zeros(n_classes)
    history: list[float] = []
    for epoch in range(cfg.epochs):
        lr = cfg.learning_rate
        if epoch >= cfg.decay_epoch:
            lr *= cfg.decay_factor
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            _, gW, gb = loss_grad(W, b, X[idx], target[idx], cfg.weight_decay)
            W -= lr * gW
            b -= lr * gb
        full_loss, _, _ = loss_grad(W, b, X, target, cfg.weight_decay)
        history.append(full_loss)
    return W, b, history


def train_multilabel_weak(
    embeddings: Mapping[str, np.ndarray],
    weak: Mapping[str, WeakLabelSet],
    vocab: EntityVocabulary,
    cfg: TrainConfig = TrainConfig(),
) -> tuple[LinearClassifier, list[float]]:
    """OvR logistic head on multi-hot weak-label targets."""
    classes = vocab.classes()
    index = {c: i for i, c in enumerate(classes)}
    ids = sorted(embeddings)
    X = np.stack([np.asarray(embeddings[i], dtype=np.float64) for i in ids])
    Y = np.zeros((len(ids), len(classes)))
    for row, det_id in enumerate(ids):
        ws = weak.get(det_id)
        if ws is None:
            continue
        for name in ws.candidates:
            if name in index:
                Y[row, index[name]] = 1.0
    if not Y.any():
        raise DataError("every weak-label set is empty; nothing to train on")
    W, b, history = _sgd(ovr_loss_and_grad, X, Y, len(classes), cfg, "ovr")
    return LinearClassifier(classes, W, b, cfg), history


def train_oracle(
    embeddings: Mapping[str, np.ndarray],
    gt_labels: Mapping[str, str],
    vocab: EntityVocabulary,
    cfg: TrainConfig = TrainConfig(),
) -> tuple[LinearClassifier, list[float]]:
    """Softmax head on ground-truth labels (supervised upper bound)."""
    classes = vocab.classes()
    index = {c: i for i, c in enumerate(classes)}
    ids = sorted(embeddings)
    missing = [i for i in ids if gt_labels.get(i) is None]
    if missing:
        raise ValueError(
            f"{len(missing)} detections lack gt_label (first: {missing[0]!r})")
    X = np.stack([np.asarray(embeddings[i], dtype=np.float64) for i in ids])
    y_idx = np.array([index[vocab.project_gt(gt_labels[i])] for i in ids])
    W, b, history = _sgd(softmax_loss_and_grad, X, y_idx, len(classes), cfg, "softmax")
    return LinearClassifier(classes, W, b, cfg), history


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimsiResult:
    labels: dict[str, str]
    direct_ids: frozenset[str]


def limsi_assign(
    ds: Dataset,
    vocab: EntityVocabulary,
    graphs: Sequence[BipartiteGraph],
    k: int,
    seed: int = 0,
    method: str = "ward",
) -> LimsiResult:
    """Direct matching where a frame has exactly one name, clustering elsewhere.

    A detection whose frame's caption graphs carry exactly one unique
    non-unknown name takes that name outright. Everything else goes through
    the usual agreement stage, restricted to the undecided detections.
    Direct-matched detections never enter the clustering step.
    """
    names_by_frame: dict = {}
    dets_by_frame: dict = {}
    for g in graphs:
        names_by_frame.setdefault(g.frame, set()).update(
            n for n in g.entity_names if n != vocab.unknown_name)
        dets_by_frame.setdefault(g.frame, set()).update(g.detection_ids)

    labels: dict[str, str] = {}
    direct: set[str] = set()
    for frame, names in names_by_frame.items():
        if len(names) == 1:
            (name,) = names
            for det_id in dets_by_frame[frame]:
                labels[det_id] = name
                direct.add(det_id)

    remaining = [d for d in ds.detections if d.id not in direct]
    if remaining:
        emb = {d.id: d.embedding for d in remaining}
        k_eff = min(k, len(remaining))
        if method == "ward":
            assignment = agglomerative_ward(emb, k_eff)
        elif method == "kmeans":
            assignment = kmeans(emb, k_eff, seed=derive_seed(seed, "limsi"))
        else:
            raise ValueError(f"unknown clustering method {method!r}")
        weak = weak_labels(graphs, all_detection_ids=[d.id for d in remaining])
        cleansed = majority_assign(assignment, weak, vocab)
        labels.update(cleansed.labels)
    return LimsiResult(labels=labels, direct_ids=frozenset(direct))


def random_baseline(
    detection_ids: Sequence[str],
    vocab: EntityVocabulary,
    seed: int = 0,
) -> dict[str, str]:
    """Uniform draw over the full class list, per detection."""
    classes = vocab.classes()
    rng = np.random.default_rng(derive_seed(seed, "random-baseline"))
    picks = rng.integers(len(classes), size=len(detection_ids))
    return {i: classes[c] for i, c in zip(detection_ids, picks)}
