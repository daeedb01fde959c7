"""End-to-end orchestration of the three discovery stages.

Stage 1 attaches caption names to detections through frame/caption
bipartite graphs and samples one candidate per detection. Stage 2
over-clusters the embeddings and replaces every member's label with its
cluster's majority vote. Stage 3 builds per-label mean prototypes and
re-assigns detections holding the most frequent label to their nearest
prototype.
"""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .bipartite import WeakLabelSet, WindowPolicy, build_graphs, stage1_labels, weak_labels
from .clustering import (
    CleansedLabels,
    ClusterAssignment,
    agglomerative_ward,
    kmeans,
    majority_assign,
)
from .core import Dataset
from .errors import ConfigError
from .prototypes import EntityPrototype, RefinedLabels, compute_prototypes, refine
from .seeds import derive_seed
from .vocab import (
    DEFAULT_FUZZY_THRESHOLD,
    DEFAULT_POLICY,
    CutoffPolicy,
    EntityVocabulary,
    build_vocabulary,
    normalize_mentions,
)

STAGE_CHOICES = ("1", "12", "123")


@dataclass(frozen=True, eq=False)
class DiscoveryResult:
    vocab: EntityVocabulary
    weak: Mapping[str, WeakLabelSet]
    stage1: dict[str, str]
    assignment: ClusterAssignment | None
    cleansed: CleansedLabels | None
    refined: RefinedLabels | None
    prototypes: Mapping[str, EntityPrototype] | None
    timings: dict[str, float]

    def labels_for(self, stages: str) -> dict[str, str]:
        if stages == "1":
            return self.stage1
        if stages == "12":
            if self.cleansed is None:
                raise ValueError("stage 2 did not run")
            return self.cleansed.labels
        if stages == "123":
            if self.refined is None:
                raise ValueError("stage 3 did not run")
            return self.refined.labels
        raise ValueError(f"stages must be one of {STAGE_CHOICES}, got {stages!r}")

    def final_labels(self) -> dict[str, str]:
        if self.refined is not None:
            return self.refined.labels
        if self.cleansed is not None:
            return self.cleansed.labels
        return self.stage1


def cluster_embeddings(
    embeddings: Mapping[str, np.ndarray],
    k: int,
    method: str = "ward",
    seed: int = 0,
) -> ClusterAssignment:
    if method == "ward":
        return agglomerative_ward(embeddings, k)
    if method == "kmeans":
        return kmeans(embeddings, k, seed=derive_seed(seed, "stage2", "kmeans"))
    raise ConfigError(f"unknown clustering method {method!r}")


def run_discovery(
    ds: Dataset,
    policy: CutoffPolicy = DEFAULT_POLICY,
    window: WindowPolicy = WindowPolicy.exact(),
    method: str = "ward",
    k: int = 20,
    seed: int = 0,
    stages: str = "123",
    taxonomy: Mapping[str, str] | None = None,
    fuzzy_threshold: int = DEFAULT_FUZZY_THRESHOLD,
    vocab: EntityVocabulary | None = None,
) -> DiscoveryResult:
    """Run stages "1", "12" or "123" and return every intermediate.

    The vocabulary is built from the raw mention stream unless one is
    passed in. Over-clustering is enforced: k must exceed the named
    entity count.
    """
    if stages not in STAGE_CHOICES:
        raise ConfigError(f"stages must be one of {STAGE_CHOICES}, got {stages!r}")
    window.validate()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    if vocab is None:
        vocab = build_vocabulary(ds.mentions, policy)
    normalized = normalize_mentions(ds.mentions, vocab, taxonomy=taxonomy,
                                    threshold=fuzzy_threshold)
    ds = dataclasses.replace(ds, mentions=tuple(normalized))
    timings["vocabulary"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    graphs = build_graphs(ds, window=window, unknown_name=vocab.unknown_name)
    weak = weak_labels(graphs, all_detection_ids=ds.detection_ids())
    stage1 = stage1_labels(weak, root_seed=seed, unknown_name=vocab.unknown_name)
    timings["stage1"] = time.perf_counter() - t0

    assignment = cleansed = refined = protos = None
    if "2" in stages:
        if k <= len(vocab.entities):
            raise ConfigError(
                f"over-clustering requires k > |E| = {len(vocab.entities)}, got k={k}")
        t0 = time.perf_counter()
        embeddings = ds.embeddings_by_id()
        assignment = cluster_embeddings(embeddings, k, method=method, seed=seed)
        cleansed = majority_assign(assignment, weak, vocab)
        timings["stage2"] = time.perf_counter() - t0

    if "3" in stages:
        t0 = time.perf_counter()
        protos = compute_prototypes(embeddings, cleansed.labels)
        refined = refine(cleansed.labels, protos, embeddings)
        timings["stage3"] = time.perf_counter() - t0

    return DiscoveryResult(
        vocab=vocab,
        weak=weak,
        stage1=stage1,
        assignment=assignment,
        cleansed=cleansed,
        refined=refined,
        prototypes=protos,
        timings=timings,
    )
