"""Stage 2: over-cluster the embeddings and vote a name per cluster.

k-means is Lloyd's algorithm with k-means++ seeding; the agglomerative
path is Ward linkage computed with the nearest-neighbor-chain algorithm
and Lance-Williams cost updates, then cut at k clusters. Both are
deterministic: k-means from its seed, Ward from fixed tie rules.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .bipartite import WeakLabelSet
from .vocab import EntityVocabulary


@dataclass
class ClusterAssignment:
    """Final clustering of a set of detections.

    ``objective`` is the total within-cluster sum of squared Euclidean
    distances under ``assignment``; for k-means, ``objective_history``
    holds the per-iteration values (non-increasing by construction).
    """

    k: int
    assignment: dict[str, int]
    centroids: np.ndarray | None
    objective: float
    objective_history: tuple[float, ...] = ()


@dataclass
class CleansedLabels:
    """Per-detection labels after cluster majority voting."""

    labels: dict[str, str]
    cluster_votes: dict[int, Counter] = field(default_factory=dict)
    cluster_labels: dict[int, str] = field(default_factory=dict)


def _as_matrix(embeddings: Mapping[str, np.ndarray]) -> tuple[list[str], np.ndarray]:
    ids = list(embeddings)
    if not ids:
        raise ValueError("no embeddings given")
    X = np.stack([np.asarray(embeddings[i], dtype=np.float64) for i in ids])
    if not np.all(np.isfinite(X)):
        raise ValueError("embeddings contain non-finite values")
    return ids, X


def l2_normalize(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    return np.where(norms > 0, X / np.where(norms == 0, 1.0, norms), X)


def _squared_distances(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d2 = (
        np.sum(X**2, axis=1)[:, None]
        - 2.0 * X @ C.T
        + np.sum(C**2, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def total_within_cluster_ss(X: np.ndarray, labels: np.ndarray) -> float:
    """Independent recomputation of the clustering objective."""
    total = 0.0
    for j in np.unique(labels):
        members = X[labels == j]
        total += float(np.sum((members - members.mean(axis=0)) ** 2))
    return total


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = _squared_distances(X, X[chosen[-1]][None, :])[:, 0]
    for _ in range(k - 1):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass duplicates a chosen centroid
            idx = int(rng.integers(n))
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            idx = min(idx, n - 1)
        chosen.append(idx)
        d2 = np.minimum(d2, _squared_distances(X, X[idx][None, :])[:, 0])
    return X[chosen].copy()


def kmeans(
    embeddings: Mapping[str, np.ndarray],
    k: int,
    seed: int = 0,
    max_iters: int = 300,
    tol: float = 1e-6,
    init: np.ndarray | None = None,
) -> ClusterAssignment:
    """Lloyd's algorithm. ``tol`` bounds the max centroid displacement;
    ``init`` overrides k-means++ seeding (used by oracle tests).

    Empty clusters are repaired by reseeding from the point currently
    farthest from its assigned centroid.
    """
    ids, X = _as_matrix(embeddings)
    n = X.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")

    if init is not None:
        centroids = np.asarray(init, dtype=np.float64).copy()
        if centroids.shape != (k, X.shape[1]):
            raise ValueError(f"init must have shape {(k, X.shape[1])}")
    else:
        centroids = _kmeans_pp_init(X, k, np.random.default_rng(seed))

    history: list[float] = []
    prev = np.inf

    def assign(C: np.ndarray) -> tuple[np.ndarray, float]:
        d2 = _squared_distances(X, C)
        labels = np.argmin(d2, axis=1)
        return labels, float(d2[np.arange(n), labels].sum())

    def check_monotone(value: float) -> None:
        nonlocal prev
        if value > prev * (1.0 + 1e-12) + 1e-12:
            raise AssertionError(
                f"k-means objective increased: {prev} -> {value}"
            )
        prev = value

    labels = np.zeros(n, dtype=int)
    for _ in range(max_iters):
        labels, objective = assign(centroids)
        check_monotone(objective)
        history.append(objective)

        new_centroids = centroids.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new_centroids[j] = X[members].mean(axis=0)
        empty = [j for j in range(k) if not (labels == j).any()]
        if empty:
            d2 = _squared_distances(X, centroids)
            point_cost = d2[np.arange(n), labels].copy()
            for j in empty:
                idx = int(np.argmax(point_cost))
                new_centroids[j] = X[idx]
                point_cost[idx] = -1.0

        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if shift < tol:
            break

    labels, objective = assign(centroids)
    check_monotone(objective)
    history.append(objective)

    return ClusterAssignment(
        k=k,
        assignment={det_id: int(label) for det_id, label in zip(ids, labels)},
        centroids=centroids,
        objective=objective,
        objective_history=tuple(history),
    )


def ward_linkage(X: np.ndarray) -> list[tuple[int, int, float]]:
    """Full Ward merge history by nearest-neighbor chain.

    Clusters are identified by the smallest original point index among
    their members. Returns (rep_a, rep_b, merge_cost) triples where the
    cost is the increase in total within-cluster sum of squares.
    """
    n = X.shape[0]
    if n == 1:
        return []
    D = _squared_distances(X, X) * 0.5
    np.fill_diagonal(D, np.inf)
    sizes = np.ones(n)
    active = np.ones(n, dtype=bool)
    merges: list[tuple[int, int, float]] = []
    chain: list[int] = []

    while len(merges) < n - 1:
        if not chain:
            chain.append(int(np.flatnonzero(active)[0]))
        a = chain[-1]
        row = np.where(active, D[a], np.inf)
        row[a] = np.inf
        b = int(np.argmin(row))
        # prefer the previous chain element on ties so reciprocal pairs merge
        if len(chain) > 1 and row[chain[-2]] == row[b]:
            b = chain[-2]
        if len(chain) > 1 and b == chain[-2]:
            chain.pop()
            chain.pop()
            keep, drop = min(a, b), max(a, b)
            cost = float(D[a, b])
            merges.append((keep, drop, cost))
            na, nb = sizes[keep], sizes[drop]
            others = active.copy()
            others[keep] = others[drop] = False
            nc = sizes[others]
            D[keep, others] = (
                (na + nc) * D[keep, others]
                + (nb + nc) * D[drop, others]
                - nc * cost
            ) / (na + nb + nc)
            D[others, keep] = D[keep, others]
            sizes[keep] = na + nb
            active[drop] = False
            D[drop, :] = np.inf
            D[:, drop] = np.inf
        else:
            chain.append(b)
    return merges


def cut_linkage(merges: list[tuple[int, int, float]], n: int, k: int) -> np.ndarray:
    """Partition into k clusters by replaying the n-k cheapest merges.
    Cluster indices are assigned by each cluster's smallest member."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for rep_a, rep_b, _ in sorted(merges, key=lambda m: m[2])[: n - k]:
        ra, rb = find(rep_a), find(rep_b)
        parent[max(ra, rb)] = min(ra, rb)

    roots = sorted({find(i) for i in range(n)})
    index = {root: j for j, root in enumerate(roots)}
    return np.array([index[find(i)] for i in range(n)], dtype=int)


def agglomerative_ward(embeddings: Mapping[str, np.ndarray], k: int) -> ClusterAssignment:
    """Bottom-up Ward clustering stopped at k clusters. O(n^2) memory."""
    ids, X = _as_matrix(embeddings)
    n = X.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")
    labels = cut_linkage(ward_linkage(X), n, k)
    return ClusterAssignment(
        k=k,
        assignment={det_id: int(label) for det_id, label in zip(ids, labels)},
        centroids=None,
        objective=total_within_cluster_ss(X, labels),
    )


def majority_assign(
    clusters: ClusterAssignment,
    weak: Mapping[str, WeakLabelSet],
    vocab: EntityVocabulary,
) -> CleansedLabels:
    """Give every cluster its most frequent weak-label candidate.

    Vote ties break toward the globally more frequent vocabulary entity,
    then the lexicographically smaller name; clusters with no votes at
    all fall back to unknown. Order-invariant: tallies are commutative
    and the tie rule depends only on counts and names.
    """
    missing = [det_id for det_id in clusters.assignment if det_id not in weak]
    if missing:
        raise ValueError(f"weak labels missing for {len(missing)} detections")

    votes: dict[int, Counter] = {j: Counter() for j in sorted(set(clusters.assignment.values()))}
    for det_id, cluster in clusters.assignment.items():
        votes[cluster].update(weak[det_id].candidates)

    cluster_labels: dict[int, str] = {}
    for cluster, tally in votes.items():
        if not tally:
            cluster_labels[cluster] = vocab.unknown_name
            continue
        cluster_labels[cluster] = min(
            tally, key=lambda name: (-tally[name], -vocab.frequency(name), name)
        )

    labels = {det_id: cluster_labels[c] for det_id, c in clusters.assignment.items()}
    return CleansedLabels(labels=labels, cluster_votes=votes, cluster_labels=cluster_labels)
