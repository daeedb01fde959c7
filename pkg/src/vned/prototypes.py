"""Stage 3: rebalance the most frequent label via entity prototypes.

Each entity's prototype is the mean embedding of its members under the
stage-2 labels. Only detections carrying the most frequent label are
reassigned, each to its nearest prototype (which may be the one it
already has); everything else is left untouched.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np


@dataclass(frozen=True)
class EntityPrototype:
    entity: str
    vector: np.ndarray
    member_count: int


@dataclass
class RefinedLabels:
    labels: dict[str, str]
    reassigned: frozenset[str]
    most_frequent: str


def compute_prototypes(
    embeddings: Mapping[str, np.ndarray],
    labels: Mapping[str, str],
) -> dict[str, EntityPrototype]:
    """Per-entity mean embedding. Entities with zero members get no
    prototype and therefore cannot be recovered by refinement."""
    members: dict[str, list[np.ndarray]] = {}
    for det_id, label in labels.items():
        members.setdefault(label, []).append(np.asarray(embeddings[det_id], dtype=np.float64))
    return {
        entity: EntityPrototype(
            entity=entity,
            vector=np.mean(vectors, axis=0),
            member_count=len(vectors),
        )
        for entity, vectors in members.items()
    }


def find_most_frequent(labels: Mapping[str, str]) -> str:
    """Label with the highest count; ties go to the lexicographically
    smallest name."""
    if not labels:
        raise ValueError("empty label map")
    tally = Counter(labels.values())
    return min(tally, key=lambda name: (-tally[name], name))


def refine(
    labels: Mapping[str, str],
    prototypes: Mapping[str, EntityPrototype],
    embeddings: Mapping[str, np.ndarray],
    most_frequent: str | None = None,
) -> RefinedLabels:
    """Reassign most-frequent-labeled detections to the nearest prototype.

    The candidate set is every prototyped entity, the current label
    included, so well-placed detections keep their label. Distance ties
    go to the lexicographically smallest entity. Idempotent when re-run
    with the same (prototypes, most_frequent) pair.
    """
    if not prototypes:
        raise RuntimeError("no prototypes available for refinement")
    if most_frequent is None:
        most_frequent = find_most_frequent(labels)

    entity_order = sorted(prototypes)
    proto_matrix = np.stack([prototypes[e].vector for e in entity_order])

    refined = dict(labels)
    reassigned: set[str] = set()
    targets = [det_id for det_id, label in labels.items() if label == most_frequent]
    if targets:
        X = np.stack([np.asarray(embeddings[t], dtype=np.float64) for t in targets])
        d2 = (
            np.sum(X**2, axis=1)[:, None]
            - 2.0 * X @ proto_matrix.T
            + np.sum(proto_matrix**2, axis=1)[None, :]
        )
        nearest = np.argmin(d2, axis=1)
        for det_id, idx in zip(targets, nearest):
            new_label = entity_order[int(idx)]
            if new_label != labels[det_id]:
                refined[det_id] = new_label
                reassigned.add(det_id)

    return RefinedLabels(
        labels=refined,
        reassigned=frozenset(reassigned),
        most_frequent=most_frequent,
    )
