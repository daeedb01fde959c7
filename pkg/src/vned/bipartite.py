"""Stage 1: per-frame dense bipartite alignment of detections and names.

Each caption contributes one graph per target frame it reaches. With the
default exact-frame window a caption only reaches its own frame; scene
mode attaches each named entity to a forward window of frames, with a
separate (shorter) window for unknown.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import Dataset, FrameRef
from .errors import ConfigError
from .seeds import derive_seed
from .vocab import UNKNOWN_NAME


@dataclass(frozen=True)
class WindowPolicy:
    """How many forward frames a mention at frame t attaches to (t..t+W-1).

    ``dedup_per_graph`` keeps each entity at most once per contributing
    caption; disabling it lets repeated mentions inside one caption vote
    with their raw multiplicity.
    """

    w_known: int = 1
    w_unknown: int = 1
    dedup_per_graph: bool = True

    @classmethod
    def exact(cls) -> "WindowPolicy":
        return cls(w_known=1, w_unknown=1)

    @classmethod
    def scene(cls) -> "WindowPolicy":
        return cls(w_known=4, w_unknown=1)

    def validate(self) -> None:
        if self.w_known < 1 or self.w_unknown < 1:
            raise ConfigError(
                f"window sizes must be >= 1, got ({self.w_known}, {self.w_unknown})"
            )

    def width(self, entity_name: str, unknown_name: str) -> int:
        return self.w_unknown if entity_name == unknown_name else self.w_known


@dataclass(frozen=True)
class BipartiteGraph:
    """Dense product between one frame's detections and one caption's
    entity names; edges are implicit."""

    frame: FrameRef
    source_frame: FrameRef
    detection_ids: tuple[str, ...]
    entity_names: tuple[str, ...]

    @property
    def edge_count(self) -> int:
        return len(self.detection_ids) * len(self.entity_names)


@dataclass
class WeakLabelSet:
    """Multiset of candidate names a detection accumulated across graphs."""

    detection_id: str
    candidates: Counter

    def is_empty(self) -> bool:
        return sum(self.candidates.values()) == 0


def build_graphs(
    ds: Dataset,
    window: WindowPolicy = WindowPolicy.exact(),
    unknown_name: str = UNKNOWN_NAME,
) -> list[BipartiteGraph]:
    """One graph per (detection-bearing frame, contributing caption).

    Mentions must be normalized. A frame whose captions contribute
    nothing still yields a single graph with an empty entity list, so
    every detection is covered. Output is sorted by target frame, then
    source frame.
    """
    window.validate()
    if any(m.normalized is None for m in ds.mentions):
        raise ValueError("mentions must be normalized before graph construction")

    detections_per_frame: dict[FrameRef, list[str]] = {}
    for det in ds.detections:
        detections_per_frame.setdefault(det.frame, []).append(det.id)

    caption_names: dict[FrameRef, list[str]] = {}
    for mention in ds.mentions:
        caption_names.setdefault(mention.frame, []).append(mention.normalized)

    # contributions[(target, source)] = names the source caption sends there
    contributions: dict[tuple[FrameRef, FrameRef], list[str]] = {}
    for source, names in caption_names.items():
        for name in names:
            reach = window.width(name, unknown_name)
            for delta in range(reach):
                target = FrameRef(source.video_id, source.frame_index + delta)
                if target not in detections_per_frame:
                    continue
                contributions.setdefault((target, source), []).append(name)

    graphs: list[BipartiteGraph] = []
    covered: set[FrameRef] = set()
    for (target, source), names in contributions.items():
        if window.dedup_per_graph:
            names = list(dict.fromkeys(names))
        graphs.append(
            BipartiteGraph(
                frame=target,
                source_frame=source,
                detection_ids=tuple(detections_per_frame[target]),
                entity_names=tuple(names),
            )
        )
        covered.add(target)

    for frame, ids in detections_per_frame.items():
        if frame not in covered:
            graphs.append(
                BipartiteGraph(
                    frame=frame,
                    source_frame=frame,
                    detection_ids=tuple(ids),
                    entity_names=(),
                )
            )

    graphs.sort(key=lambda g: (g.frame, g.source_frame))
    return graphs


def weak_labels(
    graphs: Iterable[BipartiteGraph],
    all_detection_ids: Sequence[str] | None = None,
) -> dict[str, WeakLabelSet]:
    """Accumulate each detection's candidate multiset over all its graphs.

    Pass ``all_detection_ids`` to guarantee an (empty) entry for
    detections that appear in no graph.
    """
    result: dict[str, WeakLabelSet] = {}
    if all_detection_ids is not None:
        for det_id in all_detection_ids:
            result[det_id] = WeakLabelSet(det_id, Counter())
    for graph in sorted(graphs, key=lambda g: (g.frame, g.source_frame)):
        for det_id in graph.detection_ids:
            if det_id not in result:
                result[det_id] = WeakLabelSet(det_id, Counter())
            result[det_id].candidates.update(graph.entity_names)
    return result


def stage1_predict(
    weak: WeakLabelSet, rng_seed: int, unknown_name: str = UNKNOWN_NAME
) -> str:
    """Uniform draw from the candidate multiset; unknown when empty.
    Deterministic given (candidates, seed)."""
    pool = sorted(weak.candidates.elements())
    if not pool:
        return unknown_name
    return pool[random.Random(rng_seed).randrange(len(pool))]


def stage1_labels(
    weak_map: Mapping[str, WeakLabelSet],
    root_seed: int,
    unknown_name: str = UNKNOWN_NAME,
) -> dict[str, str]:
    """Stage-1 prediction for every detection, one derived seed each."""
    return {
        det_id: stage1_predict(weak, derive_seed(root_seed, "stage1", det_id), unknown_name)
        for det_id, weak in weak_map.items()
    }
