"""Domain types, dataset container, and interchange-file ingestion.

Interchange files are line-delimited JSON (one record per line, UTF-8,
schema version 1). Writers emit a canonical formatting, so loading a
canonically formatted file and writing it back is byte-identical.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyDatasetError, ParseError, SchemaError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixel coordinates, (x_min, y_min) top-left."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def validate(self, context: str = "box") -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise SchemaError(f"{context}: degenerate box {self.as_list()}")
        if min(self.x_min, self.y_min) < 0:
            raise SchemaError(f"{context}: negative coordinates {self.as_list()}")

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


@dataclass(frozen=True, order=True)
class FrameRef:
    """Identifies one frame of one video."""

    video_id: str
    frame_index: int


@dataclass(frozen=True, eq=False)
class DetectionRecord:
    """One visual entity instance: an embedding plus its box and frame."""

    id: str
    frame: FrameRef
    box: BoundingBox
    embedding: np.ndarray
    gt_label: str | None = None


@dataclass(frozen=True)
class MentionRecord:
    """One named-entity mention from a caption, tied to a frame.

    ``normalized`` is None until vocabulary normalization has run.
    """

    frame: FrameRef
    surface: str
    normalized: str | None = None

    def with_normalized(self, name: str) -> "MentionRecord":
        return replace(self, normalized=name)


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of detections and mentions with a fixed
    embedding dimensionality. Safe to share across threads after load."""

    detections: tuple[DetectionRecord, ...]
    mentions: tuple[MentionRecord, ...]
    embedding_dim: int
    orphan_frames: frozenset[FrameRef] = frozenset()

    def embeddings_by_id(self) -> dict[str, np.ndarray]:
        return {d.id: d.embedding for d in self.detections}

    def detection_ids(self) -> list[str]:
        return [d.id for d in self.detections]


@dataclass(frozen=True)
class FrameGroup:
    """All detections of one frame plus its deduplicated mention surfaces."""

    detections: tuple[DetectionRecord, ...]
    surfaces: tuple[str, ...]


def _require(record: Mapping, key: str, path: str, line_number: int):
    if key not in record:
        raise ParseError(path, line_number, f"missing key '{key}'")
    return record[key]


def _parse_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(str(path), line_number, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ParseError(str(path), line_number, "record is not a JSON object")
            yield line_number, record


def _check_schema_version(record: dict, path: str, line_number: int) -> None:
    version = _require(record, "schema", path, line_number)
    if version != SCHEMA_VERSION:
        raise ParseError(path, line_number, f"unsupported schema version {version!r}")


def parse_detection(record: dict, path: str = "<memory>", line_number: int = 0) -> DetectionRecord:
    _check_schema_version(record, path, line_number)
    det_id = _require(record, "id", path, line_number)
    video_id = _require(record, "video_id", path, line_number)
    frame_index = _require(record, "frame_index", path, line_number)
    box_values = _require(record, "box", path, line_number)
    embedding = _require(record, "embedding", path, line_number)
    gt_label = record.get("gt_label")

    if not isinstance(det_id, str) or not det_id:
        raise ParseError(path, line_number, "'id' must be a non-empty string")
    if not isinstance(video_id, str) or not video_id:
        raise ParseError(path, line_number, "'video_id' must be a non-empty string")
    if not isinstance(frame_index, int) or isinstance(frame_index, bool) or frame_index < 0:
        raise ParseError(path, line_number, "'frame_index' must be a non-negative integer")
    if not isinstance(box_values, list) or len(box_values) != 4:
        raise ParseError(path, line_number, "'box' must be a list of 4 numbers")
    if not isinstance(embedding, list) or not embedding:
        raise ParseError(path, line_number, "'embedding' must be a non-empty list")
    if gt_label is not None and (not isinstance(gt_label, str) or not gt_label):
        raise ParseError(path, line_number, "'gt_label' must be null or a non-empty string")

    vector = np.asarray(embedding, dtype=np.float64)
    if not np.all(np.isfinite(vector)):
        raise SchemaError(f"detection '{det_id}': embedding has non-finite components")
    box = BoundingBox(*(float(v) for v in box_values))
    box.validate(context=f"detection '{det_id}'")
    return DetectionRecord(
        id=det_id,
        frame=FrameRef(video_id, frame_index),
        box=box,
        embedding=vector,
        gt_label=gt_label,
    )


def parse_mention(record: dict, path: str = "<memory>", line_number: int = 0) -> MentionRecord:
    _check_schema_version(record, path, line_number)
    video_id = _require(record, "video_id", path, line_number)
    frame_index = _require(record, "frame_index", path, line_number)
    surface = _require(record, "surface", path, line_number)
    if not isinstance(video_id, str) or not video_id:
        raise ParseError(path, line_number, "'video_id' must be a non-empty string")
    if not isinstance(frame_index, int) or isinstance(frame_index, bool) or frame_index < 0:
        raise ParseError(path, line_number, "'frame_index' must be a non-negative integer")
    if not isinstance(surface, str) or not surface:
        raise ParseError(path, line_number, "'surface' must be a non-empty string")
    return MentionRecord(frame=FrameRef(video_id, frame_index), surface=surface)


def read_detections(path: str | Path) -> list[DetectionRecord]:
    """Parse a detections file; ids must be unique, dimensions consistent."""
    detections: list[DetectionRecord] = []
    seen_ids: set[str] = set()
    for line_number, record in _parse_jsonl(path):
        det = parse_detection(record, str(path), line_number)
        if det.id in seen_ids:
            raise SchemaError(f"detection '{det.id}': duplicate id (line {line_number})")
        seen_ids.add(det.id)
        detections.append(det)
    if not detections:
        raise EmptyDatasetError(f"{path}: no detection records")

    dim = detections[0].embedding.shape[0]
    for det in detections:
        if det.embedding.shape[0] != dim:
            raise SchemaError(
                f"detection '{det.id}': embedding dimension "
                f"{det.embedding.shape[0]} != dataset dimension {dim}"
            )
    return detections


def read_mentions(path: str | Path) -> list[MentionRecord]:
    return [parse_mention(r, str(path), n) for n, r in _parse_jsonl(path)]


def load_dataset(detections_path: str | Path, mentions_path: str | Path | None) -> Dataset:
    """Load and validate the two interchange files into a Dataset.

    Frames that carry mentions but no detections are retained and flagged
    as orphans; their mentions still count toward vocabulary frequencies.
    ``mentions_path`` may be None for detections-only use (evaluation).
    """
    detections = read_detections(detections_path)
    dim = detections[0].embedding.shape[0]
    mentions = read_mentions(mentions_path) if mentions_path is not None else []

    detection_frames = {d.frame for d in detections}
    orphans = frozenset(m.frame for m in mentions if m.frame not in detection_frames)
    if orphans:
        log.warning("%d mention frame(s) have no detections (kept as orphans)", len(orphans))

    return Dataset(
        detections=tuple(detections),
        mentions=tuple(mentions),
        embedding_dim=int(dim),
        orphan_frames=orphans,
    )


def canonical_json(record: dict) -> str:
    """The one formatting used by every writer; guarantees round-trips."""
    return json.dumps(record, ensure_ascii=False, separators=(", ", ": "))


def detection_to_record(det: DetectionRecord) -> dict:
    return {
        "id": det.id,
        "video_id": det.frame.video_id,
        "frame_index": det.frame.frame_index,
        "box": det.box.as_list(),
        "embedding": [float(v) for v in det.embedding],
        "gt_label": det.gt_label,
        "schema": SCHEMA_VERSION,
    }


def mention_to_record(mention: MentionRecord) -> dict:
    return {
        "video_id": mention.frame.video_id,
        "frame_index": mention.frame.frame_index,
        "surface": mention.surface,
        "schema": SCHEMA_VERSION,
    }


def write_detections(path: str | Path, detections: Iterable[DetectionRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for det in detections:
            fh.write(canonical_json(detection_to_record(det)) + "\n")


def write_mentions(path: str | Path, mentions: Iterable[MentionRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for mention in mentions:
            fh.write(canonical_json(mention_to_record(mention)) + "\n")


def frame_groups(ds: Dataset) -> dict[FrameRef, FrameGroup]:
    """Group detections and deduplicated mention surfaces per frame.

    Every detection lands in exactly one group. Frames holding only
    mentions appear with an empty detection tuple. Keys are sorted by
    (video_id, frame_index) for deterministic iteration.
    """
    dets: dict[FrameRef, list[DetectionRecord]] = {}
    for det in ds.detections:
        dets.setdefault(det.frame, []).append(det)
    surfaces: dict[FrameRef, list[str]] = {}
    for mention in ds.mentions:
        bucket = surfaces.setdefault(mention.frame, [])
        if mention.surface not in bucket:
            bucket.append(mention.surface)

    frames = sorted(set(dets) | set(surfaces))
    return {
        frame: FrameGroup(
            detections=tuple(dets.get(frame, ())),
            surfaces=tuple(surfaces.get(frame, ())),
        )
        for frame in frames
    }


def embedding_matrix(ds: Dataset) -> np.ndarray:
    """Stack all embeddings into an (n, d) float64 matrix in dataset order."""
    return np.stack([d.embedding for d in ds.detections])


def is_finite_vector(values: Iterable[float]) -> bool:
    return all(math.isfinite(v) for v in values)
