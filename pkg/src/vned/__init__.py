"""Weakly-supervised entity discovery for captioned video datasets.

Detections (embedding vectors with boxes) meet caption mentions through
per-frame bipartite graphs; over-clustering plus per-cluster majority
voting cleans the resulting weak labels, and nearest-prototype
reassignment rebalances the dominant class. See README.md for the file
formats and CLI walkthrough.
"""

__version__ = "0.1.0"

from .bipartite import WindowPolicy, build_graphs, stage1_labels, weak_labels
from .clustering import agglomerative_ward, kmeans, majority_assign
from .core import (
    BoundingBox,
    Dataset,
    DetectionRecord,
    FrameRef,
    MentionRecord,
    load_dataset,
)
from .errors import (
    ConfigError,
    DataError,
    DiscoveryError,
    EvaluationError,
    GenerationError,
    ParseError,
    SchemaError,
)
from .metrics import confusion, evaluate_labels, iou, metrics, sweep_clusters
from .pipeline import DiscoveryResult, run_discovery
from .prototypes import compute_prototypes, refine
from .vocab import (
    CutoffPolicy,
    EntityVocabulary,
    build_vocabulary,
    fuzzy_ratio,
    normalize_mentions,
)

__all__ = [
    "__version__",
    "BoundingBox", "Dataset", "DetectionRecord", "FrameRef", "MentionRecord",
    "load_dataset",
    "CutoffPolicy", "EntityVocabulary", "build_vocabulary", "fuzzy_ratio",
    "normalize_mentions",
    "WindowPolicy", "build_graphs", "weak_labels", "stage1_labels",
    "kmeans", "agglomerative_ward", "majority_assign",
    "compute_prototypes", "refine",
    "confusion", "metrics", "evaluate_labels", "iou", "sweep_clusters",
    "run_discovery", "DiscoveryResult",
    "DiscoveryError", "ConfigError", "DataError", "ParseError", "SchemaError",
    "EvaluationError", "GenerationError",
]
