"""Synthetic captioned-video benchmark generator and reference oracles.

Datasets are Gaussian blobs around well-separated prototypes, one blob per
identity. Identity occurrence follows a Zipf law over the named entities
plus a long tail of background identities whose mentions fall below the
vocabulary cutoff -- so "unknown" mass arises the same way it does in real
captions. Caption noise has two dials: incompleteness (p_mention < 1) and
misalignment (p_spurious > 0).

Also hosts the deliberately naive clustering implementations
(`brute_force_kmeans`, `reference_ward`) used as test oracles for the
production ones in `clustering`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .core import BoundingBox, Dataset, DetectionRecord, FrameRef, MentionRecord
from .errors import ConfigError, GenerationError
from .seeds import derive_seed

# Surface forms chosen to be pairwise dissimilar under the fuzzy matcher,
# so synthetic runs never depend on the misspelling-recovery path.
NAMED_POOL = (
    "amara", "bruno", "celeste", "dmitri", "elif", "farid",
    "greta", "hiro", "ines", "jonas", "kavya", "lorenzo",
)


@dataclass(frozen=True)
class SynthConfig:
    n_entities: int = 7
    embedding_dim: int = 32
    n_frames: int = 1500
    faces_per_frame: tuple[int, int] = (1, 4)
    prototype_separation: float = 8.0
    within_entity_stddev: float = 1.0
    p_mention: float = 0.5
    p_spurious: float = 0.2
    zipf_s: float = 1.0
    unknown_tail_entities: int = 30
    tail_relative: float = 0.35  # per-tail-identity weight vs rarest named
    background_offset: float = 4.0  # background-region center, in separations
    background_spread: float = 0.7  # tail placement scale vs named scale
    penny_entity: str | None = None  # entity whose mentions are suppressed
    penny_factor: float = 0.05
    seed: int = 42

    def validate(self) -> None:
        if self.n_entities < 2:
            raise ConfigError("n_entities must be >= 2")
        if self.n_entities > len(NAMED_POOL):
            raise ConfigError(
                f"n_entities > {len(NAMED_POOL)} not supported by the name pool"
            )
        if self.embedding_dim < 1:
            raise ConfigError("embedding_dim must be >= 1")
        if self.n_frames < 1:
            raise ConfigError("n_frames must be >= 1")
        lo, hi = self.faces_per_frame
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad faces_per_frame range ({lo}, {hi})")
        if hi > self.n_entities + self.unknown_tail_entities:
            raise ConfigError("faces_per_frame exceeds identity count")
        for name in ("p_mention", "p_spurious"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {p}")
        if self.within_entity_stddev <= 0:
            raise ConfigError("within_entity_stddev must be > 0")
        if self.prototype_separation <= 0:
            raise ConfigError("prototype_separation must be > 0")
        if self.zipf_s < 0:
            raise ConfigError("zipf_s must be >= 0")
        if self.unknown_tail_entities < 0:
            raise ConfigError("unknown_tail_entities must be >= 0")
        if self.unknown_tail_entities and self.tail_relative <= 0:
            raise ConfigError("tail_relative must be > 0")
        if self.background_offset < 0:
            raise ConfigError("background_offset must be >= 0")
        if self.background_spread <= 0:
            raise ConfigError("background_spread must be > 0")
        if self.penny_entity is not None and not 0.0 <= self.penny_factor <= 1.0:
            raise ConfigError("penny_factor must be in [0, 1]")

    def named_entities(self) -> tuple[str, ...]:
        return NAMED_POOL[: self.n_entities]

    def tail_identities(self) -> tuple[str, ...]:
        return tuple(f"extra_{i:02d}" for i in range(1, self.unknown_tail_entities + 1))


def canonical_config(seed: int = 42) -> SynthConfig:
    """The benchmark every directional test runs on."""
    return SynthConfig(seed=seed)


def unknown_dominant_config(seed: int = 42) -> SynthConfig:
    """Background faces outnumber each named entity (crowd-scene regime).

    Tails are interleaved with the named blobs at lower separation, so the
    agreement stage strands some named detections in unknown-voted
    clusters -- exactly the residue the prototype stage repairs.
    """
    return SynthConfig(
        n_entities=6,
        prototype_separation=3.5,
        tail_relative=0.5,
        background_offset=0.0,
        background_spread=1.0,
        seed=seed,
    )


def penny_config(seed: int = 42) -> SynthConfig:
    """One entity's mentions suppressed to 5% of expected.

    Models a name the caption pipeline systematically misses. Pair with a
    top_k vocabulary policy: at 5% the suppressed name would fall under a
    frequency cutoff and vanish from the vocabulary entirely.
    """
    return replace(
        canonical_config(seed),
        tail_relative=0.05,
        penny_entity=NAMED_POOL[2],
        penny_factor=0.05,
    )


@dataclass(frozen=True, eq=False)
class SynthResult:
    dataset: Dataset
    prototypes: Mapping[str, np.ndarray]  # identity -> true blob center
    config: SynthConfig


def _place_prototypes(rng, named, tails, cfg: SynthConfig) -> dict[str, np.ndarray]:
    """Sample blob centers with pairwise distance >= the configured separation.

    Named centers scatter around the origin at roughly twice the minimum
    separation. Tail centers scatter (more tightly, via background_spread)
    around a point background_offset separations away, so background
    identities look like each other more than like the cast; an offset of
    0 interleaves them with the named blobs instead.
    """
    min_dist = cfg.prototype_separation * cfg.within_entity_stddev
    scale = 2.0 * min_dist / np.sqrt(2.0 * cfg.embedding_dim)
    direction = rng.normal(0.0, 1.0, size=cfg.embedding_dim)
    direction /= np.linalg.norm(direction)
    background_center = direction * cfg.background_offset * min_dist

    placed: list[np.ndarray] = []
    prototypes: dict[str, np.ndarray] = {}
    for name in named + tails:
        if name in tails:
            center, spread = background_center, scale * cfg.background_spread
        else:
            center, spread = np.zeros(cfg.embedding_dim), scale
        for _ in range(1000):
            cand = center + rng.normal(0.0, spread, size=cfg.embedding_dim)
            if all(float(np.linalg.norm(cand - p)) >= min_dist for p in placed):
                placed.append(cand)
                prototypes[name] = cand
                break
        else:
            raise GenerationError(
                f"could not place prototype for {name!r} at separation "
                f"{min_dist:g} in {cfg.embedding_dim} dimensions"
            )
    return prototypes


def generate(cfg: SynthConfig) -> SynthResult:
    cfg.validate()
    rng = np.random.default_rng(derive_seed(cfg.seed, "synth"))

    named = cfg.named_entities()
    tails = cfg.tail_identities()
    identities = named + tails
    prototypes = _place_prototypes(rng, named, tails, cfg)

    weights = np.array(
        [float(r) ** -cfg.zipf_s for r in range(1, len(named) + 1)]
        + [cfg.tail_relative * float(len(named)) ** -cfg.zipf_s] * len(tails)
    )
    weights /= weights.sum()

    p_mention_for = {name: cfg.p_mention for name in identities}
    if cfg.penny_entity is not None:
        if cfg.penny_entity not in named:
            raise ConfigError(f"penny_entity {cfg.penny_entity!r} is not a named entity")
        p_mention_for[cfg.penny_entity] = cfg.p_mention * cfg.penny_factor

    lo, hi = cfg.faces_per_frame
    detections: list[DetectionRecord] = []
    mentions: list[MentionRecord] = []
    for f in range(cfg.n_frames):
        frame = FrameRef(video_id="synth", frame_index=f)
        n_faces = int(rng.integers(lo, hi + 1))
        present = [identities[i] for i in
                   rng.choice(len(identities), size=n_faces, replace=False, p=weights)]
        for slot, who in enumerate(present):
            emb = prototypes[who] + rng.normal(0.0, cfg.within_entity_stddev,
                                               size=cfg.embedding_dim)
            x1 = 4 + 24 * slot
            detections.append(DetectionRecord(
                id=f"d{f:05d}_{slot}",
                frame=frame,
                box=BoundingBox(x1, 8, x1 + 20, 32),
                embedding=emb,
                gt_label=who,
            ))
        for who in present:
            if rng.random() < p_mention_for[who]:
                mentions.append(MentionRecord(frame=frame, surface=who))
        if rng.random() < cfg.p_spurious:
            absent = [n for n in named if n not in present]
            if absent:
                who = absent[int(rng.integers(len(absent)))]
                mentions.append(MentionRecord(frame=frame, surface=who))

    ds = Dataset(
        detections=tuple(detections),
        mentions=tuple(mentions),
        embedding_dim=cfg.embedding_dim,
        orphan_frames=frozenset(),
    )
    return SynthResult(dataset=ds, prototypes=prototypes, config=cfg)


# ---------------------------------------------------------------------------
# Reference oracles. Correct, small, and slow on purpose.

def _partitions_upto(n: int, k: int):
    """Restricted-growth strings: every partition of range(n) into <= k blocks."""
    def rec(prefix: list[int], used: int):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(min(used + 1, k - 1) + 1):
            yield from rec(prefix + [b], max(used, b))
    yield from rec([0], 0) if n else iter(())


def brute_force_kmeans(X: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    """Globally optimal sum of within-cluster squared distances, n <= 10.

    Enumerates all set partitions into at most k blocks (centroids are
    free, so fewer blocks is allowed) and scores each at its block means.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n > 10:
        raise ValueError(f"brute force limited to n <= 10, got {n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    best_obj = np.inf
    best = None
    for assign in _partitions_upto(n, k):
        labels = np.asarray(assign)
        obj = 0.0
        for b in set(assign):
            block = X[labels == b]
            obj += float(((block - block.mean(axis=0)) ** 2).sum())
        if obj < best_obj - 1e-15:
            best_obj = obj
            best = labels
    return best, best_obj


def reference_ward(X: np.ndarray, k: int) -> np.ndarray:
    """Naive Ward agglomeration recomputing means each merge, n <= 64.

    Merge cost is the exact increase in within-cluster sum of squares,
    na*nb/(na+nb) * ||mean_a - mean_b||^2. Ties break on the smallest
    (representative_a, representative_b) pair, matching the production
    implementation's ordering on tie-free data.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n > 64:
        raise ValueError(f"reference ward limited to n <= 64, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")

    clusters: dict[int, list[int]] = {i: [i] for i in range(n)}
    while len(clusters) > k:
        best = None
        for a, b in itertools.combinations(sorted(clusters), 2):
            ma = X[clusters[a]].mean(axis=0)
            mb = X[clusters[b]].mean(axis=0)
            na, nb = len(clusters[a]), len(clusters[b])
            cost = na * nb / (na + nb) * float(((ma - mb) ** 2).sum())
            if best is None or cost < best[0] - 1e-12 or (
                    abs(cost - best[0]) <= 1e-12 and (a, b) < best[1:]):
                best = (cost, a, b)
        _, a, b = best
        clusters[a] = sorted(clusters[a] + clusters[b])
        del clusters[b]

    labels = np.zeros(n, dtype=np.int64)
    for new_id, rep in enumerate(sorted(clusters)):
        labels[clusters[rep]] = new_id
    return labels
