"""Closed entity vocabulary with a long-tail "unknown" category.

Mention surfaces are grouped case-insensitively; groups passing a
frequency cutoff become canonical entities, everything else folds into
the unknown label. Noisy variants ("sHeldon", "Shedlon") are mapped onto
canonical names by an LCS-based fuzzy ratio.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core import MentionRecord
from .errors import ConfigError

UNKNOWN_NAME = "unknown"
DEFAULT_FUZZY_THRESHOLD = 70


@dataclass(frozen=True)
class CutoffPolicy:
    """Which mention-frequency groups become named entities.

    ``top_k`` keeps the k most frequent groups; ``min_fraction`` keeps
    groups whose count is at least ``fraction`` of the most frequent one.
    """

    kind: str
    k: int = 0
    fraction: float = 0.0

    @classmethod
    def top_k(cls, k: int) -> "CutoffPolicy":
        return cls(kind="top_k", k=k)

    @classmethod
    def min_fraction(cls, fraction: float) -> "CutoffPolicy":
        return cls(kind="min_fraction", fraction=fraction)

    def validate(self) -> None:
        if self.kind == "top_k":
            if self.k <= 0:
                raise ConfigError(f"top_k cutoff requires k > 0, got {self.k}")
        elif self.kind == "min_fraction":
            if not 0.0 < self.fraction <= 1.0:
                raise ConfigError(
                    f"min_fraction cutoff requires fraction in (0, 1], got {self.fraction}"
                )
        else:
            raise ConfigError(f"unknown cutoff policy '{self.kind}'")

    @classmethod
    def parse(cls, text: str) -> "CutoffPolicy":
        """Parse 'top_k:7' or 'min_fraction:0.1' (CLI / config syntax)."""
        kind, _, arg = text.partition(":")
        try:
            if kind == "top_k":
                policy = cls.top_k(int(arg))
            elif kind == "min_fraction":
                policy = cls.min_fraction(float(arg))
            else:
                raise ConfigError(f"unknown cutoff policy '{kind}'")
        except ValueError as exc:
            raise ConfigError(f"bad cutoff parameter in '{text}'") from exc
        policy.validate()
        return policy


DEFAULT_POLICY = CutoffPolicy.min_fraction(0.1)


@dataclass(frozen=True)
class EntityVocabulary:
    """The closed label set: canonical entities plus the unknown name.

    ``normalization`` maps every case-folded surface seen at build time to
    its canonical name (or unknown). Fuzzy matching of unseen/misspelled
    surfaces happens in :func:`normalize_mentions`.
    """

    entities: tuple[str, ...]
    frequencies: Mapping[str, int]
    unknown_name: str
    normalization: Mapping[str, str]

    def classes(self) -> tuple[str, ...]:
        """Ordered label list for evaluation: entities then unknown."""
        return self.entities + (self.unknown_name,)

    def frequency(self, name: str) -> int:
        return self.frequencies.get(name, 0)

    def project_gt(self, label: str | None) -> str:
        """Map a raw ground-truth label onto the closed set (exact,
        case-insensitive; long-tail identities become unknown)."""
        if label is None:
            return self.unknown_name
        folded = label.casefold()
        for entity in self.entities:
            if entity.casefold() == folded:
                return entity
        return self.unknown_name


def lcs_length(a: str, b: str) -> int:
    """Longest-common-subsequence length via two-row dynamic programming."""
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for ca in a:
        curr = [0]
        for j, cb in enumerate(b):
            curr.append(prev[j] + 1 if ca == cb else max(prev[j + 1], curr[j]))
        prev = curr
    return prev[-1]


def fuzzy_ratio(a: str, b: str) -> int:
    """Indel similarity in [0, 100]: round(100 * 2*LCS / (|a| + |b|)),
    computed on case-folded strings. Exact (case-insensitive) matches
    score 100."""
    if not a or not b:
        raise ValueError("fuzzy_ratio requires non-empty strings")
    fa, fb = a.casefold(), b.casefold()
    return round(200 * lcs_length(fa, fb) / (len(fa) + len(fb)))


def build_vocabulary(
    mentions: Iterable[MentionRecord],
    policy: CutoffPolicy = DEFAULT_POLICY,
    unknown_name: str = UNKNOWN_NAME,
) -> EntityVocabulary:
    """Count case-folded surface groups and apply the cutoff policy.

    A group's canonical name is its most frequent raw spelling (ties go
    to the lexicographically smallest). Entities are ordered by
    descending frequency, then name. A surface spelled exactly like
    ``unknown_name`` can never become an entity.
    """
    policy.validate()

    counts: dict[str, dict[str, int]] = {}
    for mention in mentions:
        group = counts.setdefault(mention.surface.casefold(), {})
        group[mention.surface] = group.get(mention.surface, 0) + 1

    groups: list[tuple[str, str, int]] = []  # (folded, canonical, total)
    for folded, spellings in counts.items():
        canonical = min(spellings, key=lambda s: (-spellings[s], s))
        groups.append((folded, canonical, sum(spellings.values())))

    eligible = [g for g in groups if g[0] != unknown_name.casefold()]
    eligible.sort(key=lambda g: (-g[2], g[1]))

    if policy.kind == "top_k":
        kept = eligible[: policy.k]
    else:
        max_count = eligible[0][2] if eligible else 0
        kept = [g for g in eligible if g[2] >= policy.fraction * max_count]

    entities = tuple(canonical for _, canonical, _ in kept)
    frequencies = {canonical: total for _, canonical, total in kept}
    kept_folded = {folded for folded, _, _ in kept}
    normalization = {
        folded: canonical if folded in kept_folded else unknown_name
        for folded, canonical, _ in groups
    }
    return EntityVocabulary(
        entities=entities,
        frequencies=frequencies,
        unknown_name=unknown_name,
        normalization=normalization,
    )


def best_fuzzy_match(
    surface: str, vocab: EntityVocabulary, threshold: int = DEFAULT_FUZZY_THRESHOLD
) -> str:
    """Canonical entity with the highest fuzzy ratio >= threshold, or
    unknown. Ratio ties go to the higher-frequency entity, then to the
    lexicographically smaller name."""
    scored = [(entity, fuzzy_ratio(surface, entity)) for entity in vocab.entities]
    scored = [(entity, ratio) for entity, ratio in scored if ratio >= threshold]
    if not scored:
        return vocab.unknown_name
    return min(scored, key=lambda er: (-er[1], -vocab.frequency(er[0]), er[0]))[0]


def load_taxonomy(path: str | Path, vocab: EntityVocabulary) -> dict[str, str]:
    """Load a surface -> canonical override map (JSON object). Targets
    must be vocabulary entities or the unknown name."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: taxonomy must be a JSON object")
    valid = set(vocab.entities) | {vocab.unknown_name}
    taxonomy: dict[str, str] = {}
    for surface, target in raw.items():
        if target not in valid:
            raise ConfigError(f"{path}: taxonomy target '{target}' is not a vocabulary name")
        taxonomy[surface.casefold()] = target
    return taxonomy


def normalize_mentions(
    mentions: Sequence[MentionRecord],
    vocab: EntityVocabulary,
    threshold: int = DEFAULT_FUZZY_THRESHOLD,
    taxonomy: Mapping[str, str] | None = None,
) -> list[MentionRecord]:
    """Fill the ``normalized`` field of every mention.

    Precedence: taxonomy override, then exact (case-folded) vocabulary
    membership, then fuzzy matching, then unknown. Idempotent on
    surfaces that already equal a canonical name.
    """
    cache: dict[str, str] = {}

    def resolve(surface: str) -> str:
        folded = surface.casefold()
        if folded in cache:
            return cache[folded]
        if taxonomy and folded in taxonomy:
            name = taxonomy[folded]
        else:
            name = vocab.normalization.get(folded, "")
            if name not in vocab.entities:
                name = best_fuzzy_match(surface, vocab, threshold)
        cache[folded] = name
        return name

    return [m.with_normalized(resolve(m.surface)) for m in mentions]
