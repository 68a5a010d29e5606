"""Shared domain types for semantic trajectory similarity.

Everything here is immutable after construction so instances can be handed
to worker threads without copying or locking.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

MAX_ID = 2**64 - 1
UNKNOWN_CODE = -1


class SemtrajError(Exception):
    """Base class for all package errors.

    ``exit_code`` is what the command line tool returns when the error
    escapes a subcommand.
    """

    exit_code = 1


class InputFormatError(SemtrajError):
    exit_code = 2


class ConfigError(SemtrajError):
    exit_code = 3


class ResourceExceeded(SemtrajError):
    exit_code = 4


class InvalidPair(ConfigError):
    pass


class MalformedForest(InputFormatError):
    pass


class DuplicatePlace(InputFormatError):
    pass


class InvalidLevel(ConfigError):
    pass


class InvalidK(ConfigError):
    pass


class InvalidConfig(ConfigError):
    pass


class ConfigMismatch(ConfigError):
    pass


class MissingTrajectory(InputFormatError):
    pass


class EmptyResult(ConfigError):
    pass


class EmptyVocabulary(InputFormatError):
    pass


class UndefinedMetric(SemtrajError):
    pass


class Encoding(tuple):
    """Hierarchical place code, coarse to fine (type, class, name for 3 levels).

    The reserved UNKNOWN encoding has every component equal to -1.
    """

    __slots__ = ()

    def __new__(cls, components=()):
        return super().__new__(cls, (int(c) for c in components))

    def prefix(self, h: int) -> tuple[int, ...]:
        if not 1 <= h <= len(self):
            raise InvalidLevel(f"level {h} outside 1..{len(self)}")
        return tuple(self[:h])

    @property
    def is_unknown(self) -> bool:
        return len(self) > 0 and self[0] == UNKNOWN_CODE

    def __repr__(self) -> str:
        if self.is_unknown:
            return "Encoding(UNKNOWN)"
        return "Encoding(" + ".".join(str(c) for c in self) + ")"


def unknown_encoding(levels: int) -> Encoding:
    return Encoding((UNKNOWN_CODE,) * levels)


@dataclass(frozen=True)
class SemanticForest:
    """Place-name dictionary over an n-level hierarchy.

    ``prefix_ids[h - 1]`` maps every level-h prefix to a dense integer id,
    assigned in load order. Two places agree at level h exactly when their
    level-h prefix ids are equal. ``dense_codes`` caches those ids per place.
    """

    levels: int
    entries: Mapping[str, Encoding]
    level_cardinalities: tuple[int, ...]
    prefix_ids: tuple[Mapping[tuple[int, ...], int], ...] = field(repr=False, compare=False)
    _names_by_encoding: Mapping[Encoding, str] = field(repr=False, compare=False)
    dense_codes: Mapping[str, tuple[int, ...]] = field(repr=False, compare=False, default_factory=dict)

    @property
    def num_types(self) -> int:
        return self.level_cardinalities[0]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: object) -> bool:
        return name in self.entries

    def lookup(self, name: str) -> Encoding:
        enc = self.entries.get(name)
        return enc if enc is not None else unknown_encoding(self.levels)

    def decode(self, enc: Sequence[int]) -> str | None:
        """Place name for a full encoding, or None for UNKNOWN/unseen codes."""
        return self._names_by_encoding.get(Encoding(enc))

    def prefix_id(self, enc: Encoding, h: int) -> int:
        if enc.is_unknown:
            return UNKNOWN_CODE
        return self.prefix_ids[h - 1][enc.prefix(h)]


def build_forest(levels: int, entries: Mapping[str, Encoding]) -> SemanticForest:
    prefix_ids: list[dict[tuple[int, ...], int]] = [{} for _ in range(levels)]
    for enc in entries.values():
        for h in range(1, levels + 1):
            table = prefix_ids[h - 1]
            table.setdefault(enc.prefix(h), len(table))
    dense = {name: tuple(prefix_ids[h][enc.prefix(h + 1)] for h in range(levels)) for name, enc in entries.items()}
    return SemanticForest(
        levels=levels,
        entries=MappingProxyType(dict(entries)),
        level_cardinalities=tuple(len(t) for t in prefix_ids),
        prefix_ids=tuple(MappingProxyType(t) for t in prefix_ids),
        _names_by_encoding=MappingProxyType({e: n for n, e in entries.items()}),
        dense_codes=MappingProxyType(dense),
    )


@dataclass(frozen=True)
class Trajectory:
    """Ordered stay places of one user; a place repeats once per stay interval."""

    id: int
    places: tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.id, int) or not 0 <= self.id <= MAX_ID:
            raise InputFormatError(f"trajectory id must be an unsigned 64-bit integer, got {self.id!r}")
        object.__setattr__(self, "places", tuple(self.places))
        if not self.places:
            raise InputFormatError(f"trajectory {self.id} has no places")

    def __len__(self) -> int:
        return len(self.places)


@dataclass(frozen=True)
class EncodedTrajectory:
    id: int
    encs: tuple[Encoding, ...]

    def __len__(self) -> int:
        return len(self.encs)


@dataclass(frozen=True)
class ScoredPair:
    id1: int
    id2: int
    score: float
    per_level_matches: tuple[int, ...]

    def __post_init__(self):
        if not self.id1 < self.id2:
            raise InvalidPair(f"pair ({self.id1}, {self.id2}) is not canonical")
        m = self.per_level_matches
        if any(a < b for a, b in zip(m, m[1:])):
            raise ValueError(f"per-level matches must be non-increasing, got {m}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.id1, self.id2)


@dataclass(frozen=True, order=True)
class Community:
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        if len(members) < 2:
            raise ValueError("a community needs at least two members")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class SimilarityConfig:
    """Shingle length, per-level weights and score threshold.

    ``weights`` defaults to equal weights over ``levels``. Pairs are reported
    similar when their score is strictly greater than ``threshold``.
    """

    k: int = 3
    weights: tuple[float, ...] | None = None
    threshold: float = 2.0
    levels: int = 3

    def __post_init__(self):
        if not isinstance(self.levels, int) or not 2 <= self.levels <= 6:
            raise InvalidConfig(f"levels must be in 2..6, got {self.levels}")
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidK(f"k must be a positive integer, got {self.k}")
        if self.weights is None:
            object.__setattr__(self, "weights", (1.0 / self.levels,) * self.levels)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != self.levels:
            raise InvalidConfig(f"expected {self.levels} weights, got {len(weights)}")
        if any(not w > 0 or math.isinf(w) for w in weights):
            raise InvalidConfig(f"weights must be positive, got {weights}")
        if abs(math.fsum(weights) - 1.0) > 1e-9:
            raise InvalidConfig(f"weights must sum to 1, got {math.fsum(weights)}")
        if not self.threshold >= 0 or math.isinf(self.threshold):
            raise InvalidConfig(f"threshold must be a finite non-negative number, got {self.threshold}")
        if not self.recall_guaranteed:
            warnings.warn(
                f"k={self.k} exceeds floor(threshold)+1={math.floor(self.threshold) + 1}; "
                "shingle partitioning may miss similar pairs",
                stacklevel=2,
            )

    @property
    def recall_guaranteed(self) -> bool:
        return self.k <= math.floor(self.threshold) + 1


def canonical_pair(a: int, b: int) -> tuple[int, int]:
    if a == b:
        raise InvalidPair(f"self-pair ({a}, {b})")
    return (a, b) if a < b else (b, a)
