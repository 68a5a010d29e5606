"""Semantic forest loading and trajectory encoding."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .model import (
    UNKNOWN_CODE,
    ConfigMismatch,
    DuplicatePlace,
    EncodedTrajectory,
    Encoding,
    InputFormatError,
    InvalidLevel,
    MalformedForest,
    SemanticForest,
    Trajectory,
    build_forest,
)


@dataclass(frozen=True)
class ForestSource:
    """Raw forest rows: ``(place_name, code_path)`` with codes coarse to fine."""

    rows: tuple[tuple[str, tuple[int, ...]], ...]

    def __init__(self, rows: Iterable[tuple[str, Sequence[int]]]):
        object.__setattr__(self, "rows", tuple((name, tuple(codes)) for name, codes in rows))

    def __len__(self) -> int:
        return len(self.rows)


def load_forest(source: ForestSource | Iterable[tuple[str, Sequence[int]]]) -> SemanticForest:
    rows = source.rows if isinstance(source, ForestSource) else tuple(source)
    if not rows:
        raise MalformedForest("forest has no rows")
    levels = len(rows[0][1])
    if levels < 1:
        raise MalformedForest("forest rows need at least one code level")
    entries: dict[str, Encoding] = {}
    for name, codes in rows:
        if not isinstance(name, str) or not name or any(c in name for c in "\t\r\n"):
            raise MalformedForest(f"invalid place name {name!r}")
        if len(codes) != levels:
            raise MalformedForest(f"place {name!r} has {len(codes)} codes, expected {levels}")
        try:
            enc = Encoding(codes)
        except (TypeError, ValueError) as exc:
            raise MalformedForest(f"non-integer code for {name!r}: {codes!r}") from exc
        if any(c < 0 for c in enc):
            raise MalformedForest(f"negative code for {name!r}: {codes!r}")
        if name in entries:
            raise DuplicatePlace(name)
        entries[name] = enc
    return build_forest(levels, entries)


def encode_trajectory(t: Trajectory, forest: SemanticForest) -> EncodedTrajectory:
    return EncodedTrajectory(t.id, tuple(forest.lookup(p) for p in t.places))


def level_view(et: EncodedTrajectory, h: int) -> list[tuple[int, ...] | None]:
    """Level-``h`` prefixes of every encoding; UNKNOWN positions become None."""
    levels = len(et.encs[0]) if et.encs else h
    if not 1 <= h <= levels:
        raise InvalidLevel(f"level {h} outside 1..{levels}")
    return [None if e.is_unknown else e.prefix(h) for e in et.encs]


def type_sequence(et: EncodedTrajectory) -> list[int | None]:
    return [None if e.is_unknown else e[0] for e in et.encs]


class EncodedCorpus:
    """Columnar form of a set of encoded trajectories, sorted by id.

    ``codes[h - 1, offsets[i]:offsets[i + 1]]`` holds the dense level-h
    prefix ids of trajectory ``i``; UNKNOWN positions hold -1. Because rows
    are sorted by id, ordering pairs by row index orders them by id.
    """

    def __init__(self, ids: np.ndarray, offsets: np.ndarray, codes: np.ndarray, num_types: int):
        self.ids = np.ascontiguousarray(ids, dtype=np.uint64)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.codes = np.ascontiguousarray(codes, dtype=np.int32)
        self.num_types = int(num_types)
        if len(self.ids) > 1 and not np.all(self.ids[1:] > self.ids[:-1]):
            raise InputFormatError("trajectory ids must be unique")

    @property
    def levels(self) -> int:
        return self.codes.shape[0]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    def __len__(self) -> int:
        return len(self.ids)

    def row(self, i: int, h: int) -> np.ndarray:
        return self.codes[h - 1, self.offsets[i] : self.offsets[i + 1]]

    def index_of(self, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.uint64)
        pos = np.searchsorted(self.ids, ids)
        pos = np.minimum(pos, max(len(self.ids) - 1, 0))
        if len(self.ids) == 0 or not np.all(self.ids[pos] == ids):
            raise KeyError("unknown trajectory id")
        return pos.astype(np.int64)

    def subset(self, rows: Sequence[int]) -> EncodedCorpus:
        rows = np.sort(np.asarray(rows, dtype=np.int64))
        lengths = self.lengths[rows]
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        take = np.concatenate([np.arange(self.offsets[r], self.offsets[r + 1]) for r in rows]) if len(rows) else np.zeros(0, np.int64)
        return EncodedCorpus(self.ids[rows], offsets, self.codes[:, take], self.num_types)

    @classmethod
    def from_encoded(cls, ets: Iterable[EncodedTrajectory], forest: SemanticForest | None = None) -> EncodedCorpus:
        """Columnar copy of already-encoded trajectories.

        Without a forest, dense prefix ids are assigned in order of first
        appearance, which preserves prefix equality just the same.
        """
        ets = sorted(ets, key=lambda e: e.id)
        if forest is not None:
            levels = forest.levels
            tables = [dict(t) for t in forest.prefix_ids]
        else:
            levels = next((len(e) for et in ets for e in et.encs), 0)
            tables = [{} for _ in range(levels)]
        for et in ets:
            for e in et.encs:
                if len(e) != levels:
                    raise ConfigMismatch(f"trajectory {et.id} has {len(e)}-level encodings, expected {levels}")
        offsets = np.zeros(len(ets) + 1, dtype=np.int64)
        np.cumsum([len(et) for et in ets], out=offsets[1:])
        codes = np.full((levels, int(offsets[-1])), UNKNOWN_CODE, dtype=np.int32)
        pos = 0
        for et in ets:
            for e in et.encs:
                if not e.is_unknown:
                    for h in range(levels):
                        table = tables[h]
                        codes[h, pos] = table.setdefault(tuple(e[: h + 1]), len(table))
                pos += 1
        num_types = len(tables[0]) if tables else 0
        return cls(np.array([et.id for et in ets], dtype=np.uint64), offsets, codes, num_types)

    @classmethod
    def from_trajectories(cls, trajectories: Iterable[Trajectory], forest: SemanticForest) -> EncodedCorpus:
        """Encode straight to columns without building per-place objects."""
        trajectories = sorted(trajectories, key=lambda t: t.id)
        levels = forest.levels
        lookup = forest.dense_codes
        unknown = (UNKNOWN_CODE,) * levels
        offsets = np.zeros(len(trajectories) + 1, dtype=np.int64)
        np.cumsum([len(t.places) for t in trajectories], out=offsets[1:])
        flat = [lookup.get(p, unknown) for t in trajectories for p in t.places]
        codes = np.array(flat, dtype=np.int32).reshape(-1, levels).T if flat else np.zeros((levels, 0), np.int32)
        return cls(np.array([t.id for t in trajectories], dtype=np.uint64), offsets, codes, forest.num_types)


def encode_corpus(trajectories: Iterable[Trajectory], forest: SemanticForest) -> EncodedCorpus:
    return EncodedCorpus.from_trajectories(trajectories, forest)


def as_corpus(data: EncodedCorpus | Iterable[EncodedTrajectory]) -> EncodedCorpus:
    return data if isinstance(data, EncodedCorpus) else EncodedCorpus.from_encoded(data)
