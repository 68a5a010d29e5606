"""Shingle-keyed partitioning and candidate pair generation.

Trajectories are exploded into one row per distinct shingle, grouped by
shingle, and every pair of rows inside a group becomes a candidate. A pair
sharing several shingles is emitted once.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from ._parallel import parallel_map
from .model import ResourceExceeded, canonical_pair
from .shingler import Shingle, ShingleSet

DEFAULT_GROUP_BLOCK = 2048
DEFAULT_CHUNK_PAIRS = 4_000_000


class ShingleRow(NamedTuple):
    shingle: Shingle
    id: int


@dataclass(frozen=True)
class CandidatePairSet:
    pairs: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.pairs))

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs


@dataclass(frozen=True)
class PartitionStats:
    groups: int
    rows: int
    histogram: dict[int, int]
    max_group: int
    mean_group: float
    skew: float
    pair_instances: int


def explode(shingle_sets: Iterable[ShingleSet]) -> list[ShingleRow]:
    return [ShingleRow(s, ss.id) for ss in shingle_sets for s in sorted(ss.shingles)]


def _groups(rows: Iterable[ShingleRow]) -> dict[Shingle, set[int]]:
    groups: dict[Shingle, set[int]] = defaultdict(set)
    for shingle, id_ in rows:
        groups[shingle].add(id_)
    return groups


def candidate_pairs(rows: Iterable[ShingleRow]) -> CandidatePairSet:
    pairs: set[tuple[int, int]] = set()
    for members in _groups(rows).values():
        ordered = sorted(members)
        for i, a in enumerate(ordered):
            for b in ordered[i + 1 :]:
                pairs.add(canonical_pair(a, b))
    return CandidatePairSet(frozenset(pairs))


def partition_stats(rows: Iterable[ShingleRow]) -> PartitionStats:
    sizes = [len(m) for m in _groups(rows).values()]
    return _stats(np.asarray(sizes, dtype=np.int64))


def _stats(sizes: np.ndarray) -> PartitionStats:
    if len(sizes) == 0:
        return PartitionStats(0, 0, {}, 0, 0.0, 0.0, 0)
    hist = Counter(sizes.tolist())
    mean = float(sizes.mean())
    return PartitionStats(
        groups=len(sizes),
        rows=int(sizes.sum()),
        histogram=dict(sorted(hist.items())),
        max_group=int(sizes.max()),
        mean_group=mean,
        skew=float(sizes.max()) / mean,
        pair_instances=int((sizes * (sizes - 1) // 2).sum()),
    )


# columnar path used by the engine


def group_rows(keys: np.ndarray, owners: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort rows by (shingle, row) and return ``(group_keys, starts, members)``.

    Group ``g`` owns ``members[starts[g]:starts[g + 1]]``.
    """
    order = np.lexsort((owners, keys))
    keys_s = keys[order]
    members = owners[order]
    if len(keys_s) == 0:
        return keys_s, np.zeros(1, dtype=np.int64), members
    brk = np.flatnonzero(keys_s[1:] != keys_s[:-1]) + 1
    starts = np.concatenate(([0], brk, [len(keys_s)])).astype(np.int64)
    return keys_s[starts[:-1]], starts, members


def columnar_stats(keys: np.ndarray, owners: np.ndarray) -> PartitionStats:
    _, starts, _ = group_rows(keys, owners)
    return _stats(np.diff(starts))


def _tile_tasks(starts: np.ndarray, block: int) -> tuple[np.ndarray, np.ndarray]:
    """Tasks ``(a0, a1, b0, b1, same)`` plus the group index of each task.

    Groups larger than ``block`` are tiled into block x block squares so no
    single task materializes an unbounded number of pairs.
    """
    sizes = np.diff(starts)
    small = np.flatnonzero((sizes >= 2) & (sizes <= block))
    s0, s1 = starts[small], starts[small + 1]
    tasks = [np.column_stack([s0, s1, s0, s1, np.ones_like(s0)])]
    owners = [small]
    for g in np.flatnonzero(sizes > block):
        edges = list(range(int(starts[g]), int(starts[g + 1]), block)) + [int(starts[g + 1])]
        tiles = []
        for i in range(len(edges) - 1):
            for j in range(i, len(edges) - 1):
                tiles.append((edges[i], edges[i + 1], edges[j], edges[j + 1], int(i == j)))
        tasks.append(np.array(tiles, dtype=np.int64))
        owners.append(np.full(len(tiles), g, dtype=np.int64))
    return np.concatenate(tasks).astype(np.int64).reshape(-1, 5), np.concatenate(owners)


def _partition_of(group_keys: np.ndarray, workers: int) -> np.ndarray:
    # splitmix-style mixing so consecutive shingle keys spread across workers
    x = group_keys.astype(np.uint64) * np.uint64(0x9E3779B97F4A7C15)
    x ^= x >> np.uint64(31)
    return (x % np.uint64(workers)).astype(np.int64)


def candidate_pair_codes(keys: np.ndarray, owners: np.ndarray, n_rows: int, workers: int = 1,
                         block: int = DEFAULT_GROUP_BLOCK, chunk_pairs: int = DEFAULT_CHUNK_PAIRS,
                         max_pairs: int | None = None) -> np.ndarray:
    """Sorted unique candidate pair codes ``i * n_rows + j`` with ``i < j``.

    Groups are hash-partitioned by shingle across ``workers``; each worker
    emits its pairs in bounded chunks and deduplicates locally, then the
    partitions are merged with a global sort. The result does not depend on
    ``workers``.
    """
    group_keys, starts, members = group_rows(np.asarray(keys, np.int64), np.asarray(owners, np.int64))
    if len(group_keys) == 0:
        return np.zeros(0, dtype=np.int64)
    tasks, task_group = _tile_tasks(starts, block)
    if len(tasks) == 0:
        return np.zeros(0, dtype=np.int64)
    part = _partition_of(group_keys[task_group], workers)
    members = np.ascontiguousarray(members)

    def run(p: int) -> np.ndarray:
        mine = tasks[part == p]
        if len(mine) == 0:
            return np.zeros(0, dtype=np.int64)
        counts = np.where(mine[:, 4] == 1,
                          (mine[:, 1] - mine[:, 0]) * (mine[:, 1] - mine[:, 0] - 1) // 2,
                          (mine[:, 1] - mine[:, 0]) * (mine[:, 3] - mine[:, 2]))
        csum = np.cumsum(counts)
        cuts = np.searchsorted(csum, np.arange(chunk_pairs, csum[-1], chunk_pairs), side="left") + 1
        edges = np.unique(np.concatenate(([0], cuts, [len(mine)])))
        found: list[np.ndarray] = []
        held = 0
        for lo, hi in zip(edges[:-1], edges[1:]):
            chunk = np.unique(_kernels.group_pairs(members, np.ascontiguousarray(mine[lo:hi]), n_rows))
            found.append(chunk)
            held += len(chunk)
            if max_pairs is not None and held > 2 * max_pairs:
                found = [np.unique(np.concatenate(found))]
                held = len(found[0])
                _check_budget(held, max_pairs)
        return np.unique(np.concatenate(found)) if found else np.zeros(0, dtype=np.int64)

    parts = parallel_map(run, range(workers), workers)
    for p in parts:
        _check_budget(len(p), max_pairs)
    merged = np.unique(np.concatenate(parts))
    _check_budget(len(merged), max_pairs)
    return merged


def _check_budget(n: int, max_pairs: int | None) -> None:
    if max_pairs is not None and n > max_pairs:
        raise ResourceExceeded(f"{n} candidate pairs exceed the budget of {max_pairs}")


def split_codes(codes: np.ndarray, n_rows: int) -> tuple[np.ndarray, np.ndarray]:
    return codes // n_rows, codes % n_rows
