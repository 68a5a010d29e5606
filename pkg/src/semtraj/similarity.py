"""Multi-level LCS similarity between encoded trajectories.

At level h two places match when the first h components of their encodings
are equal, so a class-level match is always a type-level match as well.
The score of a pair is the weighted sum of the per-level LCS lengths.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _kernels
from ._parallel import parallel_map, split_even
from .encoder import EncodedCorpus, level_view
from .model import (
    ConfigMismatch,
    EncodedTrajectory,
    MissingTrajectory,
    ScoredPair,
    SimilarityConfig,
    canonical_pair,
)


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Length of the longest common subsequence; ``None`` items never match.

    Uses the bit-parallel formulation: one bit per position of ``b``, with
    a zero bit wherever the LCS grows. Unhashable items fall back to the
    quadratic table.
    """
    if len(a) < len(b):
        a, b = b, a
    try:
        masks: dict = {}
        for j, y in enumerate(b):
            if y is not None:
                masks[y] = masks.get(y, 0) | (1 << j)
        full = (1 << len(b)) - 1
        v = full
        for x in a:
            if x is None:
                continue
            u = v & masks.get(x, 0)
            v = ((v + u) | (v - u)) & full
    except TypeError:
        return _lcs_table(a, b)
    return len(b) - v.bit_count()


def _lcs_table(a: Sequence, b: Sequence) -> int:
    row = [0] * (len(b) + 1)
    for x in a:
        if x is None:
            continue
        diag = prev = 0
        for j, y in enumerate(b, 1):
            up = row[j]
            if x == y:
                prev = diag + 1
            elif up > prev:
                prev = up
            row[j] = prev
            diag = up
    return row[-1]


def weighted_score(weights: Sequence[float], matches: Sequence[int]) -> float:
    # fixed left-to-right accumulation; the columnar path repeats it exactly
    score = 0.0
    for w, m in zip(weights, matches):
        score += w * m
    return score


def level_matches(u: EncodedTrajectory, v: EncodedTrajectory, levels: int) -> tuple[int, ...]:
    return tuple(lcs_length(level_view(u, h), level_view(v, h)) for h in range(1, levels + 1))


def _check_levels(et: EncodedTrajectory, levels: int) -> None:
    if any(len(e) != levels for e in et.encs):
        raise ConfigMismatch(f"trajectory {et.id} is not encoded with {levels} levels")


def mss(u: EncodedTrajectory, v: EncodedTrajectory, cfg: SimilarityConfig) -> ScoredPair:
    _check_levels(u, cfg.levels)
    _check_levels(v, cfg.levels)
    if u.id > v.id:
        u, v = v, u
    canonical_pair(u.id, v.id)
    matches = level_matches(u, v, cfg.levels)
    return ScoredPair(u.id, v.id, weighted_score(cfg.weights, matches), matches)


class ScoredPairTable:
    """Array-backed, id-sorted collection of scored pairs.

    Iterating yields ``ScoredPair`` objects; the arrays stay available for
    bulk work (``id1``, ``id2``, ``score``, ``matches`` of shape (P, levels)).
    """

    def __init__(self, id1, id2, score, matches):
        self.id1 = np.asarray(id1, dtype=np.uint64)
        self.id2 = np.asarray(id2, dtype=np.uint64)
        self.score = np.asarray(score, dtype=np.float64)
        self.matches = np.asarray(matches, dtype=np.int32)

    @classmethod
    def empty(cls, levels: int) -> ScoredPairTable:
        return cls([], [], [], np.zeros((0, levels), dtype=np.int32))

    @classmethod
    def from_pairs(cls, pairs: Iterable[ScoredPair], levels: int) -> ScoredPairTable:
        pairs = sorted(pairs, key=lambda p: p.key)
        if not pairs:
            return cls.empty(levels)
        return cls([p.id1 for p in pairs], [p.id2 for p in pairs], [p.score for p in pairs],
                   [p.per_level_matches for p in pairs])

    @classmethod
    def concat(cls, tables: Sequence[ScoredPairTable], levels: int) -> ScoredPairTable:
        tables = [t for t in tables if len(t)]
        if not tables:
            return cls.empty(levels)
        return cls(np.concatenate([t.id1 for t in tables]), np.concatenate([t.id2 for t in tables]),
                   np.concatenate([t.score for t in tables]), np.concatenate([t.matches for t in tables]))

    def __len__(self) -> int:
        return len(self.score)

    def __getitem__(self, i: int) -> ScoredPair:
        return ScoredPair(int(self.id1[i]), int(self.id2[i]), float(self.score[i]),
                          tuple(int(m) for m in self.matches[i]))

    def __iter__(self) -> Iterator[ScoredPair]:
        for i in range(len(self)):
            yield self[i]

    def mask(self, keep: np.ndarray) -> ScoredPairTable:
        return ScoredPairTable(self.id1[keep], self.id2[keep], self.score[keep], self.matches[keep])

    def pair_set(self) -> set[tuple[int, int]]:
        return set(zip(self.id1.tolist(), self.id2.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScoredPairTable):
            return NotImplemented
        return (np.array_equal(self.id1, other.id1) and np.array_equal(self.id2, other.id2)
                and np.array_equal(self.score, other.score) and np.array_equal(self.matches, other.matches))

    def __repr__(self) -> str:
        return f"ScoredPairTable({len(self)} pairs)"


def score_candidates(pairs: Iterable[tuple[int, int]], index: Mapping[int, EncodedTrajectory],
                     cfg: SimilarityConfig, workers: int = 1) -> ScoredPairTable:
    """Score candidate pairs by expanding each into one work unit per level.

    Each (pair, level) unit yields a partial score ``weight * matches``;
    the partials are then summed per pair in level order.
    """
    pairs = sorted(canonical_pair(a, b) for a, b in pairs)
    for a, b in pairs:
        for x in (a, b):
            if x not in index:
                raise MissingTrajectory(f"trajectory {x} not in index")
    for et in {x for p in pairs for x in p}:
        _check_levels(index[et], cfg.levels)
    units = [(p, h) for p in range(len(pairs)) for h in range(1, cfg.levels + 1)]

    def level_unit(span: tuple[int, int]) -> list[int]:
        out = []
        for p, h in units[span[0] : span[1]]:
            a, b = pairs[p]
            out.append(lcs_length(level_view(index[a], h), level_view(index[b], h)))
        return out

    parts = parallel_map(level_unit, split_even(len(units), workers), workers)
    flat = [m for part in parts for m in part]
    if not pairs:
        return ScoredPairTable.empty(cfg.levels)
    matches = np.array(flat, dtype=np.int32).reshape(len(pairs), cfg.levels)
    return ScoredPairTable([a for a, _ in pairs], [b for _, b in pairs],
                           _aggregate(matches, cfg.weights), matches)


def _aggregate(matches: np.ndarray, weights: Sequence[float]) -> np.ndarray:
    score = np.zeros(len(matches), dtype=np.float64)
    for h, w in enumerate(weights):
        score += w * matches[:, h].astype(np.float64)
    return score


def score_rows(corpus: EncodedCorpus, left: np.ndarray, right: np.ndarray, cfg: SimilarityConfig,
               workers: int = 1, chunk: int = 250_000) -> ScoredPairTable:
    """Columnar scoring of row-index pairs (``left < right``) of ``corpus``.

    Work is split into (pair chunk, level) units that run on the pool, then
    matches are stitched back together and aggregated per pair.
    """
    if corpus.levels != cfg.levels:
        raise ConfigMismatch(f"corpus has {corpus.levels} levels, config expects {cfg.levels}")
    left = np.ascontiguousarray(left, dtype=np.int64)
    right = np.ascontiguousarray(right, dtype=np.int64)
    spans = [(lo, min(lo + chunk, len(left))) for lo in range(0, len(left), chunk)]
    units = [(s, h) for s in spans for h in range(cfg.levels)]

    def run(unit):
        (lo, hi), h = unit
        return _kernels.lcs_pairs(corpus.codes[h], corpus.offsets, left[lo:hi], right[lo:hi])

    results = parallel_map(run, units, workers)
    matches = np.zeros((len(left), cfg.levels), dtype=np.int32)
    for ((lo, hi), h), m in zip(units, results):
        matches[lo:hi, h] = m
    return ScoredPairTable(corpus.ids[left], corpus.ids[right], _aggregate(matches, cfg.weights), matches)


def filter_similar(scored, threshold: float):
    """Keep pairs with score strictly above ``threshold``."""
    if isinstance(scored, ScoredPairTable):
        return scored.mask(scored.score > threshold)
    return [p for p in scored if p.score > threshold]
