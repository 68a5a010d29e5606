"""Staged data-parallel execution of the similarity join.

Stages run strictly one after another; inside a stage, work is split into
independent units on a bounded thread pool and merged with a sort, so the
emitted pairs and communities are identical for any worker count. The heavy
kernels release the GIL.
"""

from __future__ import annotations

import time
from collections import defaultdict
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import _kernels
from ._parallel import default_workers, parallel_map, split_even
from .community import DEFAULT_MAX_CLIQUES, build_graph, maximal_cliques
from .encoder import EncodedCorpus, encode_trajectory, type_sequence
from .evaluation import EvalReport, config_echo
from .model import (
    Community,
    InputFormatError,
    InvalidConfig,
    ResourceExceeded,
    SemanticForest,
    SimilarityConfig,
    Trajectory,
)
from .partitioner import DEFAULT_GROUP_BLOCK, PartitionStats, candidate_pair_codes, columnar_stats, split_codes
from .shingler import k_shingles, shingle_base
from .similarity import ScoredPairTable, filter_similar, mss, score_rows

MODES = ("staged", "monolithic")
BYTES_PER_CANDIDATE = 64


@dataclass
class PipelineResult:
    similar: ScoredPairTable
    communities: list[Community]
    report: EvalReport
    partition: PartitionStats | None = None
    corpus: EncodedCorpus | None = field(default=None, repr=False)


class _Timer:
    def __init__(self):
        self.seconds: dict[str, float] = {}

    def stage(self, name: str, fn: Callable[[], Any]) -> Any:
        t0 = time.perf_counter()
        out = fn()
        self.seconds[name] = self.seconds.get(name, 0.0) + time.perf_counter() - t0
        return out


def parallel_group_by(rows: Iterable, key: Callable[[Any], Hashable], fn: Callable[[Hashable, list], Any],
                      workers: int = 1) -> list[tuple[Hashable, Any]]:
    """Group ``rows`` by ``key`` and apply ``fn(key, group)`` per group.

    Rows are hash-partitioned by key across workers; results come back as
    ``(key, result)`` sorted by key, matching a sequential evaluation.
    """
    buckets: list[list] = [[] for _ in range(max(workers, 1))]
    for row in rows:
        k = key(row)
        buckets[hash(k) % len(buckets)].append((k, row))

    def run(bucket: list) -> list[tuple[Hashable, Any]]:
        groups: dict[Hashable, list] = defaultdict(list)
        for k, row in bucket:
            groups[k].append(row)
        return [(k, fn(k, g)) for k, g in groups.items()]

    merged = [item for part in parallel_map(run, buckets, workers) for item in part]
    return sorted(merged, key=lambda kv: kv[0])


def _encode(trajectories: Sequence[Trajectory], forest: SemanticForest, workers: int) -> EncodedCorpus:
    trajectories = sorted(trajectories, key=lambda t: t.id)
    spans = split_even(len(trajectories), workers * 4)
    parts = parallel_map(lambda s: EncodedCorpus.from_trajectories(trajectories[s[0]:s[1]], forest), spans, workers)
    offsets = [np.zeros(1, dtype=np.int64)]
    base = 0
    for p in parts:
        offsets.append(p.offsets[1:] + base)
        base += int(p.offsets[-1])
    codes = np.concatenate([p.codes for p in parts], axis=1) if parts else np.zeros((forest.levels, 0), np.int32)
    ids = np.concatenate([p.ids for p in parts]) if parts else np.zeros(0, np.uint64)
    return EncodedCorpus(ids, np.concatenate(offsets), codes, forest.num_types)


def _shingle(corpus: EncodedCorpus, k: int, workers: int) -> list[tuple[np.ndarray, np.ndarray]]:
    base = shingle_base(corpus.num_types, k)
    types = corpus.codes[0]

    def run(span: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = span
        offs = corpus.offsets[lo : hi + 1]
        keys, owners = _kernels.shingle_rows(types[offs[0] : offs[-1]], offs - offs[0], k, base)
        return keys, owners + lo

    return parallel_map(run, split_even(len(corpus), workers * 4), workers)


def run_pipeline(dataset: Sequence[Trajectory], forest: SemanticForest, cfg: SimilarityConfig,
                 workers: int | None = None, mode: str = "staged", max_pairs: int | None = None,
                 memory_budget: int | None = None, max_cliques: int = DEFAULT_MAX_CLIQUES,
                 group_block: int = DEFAULT_GROUP_BLOCK) -> PipelineResult:
    """encode -> shingle -> explode -> group/pair -> score -> filter -> cliques.

    ``max_pairs`` (or ``memory_budget`` in bytes) caps the number of
    candidate pairs held at once; exceeding it raises ``ResourceExceeded``.
    """
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise InvalidConfig("workers must be >= 1")
    if mode not in MODES:
        raise InvalidConfig(f"mode must be one of {MODES}, got {mode!r}")
    if forest.levels != cfg.levels:
        raise InvalidConfig(f"forest has {forest.levels} levels, config expects {cfg.levels}")
    if memory_budget is not None:
        budget_pairs = memory_budget // BYTES_PER_CANDIDATE
        max_pairs = budget_pairs if max_pairs is None else min(max_pairs, budget_pairs)
    if mode == "monolithic":
        return _run_monolithic(dataset, forest, cfg, max_pairs, max_cliques)

    timer = _Timer()
    corpus = timer.stage("encode", lambda: _encode(dataset, forest, workers))
    n = len(corpus)
    parts = timer.stage("shingle", lambda: _shingle(corpus, cfg.k, workers))

    def explode():
        if not parts:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    keys, owners = timer.stage("explode", explode)
    codes = timer.stage("partition", lambda: candidate_pair_codes(
        keys, owners, max(n, 1), workers=workers, block=group_block, max_pairs=max_pairs))
    left, right = split_codes(codes, max(n, 1))
    scored = timer.stage("score", lambda: score_rows(corpus, left, right, cfg, workers))
    similar = timer.stage("filter", lambda: filter_similar(scored, cfg.threshold))
    communities = timer.stage("community", lambda: maximal_cliques(build_graph(zip(
        similar.id1.tolist(), similar.id2.tolist())), max_cliques, workers))
    report = EvalReport(pairs_compared=len(codes), worker_count=workers, stage_seconds=timer.seconds,
                        similar_pairs=len(similar), communities=len(communities), mode="staged",
                        n_trajectories=n, config=config_echo(cfg))
    return PipelineResult(similar, communities, report, columnar_stats(keys, owners), corpus)


def _run_monolithic(dataset: Sequence[Trajectory], forest: SemanticForest, cfg: SimilarityConfig,
                    max_pairs: int | None, max_cliques: int) -> PipelineResult:
    """Everything in one opaque pass over Python objects, for contrast."""
    t0 = time.perf_counter()
    encoded = {t.id: encode_trajectory(t, forest) for t in dataset}
    if len(encoded) != len(dataset):
        raise InputFormatError("trajectory ids must be unique")
    groups: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for tid in sorted(encoded):
        for s in k_shingles(type_sequence(encoded[tid]), cfg.k, tid).shingles:
            groups[s].append(tid)
    pairs: set[tuple[int, int]] = set()
    for members in groups.values():
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                pairs.add((a, b))
        if max_pairs is not None and len(pairs) > max_pairs:
            raise ResourceExceeded(f"{len(pairs)} candidate pairs exceed the budget of {max_pairs}")
    scored = [mss(encoded[a], encoded[b], cfg) for a, b in sorted(pairs)]
    similar = ScoredPairTable.from_pairs(filter_similar(scored, cfg.threshold), cfg.levels)
    communities = maximal_cliques(build_graph(similar), max_cliques)
    report = EvalReport(pairs_compared=len(pairs), worker_count=1,
                        stage_seconds={"monolithic": time.perf_counter() - t0},
                        similar_pairs=len(similar), communities=len(communities), mode="monolithic",
                        n_trajectories=len(encoded), config=config_echo(cfg))
    return PipelineResult(similar, communities, report)
