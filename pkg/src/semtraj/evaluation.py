"""Accuracy metrics against the exhaustive baseline, and the benchmark harness."""

from __future__ import annotations

import json
import statistics
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field

from .model import Community, SimilarityConfig, UndefinedMetric

REPORT_VERSION = 1


@dataclass
class EvalReport:
    """Accuracy and timing of one pipeline run.

    ``qa1``/``qa2`` are None until the run is compared with ground truth.
    ``stage_seconds`` maps stage name to wall-clock seconds.
    """

    pairs_compared: int
    worker_count: int
    stage_seconds: dict[str, float] = field(default_factory=dict)
    qa1: float | None = None
    qa2: float | None = None
    similar_pairs: int = 0
    communities: int = 0
    mode: str = "staged"
    n_trajectories: int = 0
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("qa1", "qa2"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if any(t < 0 for t in self.stage_seconds.values()):
            raise ValueError("stage durations must be non-negative")

    @property
    def total_seconds(self) -> float:
        return sum(self.stage_seconds.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("stage_seconds")
        d["version"] = REPORT_VERSION
        d["stage_ms"] = {k: round(v * 1000.0, 3) for k, v in self.stage_seconds.items()}
        d["total_ms"] = round(self.total_seconds * 1000.0, 3)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def config_echo(cfg: SimilarityConfig) -> dict:
    return {"k": cfg.k, "weights": list(cfg.weights), "threshold": cfg.threshold, "levels": cfg.levels}


def _member_sets(communities: Iterable) -> set[frozenset[int]]:
    return {frozenset(c.members if isinstance(c, Community) else c) for c in communities}


def qa1(communities_dis: Iterable, communities_cen: Iterable) -> float:
    """Share of ground-truth communities reproduced with exactly the same members."""
    cen = _member_sets(communities_cen)
    if not cen:
        raise UndefinedMetric("ground truth has no communities")
    return len(_member_sets(communities_dis) & cen) / len(cen)


def _pair_set(pairs) -> set[tuple[int, int]]:
    if hasattr(pairs, "pair_set"):
        return pairs.pair_set()
    return {(p.id1, p.id2) if hasattr(p, "id1") else tuple(p) for p in pairs}


def qa2(pairs_dis, pairs_cen) -> float:
    """Share of ground-truth similar pairs that the method also reports."""
    cen = _pair_set(pairs_cen)
    if not cen:
        raise UndefinedMetric("ground truth has no similar pairs")
    return len(_pair_set(pairs_dis) & cen) / len(cen)


def bench(dataset, forest, cfg: SimilarityConfig, workers: int = 1, repeats: int = 3,
          mode: str = "staged", warmup: bool = True, **engine_kwargs) -> EvalReport:
    """Median per-stage timing over ``repeats`` runs after one discarded warmup.

    Non-timing fields come from the last run; they do not depend on
    ``workers``.
    """
    from .engine import run_pipeline

    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if warmup:
        run_pipeline(dataset, forest, cfg, workers=workers, mode=mode, **engine_kwargs)
    runs = [run_pipeline(dataset, forest, cfg, workers=workers, mode=mode, **engine_kwargs)
            for _ in range(repeats)]
    report = runs[-1].report
    report.stage_seconds = {stage: statistics.median(r.report.stage_seconds[stage] for r in runs)
                            for stage in report.stage_seconds}
    return report
