"""Seeded synthetic forests and trajectory sets.

Defaults follow the published experimental setup: 10,000 places, 30 types
with 10 classes each, trajectory lengths between 5 and 10, places drawn
uniformly at random.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .encoder import ForestSource, load_forest
from .model import InvalidConfig, SemanticForest, Trajectory


@dataclass(frozen=True)
class PlantSpec:
    """Groups of trajectories that share an ordered motif.

    Every member of a group contains ``motif_length`` places, in the same
    order, that agree with the group's motif at hierarchy level ``level``
    (1 = type only, ``levels`` = the exact same place).
    """

    groups: int
    group_size: int
    motif_length: int
    level: int = 1

    @property
    def total(self) -> int:
        return self.groups * self.group_size


def gen_forest(num_places: int = 10_000, num_types: int = 30, classes_per_type: int = 10,
               seed: int = 0) -> ForestSource:
    n_classes = num_types * classes_per_type
    if num_types < 1 or classes_per_type < 1 or num_places < n_classes:
        raise InvalidConfig(
            f"need num_places >= num_types * classes_per_type ({num_places} < {n_classes})")
    rng = np.random.default_rng(seed)
    # round-robin over a shuffled class order: class sizes differ by at most one
    class_of = rng.permutation(n_classes)[np.arange(num_places) % n_classes]
    class_of = class_of[rng.permutation(num_places)]
    seen = np.zeros(n_classes, dtype=np.int64)
    rows = []
    for i, c in enumerate(class_of.tolist()):
        seen[c] += 1
        t, cl = divmod(c, classes_per_type)
        rows.append((f"place-{i:06d}", (t + 1, cl + 1, int(seen[c]))))
    return ForestSource(rows)


def _as_forest(forest: SemanticForest | ForestSource) -> SemanticForest:
    return forest if isinstance(forest, SemanticForest) else load_forest(forest)


def gen_trajectories(n: int, len_range: tuple[int, int], forest: SemanticForest | ForestSource,
                     seed: int = 0, planted: PlantSpec | Sequence[PlantSpec] | None = None,
                     zipf: float | None = None, return_groups: bool = False):
    """Generate ``n`` trajectories with ids ``1..n``.

    With ``zipf`` set, place popularity follows a Zipf law with that exponent
    over a seeded random ranking. ``planted`` overwrites disjoint random
    subsets of the trajectories with motif-sharing groups; their ids are
    returned alongside when ``return_groups`` is true.
    """
    lo, hi = len_range
    if lo < 1 or hi < lo:
        raise InvalidConfig(f"invalid length range {len_range}")
    if n < 0:
        raise InvalidConfig("n must be non-negative")
    forest = _as_forest(forest)
    names = list(forest.entries)
    rng = np.random.default_rng(seed)
    probs = None
    if zipf is not None:
        ranks = rng.permutation(len(names)) + 1
        probs = ranks.astype(np.float64) ** -float(zipf)
        probs /= probs.sum()

    def draw(count: int) -> np.ndarray:
        if probs is None:
            return rng.integers(0, len(names), size=count)
        return rng.choice(len(names), size=count, p=probs)

    lengths = rng.integers(lo, hi + 1, size=n)
    flat = draw(int(lengths.sum()))
    bounds = np.concatenate(([0], np.cumsum(lengths)))
    places = [[names[j] for j in flat[bounds[i] : bounds[i + 1]]] for i in range(n)]

    groups: list[list[int]] = []
    specs = [planted] if isinstance(planted, PlantSpec) else list(planted or ())
    if sum(p.total for p in specs) > n:
        raise InvalidConfig(f"{sum(p.total for p in specs)} planted trajectories exceed n={n}")
    free = rng.permutation(n)
    for spec in specs:
        _plant(places, spec, forest, names, rng, lo, hi, groups, free[: spec.total])
        free = free[spec.total :]

    trajectories = [Trajectory(i + 1, tuple(p)) for i, p in enumerate(places)]
    if return_groups:
        return trajectories, [[g + 1 for g in grp] for grp in groups]
    return trajectories


def _plant(places, spec: PlantSpec, forest: SemanticForest, names, rng, lo, hi, groups, chosen) -> None:
    if not 1 <= spec.motif_length <= hi:
        raise InvalidConfig(f"motif length {spec.motif_length} outside 1..{hi}")
    if not 1 <= spec.level <= forest.levels:
        raise InvalidConfig(f"plant level {spec.level} outside 1..{forest.levels}")
    by_prefix: dict[tuple[int, ...], list[str]] = defaultdict(list)
    for name in names:
        by_prefix[forest.entries[name].prefix(spec.level)].append(name)
    for g in range(spec.groups):
        members = sorted(chosen[g * spec.group_size : (g + 1) * spec.group_size].tolist())
        groups.append(members)
        motif = [names[j] for j in rng.integers(0, len(names), size=spec.motif_length)]
        for m in members:
            length = int(rng.integers(max(lo, spec.motif_length), hi + 1))
            traj = [names[j] for j in rng.integers(0, len(names), size=length)]
            slots = np.sort(rng.choice(length, size=spec.motif_length, replace=False))
            for slot, anchor in zip(slots.tolist(), motif):
                pool = by_prefix[forest.entries[anchor].prefix(spec.level)]
                traj[slot] = pool[int(rng.integers(0, len(pool)))]
            places[m] = traj


def _data_path(name: str):
    from importlib.resources import files

    return files("semtraj") / "data" / name


def demo_forest() -> SemanticForest:
    """Small hand-made forest with the airport/hotel/company places of the running example."""
    from .formats import read_forest

    return load_forest(read_forest(_data_path("demo_forest.tsv")))


def demo_trajectories() -> list[Trajectory]:
    from .formats import read_trajectories

    return read_trajectories(_data_path("demo_trajectories.jsonl"))
