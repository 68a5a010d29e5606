"""Order-preserving k-shingles of the type-level view of a trajectory."""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import InvalidConfig, InvalidK

Shingle = tuple[int, ...]


@dataclass(frozen=True)
class ShingleSet:
    id: int
    shingles: frozenset[Shingle]

    def __len__(self) -> int:
        return len(self.shingles)


def k_shingles(types: Sequence[int | None], k: int, id: int = 0) -> ShingleSet:
    """All distinct ordered k-subsequences of ``types``.

    Positions holding ``None`` or a negative code (unknown places) are
    dropped first, so they never contribute to a shingle.
    """
    if k < 1:
        raise InvalidK(f"k must be positive, got {k}")
    usable = [t for t in types if t is not None and t >= 0]
    return ShingleSet(id, frozenset(itertools.combinations(usable, k)))


def expected_collision_rate(L: float, k: int, Q: int) -> float:
    """C(L, k) / Q^k, the average collision rate under uniform independent types.

    Non-integer ``L`` (an average length) uses the generalized binomial.
    """
    if k < 1 or Q < 1:
        raise InvalidConfig("k and Q must be positive")
    if L < k:
        return 0.0
    if float(L).is_integer():
        combos = math.comb(int(L), k)
    else:
        combos = math.prod(L - i for i in range(k)) / math.factorial(k)
    return combos / Q**k


def empirical_collision_rate(L: int, k: int, Q: int, trials: int = 1_000_000, seed: int = 0,
                             batch: int = 100_000) -> float:
    """Monte Carlo estimate of the same quantity.

    Each trial draws two independent uniform type sequences, takes one
    k-shingle of the second at random index positions (its value is uniform
    over the Q^k alphabet) and checks whether the first contains it.
    """
    rng = np.random.default_rng(seed)
    combos = np.array(list(itertools.combinations(range(L), k)), dtype=np.int64)
    weights = Q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    hits = 0
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        first = rng.integers(0, Q, size=(b, L))
        second = rng.integers(0, Q, size=(b, L))
        pick = combos[rng.integers(0, len(combos), size=b)]
        target = (np.take_along_axis(second, pick, axis=1) * weights).sum(axis=1)
        keys = (first[:, combos] * weights).sum(axis=2)
        hits += int(np.count_nonzero((keys == target[:, None]).any(axis=1)))
        done += b
    return hits / trials


def shingle_base(num_types: int, k: int) -> int:
    """Radix used to pack a shingle into one int64 key; checks it fits."""
    base = max(int(num_types), 1)
    if base**k >= 2**62:
        raise InvalidConfig(f"{base}^{k} shingle keys do not fit in 64 bits")
    return base


def encode_key(shingle: Sequence[int], base: int) -> int:
    key = 0
    for t in shingle:
        key = key * base + int(t)
    return key


def decode_key(key: int, base: int, k: int) -> Shingle:
    out = []
    for _ in range(k):
        key, t = divmod(int(key), base)
        out.append(t)
    return tuple(reversed(out))


def shingle_rows(types: np.ndarray, offsets: np.ndarray, k: int, num_types: int) -> tuple[np.ndarray, np.ndarray]:
    """Columnar shingling: ``(keys, rows)`` with one entry per distinct shingle per row."""
    if k < 1:
        raise InvalidK(f"k must be positive, got {k}")
    base = shingle_base(num_types, k)
    return _kernels.shingle_rows(np.ascontiguousarray(types, dtype=np.int32),
                                 np.ascontiguousarray(offsets, dtype=np.int64), k, base)
