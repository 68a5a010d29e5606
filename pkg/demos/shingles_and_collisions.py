#!/usr/bin/env python3
# Order-preserving shingles, and how often two random trajectories share one.

import math

from semtraj import k_shingles
from semtraj.shingler import empirical_collision_rate, expected_collision_rate

types = [2, 1, 1, 1, 6, 3, 6, 2]
ss = k_shingles(types, 3)
print(len(ss), "distinct 3-shingles out of", math.comb(len(types), 3), "index triples")
print(sorted(ss.shingles)[:5])

# order matters: the reversed sequence has a different shingle set
rev = k_shingles(types[::-1], 3)
print(len(ss.shingles & rev.shingles), "shingles survive reversal")

# C(L, k) / Q^k assumes every shingle of a sequence is distinct; repeated
# types make some coincide, so the measured rate sits a little below it
for L, k, Q in [(8, 3, 30), (10, 3, 30), (8, 3, 300), (8, 2, 30)]:
    formula = expected_collision_rate(L, k, Q)
    measured = empirical_collision_rate(L, k, Q, trials=500_000, seed=1)
    print(f"L={L:2d} k={k} Q={Q:3d}  formula={formula:.3e}  measured={measured:.3e}")
