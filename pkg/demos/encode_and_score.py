#!/usr/bin/env python3
# Encoding places against the bundled demo hierarchy and scoring two trajectories.

from semtraj import SimilarityConfig, demo_forest, demo_trajectories, encode_trajectory, level_view, mss

forest = demo_forest()
print(forest.levels, "levels,", forest.level_cardinalities, "distinct prefixes per level")

trajs = {t.id: t for t in demo_trajectories()}
carol, dave = trajs[1], trajs[2]
print("carol:", carol.places)
print("dave: ", dave.places)

u = encode_trajectory(carol, forest)
v = encode_trajectory(dave, forest)
print(u.encs[:3])  # each place becomes type.class.place

# level 1 is the type-only view; deeper levels compare longer prefixes
for h in (1, 2, 3):
    print(h, level_view(u, h))

# per-level LCS lengths, then the weighted sum
cfg = SimilarityConfig(weights=(0.2, 0.3, 0.5))
pair = mss(u, v, cfg)
print(pair.per_level_matches, pair.score)  # (7, 3, 1) 2.8

# places outside the hierarchy are UNKNOWN and never match anything
odd = encode_trajectory(trajs[5], forest)
print([e for e in odd.encs if e.is_unknown])
