#!/usr/bin/env python3
# The partitioned pipeline against the exhaustive all-pairs baseline.

import math
import time

from semtraj import (
    EncodedCorpus, PlantSpec, SimilarityConfig, build_graph, centralized_similar,
    gen_forest, gen_trajectories, load_forest, maximal_cliques, qa1, qa2, run_pipeline,
)

forest = load_forest(gen_forest(10_000, 30, 10, seed=3))
plants = [PlantSpec(groups=10, group_size=4, motif_length=4, level=2),
          PlantSpec(groups=10, group_size=3, motif_length=4, level=3)]
trajs = gen_trajectories(3000, (5, 10), forest, seed=4, planted=plants)
cfg = SimilarityConfig(k=3, threshold=2.0)

t0 = time.perf_counter()
result = run_pipeline(trajs, forest, cfg)
t_run = time.perf_counter() - t0
print(result.report.to_json())

t0 = time.perf_counter()
truth = centralized_similar(EncodedCorpus.from_trajectories(trajs, forest), cfg)
t_oracle = time.perf_counter() - t0
truth_communities = maximal_cliques(build_graph(zip(truth.id1.tolist(), truth.id2.tolist())))

print("pairs scored:", result.report.pairs_compared, "of", math.comb(len(trajs), 2))
print("QA1 =", qa1(result.communities, truth_communities), " QA2 =", qa2(result.similar, truth))
print(f"pipeline {t_run:.2f}s, all pairs {t_oracle:.2f}s")

# the biggest communities
for c in sorted(result.communities, key=len, reverse=True)[:5]:
    print(c.members)

# partition skew: how unevenly the shingle groups are sized
stats = result.partition
print("groups", stats.groups, "largest", stats.max_group, "mean", round(stats.mean_group, 2))
