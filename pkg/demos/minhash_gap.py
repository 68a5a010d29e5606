#!/usr/bin/env python3
# Why set-based MinHash misses order-sensitive similarity.

from semtraj import (
    EncodedCorpus, PlantSpec, SimilarityConfig, Trajectory, centralized_similar,
    gen_forest, gen_trajectories, load_forest, minhash_similar, qa2, run_pipeline,
)

forest = load_forest(gen_forest(10_000, 300, 10, seed=10))
cfg = SimilarityConfig()

# long trajectories where each planted pair shares only an ordered 4-place motif
trajs = gen_trajectories(400, (12, 12), forest, seed=11, planted=PlantSpec(60, 2, 4, level=3))
# plus reversed copies: same type set, opposite order
trajs += [Trajectory(1000 + t.id, tuple(reversed(t.places))) for t in trajs[:100]]

corpus = EncodedCorpus.from_trajectories(trajs, forest)
truth = centralized_similar(corpus, cfg)
print(len(truth), "truly similar pairs")

for bands in (16, 32, 64):
    found = minhash_similar(corpus, cfg, num_hashes=128, bands=bands)
    print(f"minhash 128 hashes / {bands} bands: QA2 = {qa2(found, truth):.3f}")
print("shingle pipeline: QA2 =", qa2(run_pipeline(trajs, forest, cfg).similar, truth))
