#!/usr/bin/env python3
# Per-stage timings for several worker counts; outputs never change with workers.

import os

from semtraj import SimilarityConfig, bench, gen_forest, gen_trajectories, load_forest, run_pipeline

forest = load_forest(gen_forest(10_000, 300, 10, seed=8))
trajs = gen_trajectories(30_000, (5, 10), forest, seed=9)
cfg = SimilarityConfig()
print("cpus available:", len(os.sched_getaffinity(0)))

reference = run_pipeline(trajs, forest, cfg, workers=1)
for workers in (1, 2, 4):
    report = bench(trajs, forest, cfg, workers=workers, repeats=3)
    stages = " ".join(f"{k}={v * 1000:.0f}ms" for k, v in report.stage_seconds.items())
    print(f"workers={workers} total={report.total_seconds * 1000:.0f}ms  {stages}")
    assert run_pipeline(trajs, forest, cfg, workers=workers).similar == reference.similar

# the single-pass variant over Python objects, for contrast
mono = run_pipeline(trajs[:5000], forest, cfg, mode="monolithic")
staged = run_pipeline(trajs[:5000], forest, cfg, workers=1)
print("monolithic 5k:", round(mono.report.total_seconds, 2), "s  staged 5k:", round(staged.report.total_seconds, 2), "s")
