import pytest

from semtraj import (
    EncodedCorpus,
    PlantSpec,
    SimilarityConfig,
    Trajectory,
    centralized_similar,
    demo_forest,
    demo_trajectories,
    gen_forest,
    gen_trajectories,
    load_forest,
    maximal_cliques,
    build_graph,
    parallel_group_by,
    run_pipeline,
)
from semtraj.model import InputFormatError, InvalidConfig, ResourceExceeded


@pytest.fixture(scope="module")
def dataset():
    forest = load_forest(gen_forest(2000, 30, 10, seed=11))
    trajs = gen_trajectories(400, (5, 10), forest, seed=12, planted=[PlantSpec(5, 4, 4, 2), PlantSpec(5, 3, 4, 3)])
    return forest, trajs


def test_demo_pipeline():
    result = run_pipeline(demo_trajectories(), demo_forest(), SimilarityConfig(), workers=1)
    assert [c.members for c in result.communities] == [(1, 2, 3, 7), (5, 6)]
    assert (1, 2) in result.similar.pair_set()
    assert result.report.n_trajectories == 7


def test_matches_oracle_and_monolithic(dataset):
    forest, trajs = dataset
    cfg = SimilarityConfig()
    staged = run_pipeline(trajs, forest, cfg, workers=2)
    mono = run_pipeline(trajs, forest, cfg, mode="monolithic")
    truth = centralized_similar(EncodedCorpus.from_trajectories(trajs, forest), cfg)
    assert staged.similar == truth
    assert mono.similar == truth
    assert staged.communities == mono.communities == maximal_cliques(build_graph(zip(truth.id1.tolist(), truth.id2.tolist())))
    assert staged.report.pairs_compared == mono.report.pairs_compared
    assert staged.report.pairs_compared < len(trajs) * (len(trajs) - 1) // 2


@pytest.mark.parametrize("workers", [1, 2, 3, 8])
def test_output_independent_of_workers(dataset, workers):
    forest, trajs = dataset
    cfg = SimilarityConfig()
    ref = run_pipeline(trajs, forest, cfg, workers=1)
    got = run_pipeline(list(reversed(trajs)), forest, cfg, workers=workers, group_block=3)
    assert got.similar == ref.similar
    assert got.communities == ref.communities
    assert got.report.worker_count == workers


def test_empty_and_single():
    forest = demo_forest()
    for data in ([], [Trajectory(1, ("KFC",))]):
        result = run_pipeline(data, forest, SimilarityConfig(), workers=2)
        assert len(result.similar) == 0 and result.communities == []


def test_unknown_only_trajectories():
    data = [Trajectory(1, ("a", "b", "c")), Trajectory(2, ("a", "b", "c"))]
    result = run_pipeline(data, demo_forest(), SimilarityConfig(), workers=1)
    assert len(result.similar) == 0


def test_budget(dataset):
    forest, trajs = dataset
    with pytest.raises(ResourceExceeded):
        run_pipeline(trajs, forest, SimilarityConfig(), workers=2, max_pairs=10)
    with pytest.raises(ResourceExceeded):
        run_pipeline(trajs, forest, SimilarityConfig(), memory_budget=640)
    with pytest.raises(ResourceExceeded):
        run_pipeline(trajs, forest, SimilarityConfig(), mode="monolithic", max_pairs=10)


def test_bad_arguments(dataset):
    forest, trajs = dataset
    with pytest.raises(InvalidConfig):
        run_pipeline(trajs, forest, SimilarityConfig(), workers=0)
    with pytest.raises(InvalidConfig):
        run_pipeline(trajs, forest, SimilarityConfig(), mode="fast")
    with pytest.raises(InvalidConfig):
        run_pipeline(trajs, forest, SimilarityConfig(levels=2))
    dup = [Trajectory(1, ("KFC",)), Trajectory(1, ("KFC",))]
    for mode in ("staged", "monolithic"):
        with pytest.raises(InputFormatError):
            run_pipeline(dup, demo_forest(), SimilarityConfig(), mode=mode)


def test_parallel_group_by_matches_sequential():
    rows = [(i % 7, i) for i in range(200)]
    expected = sorted((k, sum(v for _, v in rows if _ == k)) for k in range(7))
    for workers in (1, 2, 5):
        got = parallel_group_by(rows, key=lambda r: r[0], fn=lambda k, g: sum(v for _, v in g), workers=workers)
        assert got == expected
    assert parallel_group_by([], key=lambda r: r, fn=lambda k, g: g, workers=3) == []
