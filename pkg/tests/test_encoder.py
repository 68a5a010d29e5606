import numpy as np
import pytest

from semtraj import EncodedCorpus, Encoding, ForestSource, Trajectory, encode_trajectory, level_view, load_forest
from semtraj.encoder import type_sequence
from semtraj.model import ConfigMismatch, DuplicatePlace, InputFormatError, InvalidLevel, MalformedForest


def test_demo_forest_cardinalities(forest):
    assert forest.levels == 3
    assert forest.lookup("Tokyo Airport") == Encoding((1, 2, 3))
    assert forest.decode((1, 2, 3)) == "Tokyo Airport"
    assert forest.decode((9, 9, 9)) is None
    assert forest.num_types == 6


def test_unknown_place_encodes_as_unknown(forest):
    et = encode_trajectory(Trajectory(7, ("KFC", "Nowhere")), forest)
    assert et.encs[1].is_unknown
    assert level_view(et, 1) == [(3,), None]
    assert type_sequence(et) == [3, None]


def test_level_view_prefixes(carol):
    assert level_view(carol, 2)[:3] == [(2, 1), (1, 2), (1, 2)]
    with pytest.raises(InvalidLevel):
        level_view(carol, 4)
    with pytest.raises(InvalidLevel):
        level_view(carol, 0)


@pytest.mark.parametrize("rows, err", [
    ([], MalformedForest),
    ([("a", (1, 1)), ("b", (1,))], MalformedForest),
    ([("a", (1, -2))], MalformedForest),
    ([("", (1, 1))], MalformedForest),
    ([("a\tb", (1, 1))], MalformedForest),
    ([("a", ("x", 1))], MalformedForest),
    ([("a", (1, 1)), ("a", (1, 2))], DuplicatePlace),
])
def test_load_forest_rejects(rows, err):
    with pytest.raises(err):
        load_forest(ForestSource(rows))
    assert issubclass(err, InputFormatError)


def test_prefix_equality_matches_dense_ids(forest):
    names = list(forest.entries)
    for a in names:
        for b in names:
            for h in (1, 2, 3):
                same = forest.lookup(a).prefix(h) == forest.lookup(b).prefix(h)
                assert same == (forest.dense_codes[a][h - 1] == forest.dense_codes[b][h - 1])


def test_corpus_from_trajectories_matches_from_encoded(forest):
    trajs = [Trajectory(9, ("KFC", "Mars", "Tokyo Airport")), Trajectory(3, ("Windy Apartment",))]
    a = EncodedCorpus.from_trajectories(trajs, forest)
    b = EncodedCorpus.from_encoded([encode_trajectory(t, forest) for t in trajs], forest)
    assert a.ids.tolist() == [3, 9]
    assert a.offsets.tolist() == [0, 1, 4]
    assert np.array_equal(a.codes, b.codes)
    assert a.codes[:, 2].tolist() == [-1, -1, -1]


def test_corpus_without_forest_preserves_prefix_equality(carol, dave):
    c = EncodedCorpus.from_encoded([carol, dave])
    for h in (1, 2, 3):
        view = level_view(carol, h) + level_view(dave, h)
        codes = c.codes[h - 1].tolist()
        for i in range(len(view)):
            for j in range(len(view)):
                assert (view[i] == view[j]) == (codes[i] == codes[j])


def test_corpus_rejects_duplicates_and_mixed_levels(forest, carol):
    with pytest.raises(InputFormatError):
        EncodedCorpus.from_trajectories([Trajectory(1, ("KFC",)), Trajectory(1, ("KFC",))], forest)
    from semtraj import EncodedTrajectory
    with pytest.raises(ConfigMismatch):
        EncodedCorpus.from_encoded([carol, EncodedTrajectory(5, (Encoding((1, 1)),))])


def test_index_of_and_subset(forest):
    trajs = [Trajectory(i, ("KFC",) * i) for i in (2, 4, 6)]
    c = EncodedCorpus.from_trajectories(trajs, forest)
    assert c.index_of([6, 2]).tolist() == [2, 0]
    with pytest.raises(KeyError):
        c.index_of([5])
    s = c.subset([2, 0])
    assert s.ids.tolist() == [2, 6]
    assert s.lengths.tolist() == [2, 6]
