import pytest
from hypothesis import given, settings, strategies as st

from gpbg.board import (
    BoardState,
    acceptable_move,
    exchange,
    is_upper_echelon,
    move_applies,
    partition_classes,
    reachable_boards,
    reachable_echelon_forms,
    reduce_to_echelon,
    reduction_dot,
    replay,
)
from gpbg.core import CollisionMap, HighlightedMatrix, Permutation, iter_maps, map_count
from gpbg.errors import MoveNotApplicable
from gpbg.suite import echelon_uniqueness


@pytest.mark.parametrize(
    "k, n, highlight, expected",
    [
        (1, 4, (1, 1, 3, 4), True),
        (2, 4, (1, 2, 3, 3), True),
        (2, 2, (2, 1), False),
        (1, 3, (1, 2, 1), False),
    ],
)
def test_echelon_detection(k, n, highlight, expected):
    assert is_upper_echelon(HighlightedMatrix(k, n, highlight)) is expected


def test_move_needs_descent():
    b = BoardState.initial(CollisionMap(1, 2, (1, 1)))
    with pytest.raises(MoveNotApplicable):
        acceptable_move(b, 1)
    with pytest.raises(MoveNotApplicable):
        acceptable_move(b, 2)


def test_single_move_example():
    b = BoardState.initial(CollisionMap(1, 3, (1, 2, 1)))
    after = acceptable_move(b, 2)
    assert after.mu == (1, 1, 2)
    assert after.time_order == Permutation((1, 3, 2))
    assert after.column_times == (1, 3, 2)


def test_row_exchange_relabels_later_highlights():
    # columns 1, 2 swap; rows 3, 4 swap, so the highlight in row 3 moves to row 4
    b = BoardState.initial(CollisionMap(2, 3, (2, 1, 3)))
    after = acceptable_move(b, 1)
    assert after.mu == (1, 2, 4)


@pytest.mark.parametrize("k, n", [(1, 4), (2, 4), (3, 3)])
def test_exchange_undoes_a_move(k, n):
    for m in iter_maps(k, n):
        for b in reachable_boards(m)[0]:
            for j in range(1, n):
                if move_applies(b, j):
                    assert exchange(acceptable_move(b, j), j) == b


@pytest.mark.parametrize("k, n", [(1, 4), (2, 4), (3, 3)])
def test_reverse_move_is_never_legal(k, n):
    for m in iter_maps(k, n):
        for b in reachable_boards(m)[0]:
            for j in range(1, n):
                if move_applies(b, j):
                    assert not move_applies(acceptable_move(b, j), j)


def test_reduction_examples():
    rep, sigma, moves = reduce_to_echelon(CollisionMap(1, 3, (1, 2, 1)))
    assert rep.highlight == (1, 1, 2) and moves == [2] and sigma == Permutation((1, 3, 2))
    rep, sigma, moves = reduce_to_echelon(CollisionMap(2, 4, (1, 2, 3, 3)))
    assert moves == [] and sigma.is_identity()


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("n", range(1, 6))
def test_replay_reproduces_representative(k, n):
    for m in iter_maps(k, n):
        rep, sigma, moves = reduce_to_echelon(m)
        b = replay(m, moves)
        assert b.matrix == rep and b.time_order == sigma
        assert is_upper_echelon(rep)
        assert len(moves) <= n * (n - 1) // 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda k: st.tuples(st.just(k), st.integers(1, 7))).flatmap(
    lambda kn: st.tuples(*[st.integers(1, kn[0] + l - 1) for l in range(1, kn[1] + 1)]).map(
        lambda mu: CollisionMap(kn[0], kn[1], mu))))
def test_reduction_terminates_in_echelon_form(m):
    rep, _, moves = reduce_to_echelon(m)
    assert is_upper_echelon(rep)
    assert len(moves) <= m.n * (m.n - 1) // 2


def test_class_examples():
    classes = partition_classes(1, 2)
    assert len(classes) == 2 and all(len(c.members) == 1 for c in classes)
    assert len(partition_classes(1, 4)) <= 128


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("n", range(1, 6))
def test_partition_properties(k, n):
    classes = partition_classes(k, n)
    assert len(classes) <= 2 ** (k + 2 * n - 2)
    members = [m for c in classes for m, _ in c.members]
    assert len(members) == len(set(members)) == map_count(k, n)
    for c in classes:
        assert c.permutations_distinct()
        assert c.domain == frozenset(s for _, s in c.members)
        for m, s in c.members:
            rep, sigma, _ = reduce_to_echelon(m)
            assert rep == c.representative and sigma == s


@pytest.mark.parametrize("k, n", [(1, 4), (2, 4), (1, 5), (3, 3)])
def test_echelon_form_is_unique_per_map(k, n):
    assert echelon_uniqueness(k, n)


def test_reachable_echelon_forms_example():
    assert reachable_echelon_forms(CollisionMap(1, 3, (1, 2, 1))) == {(1, 1, 2)}


def test_reduction_graph_dot():
    dot = reduction_dot(CollisionMap(1, 3, (1, 2, 1)))
    assert dot.startswith("digraph") and 'label="j=2"' in dot and "style=bold" in dot


def test_class_json_shape():
    c = partition_classes(1, 3)[1]
    d = c.to_json()
    assert set(d) == {"representative", "members"}
    assert {"mu", "sigma"} <= set(d["members"][0])
