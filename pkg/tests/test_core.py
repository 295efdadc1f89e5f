import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tournament_powers.core import (
    DomainError,
    InfeasibleError,
    InputError,
    Ordering,
    Tournament,
    backward_edges,
    count_forward,
    density,
    dominates,
    is_transitive,
    strongly_connected_components,
    verify_cycle_power,
    verify_partition,
    verify_path_power,
)
from tournament_powers.construct import transitive_tournament

from strategies import tournament_and_perm, tournament_and_subset, tournaments


# --- construction ---------------------------------------------------------

def test_rejects_non_tournament_matrices():
    with pytest.raises(InputError):
        Tournament(np.ones((2, 2), dtype=bool))
    with pytest.raises(InputError):
        Tournament(np.zeros((2, 2), dtype=bool))
    with pytest.raises(InputError):
        Tournament(np.zeros((0, 0), dtype=bool))
    with pytest.raises(InputError):
        Tournament(np.zeros((2, 3), dtype=bool))


def test_dense_cap():
    with pytest.raises(InfeasibleError):
        Tournament(np.zeros((5, 5), dtype=bool), max_n=4)


@given(tournaments(1, 12))
def test_orientation_invariant(T):
    o = T.orient
    assert not o.diagonal().any()
    off = ~np.eye(T.n, dtype=bool)
    assert np.array_equal((o ^ o.T) | ~off, np.ones_like(o))


# --- density and domination ------------------------------------------------

def test_density_examples(c3, tt):
    assert density(c3, [0], [1]) == 1
    assert density(c3, [0], [1, 2]) == Fraction(1, 2)
    T6 = tt(6)
    assert density(T6, [0, 1, 2], [3, 4, 5]) == 1


def test_density_errors(c3):
    with pytest.raises(DomainError):
        density(c3, [0, 1], [1, 2])
    with pytest.raises(DomainError):
        density(c3, [], [1])


def test_dominates_examples(c3, tt):
    assert dominates(tt(3), [0], [1, 2])
    assert not dominates(c3, [0], [2])
    assert not dominates(tt(3), [0], [0, 1])


@st.composite
def disjoint_pair(draw):
    T = draw(tournaments(2, 10))
    verts = draw(st.permutations(range(T.n)))
    cut = draw(st.integers(1, T.n - 1))
    a = draw(st.integers(1, cut))
    b = draw(st.integers(1, T.n - cut))
    return T, list(verts[:a]), list(verts[cut:cut + b])


@given(disjoint_pair())
def test_density_complement(args):
    T, A, B = args
    assert density(T, A, B) + density(T, B, A) == 1


@given(disjoint_pair())
def test_dominates_iff_full_density(args):
    T, A, B = args
    assert dominates(T, A, B) == (density(T, A, B) == 1)


# --- transitivity ---------------------------------------------------------

def test_is_transitive_examples(c3, tt):
    assert is_transitive(c3, [0, 1, 2]) is None
    assert is_transitive(tt(5), [4, 1, 3]) == [1, 3, 4]
    assert is_transitive(c3, [2]) == [2]


def _has_directed_triangle(T, S):
    o = T.orient
    return any(
        (o[a, b] and o[b, c] and o[c, a]) or (o[a, c] and o[c, b] and o[b, a])
        for a, b, c in itertools.combinations(S, 3)
    )


@given(tournament_and_subset(max_n=12))
def test_transitive_iff_no_triangle(args):
    T, S = args
    order = is_transitive(T, S)
    assert (order is not None) == (not _has_directed_triangle(T, S))
    if order is not None:
        assert sorted(order) == S
        assert verify_path_power(T, order, len(S))


# --- verifiers ------------------------------------------------------------

def test_path_power_examples(c3, tt):
    assert verify_path_power(tt(4), [0, 1, 2, 3], 3)
    res = verify_path_power(c3, [0, 1, 2], 2)
    assert not res and res.witness == (0, 2)
    assert verify_path_power(c3, [1], 5)
    assert not verify_path_power(c3, [0, 1, 0], 1)
    with pytest.raises(InputError):
        verify_path_power(c3, [0, 7], 1)
    with pytest.raises(InputError):
        verify_path_power(c3, [0], 0)


def test_cycle_power_examples(c3, tt):
    assert verify_cycle_power(c3, [0, 1, 2], 1)
    for perm in itertools.permutations(range(3)):
        assert not verify_cycle_power(tt(3), perm, 1)
    assert verify_cycle_power(tt(3), [0, 1], 1)
    assert verify_cycle_power(tt(3), [2], 1)
    with pytest.raises(InputError):
        verify_cycle_power(c3, [0, 3], 1)


def test_partition_examples(tt):
    T = tt(6)
    ok = verify_partition(T, [list(range(6))], 3)
    assert ok and ok.report["parts"] == 1
    assert verify_partition(T, [[0, 1, 2], [3, 4]], 1).reason == "coverage"
    assert verify_partition(T, [[0, 1, 2], [2, 3, 4, 5]], 1).reason == "disjointness"


@given(tournament_and_perm(1, 10), st.integers(1, 4))
def test_path_power_prefix_closed(args, k):
    T, perm = args
    if verify_path_power(T, perm, k):
        for i in range(len(perm) + 1):
            assert verify_path_power(T, perm[:i], k)


@given(tournament_and_perm(3, 9), st.integers(1, 3))
def test_cycle_power_windows_are_path_powers(args, k):
    T, perm = args
    L = len(perm)
    if L > k and verify_cycle_power(T, perm, k):
        doubled = perm + perm
        for start in range(L):
            for length in range(1, L + 1):
                assert verify_path_power(T, doubled[start:start + length], k)


# --- orderings ------------------------------------------------------------

def test_backward_edges_examples(c3, tt):
    assert backward_edges(tt(5), range(5)) == []
    assert backward_edges(c3, [0, 1, 2]) == [((2, 0), 2)]
    assert len(backward_edges(tt(3), [2, 1, 0])) == 3
    with pytest.raises(InputError):
        backward_edges(c3, [0, 1])


@given(tournament_and_perm(1, 12))
def test_backward_plus_forward_is_all_edges(args):
    T, perm = args
    n = T.n
    back = backward_edges(T, perm)
    assert len(back) + count_forward(T, perm) == n * (n - 1) // 2
    pos = {v: i for i, v in enumerate(perm)}
    for (u, v), length in back:
        assert T.has_edge(u, v) and pos[u] > pos[v] and length == pos[u] - pos[v]
    assert Ordering.of(T, perm).backward_count == len(back)


def test_strong_components_of_transitive():
    comps = strongly_connected_components(transitive_tournament(4))
    assert sorted(map(sorted, comps)) == [[0], [1], [2], [3]]


def test_subtournament_map(c3):
    sub, back = c3.subtournament([2, 0])
    assert back == (2, 0)
    assert sub.has_edge(0, 1)
