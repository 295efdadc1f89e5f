import pytest
from hypothesis import given, strategies as st

from tournament_powers.construct import blowup, random_tournament, transitive_tournament
from tournament_powers.core import (
    DomainError,
    InputError,
    NotFoundError,
    dominates,
    verify_cycle_power,
    verify_path_power,
)
from tournament_powers.extremal import greedy_transitive
from tournament_powers.median import median_order, split_intervals
from tournament_powers.oracle import max_path_power_len
from tournament_powers.sequencing import (
    TransChain,
    assemble_cycle_power,
    assemble_path_power,
    find_path_power,
    longest_power_run,
    med_connect,
    med_connect_short,
    median_sequence,
    median_turan,
)

from helpers import anti_median_instance, block_split, s3_instance


def assert_chain(T, chain):
    assert chain.validate(T), chain.validate(T).reason
    for X, Y in zip(chain.blocks, chain.blocks[1:]):
        assert dominates(T, X, Y)


# --- TransChain -----------------------------------------------------------

def test_transchain_validation(c3):
    T = transitive_tournament(6)
    assert TransChain([(0, 1), (2, 3)]).validate(T)
    assert TransChain([(2, 3), (0, 1)]).validate(T).reason == "domination"
    assert TransChain([(0, 1), (1, 2)]).validate(T).reason == "blocks overlap"
    assert TransChain([(1, 0)]).validate(T).reason == "block not in transitive order"
    assert TransChain([(0, 1, 2)]).validate(c3).reason == "block not transitive"
    assert not TransChain([(0,), (1,)], cyclic=True).validate(T)


# --- one Turán step -------------------------------------------------------

def test_turan_transitive():
    T = transitive_tournament(40)
    split = block_split(T, [8] * 5)
    step = median_turan(T, split, 0, split.blocks[0], (), 1)
    assert step.X == (0,) and step.step == 1
    assert step.common == split.blocks[1]
    # with part of A_1 forbidden the larger common set lies in A_2
    step = median_turan(T, split, 0, split.blocks[0], split.blocks[1][:3], 1)
    assert step.step == 2 and step.common == split.blocks[2]


def test_turan_on_blowup():
    bl = blowup([16] * 4, "random", 2)
    T = bl.tournament
    split = block_split(T, [16] * 4)
    A0 = sorted(split.blocks[0][:8])
    step = median_turan(T, split, 0, A0, (), 1)
    target = set(split.blocks[step.step])
    assert set(step.common) <= target
    assert all(T.has_edge(x, c) for x in step.X for c in step.common)


def test_turan_needs_8k():
    T = transitive_tournament(40)
    split = block_split(T, [8] * 5)
    with pytest.raises(InputError):
        median_turan(T, split, 0, split.blocks[0][:7], (), 1)


# --- median sequences -----------------------------------------------------

def test_sequence_transitive():
    T = transitive_tournament(40)
    split = block_split(T, [8] * 5)
    chain = median_sequence(T, split, 0, list(split.blocks[0]), (), 1)
    assert chain.indices == [0, 1, 2, 3]
    assert chain.blocks == [(0,), (8,), (16,), (24,)]
    assert_chain(T, chain)


def test_sequence_cycle_blowup():
    bl = blowup([3] * 5, "cycle")
    T = bl.tournament
    split = block_split(T, [3] * 5)
    chain = median_sequence(T, split, 0, [0, 1], (), 1, pool=2)
    assert all(len(b) == 1 for b in chain.blocks)
    assert [split.block_of(b[0]) for b in chain.blocks] == chain.indices
    assert_chain(T, chain)


def test_sequence_strict_forbidden():
    T = transitive_tournament(40)
    split = block_split(T, [8] * 5)
    F = list(split.blocks[2]) + list(split.blocks[3])
    with pytest.raises(DomainError):
        median_sequence(T, split, 0, list(split.blocks[0]), F, 1, mode="strict")


@given(st.integers(0, 10**6), st.integers(1, 2))
def test_sequence_steps(seed, k):
    T = random_tournament(16 * k * 8, seed)
    o = median_order(T, "local", seed, restarts=1)
    split = split_intervals(o, 16 * k)
    X = greedy_transitive(T, split.blocks[0], limit=2 * k)
    try:
        chain = median_sequence(T, split, 0, X, (), k, pool=len(X))
    except NotFoundError:
        return
    assert_chain(T, chain)
    idx = chain.indices
    assert all(b - a in (1, 2) for a, b in zip(idx, idx[1:]))
    assert idx[-1] in (split.t - 1, split.t)
    assert all(len(b) == k for b in chain.blocks)


# --- short connections ----------------------------------------------------

def test_short_connection_transitive():
    T = transitive_tournament(60)
    split = block_split(T, [10] * 6)
    conn = med_connect_short(T, split, split.blocks[0], split.blocks[-1], (), 1)
    assert conn.branch == "s=2" and len(conn.chain.blocks) == 3
    assert_chain(T, conn.chain)


@pytest.mark.parametrize("k,m", [(1, 6), (2, 8)])
def test_short_connection_three_steps(k, m):
    T, split, L, R = s3_instance(m, 5)
    conn = med_connect_short(T, split, split.blocks[0], split.blocks[-1], (), k)
    assert conn.branch == "s=3" and len(conn.chain.blocks) == 4
    assert set(conn.chain.blocks[1]) <= set(L) and set(conn.chain.blocks[2]) <= set(R)
    assert_chain(T, conn.chain)


def test_short_connection_repairs_ordering():
    T, split, P, Q = anti_median_instance()
    with pytest.raises(NotFoundError) as err:
        med_connect_short(T, split, split.blocks[0], split.blocks[-1], (), 1)
    assert err.value.best == 1
    relocated = [e for e in err.value.trace if e[0] == "relocated"]
    assert relocated and relocated[0][2] == len(P) * len(Q)


@given(st.integers(0, 10**6))
def test_short_connection_chain_valid(seed):
    T = random_tournament(120, seed)
    split = split_intervals(median_order(T, "local", seed, restarts=1), 20)
    try:
        conn = med_connect_short(T, split, split.blocks[0], split.blocks[-1], (), 1)
    except NotFoundError:
        return
    assert 3 <= len(conn.chain.blocks) <= 4
    assert set(conn.chain.blocks[0]) <= set(split.blocks[0])
    assert set(conn.chain.blocks[-1]) <= set(split.blocks[-1])
    assert_chain(T, conn.chain)


# --- connections ----------------------------------------------------------

def test_connect_transitive():
    T = transitive_tournament(60)
    split = block_split(T, [10] * 6)
    conn = med_connect(T, split, split.blocks[0][:4], split.blocks[-1][:4], (), 1)
    assert conn.branch == "s=2" and len(conn.chain.blocks) - 1 <= 5
    assert_chain(T, conn.chain)


def test_connect_blowup():
    bl = blowup([10] * 6, "random", 3)
    T = bl.tournament
    split = block_split(T, [10] * 6)
    X = greedy_transitive(T, split.blocks[0], limit=4)
    Xp = greedy_transitive(T, split.blocks[-1], limit=4)
    conn = med_connect(T, split, X, Xp, (), 1)
    assert set(conn.chain.blocks[0]) <= set(X) and set(conn.chain.blocks[-1]) <= set(Xp)
    assert len(conn.chain.blocks) - 1 <= 5
    assert_chain(T, conn.chain)


def test_connect_needs_4k():
    T = transitive_tournament(60)
    split = block_split(T, [10] * 6)
    with pytest.raises(InputError):
        med_connect(T, split, split.blocks[0][:3], split.blocks[-1][:4], (), 1)


# --- assembly -------------------------------------------------------------

def test_assemble_single_block():
    T = transitive_tournament(7)
    assert assemble_path_power(T, [tuple(range(7))], 5) == list(range(7))


def test_assemble_blocks_of_size_k():
    bl = blowup([3] * 4, "random", 1)
    T = bl.tournament
    chain = [greedy_transitive(T, p, limit=2) for p in bl.parts]
    seq = assemble_path_power(T, chain, 2)
    assert len(seq) == 8 and verify_path_power(T, seq, 2)


def test_assemble_short_middle_block():
    with pytest.raises(DomainError):
        assemble_path_power(transitive_tournament(6), [[0, 1], [2], [3, 4]], 2)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=6), st.integers(1, 3), st.integers(0, 1000))
def test_assemble_blowup_chains(sizes, k, seed):
    bl = blowup([s + k for s in sizes], "random", seed)
    T = bl.tournament
    chain = [greedy_transitive(T, p) for p in bl.parts]
    if any(len(b) < k for b in chain[1:-1]):
        return
    seq = assemble_path_power(T, chain, k)
    assert len(seq) == sum(map(len, chain))
    assert verify_path_power(T, seq, k)


def test_assemble_cycle(c3):
    assert assemble_cycle_power(c3, [[0], [1], [2]], 1) == [0, 1, 2]
    with pytest.raises(DomainError):
        assemble_cycle_power(transitive_tournament(3), [[0], [1], [2]], 1)


def test_assemble_cycle_two_blocks_impossible():
    # mutual domination between two blocks cannot occur in a tournament
    T = transitive_tournament(4)
    with pytest.raises(DomainError):
        assemble_cycle_power(T, [[0, 1], [2, 3]], 2)


def test_assemble_cycle_three_blocks():
    bl = blowup([2, 2, 2], "transitive")
    o = bl.tournament.orient.copy()
    o[4:6, 0:2], o[0:2, 4:6] = True, False
    from tournament_powers.core import Tournament

    T = Tournament(o)
    cyc = assemble_cycle_power(T, [[0, 1], [2, 3], [4, 5]], 2)
    assert len(cyc) == 6 and verify_cycle_power(T, cyc, 2)


# --- path powers ----------------------------------------------------------

def test_find_path_power_examples(c3):
    T = random_tournament(40, 1)
    res = find_path_power(T, None, 1, 40)
    assert res.met and len(res.sequence) == 40
    for k in (1, 3, 6):
        assert find_path_power(transitive_tournament(30), None, k, 30).sequence == list(range(30))
    res = find_path_power(c3, None, 2, 3)
    assert not res.met and len(res.sequence) == 2


@given(st.integers(1, 60), st.integers(0, 10**6))
def test_find_path_power_hamilton(n, seed):
    T = random_tournament(n, seed)
    res = find_path_power(T, None, 1, n, seed)
    assert res.met and sorted(res.sequence) == list(range(n))
    assert verify_path_power(T, res.sequence, 1)


@given(st.integers(2, 40), st.integers(2, 3), st.integers(0, 10**6))
def test_find_path_power_verified(n, k, seed):
    T = random_tournament(n, seed)
    W = list(range(0, n, 2)) if n > 4 else list(range(n))
    res = find_path_power(T, W, k, n, seed)
    assert set(res.sequence) <= set(W)
    assert verify_path_power(T, res.sequence, k)
    if len(W) <= 12:
        sub, _ = T.subtournament(W)
        assert len(res.sequence) == max_path_power_len(sub, k)[0]


def test_longest_power_run():
    T = transitive_tournament(5)
    assert longest_power_run(T, [4, 0, 1, 2, 3], 2) == (1, 5)
