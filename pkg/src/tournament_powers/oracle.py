"""Exhaustive and exact solvers used as ground truth at small n.

Every search returns the lexicographically smallest optimal witness so that
results are reproducible fixtures.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    InfeasibleError,
    InputError,
    Ordering,
    Tournament,
    count_forward,
    members,
    _perm,
)


@dataclass(frozen=True)
class OracleBudget:
    max_n_exact_ordering: int = 18
    max_subset_bits: int = 20
    max_n_search: int = 12
    time_limit: float | None = None

    def __post_init__(self):
        if min(self.max_n_exact_ordering, self.max_subset_bits, self.max_n_search) < 1:
            raise InputError("oracle budgets must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise InputError("time_limit must be positive")


DEFAULT_BUDGET = OracleBudget()


class _Clock:
    def __init__(self, limit: float | None):
        self.deadline = None if limit is None else time.monotonic() + limit
        self.ticks = 0

    def check(self) -> None:
        self.ticks += 1
        if self.deadline is not None and self.ticks % 1024 == 0 and time.monotonic() > self.deadline:
            raise InfeasibleError("oracle time limit exceeded")


# ---------------------------------------------------------------------------
# linear ordering


def _min_backward_table(T: Tournament) -> np.ndarray:
    """f[S] = minimum number of backward edges inside T[S] over all orders of S.

    Recurrence on the first vertex v of the order: every u in S - v with
    u -> v becomes a backward edge.  Layers by popcount keep it vectorised.
    """
    n = T.n
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    pc = np.zeros(size, dtype=np.int8)
    for b in range(n):
        pc += ((idx >> b) & 1).astype(np.int8)
    f = np.full(size, np.iinfo(np.int32).max, dtype=np.int32)
    f[0] = 0
    order = np.argsort(pc, kind="stable")
    bounds = np.searchsorted(pc[order], np.arange(n + 2))
    in_mask = [T.in_bits[v] for v in range(n)]
    for layer in range(1, n + 1):
        S = order[bounds[layer]:bounds[layer + 1]]
        best = np.full(S.shape, np.iinfo(np.int32).max, dtype=np.int32)
        for v in range(n):
            has = ((S >> v) & 1).astype(bool)
            prev = S[has] ^ (1 << v)
            cand = f[prev] + pc[prev & in_mask[v]]
            best[has] = np.minimum(best[has], cand)
        f[S] = best
    return f


def exact_min_backward(T: Tournament, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[int, Ordering]:
    """Minimum backward-edge count over all orderings, via subset DP.

    Returns the count and the lexicographically smallest optimal ordering.
    """
    n = T.n
    if n > budget.max_n_exact_ordering:
        raise InfeasibleError(f"exact ordering needs n <= {budget.max_n_exact_ordering}, got {n}")
    f = _min_backward_table(T)
    S = (1 << n) - 1
    perm = []
    while S:
        for v in members(S):
            rest = S ^ (1 << v)
            if (T.in_bits[v] & rest).bit_count() + int(f[rest]) == int(f[S]):
                perm.append(v)
                S = rest
                break
    best = int(f[(1 << n) - 1])
    return best, Ordering(tuple(perm), n * (n - 1) // 2 - best, "exact")


def exact_intransitivity(T: Tournament, budget: OracleBudget = DEFAULT_BUDGET) -> Fraction:
    """The largest eps with T eps-intransitive: min backward count / n^2."""
    count, _ = exact_min_backward(T, budget)
    return Fraction(count, T.n * T.n)


def enumerate_min_backward(T: Tournament, max_n: int = 9) -> tuple[int, tuple[int, ...]]:
    """Brute force over all n! orderings; independent cross-check of the DP."""
    n = T.n
    if n > max_n:
        raise InfeasibleError(f"permutation enumeration capped at n={max_n}")
    if n == 1:
        return 0, (0,)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    back = np.zeros(len(perms), dtype=np.int64)
    o = T.orient
    for i in range(n):
        for j in range(i + 1, n):
            back += o[perms[:, j], perms[:, i]]
    best = int(back.min())
    first = int(np.flatnonzero(back == best)[0])
    return best, tuple(int(v) for v in perms[first])


# ---------------------------------------------------------------------------
# transitive subtournaments


def max_transitive(T: Tournament, budget: OracleBudget = DEFAULT_BUDGET) -> list[int]:
    """A maximum transitive subtournament, in its transitive order.

    Branch on the source vertex; the rest lives in its out-neighbourhood.
    Memoised on the candidate mask, lexicographically smallest on ties.
    """
    if T.n > budget.max_subset_bits:
        raise InfeasibleError(f"max_transitive needs n <= {budget.max_subset_bits}")
    clock = _Clock(budget.time_limit)
    memo: dict[int, tuple[int, ...]] = {0: ()}

    def best(mask: int) -> tuple[int, ...]:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        clock.check()
        top: tuple[int, ...] = ()
        size = mask.bit_count()
        for v in members(mask):
            rest = mask & T.out_bits[v]
            if 1 + rest.bit_count() <= len(top):
                continue
            cand = (v,) + best(rest)
            if len(cand) > len(top) or (len(cand) == len(top) and cand < top):
                top = cand
            if len(top) == size:
                break
        memo[mask] = top
        return top

    return list(best((1 << T.n) - 1))


# ---------------------------------------------------------------------------
# path and cycle powers


def _check_search(T: Tournament, k: int, budget: OracleBudget) -> None:
    if k < 1:
        raise InputError("k must be at least 1")
    if T.n > budget.max_n_search:
        raise InfeasibleError(f"exhaustive power search needs n <= {budget.max_n_search}")


def max_path_power_len(
    T: Tournament, k: int, budget: OracleBudget = DEFAULT_BUDGET, *, memo: bool = False
) -> tuple[int, tuple[int, ...]]:
    """Longest k-th power of a path, by exhaustive ordered search.

    The next vertex must be an out-neighbour of each of the last k vertices.
    With ``memo`` the best extension length of a (used, suffix) state is cached.
    """
    _check_search(T, k, budget)
    n = T.n
    full = (1 << n) - 1
    clock = _Clock(budget.time_limit)
    best: list[tuple[int, ...]] = [()]
    cache: dict[tuple[int, tuple[int, ...]], int] = {}

    def extend(seq: list[int], used: int) -> int:
        clock.check()
        if len(seq) > len(best[0]):
            best[0] = tuple(seq)
        if len(best[0]) == n:
            return 0
        key = (used, tuple(seq[-k:]))
        if memo and key in cache:
            return cache[key]
        free = full & ~used
        if not memo and len(seq) + free.bit_count() <= len(best[0]):
            return 0
        cand = free
        for x in seq[-k:]:
            cand &= T.out_bits[x]
        longest = 0
        for w in members(cand):
            seq.append(w)
            longest = max(longest, 1 + extend(seq, used | (1 << w)))
            seq.pop()
            if len(best[0]) == n:
                break
        if memo:
            cache[key] = longest
        return longest

    for s in range(n):
        extend([s], 1 << s)
        if len(best[0]) == n:
            break
    return len(best[0]), best[0]


def exists_cycle_power(
    T: Tournament, k: int, min_len: int, budget: OracleBudget = DEFAULT_BUDGET
) -> tuple[int, ...] | None:
    """A k-th power of a cycle on at least ``min_len`` vertices, or None.

    Cycles are enumerated with their smallest vertex first; a length-L
    candidate closes iff every wrap-around pair within distance k is an edge.
    """
    _check_search(T, k, budget)
    n = T.n
    if min_len <= 1:
        return (0,)
    if min_len == 2:
        return (0, 1) if n >= 2 else None
    if min_len > n:
        return None
    clock = _Clock(budget.time_limit)
    o = T.orient

    def closes(seq: list[int]) -> bool:
        L = len(seq)
        if L < 2 * k + 1:
            return False
        for i in range(L - k, L):
            for d in range(1, k + 1):
                if i + d >= L and not o[seq[i], seq[(i + d) % L]]:
                    return False
        return True

    def search(seq: list[int], used: int, pool: int) -> tuple[int, ...] | None:
        clock.check()
        if len(seq) >= min_len and closes(seq):
            return tuple(seq)
        cand = pool & ~used
        if len(seq) + cand.bit_count() < min_len:
            return None
        for x in seq[-k:]:
            cand &= T.out_bits[x]
        for w in members(cand):
            seq.append(w)
            hit = search(seq, used | (1 << w), pool)
            seq.pop()
            if hit is not None:
                return hit
        return None

    full = (1 << n) - 1
    for s in range(n):
        pool = full & ~((1 << (s + 1)) - 1) | (1 << s)
        if pool.bit_count() < min_len:
            break
        hit = search([s], 1 << s, pool)
        if hit is not None:
            return hit
    return None


def longest_cycle_power(T: Tournament, k: int, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[int, ...]:
    """A longest k-th power of a cycle (an edge or a vertex when nothing longer exists)."""
    for L in range(T.n, 2, -1):
        hit = exists_cycle_power(T, k, L, budget)
        if hit is not None:
            return hit
    if T.n >= 2:
        return (0, 1) if T.orient[0, 1] else (1, 0)
    return (0,)


# ---------------------------------------------------------------------------
# bicliques of backward edges


def backward_biclique(
    T: Tournament, ordering, s: int, budget: OracleBudget = DEFAULT_BUDGET
) -> tuple[list[int], list[int]] | None:
    """Sets X, Y of size s with every x -> y a backward edge (x after y).

    X ranges over s-subsets in lexicographic order; Y is the first s common
    backward out-neighbours of the first X that has enough of them.
    """
    if s < 1:
        raise InputError("s must be at least 1")
    perm = _perm(T, ordering)
    n = T.n
    if math.comb(n, s) > (1 << budget.max_subset_bits):
        raise InfeasibleError("biclique enumeration exceeds the subset budget")
    pos = {v: i for i, v in enumerate(perm)}
    earlier = [0] * n
    acc = 0
    for v in perm:
        earlier[v] = acc
        acc |= 1 << v
    back = [T.out_bits[v] & earlier[v] for v in range(n)]
    clock = _Clock(budget.time_limit)
    for X in itertools.combinations(range(n), s):
        clock.check()
        common = (1 << n) - 1
        for x in X:
            common &= back[x]
            if common.bit_count() < s:
                break
        if common.bit_count() >= s:
            Y = members(common)[:s]
            assert min(pos[x] for x in X) > max(pos[y] for y in Y)
            return list(X), Y
    return None


def forward_count(T: Tournament, ordering) -> int:
    return count_forward(T, _perm(T, ordering))
