"""Unordered extremal tools: greedy transitive sets, Kővári–Sós–Turán subsets,
dependent random choice and transitive chains.

All size thresholds are compared as exact rationals.  ``mode="strict"``
additionally enforces the asymptotic size preconditions and raises
:class:`InfeasibleError` when they fail; ``"opportunistic"`` relaxes only
those size preconditions, never the verification of outputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DomainError,
    InfeasibleError,
    InputError,
    NotFoundError,
    Tournament,
    density,
    dominates,
    is_transitive,
    mask_of,
    members,
    vertex_set,
)

ENUMERATION_CAP = 10**6
PRUNE_SAMPLES = 10**5
DEFAULT_RETRIES = 50
MODES = ("strict", "opportunistic")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}, got {mode!r}")


def _bits(T: Tournament, direction: str) -> list[int]:
    if direction == "out":
        return T.out_bits
    if direction == "in":
        return T.in_bits
    raise InputError("direction must be 'out' or 'in'")


def greedy_transitive_mask(T: Tournament, mask: int, limit: int | None = None) -> list[int]:
    order = []
    cand = mask
    while cand and (limit is None or len(order) < limit):
        best_v, best_d = -1, -1
        for v in members(cand):
            d = (T.out_bits[v] & cand).bit_count()
            if d > best_d:
                best_v, best_d = v, d
        order.append(best_v)
        cand &= T.out_bits[best_v]
    return order


def greedy_transitive(T: Tournament, W: Iterable[int], limit: int | None = None) -> list[int]:
    """A transitive subset of W of size at least floor(log2 |W|) + 1, in order.

    Repeatedly takes a vertex of maximum out-degree in the current candidate
    set (lowest index on ties) and recurses into its out-neighbourhood.
    """
    w = vertex_set(T, W, name="W")
    if not w:
        raise DomainError("greedy_transitive needs a nonempty set")
    return greedy_transitive_mask(T, mask_of(w), limit)


def high_degree_subset(
    T: Tournament, A: Iterable[int], B: Iterable[int], direction: str = "out", eps=Fraction(0)
) -> list[int]:
    """All a in A with at least eps*|B| neighbours in B in the given direction."""
    a = vertex_set(T, A, name="A")
    b = vertex_set(T, B, name="B")
    if not a or not b or a & b:
        raise DomainError("high_degree_subset needs disjoint nonempty sets")
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise DomainError("eps must lie in [0, 1]")
    bits = _bits(T, direction)
    mb = mask_of(b)
    threshold = eps * len(b)
    out = sorted(v for v in a if (bits[v] & mb).bit_count() >= threshold)
    beta = density(T, a, b) if direction == "out" else density(T, b, a)
    assert len(out) >= (beta - eps) * len(a), "degree-counting bound violated"
    return out


# ---------------------------------------------------------------------------
# Kővári–Sós–Turán


def _best_subset(bits: list[int], pool: Sequence[int], target: int, k: int) -> tuple[tuple[int, ...], int]:
    """k-subset of ``pool`` with the largest common neighbourhood in ``target``.

    Depth-first over combinations in lexicographic order with running
    intersections; branches that cannot beat the incumbent are cut.
    """
    best: list = [(), -1]
    pool = list(pool)

    def rec(start: int, chosen: list[int], common: int) -> None:
        size = common.bit_count()
        if size <= best[1]:
            return
        if len(chosen) == k:
            best[0], best[1] = tuple(chosen), size
            return
        for i in range(start, len(pool) - (k - len(chosen)) + 1):
            v = pool[i]
            chosen.append(v)
            rec(i + 1, chosen, common & bits[v])
            chosen.pop()

    rec(0, [], target)
    return best[0], max(best[1], 0)


def _greedy_subset(bits: list[int], pool: Sequence[int], target: int, k: int) -> tuple[tuple[int, ...], int]:
    chosen: list[int] = []
    common = target
    remaining = list(pool)
    while len(chosen) < k:
        v = max(remaining, key=lambda u: ((common & bits[u]).bit_count(), -u))
        remaining.remove(v)
        chosen.append(v)
        common &= bits[v]
    return tuple(sorted(chosen)), common.bit_count()


def kst_subset(
    T: Tournament,
    A: Iterable[int],
    B: Iterable[int],
    k: int,
    beta,
    direction: str = "out",
) -> tuple[list[int], list[int]]:
    """X in A of size k whose common neighbourhood in B has >= beta^(4k)|B| vertices.

    Preconditions: 0 < beta <= 1/2, every a in A has >= beta|B| neighbours in
    B, and |A| >= k/beta.  A is cut to its first ceil(k/beta) vertices; k-subsets
    are enumerated when there are at most 10^6 of them, else chosen greedily.
    Returns X (sorted) and its common neighbourhood (sorted).
    """
    if k < 1:
        raise InputError("k must be at least 1")
    beta = Fraction(beta)
    if not 0 < beta <= Fraction(1, 2):
        raise DomainError("beta must lie in (0, 1/2]")
    a = sorted(vertex_set(T, A, name="A"))
    b = vertex_set(T, B, name="B")
    if not b or set(a) & b:
        raise DomainError("A and B must be disjoint and B nonempty")
    bits = _bits(T, direction)
    mb = mask_of(b)
    for v in a:
        if (bits[v] & mb).bit_count() < beta * len(b):
            raise DomainError(f"vertex {v} has fewer than beta*|B| neighbours in B")
    if len(a) < k / beta:
        raise DomainError(f"|A|={len(a)} is below k/beta={k / beta}")
    pool = a[: math.ceil(k / beta)]
    if math.comb(len(pool), k) <= ENUMERATION_CAP:
        X, _ = _best_subset(bits, pool, mb, k)
    else:
        X, _ = _greedy_subset(bits, pool, mb, k)
    common = mb
    for v in X:
        common &= bits[v]
    if common.bit_count() < beta ** (4 * k) * len(b):
        raise NotFoundError("no k-subset reached the beta^(4k)|B| common-neighbourhood bound")
    return list(X), members(common)


def best_common_subset(
    T: Tournament, pool: Sequence[int], target: int, k: int, direction: str = "out"
) -> tuple[list[int], int]:
    """Unconditional variant: the k-subset of ``pool`` maximising the common
    neighbourhood inside ``target`` (a mask).  Returns the subset and the mask."""
    bits = _bits(T, direction)
    pool = sorted(pool)
    if len(pool) < k:
        return [], 0
    if math.comb(len(pool), k) <= ENUMERATION_CAP:
        X, _ = _best_subset(bits, pool, target, k)
    else:
        X, _ = _greedy_subset(bits, pool, target, k)
    common = target
    for v in X:
        common &= bits[v]
    return list(X), common


# ---------------------------------------------------------------------------
# dependent random choice


@dataclass(frozen=True)
class TransPair:
    """X => Y with the transitivity of each side recorded (orders kept)."""

    X: tuple[int, ...]
    Y: tuple[int, ...]
    x_transitive: bool
    y_transitive: bool = True


def drc_sample_size(beta: Fraction, size_b: int) -> int:
    """max(1, floor(log_{1/beta}|B| / 2)) computed exactly."""
    inv = 1 / Fraction(beta)
    s = 0
    while inv ** (2 * (s + 1)) <= size_b:
        s += 1
    return max(1, s)


def _retry_rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, attempt])


def _drc_attempt(T, a_list, a_mask, b_mask, k, beta, rng, size_a) -> tuple[list[int], list[int]] | None:
    s = drc_sample_size(beta, b_mask.bit_count())
    sample = rng.choice(a_list, size=s, replace=True)
    tprime = b_mask
    for v in sample:
        tprime &= T.out_bits[int(v)]
    if tprime.bit_count() < k:
        return None
    threshold = beta ** (4 * k) * size_a
    W = tprime
    verts = members(tprime)
    if math.comb(len(verts), k) <= ENUMERATION_CAP:
        subsets = itertools.combinations(verts, k)
    else:
        subsets = (tuple(sorted(rng.choice(verts, size=k, replace=False).tolist())) for _ in range(PRUNE_SAMPLES))
    for Q in subsets:
        if any(not (W >> q & 1) for q in Q):
            continue
        common = a_mask
        for q in Q:
            common &= T.in_bits[q]
        if common.bit_count() < threshold:
            W &= ~(1 << Q[-1])
    if W.bit_count() < k:
        return None
    Y = greedy_transitive_mask(T, W, limit=k)
    if len(Y) < k:
        return None
    X = members(a_mask & _common_in_mask(T, Y))
    return X, Y


def _common_in_mask(T: Tournament, Y: Iterable[int]) -> int:
    m = -1
    for y in Y:
        m &= T.in_bits[y]
    return m


def _drc_prepare(T, A, B, k, beta, mode):
    _check_mode(mode)
    if k < 1:
        raise InputError("k must be at least 1")
    beta = Fraction(beta)
    if not 0 < beta <= Fraction(1, 2):
        raise DomainError("beta must lie in (0, 1/2]")
    a = vertex_set(T, A, name="A")
    b = vertex_set(T, B, name="B")
    d = density(T, a, b)
    if d < beta:
        raise DomainError(f"d(A,B)={d} is below beta={beta}")
    if mode == "strict":
        need = beta ** (-5 * k)
        if len(a) < need or len(b) < need:
            raise InfeasibleError(f"strict mode needs |A|,|B| >= beta^(-5k) = {need}")
    return beta, a, b


def drc_transitive_pair(
    T: Tournament,
    A: Iterable[int],
    B: Iterable[int],
    k: int,
    beta,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
    *,
    mode: str = "opportunistic",
    min_size: int = 1,
    accept=None,
) -> tuple[list[int], list[int]]:
    """Y in B transitive of size k and X in A its common in-neighbourhood, X => Y.

    Dependent random choice: sample s vertices of A with replacement, take
    their common out-neighbourhood T' in B, delete a vertex from each k-subset
    of T' with fewer than beta^(4k)|A| common in-neighbours, and extract Y
    greedily.  Attempts use seed-derived randomness; the first attempt whose
    X reaches max(beta^(4k)|A|, min_size) and passes ``accept`` wins.
    """
    beta, a, b = _drc_prepare(T, A, B, k, beta, mode)
    a_list = np.array(sorted(a), dtype=np.int64)
    a_mask, b_mask = mask_of(a), mask_of(b)
    bound = beta ** (4 * k) * len(a)
    best = None
    for attempt in range(retries):
        res = _drc_attempt(T, a_list, a_mask, b_mask, k, beta, _retry_rng(seed, attempt), len(a))
        if res is None:
            continue
        X, Y = res
        if best is None or len(X) > len(best[0]):
            best = res
        if len(X) >= bound and len(X) >= min_size and (accept is None or accept(X, Y)):
            assert dominates(T, X, Y) and is_transitive(T, Y) is not None
            return X, Y
    raise NotFoundError(f"dependent random choice failed after {retries} attempts", best=best)


def transitive_pair(
    T: Tournament,
    A: Iterable[int],
    B: Iterable[int],
    k: int,
    beta=Fraction(1, 2),
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
    *,
    mode: str = "opportunistic",
) -> TransPair:
    """Transitive k-sets X in A and Y in B with X => Y."""
    beta = Fraction(beta)
    if mode == "strict" and beta ** (4 * k) * len(set(A)) < 2**k:
        raise InfeasibleError("strict mode needs beta^(4k)|A| >= 2^k")

    def hosts(X, Y):
        return len(greedy_transitive(T, X, limit=k)) >= k

    try:
        X, Y = drc_transitive_pair(T, A, B, k, beta, seed, retries, mode=mode, min_size=k, accept=hosts)
    except NotFoundError as err:
        raise NotFoundError(f"no transitive {k}-set inside a common in-neighbourhood: {err}") from err
    Xk = greedy_transitive(T, X, limit=k)
    pair = TransPair(tuple(Xk), tuple(Y), True)
    assert dominates(T, pair.X, pair.Y)
    return pair


# ---------------------------------------------------------------------------
# transitive chains


@dataclass(frozen=True)
class BackwardPair:
    """Transitive sets ``later`` in blocks[index+1] and ``earlier`` in
    blocks[index] with later => earlier."""

    index: int
    later: tuple[int, ...]
    earlier: tuple[int, ...]


def transitive_chain(
    T: Tournament,
    blocks: Sequence[Iterable[int]],
    k: int,
    seed: int = 0,
    *,
    mode: str = "opportunistic",
    retries: int = DEFAULT_RETRIES,
) -> list[list[int]] | BackwardPair:
    """Transitive k-sets X_i in blocks[i] with X_1 => X_2 => ... => X_t,
    or a backward pair witness when a later block dominates an earlier one.

    Backward induction over the last two blocks: when the later block sends
    at least half the edges backwards a transitive pair across them is the
    witness; otherwise dependent random choice fixes the last set and shrinks
    the previous block to the common in-neighbourhood of that set.
    """
    _check_mode(mode)
    if k < 1:
        raise InputError("k must be at least 1")
    cur = [sorted(vertex_set(T, blk, name=f"block {i}")) for i, blk in enumerate(blocks)]
    if not cur:
        raise InputError("transitive_chain needs at least one block")
    seen: set[int] = set()
    for blk in cur:
        if seen & set(blk):
            raise InputError("blocks must be disjoint")
        seen |= set(blk)
    t = len(cur)
    if mode == "strict":
        for i, blk in enumerate(cur):
            need = 2 ** (6 * k) if i == t - 1 else 2 ** (10 * k)
            if len(blk) < need:
                raise InfeasibleError(f"strict mode needs block {i} of size >= {need}")
    trace = []
    chain: list[list[int] | None] = [None] * t
    half = Fraction(1, 2)
    for idx in range(t - 1, 0, -1):
        later, prev = cur[idx], cur[idx - 1]
        if not later or not prev:
            raise NotFoundError(f"block {idx - 1 if not prev else idx} exhausted", trace=trace)
        back = density(T, later, prev)
        sub_seed = (int(seed) * 1000003 + idx) & 0xFFFFFFFF
        if back >= half:
            try:
                pair = transitive_pair(T, later, prev, k, half, sub_seed, retries, mode="opportunistic")
                return BackwardPair(idx - 1, pair.X, pair.Y)
            except NotFoundError:
                trace.append(("backward pair failed", idx))
                if mode == "strict":
                    raise NotFoundError("backward transitive pair not found", trace=trace)
        fwd = 1 - back
        if fwd == 0:
            raise NotFoundError(f"no forward edges from block {idx - 1} to block {idx}", trace=trace)
        beta = min(half, fwd)
        try:
            X, Y = drc_transitive_pair(
                T, prev, later, k, beta, sub_seed, retries, mode="opportunistic", min_size=k
            )
        except NotFoundError as err:
            trace.append(("forward step failed", idx))
            raise NotFoundError(f"forward step at block {idx} failed", trace=trace, best=chain) from err
        chain[idx] = list(Y)
        cur[idx - 1] = X
        trace.append(("forward", idx, len(X)))
    first = greedy_transitive(T, cur[0], limit=k)
    if len(first) < k:
        raise NotFoundError("first block hosts no transitive k-set", trace=trace)
    chain[0] = first
    for i in range(t - 1):
        assert dominates(T, chain[i], chain[i + 1])
    return [list(c) for c in chain]
