"""Median orderings, interval splits and the degree guarantee of median orders.

``median_order(mode="local")`` returns a fixed point of single-vertex
relocation (and, when blocks are designated, of relocating those blocks as
contiguous groups).  Those are exactly the moves the degree and connection
arguments rely on, so a true median ordering is never required downstream.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import (
    InputError,
    Ordering,
    Tournament,
    Verdict,
    PASS,
    count_forward,
    mask_of,
    _perm,
)
from .oracle import DEFAULT_BUDGET, OracleBudget, exact_min_backward

log = logging.getLogger(__name__)

DEFAULT_RESTARTS = 8


def _signed(T: Tournament) -> np.ndarray:
    """+1 where u -> v, -1 where v -> u, 0 on the diagonal."""
    o = T.orient.astype(np.int32)
    return o - o.T


def best_relocation(D: np.ndarray, perm: np.ndarray, i: int) -> tuple[int, int]:
    """Best new position for the vertex at position ``i`` and the forward-edge gain."""
    v = perm[i]
    row = D[v, perm]
    n = len(perm)
    best_gain, best_j = 0, i
    if i + 1 < n:
        # moving right past u turns [v->u] into [u->v]
        right = -np.cumsum(row[i + 1:])
        j = int(np.argmax(right))
        if right[j] > best_gain:
            best_gain, best_j = int(right[j]), i + 1 + j
    if i > 0:
        left = np.cumsum(row[:i][::-1])[::-1]
        j = int(np.argmax(left))
        if left[j] > best_gain:
            best_gain, best_j = int(left[j]), j
    return best_gain, best_j


def _move(perm: np.ndarray, i: int, j: int) -> np.ndarray:
    v = perm[i]
    rest = np.delete(perm, i)
    return np.insert(rest, j, v)


def relocate_to_fixpoint(T: Tournament, perm: Sequence[int], D: np.ndarray | None = None) -> np.ndarray:
    """Apply improving single-vertex relocations until none exists."""
    D = _signed(T) if D is None else D
    p = np.asarray(perm, dtype=np.int64).copy()
    n = len(p)
    improved = True
    while improved:
        improved = False
        i = 0
        while i < n:
            gain, j = best_relocation(D, p, i)
            if gain > 0:
                p = _move(p, i, j)
                improved = True
                if j < i:
                    i += 1
            else:
                i += 1
    return p


def improving_relocations(T: Tournament, ordering) -> list[tuple[int, int, int]]:
    """Every (vertex, new position, gain) single relocation that adds forward edges."""
    perm = np.asarray(_perm(T, ordering), dtype=np.int64)
    base = count_forward(T, perm)
    out = []
    for i in range(len(perm)):
        for j in range(len(perm)):
            if i == j:
                continue
            gain = count_forward(T, _move(perm, i, j)) - base
            if gain > 0:
                out.append((int(perm[i]), j, gain))
    return out


def group_relocation(T: Tournament, perm: Sequence[int], group: Iterable[int]) -> tuple[int, list[int]]:
    """Best placement of ``group`` as one contiguous run (relative order kept).

    Returns the forward-edge gain and the resulting permutation.
    """
    perm = [int(v) for v in perm]
    gmask = mask_of(group)
    inside = [v for v in perm if gmask >> v & 1]
    rest = [v for v in perm if not gmask >> v & 1]
    if not inside or not rest:
        return 0, perm
    g = len(inside)
    # r before the group scores e(r, G); r after the group scores e(G, r)
    before = np.array([(T.out_bits[r] & gmask).bit_count() for r in rest], dtype=np.int64)
    after = g - before
    score = np.concatenate(([0], np.cumsum(before))) + np.concatenate((np.cumsum(after[::-1])[::-1], [0]))
    p = int(np.argmax(score))
    current = count_forward(T, perm)
    candidate = rest[:p] + inside + rest[p:]
    gain = count_forward(T, candidate) - current
    if gain <= 0:
        return 0, perm
    return gain, candidate


def median_order(
    T: Tournament,
    mode: str = "local",
    seed: int = 0,
    *,
    restarts: int = DEFAULT_RESTARTS,
    blocks: Sequence[Iterable[int]] | None = None,
    budget: OracleBudget = DEFAULT_BUDGET,
    start: Sequence[int] | None = None,
) -> Ordering:
    """A median ordering (``mode="exact"``) or a relocation-optimal one (``"local"``).

    Local restarts: the first starts from ``start`` or the score order, the
    others from seeded random permutations.  The best forward count wins,
    lowest restart index on ties.
    """
    if mode == "exact":
        _, ordering = exact_min_backward(T, budget)
        return ordering
    if mode != "local":
        raise InputError(f"unknown median mode {mode!r}")
    if restarts < 1:
        raise InputError("restarts must be positive")
    D = _signed(T)
    rng = np.random.default_rng(seed)
    best: Ordering | None = None
    for r in range(restarts):
        if r == 0:
            if start is not None:
                p0 = np.asarray(_perm(T, start), dtype=np.int64)
            else:
                p0 = np.lexsort((np.arange(T.n), -T.scores()))
        else:
            p0 = rng.permutation(T.n)
        p = relocate_to_fixpoint(T, p0, D)
        if blocks:
            p = _with_groups(T, p, blocks, D)
        cand = Ordering(tuple(int(v) for v in p), count_forward(T, p), "local")
        if best is None or cand.forward_count > best.forward_count:
            best = cand
    return best


def _with_groups(T: Tournament, p: np.ndarray, blocks, D: np.ndarray) -> np.ndarray:
    while True:
        moved = False
        for group in blocks:
            gain, cand = group_relocation(T, p, group)
            if gain > 0:
                p = relocate_to_fixpoint(T, cand, D)
                moved = True
        if not moved:
            return p


def is_hamilton_path(T: Tournament, ordering) -> bool:
    perm = _perm(T, ordering)
    return all(T.orient[perm[i], perm[i + 1]] for i in range(len(perm) - 1))


# ---------------------------------------------------------------------------
# interval splits


@dataclass(frozen=True)
class IntervalSplit:
    """Consecutive blocks A_0 < A_1 < ... of an ordering.

    ``blocks[i]`` lists the vertices of block i in ordering order and
    ``ranges[i]`` its half-open position range.
    """

    ordering: Ordering
    blocks: tuple[tuple[int, ...], ...]
    ranges: tuple[tuple[int, int], ...]
    m: int

    @property
    def t(self) -> int:
        return len(self.blocks) - 1

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def block_of(self, v: int) -> int:
        for i, b in enumerate(self.blocks):
            if v in b:
                return i
        raise InputError(f"vertex {v} is not in the split")

    def mask(self, i: int) -> int:
        return mask_of(self.blocks[i])

    def union_mask(self, lo: int, hi: int) -> int:
        """Mask of blocks lo..hi inclusive."""
        m = 0
        for i in range(lo, hi + 1):
            m |= mask_of(self.blocks[i])
        return m

    def sub(self, lo: int, hi: int) -> "IntervalSplit":
        """The split restricted to blocks lo..hi inclusive, re-indexed from 0."""
        if not (0 <= lo <= hi <= self.t):
            raise InputError(f"block range {lo}..{hi} outside 0..{self.t}")
        return IntervalSplit(self.ordering, self.blocks[lo:hi + 1], self.ranges[lo:hi + 1], self.m)


def split_from_ranges(ordering: Ordering, ranges: Sequence[tuple[int, int]], m: int) -> IntervalSplit:
    perm = ordering.perm
    return IntervalSplit(ordering, tuple(tuple(perm[a:b]) for a, b in ranges), tuple(ranges), m)


def split_intervals(ordering: Ordering, m: int, align: str = "first") -> IntervalSplit:
    """Cut the ordering into blocks of size m; the remainder block goes first or last."""
    n = len(ordering.perm)
    if m < 1:
        raise InputError("block size must be positive")
    if align not in ("first", "last"):
        raise InputError("align must be 'first' or 'last'")
    if m >= n:
        return split_from_ranges(ordering, [(0, n)], m)
    rem = n % m
    ranges = []
    pos = 0
    if rem and align == "first":
        ranges.append((0, rem))
        pos = rem
    while pos + m <= n:
        ranges.append((pos, pos + m))
        pos += m
    if pos < n:
        ranges.append((pos, n))
    return split_from_ranges(ordering, ranges, m)


def check_median_degrees(T: Tournament, split: IntervalSplit) -> Verdict:
    """Degree guarantee of median orders on equal blocks A_0 < ... < A_t.

    Every v in A_0 needs at least (t-2)m/2 out-neighbours in A_1..A_{t-1},
    every v in A_t as many in-neighbours there.
    """
    sizes = set(split.sizes())
    if len(sizes) != 1:
        raise InputError(f"check_median_degrees needs equal blocks, got sizes {split.sizes()}")
    m = sizes.pop()
    t = split.t
    if t < 1:
        return PASS
    middle = split.union_mask(1, t - 1) if t >= 2 else 0
    need2 = (t - 2) * m  # compare 2*count against (t-2)m exactly
    for v in split.blocks[0]:
        c = (T.out_bits[v] & middle).bit_count()
        if 2 * c < need2:
            return Verdict(False, "A_0 out-degree", (v, Fraction(need2, 2) - c))
    for v in split.blocks[-1]:
        c = (T.in_bits[v] & middle).bit_count()
        if 2 * c < need2:
            return Verdict(False, "A_t in-degree", (v, Fraction(need2, 2) - c))
    return PASS
