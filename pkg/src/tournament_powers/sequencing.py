"""Ordered connection steps and assembly of path/cycle powers from chains.

A *transitive chain* is a list of disjoint transitive blocks with every
block dominating the next; when each block has at least k vertices the
concatenation is the k-th power of a path (or of a cycle, if the chain
wraps around).  The operations here build such chains inside the blocks of
an interval split of a (locally) median ordering.

Opportunistic mode accepts any branch that delivers sets of the size the
next step needs; strict mode enforces the asymptotic preconditions first.
Every returned chain is re-validated before it leaves this module.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    DomainError,
    InfeasibleError,
    InputError,
    NotFoundError,
    Ordering,
    Tournament,
    Verdict,
    PASS,
    common_in,
    common_out,
    count_forward,
    dominates,
    is_transitive,
    mask_of,
    members,
    verify_cycle_power,
    verify_path_power,
    vertex_set,
)
from .extremal import MODES, best_common_subset, greedy_transitive, greedy_transitive_mask
from .median import IntervalSplit, median_order, split_from_ranges, split_intervals
from .oracle import DEFAULT_BUDGET, OracleBudget, max_path_power_len

log = logging.getLogger(__name__)

CONNECT_EPS = Fraction(1, 100)
DEFAULT_RETRY_BUDGET = 20
_POOL_TRIES = 8
_SUBSET_CAP = 64


@dataclass
class TransChain:
    """Disjoint transitive blocks, each dominating the next (wrapping if cyclic)."""

    blocks: list[tuple[int, ...]]
    indices: list[int] | None = None
    cyclic: bool = False

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def s(self) -> int:
        """Number of links: blocks X_0 .. X_s."""
        return len(self.blocks) - 1

    def vertices(self) -> list[int]:
        return [v for b in self.blocks for v in b]

    def validate(self, T: Tournament) -> Verdict:
        seen: set[int] = set()
        for i, b in enumerate(self.blocks):
            if not b:
                return Verdict(False, "empty block", (i,))
            if seen & set(b):
                return Verdict(False, "blocks overlap", (i,))
            seen |= set(b)
            order = is_transitive(T, b)
            if order is None:
                return Verdict(False, "block not transitive", (i,))
            if list(order) != list(b):
                return Verdict(False, "block not in transitive order", (i,))
        pairs = list(zip(self.blocks, self.blocks[1:]))
        if self.cyclic and len(self.blocks) > 1:
            pairs.append((self.blocks[-1], self.blocks[0]))
        for i, (a, b) in enumerate(pairs):
            if not dominates(T, a, b):
                return Verdict(False, "domination", (i,))
        return PASS


def _ordered(T: Tournament, vertices: Iterable[int]) -> tuple[int, ...]:
    order = is_transitive(T, list(vertices))
    if order is None:
        raise DomainError("set is not transitive")
    return tuple(order)


def _check_chain(T: Tournament, chain: TransChain) -> TransChain:
    res = chain.validate(T)
    if not res:
        raise AssertionError(f"internal chain invalid: {res.reason} {res.witness}")
    return chain


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}, got {mode!r}")


def _expected_size(k: int, base: int, mode: str, override: int | None) -> int:
    """Set size a connection step works with: base*k, or a smaller opportunistic override."""
    if override is None:
        return base * k
    if mode == "strict" and override != base * k:
        raise InputError(f"strict mode fixes the set size at {base * k}")
    if not k <= override <= base * k:
        raise InputError(f"set size override must lie in [{k}, {base * k}], got {override}")
    return override


def _set_size(name: str, size: int, expected: int) -> None:
    if size != expected:
        raise InputError(f"{name} must have exactly {expected} vertices, got {size}")


# ---------------------------------------------------------------------------
# Turán step inside three consecutive blocks


@dataclass(frozen=True)
class TuranStep:
    X: tuple[int, ...]
    step: int
    common: tuple[int, ...]


def median_turan(
    T: Tournament,
    split: IntervalSplit,
    b0: int,
    A0prime: Iterable[int],
    F: Iterable[int] = (),
    k: int = 1,
    *,
    mode: str = "opportunistic",
    pool: int | None = None,
    need: int | tuple[int, int] | None = None,
) -> TuranStep:
    """A k-subset X of A0prime with many common out-neighbours in A_{b0+i} - F, i in {1,2}.

    Strict mode asks for m/2^(12k) common out-neighbours; opportunistic mode
    takes the first i whose best common set still hosts a transitive set of
    ``need`` vertices (default: the pool size, 8k).  ``need`` may be a pair
    giving separate requirements for i=1 and i=2.  Among k-subsets the
    largest common neighbourhood wins (lexicographic ties).
    """
    _check_mode(mode)
    if k < 1:
        raise InputError("k must be at least 1")
    if b0 < 0 or b0 + 2 > split.t:
        raise InputError(f"median_turan needs blocks {b0}..{b0 + 2} inside 0..{split.t}")
    size = _expected_size(k, 8, mode, pool)
    pool = sorted(vertex_set(T, A0prime, name="A0prime"))
    if not set(pool) <= set(split.blocks[b0]):
        raise InputError("A0prime must lie in block b0")
    _set_size("A0prime", len(pool), size)
    if need is None:
        need = size
    needs = need if isinstance(need, tuple) else (need, need)
    fmask = mask_of(vertex_set(T, F, name="F"))
    m = len(split.blocks[b0])
    if mode == "strict":
        hit = (split.union_mask(b0, b0 + 2) & fmask).bit_count()
        if 4 * hit > m:
            raise DomainError(f"{hit} forbidden vertices exceed m/4 = {m / 4}")
        if any(len(split.blocks[b0 + i]) != m for i in (1, 2)):
            raise InputError("median_turan needs three equal blocks in strict mode")
    threshold = Fraction(m, 2 ** (12 * k))
    diagnostics = []
    for step in (1, 2):
        target = split.mask(b0 + step) & ~fmask
        X, common = best_common_subset(T, pool, target, k, "out")
        got = common.bit_count()
        diagnostics.append((step, got))
        if mode == "strict":
            ok = got >= threshold
        else:
            want = needs[step - 1]
            ok = len(greedy_transitive_mask(T, common, limit=want)) >= want
        if X and ok:
            return TuranStep(tuple(_ordered(T, X)), step, tuple(members(common)))
    raise NotFoundError(f"median_turan at block {b0}: common sizes {diagnostics}", trace=diagnostics)


# ---------------------------------------------------------------------------
# walk through consecutive blocks


def median_sequence(
    T: Tournament,
    split: IntervalSplit,
    start_block: int,
    X: Iterable[int],
    F: Iterable[int] = (),
    k: int = 1,
    *,
    mode: str = "opportunistic",
    pool: int | None = None,
) -> TransChain:
    """Chain X_1 => ... => X_s of transitive k-sets walking the blocks from
    ``start_block`` with steps of one or two blocks, ending in block t-1 or t.

    Each step runs :func:`median_turan` on the next three blocks and takes
    the next pool (8k vertices, or ``pool``) greedily from the common
    out-neighbourhood; a step landing in block t-1 or t only needs k.
    """
    _check_mode(mode)
    t = split.t
    if not 0 <= start_block <= t:
        raise InputError("start_block outside the split")
    size = _expected_size(k, 8, mode, pool)
    current = list(vertex_set(T, X, name="X"))
    f = vertex_set(T, F, name="F")
    fmask = mask_of(f)
    if not set(current) <= set(split.blocks[start_block]) or set(current) & f:
        raise InputError("X must lie in the start block and avoid F")
    _set_size("X", len(current), size)
    current = list(_ordered(T, current))
    m = max(split.sizes())
    if mode == "strict":
        for i, blk in enumerate(split.blocks):
            if 8 * len(set(blk) & f) > m:
                raise DomainError(f"block {i} has more than m/8 forbidden vertices")
        if m < 2 ** (20 * k):
            raise InfeasibleError(f"strict mode needs block size >= 2^(20k) = {2 ** (20 * k)}")
    blocks: list[tuple[int, ...]] = []
    indices: list[int] = []
    j = start_block
    while j < t - 1:
        needs = tuple(k if j + i >= t - 1 else size for i in (1, 2))
        near = f & set(split.blocks[j + 1] + split.blocks[j + 2])
        try:
            res = median_turan(
                T, split, j, current, near, k,
                mode=mode, pool=None if mode == "strict" else size, need=needs,
            )
        except NotFoundError as err:
            partial = TransChain(blocks, indices)
            raise NotFoundError(f"median_sequence stuck at block {j}", trace=[("block", j)], best=partial) from err
        blocks.append(res.X)
        indices.append(j)
        j += res.step
        current = greedy_transitive_mask(T, mask_of(res.common) & ~fmask, limit=size)
        if j < t - 1 and len(current) < size:
            raise AssertionError("median_turan returned a pool below its need")
    blocks.append(tuple(current[:k]))
    indices.append(j)
    return _check_chain(T, TransChain(blocks, indices))


# ---------------------------------------------------------------------------
# short connections across an interval


@dataclass
class Connection:
    chain: TransChain
    split: IntervalSplit
    improvements: int = 0
    branch: str = ""
    trace: list = field(default_factory=list)


def _anchor(T: Tournament, Y: Sequence[int], target: int, direction: str, k: int) -> list[int]:
    """Transitive k-set inside the common (in/out) neighbourhood of Y in ``target``."""
    common = common_out(T, Y, target) if direction == "out" else common_in(T, Y, target)
    found = greedy_transitive_mask(T, common, limit=k)
    return found if len(found) >= k else []


def _pools(T: Tournament, mask: int, score, tries: int = _POOL_TRIES) -> list[list[int]]:
    """A few transitive subsets of ``mask``, seeded from the best-scoring vertices."""
    verts = members(mask)
    verts.sort(key=lambda v: (-score(v), v))
    pools = []
    for v in verts[:tries]:
        rest = mask & T.out_bits[v]
        pools.append([v] + greedy_transitive_mask(T, rest))
    return pools


def _k_subsets(pool: Sequence[int], k: int):
    import itertools

    for count, combo in enumerate(itertools.combinations(pool, k)):
        if count >= _SUBSET_CAP:
            return
        yield list(combo)


def _bridge_two(T, both, m0, mt, k):
    def score(v):
        return min((T.in_bits[v] & m0).bit_count(), (T.out_bits[v] & mt).bit_count())

    for pool in _pools(T, both, score):
        for Y in _k_subsets(pool, k):
            X0 = _anchor(T, Y, m0, "in", k)
            if not X0:
                continue
            X2 = _anchor(T, Y, mt, "out", k)
            if X2:
                return [X0, Y, X2]
    return None


def _bridge_three(T, left, right, m0, mt, k):
    def score_in(v):
        return (T.in_bits[v] & m0).bit_count() + (T.out_bits[v] & right).bit_count()

    def score_out(v):
        return (T.out_bits[v] & mt).bit_count()

    for pool in _pools(T, left, score_in):
        for Y in _k_subsets(pool, k):
            X0 = _anchor(T, Y, m0, "in", k)
            if not X0:
                continue
            zmask = common_out(T, Y, right)
            if zmask.bit_count() < k:
                continue
            for zpool in _pools(T, zmask, score_out, tries=3):
                for Z in _k_subsets(zpool, k):
                    X3 = _anchor(T, Z, mt, "out", k)
                    if X3:
                        return [X0, Y, Z, X3]
    return None


def _relocate_to_end(T: Tournament, ordering: Ordering, lo: int, hi: int, group: int) -> Ordering:
    """Move the vertices of ``group`` inside positions [lo, hi) to the end of that range."""
    perm = list(ordering.perm)
    inner = perm[lo:hi]
    moved = [v for v in inner if not group >> v & 1] + [v for v in inner if group >> v & 1]
    perm[lo:hi] = moved
    return Ordering(tuple(perm), count_forward(T, perm), ordering.mode)


def med_connect_short(
    T: Tournament,
    split: IntervalSplit,
    A0prime: Iterable[int],
    Atprime: Iterable[int],
    F: Iterable[int] = (),
    k: int = 1,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    *,
    mode: str = "opportunistic",
    eps=CONNECT_EPS,
) -> Connection:
    """Chain X_0 => ... => X_s, s <= 3, from A0prime to Atprime through A_1..A_{t-1} - F.

    A^I are the middle vertices with >= eps|A0prime| in-neighbours in A0prime,
    A^O those with >= eps|Atprime| out-neighbours in Atprime.  Branch s=2 goes
    through A^I & A^O, branch s=3 through A^I - A^O then A^O.  When both fail
    the set A^I - A^O is moved to the end of the middle interval; if that adds
    forward edges the split is re-derived and the search repeats.
    """
    _check_mode(mode)
    eps = Fraction(eps)
    t = split.t
    a0 = vertex_set(T, A0prime, name="A0prime")
    at = vertex_set(T, Atprime, name="Atprime")
    f = vertex_set(T, F, name="F")
    if not a0 <= set(split.blocks[0]) or not at <= set(split.blocks[-1]):
        raise InputError("A0prime must lie in A_0 and Atprime in A_t")
    if len(a0) < k or len(at) < k:
        raise InputError("end sets must have at least k vertices")
    m = max(split.sizes())
    if mode == "strict":
        if 2 * len(f) > m:
            raise DomainError("more than m/2 forbidden vertices")
        if t < 50 or m < 100 * 2 ** (40400 * k) or min(len(a0), len(at)) < 2 ** (4001 * k):
            raise InfeasibleError("strict mode size preconditions of the short connection fail")
    if t < 2:
        raise NotFoundError("no middle blocks between the end sets")
    m0, mt, fmask = mask_of(a0), mask_of(at), mask_of(f)
    improvements = 0
    trace = []
    for attempt in range(retry_budget + 1):
        middle = split.union_mask(1, t - 1) & ~fmask
        AI = AO = 0
        for v in members(middle):
            if (T.in_bits[v] & m0).bit_count() >= eps * len(a0):
                AI |= 1 << v
            if (T.out_bits[v] & mt).bit_count() >= eps * len(at):
                AO |= 1 << v
        both = AI & AO
        trace.append(("sizes", attempt, AI.bit_count(), AO.bit_count(), both.bit_count()))
        blocks = _bridge_two(T, both, m0, mt, k) if both else None
        branch = "s=2"
        if blocks is None:
            left = AI & ~AO
            if left and AO:
                blocks = _bridge_three(T, left, AO, m0, mt, k)
                branch = "s=3"
        if blocks is not None:
            chain = TransChain([_ordered(T, b) for b in blocks])
            return Connection(_check_chain(T, chain), split, improvements, branch, trace)
        left = AI & ~AO
        lo, hi = split.ranges[1][0], split.ranges[-2][1]
        before = split.ordering.forward_count
        candidate = _relocate_to_end(T, split.ordering, lo, hi, left)
        if candidate.forward_count <= before:
            trace.append(("no improving relocation", attempt))
            break
        improvements += 1
        trace.append(("relocated", attempt, candidate.forward_count - before))
        split = split_from_ranges(candidate, split.ranges, split.m)
    raise NotFoundError(
        f"short connection failed after {improvements} ordering improvements",
        trace=trace,
        best=improvements,
    )


def med_connect(
    T: Tournament,
    split: IntervalSplit,
    X: Iterable[int],
    Xprime: Iterable[int],
    F: Iterable[int] = (),
    k: int = 1,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    *,
    mode: str = "opportunistic",
    size: int | None = None,
) -> Connection:
    """Chain X_0 => ... => X_s, s <= 5, from a k-subset of X (in A_0) to one of Xprime (in A_t).

    Two Kővári–Sós–Turán hops land in one of the first and one of the last
    four middle blocks; a short connection bridges the landing sets.
    X and Xprime have 4k vertices, or ``size`` in opportunistic mode.
    """
    _check_mode(mode)
    t = split.t
    x = vertex_set(T, X, name="X")
    xp = vertex_set(T, Xprime, name="Xprime")
    f = vertex_set(T, F, name="F")
    if not x <= set(split.blocks[0]) or not xp <= set(split.blocks[-1]):
        raise InputError("X must lie in A_0 and Xprime in A_t")
    expected = _expected_size(k, 4, mode, size)
    _set_size("X", len(x), expected)
    _set_size("Xprime", len(xp), expected)
    if is_transitive(T, x) is None or is_transitive(T, xp) is None:
        raise InputError("X and Xprime must be transitive")
    m = max(split.sizes())
    if mode == "strict":
        if 2 * len(f) > m:
            raise DomainError("more than m/2 forbidden vertices")
        if t < 60 or m < 100 * 2 ** (40400 * k):
            raise InfeasibleError("strict mode size preconditions of the connection fail")
    if t < 4:
        raise NotFoundError(f"connection needs at least 5 blocks, got {t + 1}")
    fmask = mask_of(f)
    lefts = range(1, min(4, t - 3) + 1)
    rights = range(max(t - 4, 3), t)
    lmask = 0
    for i in lefts:
        lmask |= split.mask(i)
    rmask = 0
    for i in rights:
        rmask |= split.mask(i)
    X0, lcommon = best_common_subset(T, sorted(x), lmask & ~fmask, k, "out")
    Xt, rcommon = best_common_subset(T, sorted(xp), rmask & ~fmask, k, "in")
    landings_l = sorted(lefts, key=lambda i: (-(lcommon & split.mask(i)).bit_count(), i))
    landings_r = sorted(rights, key=lambda i: (-(rcommon & split.mask(i)).bit_count(), -i))
    trace = []
    last_err = None
    for i in landings_l:
        ai = lcommon & split.mask(i)
        if ai.bit_count() < k:
            continue
        for ip in landings_r:
            if ip < i + 2:
                continue
            aip = rcommon & split.mask(ip)
            if aip.bit_count() < k:
                continue
            sub = split.sub(i, ip)
            try:
                conn = med_connect_short(
                    T, sub, members(ai), members(aip), f, k, retry_budget, mode=mode
                )
            except NotFoundError as err:
                trace.append(("short connection failed", i, ip))
                last_err = err
                continue
            blocks = [_ordered(T, X0)] + conn.chain.blocks + [_ordered(T, Xt)]
            full = split_from_ranges(conn.split.ordering, split.ranges, split.m)
            chain = _check_chain(T, TransChain(blocks))
            return Connection(chain, full, conn.improvements, conn.branch, trace + conn.trace)
    raise NotFoundError("connection failed for every landing pair", trace=trace, best=last_err)


# ---------------------------------------------------------------------------
# assembly


def assemble_path_power(T: Tournament, chain: TransChain | Sequence[Sequence[int]], k: int) -> list[int]:
    """Concatenate a transitive chain into the k-th power of a path."""
    if k < 1:
        raise InputError("k must be at least 1")
    if not isinstance(chain, TransChain):
        chain = TransChain([tuple(b) for b in chain])
    if chain.cyclic:
        raise DomainError("assemble_path_power needs a non-cyclic chain")
    blocks = chain.blocks
    if len(blocks) > 1:
        for i, b in enumerate(blocks[1:-1], start=1):
            if len(b) < k:
                raise DomainError(f"middle block {i} has {len(b)} < k vertices")
    res = chain.validate(T)
    if not res:
        raise DomainError(f"invalid chain: {res.reason} at {res.witness}")
    seq = chain.vertices()
    check = verify_path_power(T, seq, k)
    if not check:
        raise DomainError(f"chain does not assemble into a {k}-th power: {check.reason} {check.witness}")
    return seq


def assemble_cycle_power(T: Tournament, chain: TransChain | Sequence[Sequence[int]], k: int) -> list[int]:
    """Concatenate a cyclic transitive chain into the k-th power of a cycle."""
    if k < 1:
        raise InputError("k must be at least 1")
    if not isinstance(chain, TransChain):
        chain = TransChain([tuple(b) for b in chain], cyclic=True)
    if not chain.cyclic:
        raise DomainError("assemble_cycle_power needs a cyclic chain")
    if len(chain.blocks) < 2:
        raise DomainError("a cyclic chain needs at least two blocks")
    for i, b in enumerate(chain.blocks):
        if len(b) < k:
            raise DomainError(f"block {i} has {len(b)} < k vertices")
    res = chain.validate(T)
    if not res:
        raise DomainError(f"invalid cyclic chain: {res.reason} at {res.witness}")
    seq = chain.vertices()
    check = verify_cycle_power(T, seq, k)
    if not check:
        raise DomainError(f"chain does not close into a {k}-th power: {check.reason} {check.witness}")
    return seq


# ---------------------------------------------------------------------------
# finding path powers


@dataclass
class PathPowerResult:
    sequence: list[int]
    met: bool
    route: str


def longest_power_run(T: Tournament, perm: Sequence[int], k: int) -> tuple[int, int]:
    """Longest contiguous stretch [l, r) of ``perm`` that is a k-th power of a path."""
    n = len(perm)
    o = T.orient
    reach = []
    for i in range(n):
        d = 1
        while d <= k and i + d < n and o[perm[i], perm[i + d]]:
            d += 1
        # positions i+1 .. i+d-1 are fine; i+d is the first failure (or the end)
        reach.append(i + d if (d <= k and i + d < n) else n + 1)
    best = (0, min(1, n))
    l = 0
    while l < n:
        bound = reach[l]
        r = l + 1
        while r < n and r < bound:
            bound = min(bound, reach[r])
            r += 1
        if r - l > best[1] - best[0]:
            best = (l, r)
        l += 1
    return best


def find_path_power(
    T: Tournament,
    W: Iterable[int] | None,
    k: int,
    target_len: int,
    seed: int = 0,
    *,
    block_sizes: Sequence[int] | None = None,
    budget: OracleBudget = DEFAULT_BUDGET,
    restarts: int = 8,
) -> PathPowerResult:
    """A k-th power of a path inside W, trying to reach ``target_len`` vertices.

    Small W is solved exactly.  Otherwise the candidates are the longest
    power run of a local median ordering of T[W] and block walks (greedy
    transitive seed, then :func:`median_sequence`) for a few block sizes;
    the longest verified candidate is returned.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    verts = sorted(vertex_set(T, range(T.n) if W is None else W, name="W"))
    if not verts:
        raise DomainError("W must be nonempty")
    sub, back = T.subtournament(verts)
    if sub.n <= budget.max_n_search:
        _, seq = max_path_power_len(sub, k, budget)
        out = [back[v] for v in seq]
        return PathPowerResult(out, len(out) >= target_len, "oracle")
    ordering = median_order(sub, "local", seed, restarts=restarts)
    perm = list(ordering.perm)
    l, r = longest_power_run(sub, perm, k)
    best, route = perm[l:r], "median-run"
    if len(best) < min(target_len, sub.n):
        sizes = block_sizes or sorted({s for s in (2 * k, 4 * k, 8 * k) if 3 * s <= sub.n})
        for m in sizes:
            split = split_intervals(ordering, m, align="last")
            for pool in sorted({8 * k, 2 * k, k}, reverse=True):
                if len(best) >= target_len:
                    break
                seed_set = greedy_transitive(sub, split.blocks[0], limit=pool)
                if len(seed_set) < pool:
                    continue
                try:
                    chain = median_sequence(sub, split, 0, seed_set, (), k, pool=pool)
                    seq = assemble_path_power(sub, chain, k)
                except (NotFoundError, DomainError):
                    continue
                if len(seq) > len(best):
                    best, route = seq, f"block-walk m={m} pool={pool}"
    out = [back[v] for v in best]
    assert verify_path_power(T, out, k)
    return PathPowerResult(out, len(out) >= target_len, route)
