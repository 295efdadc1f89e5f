"""End-to-end pipelines: partitions into path powers, density increments, cycle powers.

Asymptotic-scale constants live in :class:`PipelineConfig`.  Strict mode refuses
to run below them; opportunistic mode scales them to the instance and
records every scaled value in the returned stats.  Outputs are verified
before they are returned.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Sequence

from .absorber import Absorber, absorber_span_path, chain_absorbers, find_absorber, _transitive_subsets
from .core import (
    DomainError,
    InfeasibleError,
    InputError,
    NotFoundError,
    Ordering,
    Tournament,
    backward_edges,
    common_out,
    density,
    is_transitive,
    mask_of,
    verify_cycle_power,
    verify_partition,
    verify_path_power,
)
from .extremal import (
    MODES,
    BackwardPair,
    best_common_subset,
    greedy_transitive,
    greedy_transitive_mask,
    transitive_chain,
    transitive_pair,
)
from .median import median_order
from .oracle import DEFAULT_BUDGET, OracleBudget, longest_cycle_power
from .sequencing import (
    TransChain,
    assemble_cycle_power,
    assemble_path_power,
    med_connect,
    median_sequence,
)
from .median import split_from_ranges

log = logging.getLogger(__name__)

QUARTER = Fraction(1, 4)
ABSORBER_MIN_GAP = 6


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = "opportunistic"
    block_size: int | None = None
    stride: int = 80
    r_prime: int = 2
    retries: int = 20
    seed: int = 0
    budget: OracleBudget = DEFAULT_BUDGET
    set_size: int | None = None
    restarts: int = 8
    absorber_attempts: int = 4
    cycle_block_factor: int = 12
    pair_density_divisor: int = 400
    r_divisor: int = 50
    sub_block_size: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}")
        if self.stride < 3:
            raise InputError("stride must be at least 3")
        for name in ("r_prime", "retries", "restarts", "cycle_block_factor", "pair_density_divisor", "r_divisor"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")
        for name in ("block_size", "set_size", "sub_block_size"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise InputError(f"{name} must be positive")
        if self.absorber_attempts < 0:
            raise InputError("absorber_attempts must be non-negative")


DEFAULT_CONFIG = PipelineConfig()


def _order(T: Tournament, cfg: PipelineConfig, seed: int | None = None) -> Ordering:
    if T.n <= cfg.budget.max_n_exact_ordering and T.n <= 12:
        return median_order(T, "exact", budget=cfg.budget)
    return median_order(T, "local", cfg.seed if seed is None else seed, restarts=cfg.restarts)


def power_runs(T: Tournament, seq: Sequence[int], k: int) -> list[list[int]]:
    """Cut ``seq`` greedily into maximal consecutive k-th powers of paths."""
    runs: list[list[int]] = []
    cur: list[int] = []
    for v in seq:
        if all(T.orient[x, v] for x in cur[-k:]):
            cur.append(v)
        else:
            runs.append(cur)
            cur = [v]
    if cur:
        runs.append(cur)
    return runs


# ---------------------------------------------------------------------------
# partition into path powers


@dataclass
class PartitionStats:
    parts: int = 0
    absorbers: int = 0
    absorber_vertices: int = 0
    chains: int = 0
    leftover_paths: int = 0
    stranded_runs: int = 0
    singletons: int = 0
    block_size: int = 0
    stride: int = 0
    set_size: int = 0
    staged_parts: int = 0
    baseline_parts: int = 0
    selected: str = ""
    failures: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def _partition_params(n: int, k: int, cfg: PipelineConfig) -> tuple[int, int, int]:
    if cfg.mode == "strict":
        return 2 ** (81000 * k), cfg.stride, 8 * k
    s = cfg.set_size or 2 * k
    m = cfg.block_size or max(2 * s, 6)
    t = max(1, n // m)
    stride = max(3, min(cfg.stride, t // 4))
    return m, stride, s


def partition_path_powers(T: Tournament, k: int, cfg: PipelineConfig = DEFAULT_CONFIG):
    """Partition V(T) into k-th powers of paths.  Returns (parts, stats dict).

    Stages: absorbers found from backward witnesses and chained into one
    part; residue-class chains of transitive sets at block distance
    ``stride``; leftover vertices stitched between in- and out-neighbour
    sets; anything stranded is cut into maximal power runs of the median
    order.  The result always passes :func:`verify_partition`.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    n = T.n
    m, stride, s = _partition_params(n, k, cfg)
    if cfg.mode == "strict" and n < m:
        raise InfeasibleError(f"strict partition needs blocks of size 2^(81000k); n={n}")
    stats = PartitionStats(block_size=m, stride=stride, set_size=s)
    ordering = _order(T, cfg)
    if verify_path_power(T, ordering.perm, k):
        parts = [list(ordering.perm)]
        return _finish(T, parts, k, stats)
    baseline = list(ordering.perm)
    parts: list[list[int]] = []
    remaining = list(range(n))

    # stage 1-2: absorbers
    absorbers = _collect_absorbers(T, remaining, k, m, stride, s, cfg, stats)
    if absorbers:
        used = {v for H in absorbers for v in H.vertices()}
        remaining = [v for v in remaining if v not in used]
        try:
            parts.append(chain_absorbers(T, absorbers, cfg.seed))
        except NotFoundError as err:
            stats.failures.append(("chain_absorbers", str(err)))
            for H in absorbers:
                X = next(_transitive_subsets(T, H.Q, 2 * k, 1), None)
                if X is None:
                    remaining += H.vertices()
                else:
                    parts.append(absorber_span_path(T, H, X, X))
            remaining.sort()
    if not remaining:
        return _finish(T, parts, k, stats, baseline)

    # stage 3: residual ordering and blocks, remainder block first
    sub, back = T.subtournament(remaining)
    order = _order(sub, cfg, cfg.seed + 1)
    perm = list(order.perm)
    if verify_path_power(sub, perm, k):
        parts.append([back[v] for v in perm])
        return _finish(T, parts, k, stats, baseline)
    rem = len(perm) % m
    blocks = [perm[rem + i * m: rem + (i + 1) * m] for i in range(len(perm) // m)]
    stranded_pos = set(perm[:rem])

    # stage 4: residue-class chains
    chains = _residue_chains(sub, blocks, stride, s, k, cfg, stats)
    in_chain = {v for ch in chains for blk in ch for v in blk}
    leftovers = [v for blk in blocks for v in blk if v not in in_chain]

    # stage 5: leftover vertices between neighbour sets
    paths, stranded = _stitch_leftovers(sub, blocks, chains, leftovers, stride, k, cfg, stats)
    stranded_pos |= set(stranded)
    for ch in chains:
        seq = assemble_path_power(sub, TransChain([tuple(_tord(sub, b)) for b in ch]), k)
        parts.append([back[v] for v in seq])
    stats.chains = len(chains)
    for p in paths:
        parts.append([back[v] for v in p])
    stats.leftover_paths = len(paths)

    # stage 6: stranded vertices as maximal runs of the residual order
    rest = [v for v in perm if v in stranded_pos]
    runs = power_runs(sub, rest, k) if rest else []
    stats.stranded_runs = len(runs)
    for r in runs:
        parts.append([back[v] for v in r])
    return _finish(T, parts, k, stats, baseline)


def joins(T: Tournament, left: Sequence[int], right: Sequence[int], k: int) -> bool:
    """Whether left + right is a k-th power, given that each part already is."""
    o = T.orient
    for i in range(1, min(k, len(left)) + 1):
        u = left[-i]
        for j in range(min(k - i + 1, len(right))):
            if not o[u, right[j]]:
                return False
    return True


def merge_parts(T: Tournament, parts: list[list[int]], k: int) -> list[list[int]]:
    """Greedily concatenate parts whose junction keeps the k-th power property."""
    parts = [list(p) for p in parts if p]
    merged = True
    while merged and len(parts) > 1:
        merged = False
        i = 0
        while i < len(parts):
            for j in range(len(parts)):
                if i != j and joins(T, parts[i], parts[j], k):
                    parts[i] = parts[i] + parts[j]
                    del parts[j]
                    if j < i:
                        i -= 1
                    merged = True
                    break
            else:
                i += 1
    return parts


def _finish(T, parts, k, stats, baseline=None):
    parts = merge_parts(T, [p for p in parts if p], k)
    stats.staged_parts = len(parts)
    stats.selected = "staged"
    if baseline is not None:
        runs = merge_parts(T, power_runs(T, baseline, k), k)
        stats.baseline_parts = len(runs)
        if len(runs) < len(parts):
            parts, stats.selected = runs, "median-runs"
    res = verify_partition(T, parts, k)
    if not res:
        raise AssertionError(f"partition failed verification: {res.reason} {res.witness}")
    stats.parts = len(parts)
    stats.singletons = sum(1 for p in parts if len(p) == 1)
    return parts, stats.as_dict()


def _r_prime(cfg: PipelineConfig, k: int) -> int:
    # Q must host a transitive 2k-set, or the absorber cannot be spanned
    return cfg.r_prime if cfg.mode == "strict" else max(cfg.r_prime, 2 * k)


def _tord(T, vs):
    order = is_transitive(T, list(vs))
    assert order is not None
    return order


def discover_absorber(T: Tournament, k: int, cfg: PipelineConfig = DEFAULT_CONFIG) -> tuple[Absorber, dict]:
    """First absorber found by the partition pipeline's witness scan."""
    if k < 1:
        raise InputError("k must be at least 1")
    m, stride, s = _partition_params(T.n, k, cfg)
    if cfg.mode == "strict":
        raise InfeasibleError(f"strict absorber discovery needs blocks of size 2^(81000k); n={T.n}")
    if cfg.block_size is None:
        m = max(m, 4 ** k * _r_prime(cfg, k) * (2 * k + 1) + 8)
        stride = max(3, min(cfg.stride, (T.n // m) // 2))
    stats = PartitionStats(block_size=m, stride=stride, set_size=s)
    found = _collect_absorbers(T, list(range(T.n)), k, m, stride, s, cfg, stats, limit=1)
    if not found:
        raise NotFoundError("no absorber found", trace=stats.failures)
    return found[0], stats.as_dict()


def _collect_absorbers(T, remaining, k, m, stride, s, cfg, stats, limit=None) -> list[Absorber]:
    """Greedy disjoint absorbers from backward witnesses at block distance ``stride``."""
    found: list[Absorber] = []
    attempts = 0
    while attempts < cfg.absorber_attempts and (limit is None or len(found) < limit):
        used = {v for H in found for v in H.vertices()}
        alive = [v for v in remaining if v not in used]
        sub, back = T.subtournament(alive)
        order = _order(sub, cfg, cfg.seed + 7 + attempts)
        perm = list(order.perm)
        t = len(perm) // m
        if cfg.mode == "opportunistic":
            stride = max(stride, ABSORBER_MIN_GAP)
        if t <= stride:
            return found
        rem = len(perm) % m
        ranges = [(rem + i * m, rem + (i + 1) * m) for i in range(t)]
        split = split_from_ranges(order, ranges, m)
        witness = None
        for w in range(stride):
            idx = list(range(w, t, stride))
            if len(idx) < 2:
                continue
            if not all(len(split.blocks[i]) >= s for i in idx):
                continue
            try:
                got = transitive_chain(
                    sub, [split.blocks[i] for i in idx], s, cfg.seed + w, retries=max(1, cfg.retries // 4)
                )
            except NotFoundError:
                continue
            if isinstance(got, BackwardPair):
                witness = (idx[got.index], idx[got.index + 1], got)
                break
        if witness is None:
            return found
        attempts += 1
        lo, hi, pair = witness
        try:
            H = find_absorber(
                sub, split.sub(lo, hi), pair.earlier, pair.later, k, cfg.seed,
                r_prime=_r_prime(cfg, k), mode=cfg.mode, retries=cfg.retries,
            )
        except (NotFoundError, InputError, DomainError) as err:
            stats.failures.append(("find_absorber", lo, hi, str(err)[:80]))
            continue
        mapped = Absorber(
            tuple(tuple(back[v] for v in S) for S in H.S), tuple(back[v] for v in H.Q), H.k, H.r_prime
        )
        found.append(mapped)
        stats.absorbers += 1
        stats.absorber_vertices += len(mapped.vertices())
    return found


def _residue_chains(T, blocks, stride, s, k, cfg, stats) -> list[list[list[int]]]:
    """Repeated transitive chains over each residue class of blocks."""
    avail = [set(b) for b in blocks]
    chains: list[list[list[int]]] = []
    t = len(blocks)
    for w in range(min(stride, t)):
        pending = [list(range(w, t, stride))]
        rounds = 0
        while pending:
            idx = pending.pop()
            if not idx or any(len(avail[i]) < s for i in idx):
                continue
            rounds += 1
            try:
                got = transitive_chain(
                    T, [sorted(avail[i]) for i in idx], s, cfg.seed + 31 * w + rounds,
                    mode="opportunistic", retries=max(1, cfg.retries // 4),
                )
            except NotFoundError as err:
                stats.failures.append(("chain", w, len(idx), str(err)[:60]))
                if len(idx) > 1:
                    half = len(idx) // 2
                    pending += [idx[:half], idx[half:]]
                continue
            if isinstance(got, BackwardPair):
                cut = got.index + 1
                pending += [idx[:cut], idx[cut:]]
                continue
            chains.append([list(x) for x in got])
            for i, blk in zip(idx, got):
                avail[i] -= set(blk)
            pending.append(idx)
    return chains


def _stitch_leftovers(T, blocks, chains, leftovers, stride, k, cfg, stats):
    """Place each leftover u between Y- (in-neighbours) and Y+ (out-neighbours).

    Pools come from chain sets earlier/later by stride/2..stride blocks; each
    chain set keeps at least k vertices.  Returns (paths, stranded).
    """
    where = {}
    for bi, blk in enumerate(blocks):
        for v in blk:
            where[v] = bi
    donors: dict[int, list] = {}
    for ch in chains:
        for blk in ch:
            spare = len(blk) - k
            if spare > 0:
                donors.setdefault(where[blk[0]], []).append([blk, spare])
    taken: set[int] = set()
    lo_off, hi_off = max(1, stride // 2), stride
    paths, stranded = [], []
    for u in leftovers:
        i = where[u]
        pools = []
        for sign, bits in ((-1, T.in_bits[u]), (1, T.out_bits[u])):
            best = None
            for off in range(lo_off, hi_off + 1):
                j = i + sign * off
                if not 0 <= j < len(blocks):
                    continue
                cand = [v for blk, spare in donors.get(j, []) if spare > 0 for v in blk
                        if v not in taken and bits >> v & 1]
                if best is None or len(cand) > len(best[1]):
                    best = (j, cand)
            pools.append(best)
        if pools[0] is None or pools[1] is None or len(pools[0][1]) < k or len(pools[1][1]) < k:
            stranded.append(u)
            continue
        try:
            got = transitive_chain(T, [pools[0][1], pools[1][1]], k, cfg.seed + u, retries=5)
        except NotFoundError:
            got = None
        if not isinstance(got, list):
            stranded.append(u)
            continue
        ym, yp = got
        if not _donate(donors, ym + yp, taken):
            stranded.append(u)
            continue
        seq = list(_tord(T, ym)) + [u] + list(_tord(T, yp))
        if not verify_path_power(T, seq, k):
            stranded.append(u)
            continue
        paths.append(seq)
    # the donated vertices leave their chain sets
    for ch in chains:
        for bi, blk in enumerate(ch):
            ch[bi] = [v for v in blk if v not in taken]
    return paths, stranded


def _donate(donors, vertices, taken) -> bool:
    owner = {}
    for entries in donors.values():
        for entry in entries:
            for v in entry[0]:
                owner[v] = entry
    need: dict[int, int] = {}
    for v in vertices:
        e = owner.get(v)
        if e is None:
            return False
        need[id(e)] = need.get(id(e), 0) + 1
    for v in vertices:
        e = owner[v]
        if need[id(e)] > e[1]:
            return False
    for v in vertices:
        e = owner[v]
        e[1] -= 1
        taken.add(v)
    return True


# ---------------------------------------------------------------------------
# density increment


@dataclass(frozen=True)
class LongBackwardEdges:
    ordering: Ordering
    edges: tuple[tuple[tuple[int, int], int], ...]
    threshold_len: Fraction
    count_bound: Fraction


@dataclass(frozen=True)
class DensityIncrementResult:
    case: str
    long_edges: LongBackwardEdges | None
    vertices: tuple[int, ...] | None
    ordering: Ordering | None
    branch: str
    counts: dict


def density_increment(T: Tournament, ordering, eps, c) -> DensityIncrementResult:
    """Either many long backward edges (P1) or a large, more intransitive interval (P2).

    Long edges have length >= cn/4; P1 needs at least c*eps*n^2/4 of them.
    Otherwise the first ceil(n/2) positions I_1 or the first
    floor((1+c/2)n/2) positions J give the subtournament (mirrored to the
    end of the order when the second half holds more backward edges).
    ``vertices`` lists the subtournament in order; ``ordering`` is the
    induced order on the subtournament's own indices.
    """
    eps, c = Fraction(eps), Fraction(c)
    if not 0 < eps <= QUARTER:
        raise DomainError(f"eps must lie in (0, 1/4], got {eps}")
    if not 0 < c < Fraction(1, 3):
        raise DomainError(f"c must lie in (0, 1/3), got {c}")
    ordering = ordering if isinstance(ordering, Ordering) else Ordering.of(T, ordering)
    n = T.n
    perm = list(ordering.perm)
    back = backward_edges(T, ordering)
    total = len(back)
    if total < eps * n * n:
        raise DomainError(f"ordering has {total} backward edges, below eps*n^2 = {eps * n * n}")
    pos = ordering.positions()
    threshold_len = c * n / 4
    long_set = [(e, ln) for e, ln in back if ln >= threshold_len]
    bound = c * eps * n * n / 4
    counts = {"backward": total, "E_tau": len(long_set)}
    if len(long_set) >= bound:
        le = LongBackwardEdges(ordering, tuple(long_set), threshold_len, bound)
        return DensityIncrementResult("P1", le, None, None, "P1", counts)
    half_hi = -(-n // 2)  # ceil(n/2)
    lo2 = n // 2  # I_2 starts at 0-based position floor(n/2)

    def inside(e, a, b):
        return a <= pos[e[0]] < b and a <= pos[e[1]] < b

    E1 = {e for e, _ in back if inside(e, 0, half_hi)}
    E2 = {e for e, _ in back if inside(e, lo2, n)}
    Et = {e for e, _ in long_set}
    mirrored = len(E1) < len(E2)
    F = [e for e, _ in back if e not in E1 and e not in E2 and e not in Et]
    counts.update({"E_1": len(E1), "E_2": len(E2), "F": len(F)})
    jlen = math.floor((1 + c / 2) * n / 2)
    if len(F) < bound:
        size, branch = half_hi, "I"
    else:
        size, branch = jlen, "J"
    chosen = perm[n - size:] if mirrored else perm[:size]
    branch += "2" if mirrored else "1"
    sub, mapping = T.subtournament(chosen)
    sub_order = Ordering.of(sub, list(range(sub.n)), ordering.mode)
    counts["size"] = size
    return DensityIncrementResult("P2", None, tuple(chosen), sub_order, branch, counts)


# ---------------------------------------------------------------------------
# refinement


@dataclass
class RefineResult:
    subtournament: Tournament
    vertices: tuple[int, ...]
    eps_tilde: Fraction
    trace: list
    ordering: Ordering | None = None
    long_edges: LongBackwardEdges | None = None
    anomaly: str | None = None


def refine_intransitive(T: Tournament, eps, cfg: PipelineConfig = DEFAULT_CONFIG) -> RefineResult:
    """Iterate the density increment with c = current eps until P1 fires.

    Each P2 step keeps at least half the vertices and raises eps to
    2(1-eps)eps.  Small tournaments use exact median orderings, larger ones
    local orderings; in that case the guarantees are checked, and a failed
    check ends the iteration with a recorded anomaly.  In opportunistic
    mode an eps above the starting ordering's backward density is lowered
    to that density, also recorded as the anomaly.
    """
    eps = Fraction(eps)
    if not 0 < eps <= QUARTER:
        raise DomainError(f"eps must lie in (0, 1/4], got {eps}")
    cur, verts, cur_eps = T, tuple(range(T.n)), eps
    trace: list = []
    limit = max(1, T.n.bit_length()) + 1
    order = _order(cur, cfg)
    lowered = None
    if order.backward_count < eps * T.n * T.n:
        if cfg.mode == "strict":
            raise DomainError(f"ordering has {order.backward_count} backward edges, below eps*n^2")
        if order.backward_count == 0:
            raise NotFoundError("the tournament is transitive")
        cur_eps = Fraction(order.backward_count, T.n * T.n)
        lowered = f"eps lowered to {cur_eps}, the density of the ordering"
    for step in range(limit + 1):
        if step == limit:
            raise AssertionError("density increment did not terminate")
        res = density_increment(cur, order, cur_eps, cur_eps)
        trace.append({"step": step, "n": cur.n, "eps": str(cur_eps), "case": res.case,
                      "branch": res.branch, **res.counts})
        if res.case == "P1":
            out = RefineResult(cur, verts, cur_eps, trace, order, res.long_edges)
            break
        nxt_eps = 2 * (1 - cur_eps) * cur_eps
        sub, mapping = cur.subtournament(res.vertices)
        sub_verts = tuple(verts[v] for v in res.vertices)
        if nxt_eps > QUARTER:
            out = RefineResult(cur, verts, cur_eps, trace, order, None, "eps above 1/4 after increment")
            break
        if sub.n <= 12:
            sub_order = _order(sub, cfg)
        else:
            sub_order = median_order(sub, "local", cfg.seed, restarts=cfg.restarts, start=list(range(sub.n)))
        if sub_order.backward_count < nxt_eps * sub.n * sub.n:
            out = RefineResult(cur, verts, cur_eps, trace, order, None, "ordering below the increment bound")
            break
        cur, verts, cur_eps, order = sub, sub_verts, nxt_eps, sub_order
    if lowered and out.anomaly is None:
        out.anomaly = lowered
    if cfg.mode == "strict" and out.anomaly is None:
        assert out.eps_tilde * out.subtournament.n >= eps * T.n / 5
    return out


# ---------------------------------------------------------------------------
# cycle powers


@dataclass
class CycleStats:
    route: str = ""
    length: int = 0
    target: float = 0.0
    eps_tilde: str = ""
    n_tilde: int = 0
    coarse_blocks: int = 0
    sub_block_size: int = 0
    pair: tuple = ()
    pairs: int = 0
    segments: int = 0
    failures: list = field(default_factory=list)
    scaled: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def find_cycle_power(T: Tournament, k: int, eps, cfg: PipelineConfig = DEFAULT_CONFIG):
    """A verified k-th power of a cycle.  Returns (cycle, stats dict).

    Small tournaments are solved exactly.  Otherwise: refine to a denser
    subtournament, pick two coarse blocks A_a, A_b (b >= a+3) with the most
    backward edges, pair dense sub-blocks, take transitive backward pairs
    Z' => Z, walk forward from each Z, and connect each walk to the next Z'
    (wrapping around) before assembling the cyclic chain.  Opportunistic
    mode also tries the longest closing window of the median order and an
    exact search inside sliding windows; the longest candidate wins.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    eps = Fraction(eps)
    if not 0 < eps < QUARTER:
        raise DomainError(f"eps must lie in (0, 1/4), got {eps}")
    n = T.n
    if cfg.mode == "strict" and n < eps ** (-41000 * k):
        raise InfeasibleError("strict cycle search needs n >= eps^(-41000k)")
    stats = CycleStats(target=float(eps * n / 1500))
    if n <= cfg.budget.max_n_search:
        cyc = list(longest_cycle_power(T, k, cfg.budget))
        stats.route = "oracle"
        return _cycle_done(T, cyc, k, stats)
    ref = refine_intransitive(T, eps, cfg)
    stats.eps_tilde, stats.n_tilde = str(ref.eps_tilde), ref.subtournament.n
    if ref.anomaly:
        stats.failures.append(("refine", ref.anomaly))
    sub, verts = ref.subtournament, ref.vertices
    order = ref.ordering or _order(sub, cfg)
    best = None  # (cycle, route, params)
    for params in _cycle_params(sub.n, k, ref.eps_tilde, cfg):
        try:
            cyc = _structured_cycle(sub, order, k, params, ref.eps_tilde, cfg, stats)
        except NotFoundError as err:
            stats.failures.append(("structured", params, str(err)[:80]))
            continue
        if best is None or len(cyc) > len(best[0]):
            best = (cyc, "structured", params)
    if cfg.mode == "opportunistic":
        window = window_cycle(sub, order.perm, k)
        if window is not None and (best is None or len(window) > len(best[0])):
            best = (window, "median-window", None)
        if best is None or len(best[0]) < cfg.budget.max_n_search:
            local = window_oracle_cycle(sub, order.perm, k, cfg.budget)
            if local is not None and (best is None or len(local) > len(best[0])):
                best = (local, "window-oracle", None)
    if best is None:
        raise NotFoundError("no cycle power found", trace=stats.failures)
    cyc, stats.route, params = best
    if params is not None:
        stats.scaled = {"coarse_blocks": params[0], "sub_block_size": params[1]}
    return _cycle_done(T, [verts[v] for v in cyc], k, stats)


def window_cycle(T: Tournament, perm: Sequence[int], k: int) -> list[int] | None:
    """Longest contiguous window of ``perm`` that is a k-th power of a cycle (length >= 2k+1)."""
    n = len(perm)
    o = T.orient
    reach = []
    for i in range(n):
        d = 1
        while d <= k and i + d < n and o[perm[i], perm[i + d]]:
            d += 1
        reach.append(i + d if (d <= k and i + d < n) else n + 1)
    best = None
    for l in range(n):
        bound, r = reach[l], l + 1
        while r < n and r < bound:
            bound = min(bound, reach[r])
            r += 1
        # perm[l:r] is a path power; look for the longest closing prefix of it
        for end in range(r, l + 2 * k, -1):
            if best is not None and end - l <= len(best):
                break
            L = end - l
            if all(o[perm[l + i], perm[l + (i + d) % L]]
                   for i in range(L - k, L) for d in range(1, k + 1) if i + d >= L):
                best = list(perm[l:end])
                break
    return best


def window_oracle_cycle(
    T: Tournament, perm: Sequence[int], k: int, budget: OracleBudget = DEFAULT_BUDGET, step: int = 4
) -> list[int] | None:
    """Longest exact cycle power inside sliding windows of ``perm`` (length >= 3)."""
    size = min(budget.max_n_search, len(perm))
    best: tuple[int, ...] = ()
    for start in range(0, max(1, len(perm) - size + step), step):
        window = perm[start:start + size]
        if len(window) <= len(best):
            break
        sub, back = T.subtournament(window)
        cyc = longest_cycle_power(sub, k, budget)
        if len(cyc) > len(best):
            best = tuple(back[v] for v in cyc)
    return list(best) if len(best) >= 3 else None


def _cycle_done(T, cyc, k, stats):
    res = verify_cycle_power(T, cyc, k)
    if not res:
        raise AssertionError(f"cycle failed verification: {res.reason}")
    stats.length = len(cyc)
    return cyc, stats.as_dict()


def _cycle_params(n: int, k: int, eps_tilde: Fraction, cfg: PipelineConfig):
    """(coarse block count, sub-block size) candidates, asymptotic values first."""
    t_full = math.ceil(cfg.cycle_block_factor / eps_tilde)
    if cfg.mode == "strict":
        yield (t_full, cfg.sub_block_size or n // t_full)
        return
    seen = set()
    for mp in ([cfg.sub_block_size] if cfg.sub_block_size else [4 * k, 3 * k + 2, 8 * k, 2 * k, k + 1]):
        for t in (t_full, 12, 8, 6, 4):
            t = min(t, n // (5 * mp)) if mp else t
            if t < 4 or (t, mp) in seen:
                continue
            seen.add((t, mp))
            yield (t, mp)


def _structured_cycle(T, order, k, params, eps_tilde, cfg, stats):
    t, mp = params
    perm = list(order.perm)
    n = len(perm)
    tp = (n // t) // mp  # sub-blocks per coarse block
    if tp < 2:
        raise NotFoundError("coarse blocks too small for sub-blocks")
    fine = [tuple(perm[f * mp:(f + 1) * mp]) for f in range(t * tp)]
    ranges = [(f * mp, (f + 1) * mp) for f in range(t * tp)]
    coarse = [set(v for f in range(c * tp, (c + 1) * tp) for v in fine[f]) for c in range(t)]
    # coarse pair with most backward edges, b >= a+3
    best = None
    for a in range(t):
        for b in range(a + 3, t):
            e = sum((T.out_bits[v] & mask_of(coarse[a])).bit_count() for v in coarse[b])
            if best is None or e > best[0]:
                best = (e, a, b)
    if best is None or best[0] == 0:
        raise NotFoundError("no backward edges between far coarse blocks")
    _, a, b = best
    stats.coarse_blocks, stats.sub_block_size, stats.pair = t, mp, (a, b)
    # dense sub-block pairs, greedy and disjoint
    thresh = Fraction(eps_tilde) ** 2 / cfg.pair_density_divisor
    cand = []
    for j in range(tp):
        for jp in range(tp):
            d = density(T, fine[b * tp + jp], fine[a * tp + j])
            if d > 0 and d >= thresh:
                cand.append((d, j, jp))
    cand.sort(key=lambda x: (-x[0], x[1], x[2]))
    used_j, used_jp, pairs = set(), set(), []
    # full scale: r = m'/(50k); at desk scale that is below 1, so every pair is tried
    r_cap = mp // (cfg.r_divisor * k) if cfg.mode == "strict" else tp
    for d, j, jp in cand:
        if j in used_j or jp in used_jp:
            continue
        used_j.add(j)
        used_jp.add(jp)
        pairs.append((j, jp))
    stats.pairs = len(pairs)
    zs = []
    for j, jp in pairs:
        got = _backward_pair(T, fine[b * tp + jp], fine[a * tp + j], k, cfg)
        if got is not None:
            zs.append((j, jp, got[0], got[1]))
        if len(zs) >= r_cap:
            break
    if not zs:
        raise NotFoundError("no transitive backward pair between the chosen blocks")
    zs.sort(key=lambda z: -z[0])
    used: set[int] = set(v for z in zs for v in z[2]) | set(v for z in zs for v in z[3])
    segments = []
    for j, jp, Zp, Z in zs:
        lo = a * tp + j
        hi = (a + 2) * tp - 1
        split = split_from_ranges(order, ranges[lo:hi + 1], mp)
        F = used - set(Z)
        try:
            chain = median_sequence(T, split, 0, Z, F, k, pool=len(Z))
        except (NotFoundError, InputError) as err:
            stats.failures.append(("segment", j, str(err)[:60]))
            continue
        blocks = [list(bk) for bk in chain.blocks]
        last_fine = lo + chain.indices[-1]
        if len(blocks) > 1:
            base = mask_of(fine[last_fine]) & ~mask_of(F | set(v for bk in blocks[:-1] for v in bk))
            end_pool = greedy_transitive_mask(T, common_out(T, blocks[-2], base), limit=4 * k)
        else:
            end_pool = list(_tord(T, Z))[:4 * k]
        if len(end_pool) < k:
            end_pool = blocks[-1]
        used |= set(v for bk in blocks for v in bk) | set(end_pool)
        segments.append({"j": j, "jp": jp, "Zp": Zp, "blocks": blocks[:-1], "end": end_pool, "fine": last_fine,
                         "zfine": b * tp + jp})
    if not segments:
        raise NotFoundError("every forward walk failed")
    # connect consecutive segments, dropping those that cannot be reached
    cycle_blocks = None
    for start in range(len(segments)):
        got = _close_segments(T, order, ranges, fine, segments[start:] + segments[:start], k, cfg, stats, used)
        if got is not None:
            cycle_blocks = got
            break
    if cycle_blocks is None:
        raise NotFoundError("no connection closes the cycle")
    chain = TransChain([tuple(_tord(T, bk)) for bk in cycle_blocks], cyclic=True)
    stats.segments = len(cycle_blocks)
    return assemble_cycle_power(T, chain, k)


def _backward_pair(T, later, earlier, k, cfg):
    """Transitive Z' in ``later`` and Z in ``earlier`` with Z' => Z, each of size >= k."""
    d = density(T, later, earlier)
    if d >= Fraction(1, 2):
        try:
            pair = transitive_pair(T, later, earlier, k, Fraction(1, 2), cfg.seed, cfg.retries)
            Zs = greedy_transitive_mask(T, common_out(T, pair.X, mask_of(earlier)), limit=4 * k)
            return list(pair.X), Zs if len(Zs) >= k else list(pair.Y)
        except (NotFoundError, DomainError):
            pass
    pool = greedy_transitive(T, later)
    if len(pool) < k:
        return None
    X, common = best_common_subset(T, sorted(later), mask_of(earlier), k, "out")
    if not X or is_transitive(T, X) is None:
        best = None
        for cand in _transitive_subsets(T, later, k, 200):
            cm = common_out(T, cand, mask_of(earlier))
            if best is None or cm.bit_count() > best[1].bit_count():
                best = (cand, cm)
        if best is None:
            return None
        X, common = best
    Z = greedy_transitive_mask(T, common, limit=4 * k)
    if len(Z) < k:
        return None
    return list(X), Z


def _close_segments(T, order, ranges, fine, segs, k, cfg, stats, used):
    """Connect each segment's end to the next segment's Z' (wrapping); None on failure."""
    kept = list(segs)
    while kept:
        blocks_all: list[list[int]] = []
        extra_used: set[int] = set()
        ok = True
        for i, seg in enumerate(kept):
            nxt = kept[(i + 1) % len(kept)]
            lo, hi = seg["fine"], nxt["zfine"]
            if hi - lo < 4:
                ok = False
                break
            split = split_from_ranges(order, ranges[lo:hi + 1], ranges[0][1] - ranges[0][0])
            size = min(len(seg["end"]), len(nxt["Zp"]), 4 * k)
            X = list(seg["end"])[:size]
            Xp = list(_tord(T, nxt["Zp"]))[-size:]
            F = (used | extra_used) - set(X) - set(Xp)
            try:
                conn = med_connect(T, split, X, Xp, F, k, cfg.retries, size=size)
            except (NotFoundError, InputError) as err:
                stats.failures.append(("connect", i, str(err)[:60]))
                ok = False
                break
            blocks_all += seg["blocks"] + [list(bk) for bk in conn.chain.blocks]
            extra_used |= set(conn.chain.vertices())
        if ok:
            return blocks_all
        if len(kept) == 1:
            return None
        kept = kept[:-1]
    return None
