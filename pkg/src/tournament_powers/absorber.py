"""k-absorbers: verification, spanning path powers, chaining and discovery.

An absorber is a cyclic chain S_0 => S_1 => ... => S_r => S_0 of transitive
2k-sets together with an absorbing part Q = (q_1, ..., q_r') wired as
S_0 => Q => S_{r'+1} and S_i => q_i => S_{i+1}.  Whatever transitive 2k-sets
X, Y of Q are chosen as endpoints, the absorber has a spanning k-th power of
a path starting in Y and ending in X.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    DomainError,
    InfeasibleError,
    InputError,
    NotFoundError,
    PASS,
    Tournament,
    Verdict,
    density,
    dominates,
    is_transitive,
    members,
    vertex_set,
    verify_path_power,
)
from .extremal import MODES, best_common_subset, drc_transitive_pair, transitive_pair
from .median import IntervalSplit, median_order
from .sequencing import find_path_power, med_connect

log = logging.getLogger(__name__)

DEFAULT_R_PRIME = 2
PAIR_ENUMERATION_CAP = 20_000


@dataclass(frozen=True)
class Absorber:
    S: tuple[tuple[int, ...], ...]
    Q: tuple[int, ...]
    k: int
    r_prime: int

    @property
    def r(self) -> int:
        return len(self.S) - 1

    def vertices(self) -> list[int]:
        return [v for s in self.S for v in s] + list(self.Q)

    def to_payload(self) -> dict:
        return {"S": [list(s) for s in self.S], "Q": list(self.Q), "k": self.k, "r_prime": self.r_prime}

    @classmethod
    def from_payload(cls, data: dict) -> "Absorber":
        return cls(
            tuple(tuple(int(v) for v in s) for s in data["S"]),
            tuple(int(v) for v in data["Q"]),
            int(data["k"]),
            int(data["r_prime"]),
        )

    def capacity(self, T: Tournament, cap: int = PAIR_ENUMERATION_CAP) -> int:
        """Number of transitive 2k-subsets of Q (counting stops at ``cap``)."""
        return min(cap, sum(1 for _ in _transitive_subsets(T, self.Q, 2 * self.k, cap)))


def _transitive_subsets(T: Tournament, pool: Sequence[int], size: int, cap: int):
    """Transitive ``size``-subsets of pool, in transitive order, lexicographic by vertex set."""
    count = 0
    for combo in itertools.combinations(sorted(pool), size):
        order = is_transitive(T, combo)
        if order is not None:
            yield list(order)
            count += 1
            if count >= cap:
                return


def _dom_witness(T: Tournament, A: Sequence[int], B: Sequence[int]):
    for a in A:
        for b in B:
            if not T.orient[a, b]:
                return (int(a), int(b))
    return None


def verify_absorber(T: Tournament, H: Absorber) -> Verdict:
    """Check every clause of the absorber definition; a failure names the clause."""
    k, rp = H.k, H.r_prime
    if len(H.Q) != rp or H.r <= rp:
        return Verdict(False, "clause i", (len(H.Q), rp, H.r))
    try:
        for part in (*H.S, H.Q):
            vertex_set(T, part, name="absorber part")
    except InputError as err:
        return Verdict(False, "disjointness", (str(err),))
    allv = H.vertices()
    if len(set(allv)) != len(allv):
        return Verdict(False, "disjointness", tuple(v for v in set(allv) if allv.count(v) > 1))
    for i, s in enumerate(H.S):
        if len(s) != 2 * k:
            return Verdict(False, "clause ii", ("size", i, len(s)))
        if is_transitive(T, s) is None:
            return Verdict(False, "clause ii", ("transitivity", i))
    for i in range(H.r):
        w = _dom_witness(T, H.S[i], H.S[i + 1])
        if w:
            return Verdict(False, "cycle", (i, w))
    w = _dom_witness(T, H.S[-1], H.S[0])
    if w:
        return Verdict(False, "cycle-closure", w)
    w = _dom_witness(T, H.S[0], H.Q) or _dom_witness(T, H.Q, H.S[rp + 1])
    if w:
        return Verdict(False, "clause iii", ("Q", w))
    for i in range(1, rp + 1):
        q = (H.Q[i - 1],)
        w = _dom_witness(T, H.S[i], q) or _dom_witness(T, q, H.S[i + 1])
        if w:
            return Verdict(False, "clause iii", (i, w))
    return PASS


def _ordered(T: Tournament, vs: Iterable[int]) -> list[int]:
    order = is_transitive(T, list(vs))
    if order is None:
        raise InputError("set is not transitive")
    return list(order)


def absorber_span_path(T: Tournament, H: Absorber, X: Iterable[int], Y: Iterable[int]) -> list[int]:
    """k-th power of a Hamilton path of H: first k vertices in Y, last k in X.

    Backbone Y_0 => S^1_{r'+1} .. S^1_r => S^1_0 => S_1 .. S_{r'}
    => S^2_{r'+1} .. S^2_r => S^2_0 => X_0, with every other q_i placed
    right after S_i.
    """
    k, rp = H.k, H.r_prime
    q = set(H.Q)
    x, y = vertex_set(T, X, name="X"), vertex_set(T, Y, name="Y")
    if not x <= q or not y <= q:
        raise InputError("X and Y must lie in the absorbing part Q")
    if len(x) != 2 * k or len(y) != 2 * k:
        raise InputError(f"X and Y must have exactly {2 * k} vertices")
    yo = _ordered(T, y)
    Y0 = yo[:k]
    rest = [v for v in _ordered(T, x) if v not in Y0]
    if len(rest) < k:
        raise DomainError("X minus Y_0 has fewer than k vertices")
    X0 = rest[-k:]
    S = [_ordered(T, s) for s in H.S]
    first = [s[:k] for s in S]
    second = [s[k:] for s in S]
    leftover = {i: H.Q[i - 1] for i in range(1, rp + 1) if H.Q[i - 1] not in Y0 and H.Q[i - 1] not in X0}
    seq: list[int] = list(Y0)
    for i in range(rp + 1, H.r + 1):
        seq += first[i]
    seq += first[0]
    for i in range(1, rp + 1):
        seq += S[i]
        if i in leftover:
            seq.append(leftover[i])
    for i in range(rp + 1, H.r + 1):
        seq += second[i]
    seq += second[0]
    seq += X0
    if sorted(seq) != sorted(H.vertices()):
        raise AssertionError("span path does not cover the absorber")
    res = verify_path_power(T, seq, k)
    if not res:
        raise DomainError(f"span path is not a {k}-th power: {res.reason} {res.witness}")
    return seq


def _link(T: Tournament, Qa: Sequence[int], Qb: Sequence[int], k2: int, seed: int):
    """Transitive k2-sets X in Qa and Y in Qb with X => Y."""
    if math.comb(len(Qa), k2) * math.comb(len(Qb), k2) <= PAIR_ENUMERATION_CAP:
        ys = list(_transitive_subsets(T, Qb, k2, PAIR_ENUMERATION_CAP))
        for X in _transitive_subsets(T, Qa, k2, PAIR_ENUMERATION_CAP):
            for Y in ys:
                if dominates(T, X, Y):
                    return X, Y
        return None
    try:
        pair = transitive_pair(T, Qa, Qb, k2, seed=seed)
    except (NotFoundError, DomainError):
        return None
    return list(pair.X), list(pair.Y)


def absorber_order(T: Tournament, Hs: Sequence[Absorber]) -> list[int]:
    """Hamilton path of the auxiliary tournament on the absorbers.

    i -> j when d(Q_i, Q_j) > 1/2, or = 1/2 with i < j.
    """
    s = len(Hs)
    if s == 1:
        return [0]
    edges = []
    for i in range(s):
        for j in range(i + 1, s):
            e = sum(int(T.orient[a, b]) for a in Hs[i].Q for b in Hs[j].Q)
            total = len(Hs[i].Q) * len(Hs[j].Q)
            edges.append((i, j) if 2 * e >= total else (j, i))
    aux = Tournament.from_edges(s, edges)
    return list(median_order(aux, "local").perm)


def chain_absorbers(T: Tournament, Hs: Sequence[Absorber], seed: int = 0) -> list[int]:
    """One k-th power of a path covering every absorber in ``Hs`` exactly."""
    if not Hs:
        raise InputError("no absorbers to chain")
    ks = {H.k for H in Hs}
    if len(ks) != 1:
        raise InputError("absorbers must share k")
    k = ks.pop()
    seen: set[int] = set()
    for i, H in enumerate(Hs):
        vs = set(H.vertices())
        if vs & seen:
            raise InputError(f"absorber {i} overlaps an earlier one")
        seen |= vs
        res = verify_absorber(T, H)
        if not res:
            raise InputError(f"absorber {i} is invalid: {res.reason} {res.witness}")
    order = absorber_order(T, Hs)
    ends: list[list[int] | None] = [None] * len(Hs)  # X_i
    starts: list[list[int] | None] = [None] * len(Hs)  # Y_i
    for a, b in zip(order, order[1:]):
        link = _link(T, Hs[a].Q, Hs[b].Q, 2 * k, seed)
        if link is None:
            raise NotFoundError(f"no transitive link between absorbers {a} and {b}")
        ends[a], starts[b] = link
    first, last = order[0], order[-1]
    if starts[first] is None:
        starts[first] = ends[first] or next(_transitive_subsets(T, Hs[first].Q, 2 * k, 1), None)
    if ends[last] is None:
        ends[last] = starts[last]
    seq: list[int] = []
    for i in order:
        if starts[i] is None or ends[i] is None:
            raise NotFoundError(f"absorber {i} has no transitive {2 * k}-set in Q")
        seq += absorber_span_path(T, Hs[i], ends[i], starts[i])
    res = verify_path_power(T, seq, k)
    if not res:
        raise AssertionError(f"chained absorbers fail verification: {res.reason}")
    return seq


# ---------------------------------------------------------------------------
# discovery


def find_absorber(
    T: Tournament,
    split: IntervalSplit,
    X0: Iterable[int],
    Xt: Iterable[int],
    k: int,
    seed: int = 0,
    *,
    r_prime: int = DEFAULT_R_PRIME,
    mode: str = "opportunistic",
    retries: int = 20,
) -> Absorber:
    """Build an absorber from transitive X0 in A_0 and Xt in A_t with Xt => X0.

    Stages: a 2k-subset S_0 of X0 with a large common out-neighbourhood in
    A_1 or A_2; a transitive set X_{i2} two blocks on, dominated by a part
    Y' of that neighbourhood; a 4k-th power of a path in Y' sliced into
    S_1, q_1, ..., S_{r'}, q_{r'}; a connection (at 2k) from X_{i2} to Xt
    closes the cycle because Xt => X0.
    """
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}")
    if k < 1 or r_prime < 1:
        raise InputError("k and r_prime must be positive")
    x0 = vertex_set(T, X0, name="X0")
    xt = vertex_set(T, Xt, name="Xt")
    if not x0 <= set(split.blocks[0]) or not xt <= set(split.blocks[-1]):
        raise InputError("X0 must lie in A_0 and Xt in A_t")
    least = 8 * k if mode == "strict" else 2 * k
    if len(x0) < least or len(xt) < least:
        raise InputError(f"X0 and Xt need at least {least} vertices")
    if is_transitive(T, x0) is None or is_transitive(T, xt) is None:
        raise InputError("X0 and Xt must be transitive")
    if not dominates(T, xt, x0):
        raise InputError("Xt must dominate X0")
    t = split.t
    if mode == "strict":
        if r_prime != 2 ** (10 * k):
            raise InputError("strict mode fixes r_prime = 2^(10k)")
        if t < 80 or min(split.sizes()) < 2 ** (81000 * k):
            raise InfeasibleError("strict absorber discovery needs t >= 80 and m >= 2^(81000k)")
    if t < 6:
        raise NotFoundError(f"absorber discovery needs at least 7 blocks, got {t + 1}")
    trace: list = []
    k2 = 2 * k
    path_len = r_prime * (k2 + 1)
    S0, ycommon = best_common_subset(T, sorted(x0), split.mask(1) | split.mask(2), k2, "out")
    if ycommon.bit_count() < path_len:
        raise NotFoundError("stage 1: common out-neighbourhood of S_0 too small", trace=[("stage1", ycommon.bit_count())])
    S0 = _ordered(T, S0)
    i1s = sorted((1, 2), key=lambda i: (-(ycommon & split.mask(i)).bit_count(), i))
    for i1 in i1s:
        Y = members(ycommon & split.mask(i1))
        if len(Y) < path_len:
            trace.append(("stage1", i1, len(Y)))
            continue
        for i2 in (i1 + 1, i1 + 2):
            if t - i2 < 4:
                continue
            for size in sorted({8 * k, 4 * k, k2}, reverse=True):
                got = _stage_two(T, split, Y, i2, size, path_len, k, seed, retries, trace)
                if got is None:
                    continue
                Yp, Xi2 = got
                H = _close(T, split, S0, Yp, Xi2, xt, i2, k, r_prime, seed, mode, trace)
                if H is not None:
                    return H
    raise NotFoundError("no absorber found", trace=trace)


def _stage_two(T, split, Y, i2, size, path_len, k, seed, retries, trace):
    """Y' in Y with Y' => X_{i2}, X_{i2} transitive of ``size``, Y' hosting the 4k-power path."""
    found: dict = {}

    def accept(Xa, Yb):
        res = find_path_power(T, Xa, 4 * k, path_len, seed)
        if res.met:
            found["path"] = res.sequence[:path_len]
            return True
        return False

    try:
        Yp, Xi2 = drc_transitive_pair(
            T, Y, split.blocks[i2], size, min(Fraction(1, 2), density(T, Y, split.blocks[i2])),
            seed, retries, min_size=path_len, accept=accept,
        )
    except (NotFoundError, DomainError, InfeasibleError) as err:
        trace.append(("stage2", i2, size, type(err).__name__))
        return None
    return found["path"], list(Xi2)


def _close(T, split, S0, path, Xi2, xt, i2, k, r_prime, seed, mode, trace):
    k2 = 2 * k
    S_mid = []
    Q = []
    for i in range(1, r_prime + 1):
        start = (i - 1) * (k2 + 1)
        S_mid.append(tuple(path[start:start + k2]))
        Q.append(path[start + k2])
    used = set(S0) | set(path)
    size = min(len(Xi2), len(xt), 4 * k2)
    Xa = _ordered(T, Xi2)[:size]
    Xb = _ordered(T, xt)[-size:]
    sub = split.sub(i2, split.t)
    try:
        conn = med_connect(
            T, sub, Xa, Xb, used, k2, mode=mode, size=None if mode == "strict" else size
        )
    except (NotFoundError, InputError) as err:
        trace.append(("stage4", i2, str(err)))
        return None
    S = (tuple(S0), *S_mid, *conn.chain.blocks)
    H = Absorber(tuple(tuple(s) for s in S), tuple(Q), k, r_prime)
    res = verify_absorber(T, H)
    if not res:
        trace.append(("verify", res.reason, res.witness))
        return None
    return H
