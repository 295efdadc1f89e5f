"""Tournament representation, set algebra and the independent verifiers.

Vertices are the integers ``0 .. n-1``.  A tournament is stored as a dense
boolean orientation matrix together with per-vertex out/in neighbourhoods
packed into Python integers, so common-neighbourhood computations reduce to
``&`` and ``int.bit_count``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

MAX_VERTICES = 16384


class TournamentError(Exception):
    """Base class for every error raised by this package."""


class InputError(TournamentError, ValueError):
    """Malformed input: bad vertex ids, wrong shapes, inconsistent files."""


class DomainError(TournamentError, ValueError):
    """A mathematical precondition of an operation does not hold."""


class InfeasibleError(TournamentError):
    """The request exceeds a budget or a strict-mode size precondition."""


class NotFoundError(TournamentError):
    """A constructive search terminated without a verified answer."""

    def __init__(self, message: str, *, trace: list | None = None, best=None):
        super().__init__(message)
        self.trace = list(trace or [])
        self.best = best


class Tournament:
    """An immutable tournament on ``n`` labelled vertices.

    ``orient[i, j]`` is true iff the edge ``i -> j`` is present.
    """

    __slots__ = ("n", "orient", "out_bits", "in_bits", "_hash")

    def __init__(self, orient, *, max_n: int = MAX_VERTICES, check: bool = True):
        mat = np.array(orient, dtype=bool, copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError(f"orientation matrix must be square, got shape {mat.shape}")
        n = mat.shape[0]
        if n < 1:
            raise InputError("a tournament needs at least one vertex")
        if n > max_n:
            raise InfeasibleError(f"n={n} exceeds the dense-matrix cap of {max_n} vertices")
        if check:
            if mat.diagonal().any():
                raise InputError("diagonal entries must be false")
            both = mat & mat.T
            off = ~np.eye(n, dtype=bool)
            if both.any():
                i, j = map(int, np.argwhere(both)[0])
                raise InputError(f"both {i}->{j} and {j}->{i} are present")
            if ((~mat & ~mat.T) & off).any():
                i, j = map(int, np.argwhere((~mat & ~mat.T) & off)[0])
                raise InputError(f"pair {{{i},{j}}} has no orientation")
        mat.setflags(write=False)
        self.n = n
        self.orient = mat
        self.out_bits = _pack_rows(mat)
        self.in_bits = _pack_rows(mat.T)
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Tournament":
        mat = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            mat[u, v] = True
        return cls(mat)

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Tournament":
        """The transitive tournament whose forward order is ``order``."""
        n = len(order)
        pos = np.empty(n, dtype=np.int64)
        pos[np.asarray(order)] = np.arange(n)
        return cls(pos[:, None] < pos[None, :])

    # basic queries --------------------------------------------------------

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, Tournament) and np.array_equal(self.orient, other.orient)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(np.packbits(self.orient).tobytes())
        return self._hash

    def __repr__(self) -> str:
        return f"Tournament(n={self.n})"

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.orient[u, v])

    def out_degree(self, v: int, within: int | None = None) -> int:
        bits = self.out_bits[v]
        return (bits if within is None else bits & within).bit_count()

    def in_degree(self, v: int, within: int | None = None) -> int:
        bits = self.in_bits[v]
        return (bits if within is None else bits & within).bit_count()

    def scores(self) -> np.ndarray:
        return self.orient.sum(axis=1)

    def reverse(self) -> "Tournament":
        return Tournament(self.orient.T, check=False)

    def subtournament(self, vertices: Sequence[int]) -> tuple["Tournament", tuple[int, ...]]:
        """Induced subtournament; returns it with the map new-index -> old vertex."""
        verts = tuple(int(v) for v in vertices)
        check_vertices(self, verts)
        if len(set(verts)) != len(verts):
            raise InputError("duplicate vertices in subtournament request")
        idx = np.asarray(verts, dtype=np.int64)
        return Tournament(self.orient[np.ix_(idx, idx)], check=False), verts

    def vertices(self) -> range:
        return range(self.n)


def _pack_rows(mat: np.ndarray) -> list[int]:
    packed = np.packbits(mat, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


# ---------------------------------------------------------------------------
# vertex-set helpers


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def members(mask: int) -> list[int]:
    """Vertices of a bitmask in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def check_vertices(T: Tournament, vertices: Iterable[int]) -> None:
    for v in vertices:
        if not (0 <= int(v) < T.n):
            raise InputError(f"vertex {v} out of range for n={T.n}")


def vertex_set(T: Tournament, vertices: Iterable[int], *, name: str = "set") -> frozenset[int]:
    vs = [int(v) for v in vertices]
    check_vertices(T, vs)
    out = frozenset(vs)
    if len(out) != len(vs):
        raise InputError(f"{name} contains duplicate vertices")
    return out


def common_out(T: Tournament, vertices: Iterable[int], within: int) -> int:
    """Mask of vertices in ``within`` that every vertex of ``vertices`` points to."""
    m = within
    for v in vertices:
        m &= T.out_bits[v]
    return m


def common_in(T: Tournament, vertices: Iterable[int], within: int) -> int:
    """Mask of vertices in ``within`` pointing to every vertex of ``vertices``."""
    m = within
    for v in vertices:
        m &= T.in_bits[v]
    return m


def edge_count(T: Tournament, A: Iterable[int], B: Iterable[int]) -> int:
    """Number of edges directed from ``A`` to ``B``."""
    mb = mask_of(B)
    return sum((T.out_bits[a] & mb).bit_count() for a in A)


# ---------------------------------------------------------------------------
# densities and domination


def density(T: Tournament, A: Iterable[int], B: Iterable[int]) -> Fraction:
    """Exact density e(A,B)/(|A||B|) of edges directed from A to B."""
    a = vertex_set(T, A, name="A")
    b = vertex_set(T, B, name="B")
    if not a or not b:
        raise DomainError("density needs nonempty sets")
    if a & b:
        raise DomainError("density needs disjoint sets")
    return Fraction(edge_count(T, a, b), len(a) * len(b))


def dominates(T: Tournament, A: Iterable[int], B: Iterable[int]) -> bool:
    """True iff A and B are disjoint and every edge between them goes A -> B."""
    a = vertex_set(T, A, name="A")
    b = vertex_set(T, B, name="B")
    if a & b:
        return False
    mb = mask_of(b)
    return all(T.out_bits[v] & mb == mb for v in a)


def is_transitive(T: Tournament, S: Iterable[int]) -> list[int] | None:
    """The transitive order of T[S], or None when T[S] contains a cycle.

    A tournament is transitive iff its internal out-degrees are pairwise
    distinct, in which case sorting by decreasing out-degree gives the order.
    """
    s = vertex_set(T, S, name="S")
    if not s:
        raise DomainError("is_transitive needs a nonempty set")
    ms = mask_of(s)
    degs = {v: (T.out_bits[v] & ms).bit_count() for v in s}
    if len(set(degs.values())) != len(s):
        return None
    return sorted(s, key=lambda v: -degs[v])


def transitive_order(T: Tournament, S: Iterable[int]) -> list[int]:
    order = is_transitive(T, S)
    if order is None:
        raise DomainError("set does not induce a transitive tournament")
    return order


def strongly_connected_components(T: Tournament) -> list[list[int]]:
    """SCCs as sorted vertex lists, in topological (source-first) order."""
    full = (1 << T.n) - 1

    def closure(start: int, bits: list[int]) -> int:
        seen = 1 << start
        frontier = seen
        while frontier:
            nxt = 0
            for v in members(frontier):
                nxt |= bits[v]
            frontier = nxt & ~seen & full
            seen |= frontier
        return seen

    remaining = full
    comps = []
    while remaining:
        v = (remaining & -remaining).bit_length() - 1
        comp = closure(v, T.out_bits) & closure(v, T.in_bits)
        comps.append(members(comp))
        remaining &= ~comp
    # in a tournament the condensation is transitive: order by reach size
    reach = {tuple(c): closure(c[0], T.out_bits).bit_count() for c in comps}
    comps.sort(key=lambda c: -reach[tuple(c)])
    return comps


# ---------------------------------------------------------------------------
# orderings


@dataclass(frozen=True)
class Ordering:
    """A vertex ordering with its cached forward-edge count."""

    perm: tuple[int, ...]
    forward_count: int
    mode: str = "given"

    @classmethod
    def of(cls, T: Tournament, perm: Sequence[int], mode: str = "given") -> "Ordering":
        perm = tuple(int(v) for v in perm)
        check_permutation(T, perm)
        return cls(perm, count_forward(T, perm), mode)

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def backward_count(self) -> int:
        n = len(self.perm)
        return n * (n - 1) // 2 - self.forward_count

    def positions(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.perm)}

    def __iter__(self):
        return iter(self.perm)

    def __len__(self) -> int:
        return len(self.perm)


def check_permutation(T: Tournament, perm: Sequence[int]) -> None:
    if len(perm) != T.n or sorted(int(v) for v in perm) != list(range(T.n)):
        raise InputError("ordering is not a permutation of the vertex set")


def count_forward(T: Tournament, perm: Sequence[int]) -> int:
    idx = np.asarray(perm, dtype=np.int64)
    return int(np.triu(T.orient[np.ix_(idx, idx)], 1).sum())


def _perm(T: Tournament, ordering) -> tuple[int, ...]:
    perm = tuple(int(v) for v in (ordering.perm if isinstance(ordering, Ordering) else ordering))
    check_permutation(T, perm)
    return perm


def backward_edges(T: Tournament, ordering) -> list[tuple[tuple[int, int], int]]:
    """All edges pointing from a later to an earlier vertex, with their lengths."""
    perm = _perm(T, ordering)
    idx = np.asarray(perm, dtype=np.int64)
    sub = np.tril(T.orient[np.ix_(idx, idx)], -1)
    out = []
    for j, i in np.argwhere(sub):
        out.append(((perm[j], perm[i]), int(j - i)))
    out.sort(key=lambda e: (-e[1], e[0]))
    return out


# ---------------------------------------------------------------------------
# verifiers


@dataclass
class Verdict:
    """Outcome of a verifier: truthy on pass, otherwise carries a reason."""

    ok: bool
    reason: str = ""
    witness: tuple = ()
    report: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


PASS = Verdict(True)


def _seq(T: Tournament, seq: Iterable[int]) -> list[int]:
    s = [int(v) for v in seq]
    check_vertices(T, s)
    return s


def verify_path_power(T: Tournament, seq: Iterable[int], k: int) -> Verdict:
    """Check that ``seq`` is the k-th power of a directed path in T."""
    if k < 1:
        raise InputError("k must be at least 1")
    s = _seq(T, seq)
    if len(set(s)) != len(s):
        dup = next(v for v in s if s.count(v) > 1)
        return Verdict(False, "duplicate vertex", (dup,))
    o = T.orient
    for i, u in enumerate(s):
        for j in range(i + 1, min(len(s), i + k + 1)):
            if not o[u, s[j]]:
                return Verdict(False, "missing edge", (u, s[j]))
    return PASS


def verify_cycle_power(T: Tournament, cyc: Iterable[int], k: int) -> Verdict:
    """Check the k-th power of a cycle; one or two vertices are degenerate cycles."""
    if k < 1:
        raise InputError("k must be at least 1")
    s = _seq(T, cyc)
    if len(set(s)) != len(s):
        dup = next(v for v in s if s.count(v) > 1)
        return Verdict(False, "duplicate vertex", (dup,))
    L = len(s)
    if L <= 2:
        return PASS
    o = T.orient
    for i, u in enumerate(s):
        for d in range(1, k + 1):
            w = s[(i + d) % L]
            if w == u:
                break
            if not o[u, w]:
                return Verdict(False, "missing edge", (u, w))
    return PASS


def verify_partition(T: Tournament, parts: Iterable[Iterable[int]], k: int) -> Verdict:
    """Check a partition of V(T) into k-th powers of paths."""
    if k < 1:
        raise InputError("k must be at least 1")
    parts = [_seq(T, p) for p in parts]
    report = {"parts": len(parts)}
    seen: dict[int, int] = {}
    for idx, part in enumerate(parts):
        if not part:
            return Verdict(False, "empty part", (idx,), report)
        for v in part:
            if v in seen:
                return Verdict(False, "disjointness", (v, seen[v], idx), report)
            seen[v] = idx
    missing = [v for v in range(T.n) if v not in seen]
    if missing:
        return Verdict(False, "coverage", tuple(missing), report)
    for idx, part in enumerate(parts):
        res = verify_path_power(T, part, k)
        if not res:
            return Verdict(False, f"part {idx}: {res.reason}", res.witness, report)
    return Verdict(True, report=report)
