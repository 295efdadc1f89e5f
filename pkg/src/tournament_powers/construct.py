"""Seeded generators: random, transitive, blow-ups, random reversals, Paley tournaments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import DomainError, InputError, NotFoundError, Tournament
from .oracle import DEFAULT_BUDGET, OracleBudget, max_transitive

PALEY_MAX_Q = 10_000
NO_TT_ATTEMPTS = 200


def _from_upper(upper: np.ndarray) -> Tournament:
    """Tournament whose edge i->j (i<j) is given by the strict upper triangle."""
    up = np.triu(upper.astype(bool), 1)
    orient = up | np.tril(~up.T, -1)
    np.fill_diagonal(orient, False)
    return Tournament(orient)


def random_tournament(n: int, seed: int = 0) -> Tournament:
    """Each pair oriented by an independent fair coin."""
    if n < 1:
        raise InputError("n must be at least 1")
    rng = np.random.default_rng(seed)
    return _from_upper(rng.random((n, n)) < 0.5)


def transitive_tournament(n: int) -> Tournament:
    """Edges i -> j for all i < j."""
    if n < 1:
        raise InputError("n must be at least 1")
    return _from_upper(np.ones((n, n), dtype=bool))


def random_reversal(n: int, p: float, seed: int = 0) -> Tournament:
    """The transitive tournament with each edge reversed independently with probability p."""
    if not 0 <= p <= 1:
        raise InputError("p must lie in [0, 1]")
    if n < 1:
        raise InputError("n must be at least 1")
    rng = np.random.default_rng(seed)
    return _from_upper(rng.random((n, n)) >= p)


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q ** 0.5) + 1))


def paley(q: int) -> Tournament:
    """i -> j iff j - i is a nonzero quadratic residue mod q (q prime, q = 3 mod 4)."""
    if not isinstance(q, (int, np.integer)) or not _is_prime(q) or q % 4 != 3 or q > PALEY_MAX_Q:
        raise DomainError(f"Paley tournaments need a prime q = 3 mod 4 up to {PALEY_MAX_Q}, got {q}")
    residues = np.zeros(q, dtype=bool)
    residues[(np.arange(1, q) ** 2) % q] = True
    diff = (np.arange(q)[None, :] - np.arange(q)[:, None]) % q
    return Tournament(residues[diff])


@dataclass(frozen=True)
class Blowup:
    tournament: Tournament
    parts: tuple[tuple[int, ...], ...]

    def part_of(self, v: int) -> int:
        for i, p in enumerate(self.parts):
            if v in p:
                return i
        raise InputError(f"vertex {v} not in the blow-up")


Inner = str | Tournament | Callable[[int, int], Tournament]


def _inner_block(inner, size: int, seed: int) -> Tournament:
    if isinstance(inner, Tournament):
        if inner.n != size:
            raise InputError(f"inner tournament has {inner.n} vertices, block needs {size}")
        return inner
    if callable(inner):
        block = inner(size, seed)
    elif inner == "random":
        block = random_tournament(size, seed)
    elif inner == "transitive":
        block = transitive_tournament(size)
    elif inner == "paley":
        block = paley(size)
    elif inner == "cycle":
        if size % 2 == 0:
            raise InputError("rotational 'cycle' blocks need odd size")
        idx = np.arange(size)
        diff = (idx[None, :] - idx[:, None]) % size
        block = Tournament((diff >= 1) & (diff <= size // 2))
    else:
        raise InputError(f"unknown inner generator {inner!r}")
    if block.n != size:
        raise InputError(f"inner generator produced {block.n} vertices, expected {size}")
    return block


def blowup(block_sizes: Sequence[int], inner: Inner | Sequence[Inner] = "random", seed: int = 0) -> Blowup:
    """Blocks laid out left to right, all cross edges forward.

    ``inner`` is a generator name (random, transitive, paley, cycle), a
    tournament, a callable ``(size, seed) -> Tournament``, or one of these per block.
    """
    sizes = [int(s) for s in block_sizes]
    if not sizes or min(sizes) < 1:
        raise InputError("block sizes must be positive")
    per_block = list(inner) if isinstance(inner, (list, tuple)) else [inner] * len(sizes)
    if len(per_block) != len(sizes):
        raise InputError("one inner generator per block expected")
    n = sum(sizes)
    orient = np.zeros((n, n), dtype=bool)
    parts = []
    start = 0
    for i, (size, gen) in enumerate(zip(sizes, per_block)):
        block = _inner_block(gen, size, seed * 7919 + i)
        end = start + size
        orient[start:end, start:end] = block.orient
        orient[start:end, end:] = True
        parts.append(tuple(range(start, end)))
        start = end
    return Blowup(Tournament(orient), tuple(parts))


def no_tt_block(
    k: int, seed: int = 0, *, n_vertices: int | None = None, budget: OracleBudget = DEFAULT_BUDGET
) -> Tournament:
    """A tournament on at least 2^(k/2) vertices without a transitive k-set.

    Known examples come first (C3 for k=3, Paley-7 for k=4, Paley-11 for
    k=5); otherwise seeded random tournaments are checked by the exact
    maximum transitive subtournament solver.  ``n_vertices`` asks for a
    specific size (it may be below 2^(k/2), e.g. small blocks for oracle-scale
    blow-ups).
    """
    if k < 3:
        raise InputError("k must be at least 3")
    n = n_vertices if n_vertices is not None else int(np.ceil(2 ** (k / 2)))
    if n < 1:
        raise InputError("n_vertices must be positive")
    if n > budget.max_subset_bits:
        raise NotFoundError(f"no_tt_block needs {n} vertices, beyond the oracle budget")
    known = {3: paley(3), 4: paley(7), 5: paley(11)}
    cand = known.get(k)
    if cand is not None and cand.n >= n:
        sub = cand if n_vertices is None else cand.subtournament(range(n))[0]
        if len(max_transitive(sub, budget)) < k:
            return sub
    rng = np.random.default_rng(seed)
    for _ in range(NO_TT_ATTEMPTS):
        T = _from_upper(rng.random((n, n)) < 0.5)
        if len(max_transitive(T, budget)) < k:
            return T
    raise NotFoundError(f"no tournament on {n} vertices without a transitive {k}-set found")
