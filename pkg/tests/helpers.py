"""Instance builders shared by the test modules."""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from tournament_powers.absorber import Absorber
from tournament_powers.core import Tournament
from tournament_powers.median import split_from_ranges
from tournament_powers.core import Ordering


def with_dominations(n: int, rules, seed: int | None = None, order: Sequence[int] | None = None) -> Tournament:
    """Forward transitive order (or random if seed given), then each (A, B) in rules forces A => B."""
    order = list(range(n)) if order is None else list(order)
    if seed is None:
        pos = np.empty(n, dtype=int)
        pos[order] = np.arange(n)
        mat = pos[:, None] < pos[None, :]
    else:
        up = np.triu(np.random.default_rng(seed).random((n, n)) < 0.5, 1)
        mat = up | np.tril(~up.T, -1)
        np.fill_diagonal(mat, False)
    forced = {}
    for A, B in rules:
        for a in A:
            for b in B:
                if forced.get((b, a)):
                    raise ValueError(f"conflicting rules on {a},{b}")
                forced[(a, b)] = True
                mat[a, b], mat[b, a] = True, False
    return Tournament(mat)


def block_split(T: Tournament, sizes: Sequence[int], perm: Sequence[int] | None = None):
    perm = list(range(T.n)) if perm is None else list(perm)
    order = Ordering.of(T, perm)
    ranges, start = [], 0
    for s in sizes:
        ranges.append((start, start + s))
        start += s
    return split_from_ranges(order, ranges, max(sizes))


def absorber_rules(S, Q, r_prime):
    r = len(S) - 1
    rules = []
    for i in range(r):
        rules.append((S[i], S[i + 1]))
    rules.append((S[r], S[0]))
    rules.append((S[0], Q))
    rules.append((Q, S[r_prime + 1]))
    for i in range(1, r_prime + 1):
        rules.append((S[i], [Q[i - 1]]))
        rules.append(([Q[i - 1]], S[i + 1]))
    for blk in list(S) + [Q]:
        for a, b in itertools.combinations(blk, 2):
            rules.append(([a], [b]))
    return rules


def hand_absorber(k: int, r_prime: int, r: int, seed: int = 0, extra: int = 0):
    """A random tournament with an absorber planted on its first vertices.

    S_i are transitive 2k-blocks, Q is transitive, every required domination
    holds and all other pairs are random.  Returns (T, H).
    """
    assert r > r_prime >= 1 and r >= 2
    S, v = [], 0
    for _ in range(r + 1):
        S.append(list(range(v, v + 2 * k)))
        v += 2 * k
    Q = list(range(v, v + r_prime))
    n = v + r_prime + extra
    T = with_dominations(n, absorber_rules(S, Q, r_prime), seed=seed)
    return T, Absorber(tuple(map(tuple, S)), tuple(Q), k, r_prime)


def absorber_family(k: int, specs, seed: int = 0):
    """Several disjoint planted absorbers with Q_a => Q_b for a < b."""
    rules, Hs, v = [], [], 0
    for r_prime, r in specs:
        S = []
        for _ in range(r + 1):
            S.append(list(range(v, v + 2 * k)))
            v += 2 * k
        Q = list(range(v, v + r_prime))
        v += r_prime
        rules += absorber_rules(S, Q, r_prime)
        Hs.append(Absorber(tuple(map(tuple, S)), tuple(Q), k, r_prime))
    for a, b in itertools.combinations(range(len(Hs)), 2):
        rules.append((Hs[a].Q, Hs[b].Q))
    return with_dominations(v, rules, seed=seed), Hs


def s3_instance(m: int = 6, t: int = 5):
    """Blocks A_0..A_t where the middle splits into L => R, A_0 => L, R => A_t, R => A_0, A_t => L."""
    n = m * (t + 1)
    A0, At = list(range(m)), list(range(n - m, n))
    middle = list(range(m, n - m))
    L, R = middle[: len(middle) // 2], middle[len(middle) // 2:]
    T = with_dominations(n, [(A0, L), (L, R), (R, At), (R, A0), (At, L)])
    return T, block_split(T, [m] * (t + 1)), L, R


def anti_median_instance(m: int = 4, t: int = 4):
    """Middle P placed before Q although Q => P; P avoids A_t and Q avoids A_0."""
    n = m * (t + 1)
    A0, At = list(range(m)), list(range(n - m, n))
    middle = list(range(m, n - m))
    P, Q = middle[: len(middle) // 2], middle[len(middle) // 2:]
    T = with_dominations(n, [(A0, P), (Q, A0), (Q, At), (At, P), (Q, P)])
    return T, block_split(T, [m] * (t + 1)), P, Q


def backward_skeleton(m: int, t: int, seed: int | None = None):
    """Forward blow-up of transitive blocks except A_t => A_0."""
    n = m * (t + 1)
    blocks = [list(range(i * m, (i + 1) * m)) for i in range(t + 1)]
    rules = []
    for i in range(t + 1):
        for j in range(i + 1, t + 1):
            rules.append((blocks[i], blocks[j]) if (i, j) != (0, t) else (blocks[t], blocks[0]))
        for a, b in itertools.combinations(blocks[i], 2):
            rules.append(([a], [b]))
    T = with_dominations(n, rules, seed=seed)
    return T, block_split(T, [m] * (t + 1)), blocks
