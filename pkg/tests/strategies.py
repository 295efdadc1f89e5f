"""Hypothesis strategies for seeded tournaments."""

from hypothesis import strategies as st

from tournament_powers.construct import random_tournament


def tournaments(min_n: int = 1, max_n: int = 10):
    return st.builds(random_tournament, st.integers(min_n, max_n), st.integers(0, 10**6))


@st.composite
def tournament_and_subset(draw, min_n=2, max_n=10, min_size=1):
    T = draw(tournaments(max(min_n, min_size), max_n))
    S = draw(st.sets(st.integers(0, T.n - 1), min_size=min_size, max_size=T.n))
    return T, sorted(S)


@st.composite
def tournament_and_perm(draw, min_n=1, max_n=10):
    T = draw(tournaments(min_n, max_n))
    perm = draw(st.permutations(range(T.n)))
    return T, list(perm)
