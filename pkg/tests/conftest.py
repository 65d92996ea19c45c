import random

import pytest

from wqosep.automata import Nfa, concat, letters_star


def chain(alphabet, prefix: str, loop: str) -> Nfa:
    """prefix · loop*, as a chain of states returning to the end of the prefix."""
    n, k = len(prefix), len(loop)
    edges = {(i, x, i + 1) for i, x in enumerate(prefix)}
    for j, x in enumerate(loop):
        src = n + j
        dst = n if j == k - 1 else n + j + 1
        edges.add((src, x, dst))
    return Nfa(range(n + max(k, 1)), alphabet, edges, {0}, {n})


def random_nfa(rng: random.Random, alphabet="ab", max_states: int = 4, density: float = 0.35) -> Nfa:
    n = rng.randint(1, max_states)
    edges = {(p, x, q) for p in range(n) for x in alphabet for q in range(n) if rng.random() < density}
    final = {q for q in range(n) if rng.random() < 0.5} or {rng.randrange(n)}
    return Nfa(range(n), alphabet, edges, {0}, final)


@pytest.fixture
def even_a():
    return chain("a", "", "aa")


@pytest.fixture
def odd_a():
    return chain("a", "a", "aa")


@pytest.fixture
def a_abba():
    return chain("ab", "a", "abba")


@pytest.fixture
def b_abba():
    return chain("ab", "b", "abba")


@pytest.fixture
def abba_star():
    return chain("ab", "", "abba")


@pytest.fixture
def aa_abba():
    return concat(chain("ab", "", "aa"), chain("ab", "", "abba"))


@pytest.fixture
def a_ba():
    return chain("ab", "a", "ba")


@pytest.fixture
def b_ab():
    return chain("ab", "b", "ab")


@pytest.fixture
def sigma_star():
    return letters_star("ab", "ab")


@pytest.fixture
def b_sigma():
    return concat(chain("ab", "b", ""), letters_star("ab", "ab"))
