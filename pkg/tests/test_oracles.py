import pytest

from wqosep.automata import CounterAutomaton, CounterEdge, Nfa
from wqosep.errors import UnsupportedOrderError
from wqosep.orders import Mod, Subword, conjunction
from wqosep.oracles import (
    all_words,
    count_occurrences,
    dcl_oracle,
    enum_words,
    mod_oracle,
    subword_dp_oracle,
    unbounded_oracle,
)

from conftest import chain

AB = frozenset("ab")


def test_all_words_counts():
    assert len(all_words("ab", 3)) == 15
    assert all_words("ab", 0) == [()]


def test_enum_words_follows_epsilon_edges():
    a = Nfa({0, 1}, "ab", {(0, "", 1), (1, "b", 1)}, {0}, {1})
    assert set(enum_words(a, 2).words) == {(), ("b",), ("b", "b")}
    assert ("b",) in enum_words(a, 2)
    assert len(enum_words(a, 2)) == 3


@pytest.mark.parametrize("u, v, expected", [
    ("", "", True),
    ("ab", "acb", True),
    ("ba", "ab", False),
    ("aa", "a", False),
])
def test_subword_dp_oracle(u, v, expected):
    assert subword_dp_oracle(u, v) is expected


@pytest.mark.parametrize("d, u, v, expected", [
    (2, "ab", "abab", True),
    (2, "ab", "aab", False),
    (2, "b", "aab", True),
    (3, "a", "abba", True),
    (3, "a", "aab", False),
])
def test_mod_oracle(d, u, v, expected):
    assert mod_oracle(d, u, v) is expected


def test_dcl_oracle_examples():
    sub = dcl_oracle(Subword(AB), chain("ab", "a", "b"), 3)
    assert ("a", "b", "b") in sub and ("b", "a") not in sub
    mod = dcl_oracle(Mod(2, AB), chain("ab", "", "abba"), 2)
    assert set(mod.words) == {(), ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}


def test_dcl_oracle_rejects_other_orders(a_abba):
    with pytest.raises(UnsupportedOrderError):
        dcl_oracle(conjunction(Subword(AB), Mod(2, AB)), a_abba, 2)


@pytest.mark.parametrize("w, u, expected", [
    ("abab", "ab", 2),
    ("aaa", "aa", 2),
    ("ab", "", 3),
    ("", "a", 0),
])
def test_count_occurrences(w, u, expected):
    assert count_occurrences(w, u) == expected


def test_unbounded_oracle():
    loop = CounterAutomaton({0}, "a", ["x"], [CounterEdge(0, "a", (1,), 0)], {0}, {0})
    assert unbounded_oracle(loop, None, 5)
    assert not unbounded_oracle(loop, 3, 5)
    once = CounterAutomaton({0, 1}, "a", ["x"], [CounterEdge(0, "a", (1,), 1)], {0}, {1})
    assert unbounded_oracle(once, None, 1)
    assert not unbounded_oracle(once, None, 2)
