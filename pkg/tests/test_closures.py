import random

import pytest

from wqosep.automata import Nfa, accepts, concat, equivalent, letters_star, projection, word_nfa
from wqosep.closures import downward_closure, sup_decide, upward_closure
from wqosep.errors import AlphabetMismatchError, PreconditionError, UnsupportedOrderError
from wqosep.orders import Mod, Subword, ViaTransduction, conjunction, order_leq, upward_closure_word
from wqosep.oracles import all_words, dcl_oracle

from conftest import chain, random_nfa

AB = frozenset("ab")
EVEN = Nfa({0, 1}, "ab", {(p, x, 1 - p) for p in (0, 1) for x in "ab"}, {0}, {0})


@pytest.mark.parametrize("order, seed", [(Subword(AB), 11), (Mod(2, AB), 12), (Mod(3, AB), 13)])
def test_downward_closure_agrees_with_oracle(order, seed):
    rng = random.Random(seed)
    mismatches = []
    for _ in range(50):
        l = random_nfa(rng)
        closure = downward_closure(order, l)
        expected = dcl_oracle(order, l, 7)
        for w in all_words(AB, 7):
            if accepts(closure, w) != (w in expected):
                mismatches.append((sorted(l.edges), w))
    assert mismatches == []


@pytest.mark.parametrize("order, seed", [(Subword(AB), 14), (Mod(2, AB), 15), (Mod(3, AB), 16)])
def test_downward_closures_are_downward_closed(order, seed):
    rng = random.Random(seed)
    short = all_words(AB, 5)
    leaks = []
    for _ in range(15):
        closure = downward_closure(order, random_nfa(rng))
        accepted = [w for w in short if accepts(closure, w)]
        for w in accepted:
            for u in short:
                if len(u) <= len(w) and order_leq(order, u, w) and not accepts(closure, u):
                    leaks.append((w, u))
    assert leaks == []


def test_mod_two_closures_are_the_even_words(abba_star, aa_abba):
    o = Mod(2, AB)
    assert equivalent(downward_closure(o, abba_star), EVEN)
    assert equivalent(downward_closure(o, aa_abba), EVEN)


def test_subword_closure_of_a_single_word():
    closure = downward_closure(Subword(AB), word_nfa(AB, "ab"))
    assert {w for w in all_words(AB, 3) if accepts(closure, w)} == {(), ("a",), ("b",), ("a", "b")}


def test_closure_requires_matching_alphabets(even_a):
    with pytest.raises(AlphabetMismatchError):
        downward_closure(Subword(AB), even_a)


def test_upward_closures():
    up = upward_closure(Subword(AB), word_nfa(AB, "ab"))
    assert accepts(up, "aab") and accepts(up, "bab") and not accepts(up, "ba")
    o = Mod(2, AB)
    up = upward_closure(o, word_nfa(AB, "ab"))
    assert accepts(up, "abab") and not accepts(up, "aab")
    assert equivalent(up, upward_closure_word(o, "ab"))


def test_upward_closure_of_a_conjunction_is_unsupported():
    with pytest.raises(UnsupportedOrderError):
        upward_closure(conjunction(Subword(AB), Mod(2, AB)), word_nfa(AB, "ab"))


def test_closure_through_a_projection():
    o = ViaTransduction(projection("abc", "ab"), Subword(AB))
    closure = downward_closure(o, word_nfa("abc", "cab"))
    assert accepts(closure, "ccb")
    assert accepts(closure, "acc")
    assert not accepts(closure, "ba")


def test_conjunction_closure_of_a_word():
    o = conjunction(Subword(AB), Mod(2, AB))
    closure = downward_closure(o, word_nfa(AB, "ab"))
    assert {w for w in all_words(AB, 3) if accepts(closure, w)} == {(), ("a", "b")}


@pytest.mark.parametrize("letters", ["a", "ab", "abc"])
def test_sup_decide_on_full_frames(letters):
    frame = concat(*(letters_star(letters, x) for x in letters))
    assert sup_decide(frame, letters)


def test_sup_decide_on_sparse_languages():
    even_blocks = concat(chain("ab", "", "aa"), chain("ab", "", "bb"))
    assert sup_decide(even_blocks, "ab")
    a_star_b = concat(letters_star("ab", "a"), word_nfa("ab", "b"))
    assert not sup_decide(a_star_b, "ab")


def test_sup_decide_needs_the_frame():
    with pytest.raises(PreconditionError):
        sup_decide(word_nfa("ab", "ba"), "ab")
