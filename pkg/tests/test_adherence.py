import random

import pytest

from wqosep.adherence import (
    adherence_member,
    association_check,
    build_adherence_ca,
    embedding_matcher,
)
from wqosep.automata import build_md, includes
from wqosep.closures import downward_closure
from wqosep.counters import counter_unbounded
from wqosep.errors import AlphabetMismatchError, PreconditionError
from wqosep.ideals import OptLetter, Star, SubwordIdeal, enumerate_ideals, ideal_to_nfa
from wqosep.orders import Mod, Subword
from wqosep.patterns import parse_pattern

from conftest import chain, random_nfa

AB = frozenset("ab")


@pytest.fixture
def md2():
    return build_md(2, AB)


@pytest.mark.parametrize("route", ["counter", "closure"])
def test_pattern_adheres_to_b_sigma_star(route, md2, b_sigma):
    assert adherence_member(Mod(2, AB), parse_pattern("a (abba)", md2), b_sigma, route=route)


@pytest.mark.parametrize("route", ["counter", "closure"])
def test_odd_words_adhere_to_both_shifted_loops(route, md2, a_abba, b_abba):
    p = parse_pattern("a (abba)", md2)
    assert adherence_member(Mod(2, AB), p, a_abba, route=route)
    assert adherence_member(Mod(2, AB), p, b_abba, route=route)


@pytest.mark.parametrize("route", ["counter", "closure"])
def test_subword_star_ideals(route):
    a_star = SubwordIdeal([Star("a")], AB)
    ab_star = SubwordIdeal([Star("ab")], AB)
    even_as = chain("ab", "", "aa")
    assert adherence_member(Subword(AB), a_star, even_as, route=route)
    assert not adherence_member(Subword(AB), ab_star, even_as, route=route)


def test_finite_ideal_adheres_when_its_word_is_present():
    i = SubwordIdeal([OptLetter("a"), OptLetter("b")], AB)
    assert adherence_member(Subword(AB), i, chain("ab", "ab", "b"))
    assert not adherence_member(Subword(AB), i, chain("ab", "b", "a"))


def test_association_needs_every_loop(md2, abba_star):
    assert not association_check(parse_pattern("(aa) (abba)", md2), abba_star)
    assert association_check(parse_pattern("(abba)", md2), abba_star)


def test_routes_agree_on_random_languages():
    rng = random.Random(31)
    ideals = list(enumerate_ideals(Subword(AB), 2))
    disagreements = []
    for _ in range(5):
        l = random_nfa(rng, max_states=3)
        for i in ideals:
            if adherence_member(Subword(AB), i, l) != adherence_member(Subword(AB), i, l, route="closure"):
                disagreements.append((sorted(l.edges), i))
    assert disagreements == []


def test_mod_routes_agree_on_loop_patterns(md2):
    rng = random.Random(32)
    patterns = [parse_pattern(t, md2) for t in ["(aa)", "(ab)", "(abba)", "a (bb)", "(ab) b", "(aa)[1]"]]
    disagreements = []
    for _ in range(4):
        l = random_nfa(rng, max_states=3)
        for p in patterns:
            if adherence_member(Mod(2, AB), p, l) != adherence_member(Mod(2, AB), p, l, route="closure"):
                disagreements.append((sorted(l.edges), p))
    assert disagreements == []


def test_adherent_ideals_lie_in_the_closure(md2):
    rng = random.Random(33)
    cases = [
        (Subword(AB), list(enumerate_ideals(Subword(AB), 2))),
        (Mod(2, AB), [parse_pattern(t, md2) for t in ["(aa)", "(ab)", "(abba)", "a (bb)", "(ab) b", "(aa)[1]"]]),
    ]
    escapes = []
    for order, ideals in cases:
        for _ in range(5):
            l = random_nfa(rng, max_states=3)
            closure = downward_closure(order, l)
            for i in ideals:
                if adherence_member(order, i, l) and not includes(closure, ideal_to_nfa(order, i)):
                    escapes.append((sorted(l.edges), i))
    assert escapes == []


def test_unknown_route(md2, abba_star):
    with pytest.raises(PreconditionError):
        adherence_member(Mod(2, AB), parse_pattern("(abba)", md2), abba_star, route="oracle")


def test_alphabets_must_match(md2, even_a):
    with pytest.raises(AlphabetMismatchError):
        adherence_member(Mod(2, AB), parse_pattern("(ab)", md2), even_a)


def test_embedding_matcher_has_a_counter_per_star():
    ca = embedding_matcher([OptLetter("a"), Star("ab"), OptLetter("b"), Star("b")], AB)
    assert ca.counters == ("star1", "star3")


def test_adherence_automaton_follows_the_ideal(md2, abba_star):
    ca = build_adherence_ca(Mod(2, AB), parse_pattern("(ab)", md2))
    assert counter_unbounded(ca, restrict=chain("ab", "", "ab"))
    assert not counter_unbounded(ca, restrict=abba_star)
