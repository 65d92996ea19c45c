import random

import pytest

from wqosep.automata import build_md, equivalent, intersect_all, is_empty, union_all
from wqosep.closures import downward_closure
from wqosep.errors import CertificationError, InvalidIdealError, PreconditionError
from wqosep.ideals import (
    OptLetter,
    Star,
    SubwordIdeal,
    enumerate_ideals,
    ideal_decompose,
    ideal_includes,
    ideal_size,
    ideal_text,
    ideal_to_nfa,
    make_extended_irreducible,
    parse_ideal,
    pattern_irreducible,
    principal_ideal,
    validate_downward_closed,
)
from wqosep.orders import Mod, Subword, conjunction, upward_closure_word
from wqosep.oracles import enum_words
from wqosep.patterns import ExtLoopPattern, format_pattern, parse_pattern

from conftest import random_nfa

AB = frozenset("ab")


def test_subword_ideal_normalization():
    i = SubwordIdeal([OptLetter("a"), Star("ab"), OptLetter("b"), Star("a")], AB).normalized()
    assert ideal_text(i) == "(ab)*"
    assert ideal_text(SubwordIdeal([], AB)) == "ε"


def test_star_atoms_need_letters():
    with pytest.raises(InvalidIdealError):
        Star("")


def test_parse_ideal_roundtrip_subword():
    o = Subword(AB)
    i = parse_ideal(o, "a? (ab)* b?")
    assert ideal_text(i) == "a? (ab)* b?"
    assert ideal_text(parse_ideal(o, "a (b)")) == "a? (b)*"


def test_ideal_includes_uses_profiles_for_single_loops():
    o = Mod(2, AB)
    small = parse_ideal(o, "(aa)")
    large = parse_ideal(o, "(abba)")
    assert ideal_includes(o, small, large)
    assert not ideal_includes(o, large, small)
    assert not ideal_includes(o, parse_ideal(o, "(aa)[1]"), large)


def test_principal_ideal_is_the_downward_closure_of_a_word():
    o = Mod(2, AB)
    i = principal_ideal(o, "ab")
    assert format_pattern(i) == "ab"
    s = principal_ideal(Subword(AB), "ab")
    assert ideal_text(s) == "a? b?"


def test_single_loop_after_prefix_is_irreducible():
    assert pattern_irreducible(parse_pattern("a (abba)", build_md(2, AB)))


def test_redundant_loop_is_reducible():
    a = build_md(2, AB)
    assert not pattern_irreducible(parse_pattern("(aa) (abba)", a))
    assert pattern_irreducible(parse_pattern("(aa) bb (aa)", a))


def test_extended_irreducibility_checks_connector_borders():
    a = build_md(2, AB)
    assert not pattern_irreducible(parse_pattern("(ab)[0] a", a))
    assert pattern_irreducible(parse_pattern("(ab)[0] b", a))


def test_make_extended_irreducible_keeps_the_ideal():
    a = build_md(2, AB)
    o = Mod(2, AB)
    p = parse_pattern("(aa) (abba) a", a)
    q = make_extended_irreducible(p, 1)
    assert isinstance(q, ExtLoopPattern)
    assert pattern_irreducible(q)
    assert equivalent(ideal_to_nfa(o, q), ideal_to_nfa(o, p))
    assert len(q.loops) == 1


def test_make_extended_irreducible_respects_period_bound():
    with pytest.raises(PreconditionError):
        make_extended_irreducible(parse_pattern("(abab)", build_md(4, AB)), 1)


def test_validate_downward_closed(a_abba):
    with pytest.raises(PreconditionError):
        validate_downward_closed(Subword(AB), a_abba)
    validate_downward_closed(Subword(AB), downward_closure(Subword(AB), a_abba))


def test_decompose_mod_closure_of_abba(abba_star):
    o = Mod(2, AB)
    ideals = ideal_decompose(o, downward_closure(o, abba_star))
    assert len(ideals) == 1
    assert equivalent(ideal_to_nfa(o, ideals[0]), downward_closure(o, abba_star))


@pytest.mark.parametrize("order", [Subword(AB), Mod(2, AB)])
def test_decompositions_of_random_closures(order):
    rng = random.Random(2024 if isinstance(order, Subword) else 2025)
    for _ in range(20):
        closed = downward_closure(order, random_nfa(rng))
        ideals = ideal_decompose(order, closed)
        union = union_all(AB, [ideal_to_nfa(order, i) for i in ideals])
        assert equivalent(union, closed)
        for i in ideals:
            for j in ideals:
                if i != j:
                    assert not ideal_includes(order, i, j)


@pytest.mark.parametrize("order", [Subword(AB), Mod(2, AB)])
def test_decomposed_ideals_are_directed(order):
    rng = random.Random(2026 if isinstance(order, Subword) else 2027)
    undirected = []
    for _ in range(8):
        for i in ideal_decompose(order, downward_closure(order, random_nfa(rng))):
            lang = ideal_to_nfa(order, i)
            members = sorted(enum_words(lang, 4).words)
            for _ in range(5):
                u, v = rng.choice(members), rng.choice(members)
                above = intersect_all(AB, [lang, upward_closure_word(order, u), upward_closure_word(order, v)])
                if is_empty(above):
                    undirected.append((ideal_text(i), u, v))
    assert undirected == []


def test_decompose_rejects_non_closed_languages(a_abba):
    with pytest.raises((PreconditionError, CertificationError)):
        ideal_decompose(Subword(AB), a_abba, check_bound=0)


def test_enumerate_ideals_is_canonical():
    first = [ideal_text(i) for i in enumerate_ideals(Subword(AB), 2)]
    assert first[0] == "ε"
    assert len(first) == len(set(first))
    assert all(ideal_size(i) <= 2 for i in enumerate_ideals(Mod(2, AB), 2))


def test_conjunction_ideal_text_roundtrip():
    o = conjunction(Subword(AB), Mod(2, AB))
    i = parse_ideal(o, "conj[(ab)* ; (abba)]")
    assert ideal_text(i) == "conj[(ab)* ; (abba)]"
