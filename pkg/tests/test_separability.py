import threading

import pytest

from wqosep import separability
from wqosep.automata import accepts, build_pk, complement, empty_language, letters_star, trim
from wqosep.errors import AlphabetMismatchError, PreconditionError
from wqosep.ideals import ideal_text
from wqosep.orders import Counting, Mod, Subword
from wqosep.separability import (
    Atom,
    Inconclusive,
    Inseparable,
    Separable,
    formula_from_model,
    formula_model,
    formula_text,
    is_ptl,
    mod_bound,
    mod_separate,
    mod_separate_fixed,
    parse_formula,
    ptl_separate,
    verdict_model,
    verify_separator,
)

A = frozenset("a")
AB = frozenset("ab")


def test_parity_is_separable_by_mod_two(even_a, odd_a):
    v = ptl_separate(Mod(2, A), even_a, odd_a)
    assert isinstance(v, Separable)
    assert formula_text(v.formula) == "↑ε"
    assert accepts(v.separator, "aa") and not accepts(v.separator, "a")


def test_parity_is_not_separable_by_subwords(even_a, odd_a):
    v = ptl_separate(Subword(A), even_a, odd_a)
    assert isinstance(v, Inseparable)
    assert ideal_text(v.certificate) == "(a)*"
    assert v.definitive


def test_shifted_loops_by_position(a_ba, b_ab):
    v = ptl_separate(Mod(2, AB), a_ba, b_ab)
    assert isinstance(v, Separable)
    assert formula_text(v.formula) == "↑a"


@pytest.mark.parametrize("d, separable", [(2, False), (4, True), (6, False)])
def test_abba_loops_per_modulus(d, separable, a_abba, b_abba):
    v = mod_separate_fixed(d, a_abba, b_abba)
    assert isinstance(v, Separable if separable else Inseparable)
    assert v.d_used == d


def test_mod_separate_climbs_the_ladder(a_abba, b_abba, even_a, odd_a):
    v = mod_separate(a_abba, b_abba)
    assert isinstance(v, Separable)
    assert v.d_used == 4
    assert v.order == "mod"
    assert mod_separate(even_a, odd_a).d_used == 2


def test_mod_separate_is_definitive_for_tiny_automata():
    v = mod_separate(letters_star(AB, "a"), empty_language(AB))
    assert isinstance(v, Separable)
    assert v.definitive
    assert v.d_used == 2
    assert formula_text(v.formula) == "NOT FALSE"


def test_mod_separate_reports_shared_words(a_abba):
    v = mod_separate(a_abba, a_abba)
    assert isinstance(v, Inseparable)
    assert v.witness == ("a",)


def test_mod_bound():
    assert mod_bound(1) == 2
    assert mod_bound(2) == 80640
    with pytest.raises(PreconditionError):
        mod_bound(0)


def test_overlapping_languages_are_inseparable(a_abba, sigma_star):
    v = ptl_separate(Subword(AB), a_abba, sigma_star)
    assert isinstance(v, Inseparable)
    assert v.witness == ("a",)
    assert ideal_text(v.certificate) == "a?"


def test_budget_zero_is_inconclusive_without_deepening():
    k = letters_star(AB, "a")
    l = trim(complement(k))
    v = ptl_separate(Subword(AB), k, l, budget=0)
    assert isinstance(v, Inconclusive)
    assert not v.definitive
    deep = ptl_separate(Subword(AB), k, l, budget=0, deepen=True)
    assert isinstance(deep, Separable)
    assert deep.budget == 1
    assert formula_text(deep.formula) == "NOT ↑b"


def test_is_ptl(even_a):
    assert isinstance(is_ptl(Subword(AB), letters_star(AB, "a")), Separable)
    assert isinstance(is_ptl(Subword(A), even_a), Inseparable)
    assert isinstance(is_ptl(Mod(2, A), even_a), Separable)


def test_parallel_search_gives_the_same_verdict(even_a, odd_a, a_ba, b_ab):
    assert formula_text(ptl_separate(Mod(2, A), even_a, odd_a, parallel=True).formula) == "↑ε"
    assert formula_text(ptl_separate(Mod(2, AB), a_ba, b_ab, parallel=True).formula) == "↑a"
    v = ptl_separate(Subword(A), even_a, odd_a, parallel=True)
    assert isinstance(v, Inseparable)


def test_parallel_search_returns_on_a_certificate(monkeypatch, even_a, odd_a):
    released = threading.Event()
    rounds = []

    def slow_round(o, k, l, bound, atom_orders):
        rounds.append(bound)
        released.wait(10)
        return None

    monkeypatch.setattr(separability, "_separator_round", slow_round)
    try:
        v = ptl_separate(Subword(A), even_a, odd_a, budget=3, parallel=True)
    finally:
        released.set()
    assert isinstance(v, Inseparable)
    assert ideal_text(v.certificate) == "(a)*"
    assert len(rounds) <= 1


def test_counting_order_has_no_certificates(a_ba, b_ab):
    v = ptl_separate(Counting(build_pk(1, AB)), a_ba, b_ab, budget=1)
    assert isinstance(v, Separable)
    assert verify_separator(Counting(build_pk(1, AB)), v.formula, a_ba, b_ab)


def test_atoms_from_a_family_of_orders(even_a, odd_a):
    family = [Subword(A), Mod(2, A)]
    v = ptl_separate(Mod(2, A), even_a, odd_a, atom_orders=family)
    assert isinstance(v, Separable)
    assert v.formula == Atom("", 1)
    assert verify_separator(Mod(2, A), v.formula, even_a, odd_a, family)
    assert not verify_separator(Mod(2, A), Atom("", 0), even_a, odd_a, family)


def test_counting_order_reports_shared_words_without_a_certificate(a_ba, sigma_star):
    v = ptl_separate(Counting(build_pk(1, AB)), a_ba, sigma_star)
    assert isinstance(v, Inseparable)
    assert v.certificate is None and v.witness
    assert v.witness == ("a",)


@pytest.mark.parametrize("pair, family, separable", [
    (("even_a", "odd_a"), [Subword(A), Mod(2, A)], True),
    (("a_ba", "b_ab"), [Subword(AB), Mod(2, AB)], True),
    (("a_abba", "b_abba"), [Subword(AB), Mod(4, AB)], True),
    (("even_a", "odd_a"), [Subword(A)], False),
])
def test_atoms_from_a_family_on_several_instances(request, pair, family, separable):
    k, l = (request.getfixturevalue(name) for name in pair)
    order = family[-1]
    v = ptl_separate(order, k, l, atom_orders=family)
    if separable:
        assert isinstance(v, Separable)
        assert verify_separator(order, v.formula, k, l, family)
    else:
        assert isinstance(v, Inseparable)
        assert ideal_text(v.certificate) == "(a)*"


def test_deepening_stays_within_the_budget_for_atom_families():
    k = letters_star(AB, "a")
    l = trim(complement(k))
    v = ptl_separate(Subword(AB), k, l, budget=0, deepen=True, atom_orders=[Subword(AB)])
    assert isinstance(v, Inconclusive)
    assert v.budget == 0


@pytest.mark.parametrize("order, left, right", [
    (Mod(2, A), "even_a", "odd_a"),
    (Subword(A), "even_a", "odd_a"),
    (Mod(2, AB), "a_ba", "b_ab"),
    (Mod(2, AB), "a_abba", "b_abba"),
    (Mod(4, AB), "a_abba", "b_abba"),
    (Subword(AB), "a_abba", "sigma_star"),
])
def test_separability_is_symmetric(request, order, left, right):
    k, l = request.getfixturevalue(left), request.getfixturevalue(right)
    forward, backward = ptl_separate(order, k, l), ptl_separate(order, l, k)
    assert type(forward) is type(backward)
    if isinstance(forward, Separable):
        assert verify_separator(order, forward.formula, k, l)
        assert verify_separator(order, backward.formula, l, k)


@pytest.mark.parametrize("left, right", [("even_a", "odd_a"), ("a_ba", "b_ab")])
@pytest.mark.parametrize("ell", [2, 3])
def test_separability_survives_multiples_of_the_modulus(request, left, right, ell):
    k, l = request.getfixturevalue(left), request.getfixturevalue(right)
    assert isinstance(mod_separate_fixed(2, k, l), Separable)
    v = mod_separate_fixed(2 * ell, k, l, deepen=True)
    assert isinstance(v, Separable)
    assert v.d_used == 2 * ell
    assert verify_separator(Mod(2 * ell, k.alphabet), v.formula, k, l)


def test_alphabets_must_match(even_a, a_abba):
    with pytest.raises(AlphabetMismatchError):
        ptl_separate(Subword(AB), even_a, a_abba)


def test_verify_separator(a_ba, b_ab):
    o = Mod(2, AB)
    assert verify_separator(o, parse_formula("↑a"), a_ba, b_ab)
    assert not verify_separator(o, parse_formula("↑b"), a_ba, b_ab)
    assert verify_separator(o, parse_formula("NOT ↑b"), a_ba, b_ab)


@pytest.mark.parametrize("text", [
    "↑a",
    "NOT ↑ε",
    "↑ab AND NOT ↑ba",
    "(↑a OR ↑b) AND ↑ε",
    "NOT (↑a AND ↑b)",
    "↑[1]ab OR ↑[0]b",
    "TRUE",
    "FALSE",
])
def test_formula_text_roundtrip(text):
    assert formula_text(parse_formula(text)) == text


@pytest.mark.parametrize("text", ["↑a AND", "(↑a", "↑a ↑b", "NOTHING"])
def test_formula_syntax_errors(text):
    with pytest.raises(PreconditionError):
        parse_formula(text)


def test_formula_models():
    f = parse_formula("NOT (↑a OR ↑[1]b)")
    model = formula_model(f)
    assert model.op == "not"
    assert model.args[0].args[1].component == 1
    assert formula_from_model(model) == f
    assert Atom("ab") == Atom(("a", "b"))


def test_verdict_model(a_ba, b_ab, even_a, odd_a):
    sep = verdict_model(mod_separate_fixed(2, a_ba, b_ab))
    assert sep.verdict == "separable"
    assert sep.formula_text == "↑a"
    assert sep.d_used == 2
    assert sep.separator.alphabet == ["a", "b"]
    insep = verdict_model(ptl_separate(Subword(A), even_a, odd_a))
    assert insep.verdict == "inseparable"
    assert insep.certificate == "(a)*"
    assert insep.formula is None
