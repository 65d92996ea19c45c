import random

import pytest
from hypothesis import given, settings, strategies as st

from wqosep.automata import (
    CountingAutomaton,
    LabelingAutomaton,
    Nfa,
    accepts,
    apply_transducer,
    build_md,
    build_pk,
    check_one_run,
    complement,
    counting_eval,
    determinize,
    equivalent,
    from_words,
    includes,
    intersect,
    inverse_apply_transducer,
    is_empty,
    labeling_run,
    projection,
    regular_algebra,
    shortest_word,
    union,
    word_nfa,
)
from wqosep.errors import AlphabetMismatchError, AutomatonFormatError, DeterminizationLimitError, PreconditionError
from wqosep.oracles import count_occurrences, enum_words

from conftest import chain, random_nfa

words = st.text(alphabet="ab", max_size=7)


def test_nfa_rejects_foreign_labels():
    with pytest.raises(AutomatonFormatError):
        Nfa({0}, "a", {(0, "b", 0)}, {0}, {0})


def test_nfa_rejects_empty_alphabet():
    with pytest.raises(AutomatonFormatError):
        Nfa({0}, "", set(), {0}, {0})


def test_accepts_with_epsilon_edges():
    a = Nfa({0, 1, 2}, "ab", {(0, "", 1), (1, "a", 2), (2, "", 0)}, {0}, {2})
    assert accepts(a, "a")
    assert accepts(a, "aaa")
    assert not accepts(a, "")
    assert not accepts(a, "b")


def test_shortest_word(a_abba):
    assert shortest_word(a_abba) == ("a",)
    assert shortest_word(intersect(a_abba, chain("ab", "", "abba"))) is None


def test_union_requires_same_alphabet(even_a, a_abba):
    with pytest.raises(AlphabetMismatchError):
        union(even_a, a_abba)


def test_determinize_cap(a_abba):
    with pytest.raises(DeterminizationLimitError) as info:
        determinize(a_abba, cap=2)
    assert info.value.cap == 2


@settings(derandomize=True, max_examples=80)
@given(words)
def test_complement_flips_membership(w):
    a = chain("ab", "a", "ba")
    assert accepts(complement(a), w) != accepts(a, w)


def test_inclusion_and_equivalence(abba_star, aa_abba):
    assert includes(aa_abba, abba_star)
    assert not includes(abba_star, aa_abba)
    assert equivalent(abba_star, from_words("ab", ["", "abba", "abbaabba"])) is False
    assert equivalent(union(abba_star, abba_star), abba_star)


def test_regular_algebra_dispatch(abba_star, a_abba):
    assert regular_algebra("is_empty", regular_algebra("intersect", abba_star, a_abba))
    assert regular_algebra("includes", regular_algebra("union", abba_star, a_abba), a_abba)
    with pytest.raises(PreconditionError):
        regular_algebra("shuffle", abba_star, a_abba)
    with pytest.raises(PreconditionError):
        regular_algebra("difference", abba_star)


def test_enum_words_examples():
    assert set(enum_words(chain("ab", "", "ab"), 4).words) == {(), tuple("ab"), tuple("abab")}
    assert set(enum_words(Nfa({0}, "ab", set(), {0}, set()), 5).words) == set()
    a_star_b = Nfa({0, 1}, "ab", {(0, "a", 0), (0, "b", 1)}, {0}, {1})
    assert set(enum_words(a_star_b, 3).words) == {("b",), tuple("ab"), tuple("aab")}


def test_projection_roundtrip():
    rng = random.Random(7)
    f = projection("abc", "ab")
    for _ in range(20):
        l = random_nfa(rng, alphabet="abc", max_states=3)
        image = apply_transducer(f, l)
        assert includes(inverse_apply_transducer(f, image), l)


def test_apply_transducer_on_word():
    f = projection("abc", "ac")
    image = apply_transducer(f, word_nfa("abc", "abcb"))
    assert accepts(image, "ac")
    assert not accepts(image, "abc")


def test_labeling_run_of_md():
    a = build_md(3, "ab")
    run, sigma = labeling_run(a, "abab")
    assert [e[1] for e in run] == list("abab")
    assert sigma == ("s0", "s1")


def test_check_one_run():
    assert check_one_run(build_md(2, "ab").nfa)
    ambiguous = Nfa({0, 1}, "a", {(0, "a", 0), (0, "a", 1), (1, "a", 1)}, {0}, {0, 1})
    assert not check_one_run(ambiguous)
    partial = Nfa({0}, "ab", {(0, "a", 0)}, {0}, {0})
    assert not check_one_run(partial)


def test_labeling_from_nfa_rejects_nondeterminism():
    nfa = Nfa({0, 1}, "a", {(0, "a", 0), (0, "a", 1), (1, "a", 1)}, {0}, {0, 1})
    with pytest.raises(AutomatonFormatError):
        LabelingAutomaton.from_nfa(nfa)


@settings(derandomize=True, max_examples=100)
@given(words)
def test_pk_occurrence_counts(w):
    pk = build_pk(2, "ab")
    values = dict(zip(pk.counters, counting_eval(pk, w)))
    for u in ["", "a", "b", "ab", "ba", "aa", "bb"]:
        assert values[f"occ:{u}"] == count_occurrences(w, u)
        assert values[f"pre:{u}"] == int(w.startswith(u))
        assert values[f"suf:{u}"] == int(w.endswith(u))


def test_counting_automaton_must_be_complete():
    with pytest.raises(AutomatonFormatError):
        CountingAutomaton({0}, "ab", ["c"], 0, {(0, "a"): (0, (1,))}, {})


def test_is_empty_after_intersection(even_a, odd_a):
    assert is_empty(intersect(even_a, odd_a))
