import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from wqosep.automata import LabelingAutomaton, accepts, build_md, build_pk, equivalent, projection
from wqosep.errors import AlphabetMismatchError, OrderSyntaxError
from wqosep.orders import (
    Conjunction,
    Counting,
    Labeling,
    Mod,
    Morphism,
    Subword,
    ViaTransduction,
    conjunction,
    cyclic_group,
    describe_order,
    labeling_leq,
    mod_leq,
    morphism_leq,
    order_leq,
    parse_order,
    subword_leq,
    upward_closure_word,
)
from wqosep.oracles import mod_oracle, subword_dp_oracle

AB = frozenset("ab")
words = st.text(alphabet="ab", max_size=7)


def all_words(max_len):
    for n in range(max_len + 1):
        for w in itertools.product("ab", repeat=n):
            yield w


def test_subword_agrees_with_dp_table():
    pool = list(all_words(8))
    mismatches = [(u, v) for u in pool for v in pool if subword_leq(u, v) != subword_dp_oracle(u, v)]
    assert mismatches == []


@pytest.mark.parametrize("u, v, expected", [
    ("ab", "abab", True),
    ("ab", "aab", False),
    ("ab", "abb", False),
    ("ba", "baab", True),
    ("", "aa", True),
    ("", "a", False),
])
def test_mod_two_examples(u, v, expected):
    assert order_leq(Mod(2, AB), u, v) is expected


@settings(derandomize=True, max_examples=200)
@given(words, words, st.integers(min_value=1, max_value=3))
def test_mod_leq_agrees_with_exhaustive_search(u, v, d):
    assert mod_leq(d, u, v) == mod_oracle(d, u, v)


@settings(derandomize=True, max_examples=150)
@given(words, words)
def test_labeling_order_is_same_sigma_and_run_embedding(u, v):
    a = build_md(2, AB)
    expected = order_leq(Mod(2, AB), u, v)
    assert labeling_leq(a, u, v) == expected
    assert order_leq(Labeling(a), u, v) == expected


@settings(derandomize=True, max_examples=150)
@given(st.text(alphabet="abc", max_size=6), st.text(alphabet="abc", max_size=6))
def test_via_transduction_compares_images(u, v):
    f = projection("abc", "ab")
    o = ViaTransduction(f, Subword(AB))
    assert order_leq(o, u, v) == subword_leq(f(u), f(v))


@settings(derandomize=True, max_examples=150)
@given(words, words)
def test_conjunction_is_pointwise(u, v):
    o = conjunction(Subword(AB), Mod(3, AB))
    assert order_leq(o, u, v) == (subword_leq(u, v) and mod_leq(3, u, v))


def test_conjunction_flattens_and_dedups():
    o = conjunction(Subword(AB), Conjunction((Subword(AB), Mod(2, AB))))
    assert isinstance(o, Conjunction)
    assert o.parts == (Subword(AB), Mod(2, AB))
    assert conjunction(Mod(2, AB), Mod(2, AB)) == Mod(2, AB)


def test_counting_order_compares_counter_values():
    o = Counting(build_pk(1, AB))
    assert order_leq(o, "ab", "aabb")
    assert not order_leq(o, "ab", "ba")


@settings(derandomize=True, max_examples=100)
@given(words, words)
def test_morphism_order_over_cyclic_group(u, v):
    o = Morphism(cyclic_group(2), {"a": "1", "b": "0"})
    if order_leq(o, u, v):
        assert subword_leq(u, v)
        assert u.count("a") % 2 == v.count("a") % 2


@pytest.mark.parametrize("u, v, expected", [("a", "aaa", True), ("a", "aa", False), ("aa", "aa", True)])
def test_morphism_leq_into_z2(u, v, expected):
    assert morphism_leq(cyclic_group(2), {"a": "1"}, u, v) is expected


def test_trivial_monoid_gives_the_subword_order():
    theta = {"a": "0", "b": "0"}
    pool = list(all_words(5))
    for u in pool:
        for v in pool:
            assert morphism_leq(cyclic_group(1), theta, u, v) == subword_leq(u, v)


@settings(derandomize=True, max_examples=100)
@given(words, words)
def test_upward_closure_word_membership(u, v):
    for o in (Subword(AB), Mod(2, AB), Counting(build_pk(1, AB))):
        assert accepts(upward_closure_word(o, u), v) == order_leq(o, u, v)


def test_foreign_letters_are_rejected():
    with pytest.raises(AlphabetMismatchError):
        order_leq(Subword(AB), "ac", "abc")


def test_parse_order_builtins():
    assert parse_order("subword", "ab") == Subword(AB)
    assert parse_order("mod:3", "ab") == Mod(3, AB)
    assert isinstance(parse_order("ltt:2", "ab"), Counting)
    assert parse_order("conj(subword,mod:2)", "ab") == Conjunction((Subword(AB), Mod(2, AB)))


@pytest.mark.parametrize("text", ["mod:0", "mod:x", "shuffle", "subword)", "conj(subword"])
def test_parse_order_rejects_malformed(text):
    with pytest.raises(OrderSyntaxError):
        parse_order(text, "ab")


def test_parse_order_reads_files(tmp_path):
    (tmp_path / "m2.aut").write_text(
        "alphabet a b\nstates s t\ninitial s\nfinal s t\ns a t\ns b t\nt a s\nt b s\n", encoding="utf-8"
    )
    transducer = {
        "states": ["q"], "input_alphabet": ["a", "b", "c"], "output_alphabet": ["a", "b"], "initial": "q",
        "edges": [{"from": "q", "label": x, "to": "q", "output": "" if x == "c" else x} for x in "abc"],
    }
    (tmp_path / "drop_c.json").write_text(json.dumps(transducer), encoding="utf-8")
    labeling = parse_order("labeling:m2.aut", "ab", base_dir=tmp_path)
    assert isinstance(labeling, Labeling)
    assert order_leq(labeling, "ab", "abab") and not order_leq(labeling, "ab", "aab")
    via = parse_order("via:drop_c.json>mod:2", "abc", base_dir=tmp_path)
    assert isinstance(via, ViaTransduction)
    assert order_leq(via, "ab", "cacbc")
    assert describe_order(via) == "via[1 states]>mod:2"


def test_labeling_automaton_from_counting_order():
    pk = build_pk(1, AB)
    assert isinstance(pk.labeling, LabelingAutomaton)


ORDERS = [
    Subword(AB),
    Mod(2, AB),
    Labeling(build_md(3, AB)),
    conjunction(Subword(AB), Mod(3, AB)),
    Counting(build_pk(1, AB)),
    Morphism(cyclic_group(2), {"a": "1", "b": "0"}),
]


@settings(derandomize=True, max_examples=120)
@given(st.text(alphabet="ab", max_size=6), st.text(alphabet="ab", max_size=6), st.text(alphabet="ab", max_size=6))
def test_orders_are_reflexive_and_transitive(u, v, w):
    for o in ORDERS:
        assert order_leq(o, u, u)
        if order_leq(o, u, v) and order_leq(o, v, w):
            assert order_leq(o, u, w)


@settings(derandomize=True, max_examples=150)
@given(words, words, st.integers(min_value=1, max_value=3))
def test_mod_refines_subword(u, v, d):
    if mod_leq(d, u, v):
        assert subword_leq(u, v)
        assert (len(v) - len(u)) % d == 0


@pytest.mark.parametrize("w", ["", "a", "ab", "bba"])
def test_conjunction_with_subword_keeps_mod_closure(w):
    o = conjunction(Mod(2, AB), Subword(AB))
    assert equivalent(upward_closure_word(o, w), upward_closure_word(Mod(2, AB), w))


def test_mod_two_upward_closure_of_empty_word_is_even_words():
    up = upward_closure_word(Mod(2, AB), "")
    assert all(accepts(up, w) == (len(w) % 2 == 0) for w in all_words(6))
