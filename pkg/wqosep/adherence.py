"""
Adherence membership and association.

An ideal I lies in the adherence of L iff I ⊆ ↓(L ∩ I). Both routes are
available: the counter automaton of I, unbounded on L exactly when I adheres,
and the direct inclusion through the closure engine.

The counter automaton of a subword ideal A₁⋯Aₙ reads a word of I and guesses
an embedding of the representative a₁ γ₁^k a₂ ⋯ into it, where γᵢ lists the
letters of a star atom; every star atom owns a counter that grows by one per
completed copy of γᵢ. Loop patterns reduce to this over the run alphabet of
their host automaton, transduction ideals compose with the transducer and
conjunction ideals take the product.
"""
from __future__ import annotations

import itertools
import logging
from typing import Optional, Sequence

from .automata import (
    EPSILON,
    CounterAutomaton,
    CounterEdge,
    LabelingAutomaton,
    Nfa,
    apply_transducer,
    compose_counter,
    concat,
    counter_concat,
    counter_product,
    counter_restrict,
    includes,
    intersect,
    intersect_all,
    is_empty,
    nfa_to_counter,
    rename_counters,
    sorted_letters,
    star,
    trim,
    union,
    empty_language,
    word_nfa,
)
from .closures import downward_closure
from .counters import counter_unbounded
from .errors import AlphabetMismatchError, InvalidIdealError, PreconditionError, UnsupportedOrderError
from .ideals import (
    ConjIdeal,
    OptLetter,
    Star,
    SubwordIdeal,
    TransductionIdeal,
    check_ideal,
    enumerate_ideals,
    ideal_decompose,
    ideal_size,
    ideal_text,
    ideal_to_nfa,
)
from .orders import Conjunction, Labeling, Mod, OrderSpec, Subword, ViaTransduction, describe_order, upward_closure_word
from .patterns import AnyPattern, ExtLoopPattern, LoopPattern, kappa, profile_nfa, rotate

logger = logging.getLogger(__name__)


# ── Counter automata of ideals ────────────────────────────────────────────────

def embedding_matcher(atoms: Sequence, alphabet) -> CounterAutomaton:
    """Guess an embedding of a₁ γ₁^k ⋯ into the input; one counter per star atom."""
    letters = sorted_letters(alphabet)
    stars = [j for j, atom in enumerate(atoms) if isinstance(atom, Star)]
    counters = [f"star{j}" for j in stars]
    zero = (0,) * len(counters)

    def bump(j):
        inc = [0] * len(counters)
        inc[stars.index(j)] = 1
        return tuple(inc)

    states = set()
    edges = []

    def skip(state):
        states.add(state)
        edges.extend(CounterEdge(state, x, zero, state) for x in letters)

    for j, atom in enumerate(atoms):
        if isinstance(atom, OptLetter):
            skip((j, 0))
            edges.append(CounterEdge((j, 0), atom.letter, zero, (j + 1, 0)))
            continue
        rep = sorted_letters(atom.letters)
        for p, x in enumerate(rep):
            skip((j, p))
            nxt = (p + 1) % len(rep)
            edges.append(CounterEdge((j, p), x, bump(j) if nxt == 0 else zero, (j, nxt)))
        edges.append(CounterEdge((j, 0), EPSILON, zero, (j + 1, 0)))
    end = (len(atoms), 0)
    skip(end)
    return CounterAutomaton(states, alphabet, counters, edges, {(0, 0)}, {end})


def _run_from(a: LabelingAutomaton, q, word) -> tuple:
    run = []
    for x in word:
        r = a.delta[q, x]
        run.append((q, x, r))
        q = r
    return tuple(run), q


def pattern_run_ideal(p: AnyPattern) -> tuple:
    """Subword ideal over edge ids covering the runs of p's words, and p's end state."""
    if isinstance(p, ExtLoopPattern):
        p = p.as_loop_pattern()
    a = p.automaton
    q = a.initial
    atoms = []
    for i, u in enumerate(p.connectors):
        run, q = _run_from(a, q, u)
        atoms.extend(OptLetter(e) for e in run)
        if i < len(p.loops):
            run, _ = _run_from(a, q, p.loops[i])
            atoms.append(Star(run))
    return SubwordIdeal(atoms, a.edge_ids), q


def _pattern_ca(p: AnyPattern) -> CounterAutomaton:
    runs, end = pattern_run_ideal(p)
    a = p.automaton
    on_runs = compose_counter(embedding_matcher(runs.atoms, a.edge_ids), a)
    same_sigma = Nfa(a.states, a.alphabet, a.edge_ids, {a.initial}, {end})
    return counter_restrict(on_runs, same_sigma)


def _component_ca(o: OrderSpec, i) -> CounterAutomaton:
    if isinstance(i, SubwordIdeal):
        return embedding_matcher(i.atoms, i.alphabet)
    if isinstance(i, (LoopPattern, ExtLoopPattern)):
        return _pattern_ca(i)
    if isinstance(i, TransductionIdeal):
        return compose_counter(_component_ca(o.inner, i.inner), o.transducer)
    if isinstance(i, ConjIdeal):
        return _tuple_ca(o, i.parts)
    raise UnsupportedOrderError(f"no counter automaton for {type(i).__name__}")


def _tuple_ca(o: Conjunction, parts: Sequence) -> CounterAutomaton:
    cas = [rename_counters(_component_ca(p, i), f"c{s}.") for s, (p, i) in enumerate(zip(o.parts, parts))]
    product = cas[0]
    for ca in cas[1:]:
        product = counter_product(product, ca)
    return product


def build_adherence_ca(o: OrderSpec, i) -> CounterAutomaton:
    """Counter automaton unbounded on L exactly when I belongs to the adherence of L."""
    check_ideal(o, i)
    return counter_restrict(_component_ca(o, i), ideal_to_nfa(o, i))


def tuple_adherent(o: Conjunction, parts: Sequence, l: Nfa) -> bool:
    """Whether the component ideals are jointly adherent to L, each component under its own order."""
    inter = intersect_all(o.alphabet, [ideal_to_nfa(p, i) for p, i in zip(o.parts, parts)])
    ca = counter_restrict(_tuple_ca(o, parts), inter)
    return bool(counter_unbounded(ca, restrict=l))


# ── Membership ────────────────────────────────────────────────────────────────

def adherence_member_by_closure(o: OrderSpec, i, l: Nfa) -> bool:
    ideal = ideal_to_nfa(o, i)
    return includes(downward_closure(o, trim(intersect(l, ideal))), ideal)


def adherence_member(o: OrderSpec, i, l: Nfa, route: str = "counter") -> bool:
    if l.alphabet != o.alphabet:
        raise AlphabetMismatchError(l.alphabet, o.alphabet)
    if route == "closure":
        return adherence_member_by_closure(o, i, l)
    if route != "counter":
        raise PreconditionError("route", f"expected 'counter' or 'closure', got {route!r}")
    result = counter_unbounded(build_adherence_ca(o, i), restrict=l)
    if result and logger.isEnabledFor(logging.DEBUG):
        logger.debug("adherence witness word for k=2: %r", result.witness.word(2))
    return bool(result)


# ── Association ───────────────────────────────────────────────────────────────

def _loop_segment(d: int, v: tuple, r: int, alphabet, name: str) -> CounterAutomaton:
    """Words v̄ ∈ ↓_d v^[r] into which v^k w embeds residue-wise; ``name`` counts k."""
    letters = sorted_letters(alphabet)
    w = v[:r]
    states = set()
    edges = []
    for c in range(d):
        for j in range(len(v)):
            states.add(("v", j, c))
            edges.extend(CounterEdge(("v", j, c), x, (0,), ("v", j, (c + 1) % d)) for x in letters)
            if j % d == c:
                nxt = (j + 1) % len(v)
                edges.append(CounterEdge(("v", j, c), v[j], (1 if nxt == 0 else 0,), ("v", nxt, (c + 1) % d)))
        edges.append(CounterEdge(("v", 0, c), EPSILON, (0,), ("w", 0, c)))
        for t in range(len(w) + 1):
            states.add(("w", t, c))
            edges.extend(CounterEdge(("w", t, c), x, (0,), ("w", t, (c + 1) % d)) for x in letters)
            if t < len(w) and t % d == c:
                edges.append(CounterEdge(("w", t, c), w[t], (0,), ("w", t + 1, (c + 1) % d)))
    matcher = CounterAutomaton(states, alphabet, [name], edges, {("v", 0, 0)}, {("w", len(w), r % d)})
    return counter_restrict(matcher, profile_nfa(kappa(d, v), r, alphabet))


def _plain_connectors(p: LoopPattern) -> list:
    o = Mod(p.d, p.alphabet)
    alphabet = p.alphabet
    u, v = p.connectors, p.loops
    n = len(v)
    if n == 0:
        return [word_nfa(alphabet, u[0])]
    out = []
    for i in range(n + 1):
        parts = []
        if i > 0:
            parts.append(star(word_nfa(alphabet, v[i - 1])))
        parts.append(word_nfa(alphabet, u[i]))
        if i < n:
            parts.append(star(word_nfa(alphabet, v[i])))
        segment = downward_closure(o, concat(*parts))
        out.append(trim(intersect(upward_closure_word(o, u[i]), segment)))
    return out


def _extended_connectors(p: ExtLoopPattern) -> list:
    o = Mod(p.d, p.alphabet)
    alphabet = p.alphabet
    u, v, r = p.connectors, p.loops, p.residues
    n = len(v)
    out = []
    for i in range(n + 1):
        if u[i] or i in (0, n):
            out.append(word_nfa(alphabet, u[i]))
            continue
        tail = star(word_nfa(alphabet, rotate(v[i - 1], "left", r[i - 1])))
        out.append(downward_closure(o, concat(tail, star(word_nfa(alphabet, v[i])))))
    return out


def association_ca(p: AnyPattern) -> CounterAutomaton:
    if p.d is None:
        raise PreconditionError("M_d pattern", "association is defined for patterns over M_d")
    if isinstance(p, ExtLoopPattern):
        connectors = _extended_connectors(p)
        residues = p.residues
    else:
        connectors = _plain_connectors(p)
        residues = (0,) * len(p.loops)
    parts = [nfa_to_counter(connectors[0])]
    for i, v in enumerate(p.loops):
        parts.append(_loop_segment(p.d, v, residues[i], p.alphabet, f"loop{i + 1}"))
        parts.append(nfa_to_counter(connectors[i + 1]))
    return counter_concat(parts)


def association_check(p: AnyPattern, l: Nfa) -> bool:
    """Whether for every k some ū₀v̄₁ū₁⋯v̄ₙūₙ ∈ L has vᵢ^k embedded in every v̄ᵢ."""
    if l.alphabet != p.alphabet:
        raise AlphabetMismatchError(l.alphabet, p.alphabet)
    return bool(counter_unbounded(association_ca(p), restrict=l))


# ── Conjunction closures ──────────────────────────────────────────────────────

def component_candidates(p: OrderSpec, langs: Sequence[Nfa], budget: int, extra: bool) -> list:
    """Component ideals inside the common downward closure of ``langs`` under p."""
    if isinstance(p, (Subword, Mod, Labeling)):
        closure = intersect_all(p.alphabet, [downward_closure(p, l) for l in langs])
        found = ideal_decompose(p, closure, check_bound=0)
        if extra:
            found += [i for i in enumerate_ideals(p, budget) if includes(closure, ideal_to_nfa(p, i))]
        return list(dict.fromkeys(found))
    if isinstance(p, ViaTransduction):
        out = []
        images = [apply_transducer(p.transducer, l) for l in langs]
        for j in component_candidates(p.inner, images, budget, extra):
            try:
                out.append(TransductionIdeal.build(p, j))
            except InvalidIdealError:
                continue
        return out
    raise UnsupportedOrderError(f"{describe_order(p)} has no ideal representation inside a conjunction")


def conjunction_downward_closure(o: Conjunction, l: Nfa, budget: int) -> Optional[Nfa]:
    """↓L as a union of jointly adherent tuples of component ideals, or None when the budget runs out.

    Every adherent tuple's intersection lies in ↓L and is downward closed, so
    a union of them containing L is ↓L.
    """
    l = trim(l)
    if is_empty(l):
        return empty_language(o.alphabet)
    for extra in (False, True):
        pools = [component_candidates(p, [l], budget, extra) for p in o.parts]
        combos = sorted(itertools.product(*pools), key=lambda c: (sum(map(ideal_size, c)), [ideal_text(i) for i in c]))
        covered = empty_language(o.alphabet)
        for parts in combos:
            inter = intersect_all(o.alphabet, [ideal_to_nfa(p, i) for p, i in zip(o.parts, parts)])
            if is_empty(inter) or includes(covered, inter):
                continue
            if not tuple_adherent(o, parts, l):
                continue
            covered = trim(union(covered, inter))
            if includes(covered, l):
                logger.debug("conjunction closure from %d candidate tuples", len(combos))
                return covered
        logger.info("conjunction closure not covered by %s candidates", "enumerated" if extra else "decomposed")
    return None
