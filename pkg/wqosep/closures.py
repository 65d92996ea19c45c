"""
Downward and upward closures of regular languages.

Labeling orders are handled per end state q: the words of L whose run ends in
q are mapped to their runs, the run language is closed under the subword
order, cut back to runs of the automaton from its initial state to q and
projected to letters.
"""
import logging
from typing import Optional

from . import config
from .automata import (
    EPSILON,
    Nfa,
    apply_transducer,
    includes,
    intersect,
    inverse_apply_transducer,
    letters_star,
    concat,
    map_letters,
    sort_key,
    trim,
    union_all,
)
from .errors import AlphabetMismatchError, InconclusiveError, PreconditionError, UnsupportedOrderError
from .orders import Conjunction, Labeling, Mod, OrderSpec, Subword, ViaTransduction, describe_order, labeling_automaton

logger = logging.getLogger(__name__)


# ── Subword ───────────────────────────────────────────────────────────────────

def subword_downward(l: Nfa) -> Nfa:
    """Every letter edge gets an ε twin."""
    edges = set(l.edges) | {(p, EPSILON, q) for p, a, q in l.edges if a != EPSILON}
    return trim(Nfa(l.states, l.alphabet, edges, l.initial, l.final))


def subword_upward(l: Nfa) -> Nfa:
    """Every state gets a self-loop on every letter."""
    edges = set(l.edges) | {(q, a, q) for q in l.states for a in l.alphabet}
    return trim(Nfa(l.states, l.alphabet, edges, l.initial, l.final))


# ── Labeling orders ───────────────────────────────────────────────────────────

def _labeling_closure(o: OrderSpec, l: Nfa, close) -> Nfa:
    a = labeling_automaton(o)
    parts = []
    for q in sorted(a.states, key=sort_key):
        ending_in_q = Nfa(a.states, a.alphabet, a.nfa.edges, {a.initial}, {q})
        lq = trim(intersect(l, ending_in_q))
        if not lq.final:
            continue
        runs = close(apply_transducer(a, lq))
        runs = trim(intersect(runs, a.runs_between(a.initial, q)))
        parts.append(map_letters(runs, lambda e: (e[1],), a.alphabet))
    return trim(union_all(a.alphabet, parts))


# ── Entry points ──────────────────────────────────────────────────────────────

def downward_closure(o: OrderSpec, l: Nfa, budget: Optional[int] = None) -> Nfa:
    """Automaton for ↓_o L(l).

    Conjunctions go through the budgeted ideal search and raise
    ``InconclusiveError`` when no covering union of adherent ideals is found.
    """
    if l.alphabet != o.alphabet:
        raise AlphabetMismatchError(l.alphabet, o.alphabet)
    if isinstance(o, Subword):
        return subword_downward(l)
    if isinstance(o, (Mod, Labeling)):
        return _labeling_closure(o, l, subword_downward)
    if isinstance(o, ViaTransduction):
        image = apply_transducer(o.transducer, l)
        return trim(inverse_apply_transducer(o.transducer, downward_closure(o.inner, image, budget)))
    if isinstance(o, Conjunction):
        from .adherence import conjunction_downward_closure

        budget = config.DEFAULT_BUDGET if budget is None else budget
        result = conjunction_downward_closure(o, l, budget)
        if result is None:
            raise InconclusiveError(budget, f"no covering union of adherent ideals for {describe_order(o)}")
        return result
    raise UnsupportedOrderError(f"downward closures are not available for {describe_order(o)}")


def upward_closure(o: OrderSpec, l: Nfa) -> Nfa:
    """Automaton for ↑_o L(l)."""
    if isinstance(o, Subword):
        return subword_upward(l)
    if isinstance(o, (Mod, Labeling)):
        return _labeling_closure(o, l, subword_upward)
    if isinstance(o, ViaTransduction):
        image = apply_transducer(o.transducer, l)
        return trim(inverse_apply_transducer(o.transducer, upward_closure(o.inner, image)))
    raise UnsupportedOrderError(f"language upward closures are not available for {describe_order(o)}")


def sup_decide(l: Nfa, letters) -> bool:
    """Decide a₁*⋯aₙ* ⊆ ↓L for L ⊆ a₁*⋯aₙ*."""
    letters = list(letters)
    if not letters:
        raise PreconditionError("letters", "at least one letter is needed")
    frame = concat(*(letters_star(l.alphabet, [a]) for a in letters))
    if not includes(frame, l):
        raise PreconditionError("L ⊆ a₁*⋯aₙ*", "the language leaves the bounded frame")
    return includes(subword_downward(l), frame)
