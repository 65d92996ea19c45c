"""
Brute-force reference implementations used by the test suite.

Nothing here calls the closure, order or counter engines: the oracles read
the raw automaton data and search explicitly, so they can be compared with
the engines on small instances.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .automata import EPSILON, CounterAutomaton, Nfa
from .errors import UnsupportedOrderError


@dataclass(frozen=True)
class BoundedLanguage:
    """The words of a language up to a length bound."""

    alphabet: frozenset
    bound: int
    words: frozenset

    def __contains__(self, w) -> bool:
        return tuple(w) in self.words

    def __len__(self) -> int:
        return len(self.words)


def _closure(nfa: Nfa, states) -> frozenset:
    seen = set(states)
    stack = list(states)
    while stack:
        p = stack.pop()
        for src, label, dst in nfa.edges:
            if src == p and label == EPSILON and dst not in seen:
                seen.add(dst)
                stack.append(dst)
    return frozenset(seen)


def _move(nfa: Nfa, states: frozenset, x) -> frozenset:
    return _closure(nfa, {dst for src, label, dst in nfa.edges if src in states and label == x})


def _letters(alphabet) -> list:
    return sorted(alphabet, key=str)


def enum_words(nfa: Nfa, bound: int) -> BoundedLanguage:
    """Every accepted word of length ≤ bound, by unrolling the subset construction."""
    words = set()
    layer = {(): _closure(nfa, nfa.initial)}
    for n in range(bound + 1):
        words |= {w for w, s in layer.items() if s & nfa.final}
        if n == bound:
            break
        layer = {w + (x,): _move(nfa, s, x) for w, s in layer.items() for x in _letters(nfa.alphabet)}
        layer = {w: s for w, s in layer.items() if s}
    return BoundedLanguage(frozenset(nfa.alphabet), bound, frozenset(words))


def all_words(alphabet, bound: int) -> list:
    out = [()]
    layer = [()]
    for _ in range(bound):
        layer = [w + (x,) for w in layer for x in _letters(alphabet)]
        out += layer
    return out


# ── Orders ────────────────────────────────────────────────────────────────────

def subword_dp_oracle(u: Sequence, v: Sequence) -> bool:
    """u is a scattered subword of v, by the quadratic longest-common-subsequence table."""
    u, v = tuple(u), tuple(v)
    table = [[0] * (len(v) + 1) for _ in range(len(u) + 1)]
    for i in range(1, len(u) + 1):
        for j in range(1, len(v) + 1):
            if u[i - 1] == v[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(u)][len(v)] == len(u)


def mod_oracle(d: int, u: Sequence, v: Sequence) -> bool:
    """v arises from u by inserting blocks whose lengths are multiples of d (exhaustive)."""
    u, v = tuple(u), tuple(v)
    memo: dict = {}

    def fits(i: int, j: int) -> bool:
        if (i, j) not in memo:
            if i == len(u):
                memo[i, j] = (len(v) - j) % d == 0
            else:
                memo[i, j] = any(
                    v[k] == u[i] and fits(i + 1, k + 1) for k in range(j, len(v), d)
                )
        return memo[i, j]

    return fits(0, 0)


def _modulus(order) -> int:
    kind = type(order).__name__
    if kind == "Subword":
        return 1
    if kind == "Mod":
        return order.d
    raise UnsupportedOrderError(f"the closure oracle handles subword and mod orders, not {kind}")


def _embeds_into_language(nfa: Nfa, w: tuple, d: int, limit: int) -> bool:
    """Some v ∈ L with |v| ≤ limit and w ⊑_d v, by search over (state, matched, gap mod d)."""
    start = [(q, 0, 0) for q in _closure(nfa, nfa.initial)]
    seen = set(start)
    queue = deque((c, 0) for c in start)
    while queue:
        (q, i, c), n = queue.popleft()
        if q in nfa.final and i == len(w) and c == 0:
            return True
        for src, label, dst in nfa.edges:
            if src != q:
                continue
            if label == EPSILON:
                if (dst, i, c) not in seen:
                    seen.add((dst, i, c))
                    queue.appendleft(((dst, i, c), n))
                continue
            if n >= limit:
                continue
            moves = [(dst, i, (c + 1) % d)]
            if c == 0 and i < len(w) and w[i] == label:
                moves.append((dst, i + 1, 0))
            for conf in moves:
                if conf not in seen:
                    seen.add(conf)
                    queue.append((conf, n + 1))
    return False


def dcl_oracle(order, nfa: Nfa, bound: int) -> BoundedLanguage:
    """{w : |w| ≤ bound, w ⪯ v for some v ∈ L with |v| ≤ bound + (bound + 1)·|Q|·d}.

    A shortest such v reads w plus gaps; between two matched letters a gap
    longer than |Q|·d repeats a (state, residue) pair and can be shortened,
    hence the length bound.
    """
    d = _modulus(order)
    limit = bound + (bound + 1) * len(nfa.states) * d
    words = {w for w in all_words(nfa.alphabet, bound) if _embeds_into_language(nfa, w, d, limit)}
    return BoundedLanguage(frozenset(nfa.alphabet), bound, frozenset(words))


def count_occurrences(w: Sequence, u: Sequence) -> int:
    """Occurrences of u as a factor of w by a sliding window; ε occurs |w| + 1 times."""
    w, u = tuple(w), tuple(u)
    return sum(1 for i in range(len(w) - len(u) + 1) if w[i:i + len(u)] == u)


# ── Counters ──────────────────────────────────────────────────────────────────

def unbounded_oracle(ca: CounterAutomaton, length_cap: Optional[int], k: int) -> bool:
    """Whether some accepting run of at most ``length_cap`` edges has every counter ≥ k.

    Counter values are capped at k, so the search space is finite and
    ``length_cap=None`` searches without a length limit. On a bounded
    automaton every run keeps some counter at most (|Q| − 1)·max increment,
    so k above that separates bounded from unbounded instances.
    """
    zero = (0,) * len(ca.counters)
    target = (k,) * len(ca.counters)
    start = [(q, zero) for q in ca.initial]
    seen = set(start)
    queue = deque((c, 0) for c in start)
    while queue:
        (q, vec), n = queue.popleft()
        if q in ca.final and vec == target:
            return True
        if length_cap is not None and n >= length_cap:
            continue
        for e in ca.edges:
            if e.source != q:
                continue
            conf = (e.target, tuple(min(k, x + y) for x, y in zip(vec, e.increment)))
            if conf not in seen:
                seen.add(conf)
                queue.append((conf, n + 1))
    return False
