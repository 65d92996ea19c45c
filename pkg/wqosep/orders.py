"""
Parameterized well-quasi-orderings on words and the comparison predicate.

Orders are immutable values built from the three composition rules (base
subword order, pull-back along a sequential transducer, conjunction) plus the
derived families: labeling-automaton orders, the modular orders of ``M_d``,
counting-automaton orders and morphism orders over a finite monoid.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .automata import (
    CountingAutomaton,
    LabelingAutomaton,
    Nfa,
    SequentialTransducer,
    as_word,
    build_md,
    build_pk,
    counting_eval,
    intersect_all,
    inverse_apply_transducer,
    labeling_run,
    sorted_letters,
    trim,
)
from .errors import (
    AlphabetMismatchError,
    AutomatonFormatError,
    OrderSyntaxError,
    UnsupportedOrderError,
)
from .patterns import d_embedding

logger = logging.getLogger(__name__)


# ── Monoids ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class FiniteMonoid:
    elements: tuple
    table: Mapping = field(hash=False)
    identity: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        elements = set(self.elements)
        if self.identity not in elements:
            raise AutomatonFormatError(f"identity {self.identity!r} is not an element")
        for x in self.elements:
            for y in self.elements:
                if self.table.get((x, y)) not in elements:
                    raise AutomatonFormatError(f"product {x!r}·{y!r} is undefined or outside the monoid")
            if self.table[self.identity, x] != x or self.table[x, self.identity] != x:
                raise AutomatonFormatError(f"{self.identity!r} is not an identity for {x!r}")
        for x in self.elements:
            for y in self.elements:
                for z in self.elements:
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)):
                        raise AutomatonFormatError(f"table is not associative on ({x!r}, {y!r}, {z!r})")

    def mul(self, x, y):
        return self.table[x, y]

    def image(self, theta: Mapping, word: Sequence) -> str:
        out = self.identity
        for a in word:
            out = self.mul(out, theta[a])
        return out


def cyclic_group(n: int) -> FiniteMonoid:
    """ℤ/nℤ with elements named ``"0"`` .. ``"n-1"``."""
    names = [str(i) for i in range(n)]
    table = {(str(i), str(j)): str((i + j) % n) for i in range(n) for j in range(n)}
    return FiniteMonoid(names, table, "0")


# ── Order specifications ──────────────────────────────────────────────────────

@dataclass(frozen=True)
class Subword:
    alphabet: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))


@dataclass(frozen=True)
class Mod:
    """The order of the d-cycle M_d: insertions of blocks whose length is a multiple of d."""

    d: int
    alphabet: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        if self.d < 1:
            raise OrderSyntaxError(f"mod order needs d ≥ 1, got {self.d}")

    @cached_property
    def automaton(self) -> LabelingAutomaton:
        return build_md(self.d, self.alphabet)


@dataclass(frozen=True)
class Labeling:
    automaton: LabelingAutomaton

    @property
    def alphabet(self) -> frozenset:
        return self.automaton.alphabet


@dataclass(frozen=True)
class ViaTransduction:
    transducer: SequentialTransducer
    inner: "OrderSpec"

    def __post_init__(self):
        if self.transducer.output_alphabet != self.inner.alphabet:
            raise AlphabetMismatchError(self.transducer.output_alphabet, self.inner.alphabet)

    @property
    def alphabet(self) -> frozenset:
        return self.transducer.input_alphabet


@dataclass(frozen=True)
class Conjunction:
    parts: tuple

    def __post_init__(self):
        flat: list = []
        for p in self.parts:
            for q in (p.parts if isinstance(p, Conjunction) else (p,)):
                if q not in flat:
                    flat.append(q)
        if not flat:
            raise OrderSyntaxError("a conjunction needs at least one order")
        for q in flat[1:]:
            if q.alphabet != flat[0].alphabet:
                raise AlphabetMismatchError(flat[0].alphabet, q.alphabet)
        object.__setattr__(self, "parts", tuple(flat))

    @property
    def alphabet(self) -> frozenset:
        return self.parts[0].alphabet


@dataclass(frozen=True)
class Counting:
    automaton: CountingAutomaton

    @property
    def alphabet(self) -> frozenset:
        return self.automaton.alphabet


@dataclass(frozen=True)
class Morphism:
    monoid: FiniteMonoid
    theta: Mapping = field(hash=False)
    alphabet: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet or self.theta))
        missing = self.alphabet - set(self.theta)
        if missing:
            raise AutomatonFormatError(f"morphism undefined on {sorted(missing)}")
        if not set(self.theta.values()) <= set(self.monoid.elements):
            raise AutomatonFormatError("morphism maps a letter outside the monoid")


OrderSpec = Union[Subword, Mod, Labeling, ViaTransduction, Conjunction, Counting, Morphism]


def conjunction(*orders: OrderSpec) -> OrderSpec:
    """Conjunction of orders, flattened; a single distinct order is returned as is."""
    c = Conjunction(tuple(orders))
    return c.parts[0] if len(c.parts) == 1 else c


def labeling_automaton(o: OrderSpec) -> LabelingAutomaton:
    """Host automaton of an order whose ideals are loop patterns (subword is M_1)."""
    if isinstance(o, Mod):
        return o.automaton
    if isinstance(o, Labeling):
        return o.automaton
    if isinstance(o, Subword):
        return build_md(1, o.alphabet)
    raise UnsupportedOrderError(f"{describe_order(o)} is not a labeling order")


def describe_order(o: OrderSpec) -> str:
    if isinstance(o, Subword):
        return "subword"
    if isinstance(o, Mod):
        return f"mod:{o.d}"
    if isinstance(o, Labeling):
        return f"labeling[{len(o.automaton.states)} states]"
    if isinstance(o, ViaTransduction):
        return f"via[{len(o.transducer.states)} states]>{describe_order(o.inner)}"
    if isinstance(o, Conjunction):
        return "conj(" + ",".join(describe_order(p) for p in o.parts) + ")"
    if isinstance(o, Counting):
        return f"counting[{len(o.automaton.counters)} counters]"
    if isinstance(o, Morphism):
        return f"morphism[{len(o.monoid.elements)} elements]"
    raise UnsupportedOrderError(f"unknown order {o!r}")


# ── Comparison ────────────────────────────────────────────────────────────────

def _check_word(o: OrderSpec, w: Sequence) -> None:
    extra = set(w) - o.alphabet
    if extra:
        raise AlphabetMismatchError(extra, o.alphabet)


def subword_leq(u: Sequence, v: Sequence) -> bool:
    """Leftmost greedy embedding of u into v."""
    it = iter(v)
    return all(any(x == y for y in it) for x in u)


def mod_leq(d: int, u: Sequence, v: Sequence) -> bool:
    """Greedy embedding preserving positions modulo d, with |v| ≡ |u| (mod d)."""
    return d_embedding(d, u, v) is not None


def labeling_leq(a: LabelingAutomaton, u: Sequence, v: Sequence) -> bool:
    run_u, sigma_u = labeling_run(a, u)
    run_v, sigma_v = labeling_run(a, v)
    return sigma_u == sigma_v and subword_leq(run_u, run_v)


def morphism_leq(m: FiniteMonoid, theta: Mapping, u: Sequence, v: Sequence) -> bool:
    """Decide u ⪯_θ v: v arises from u by inserting blocks that are absorbed on both sides.

    u[i] may sit at v[j] when the letters agree and the left images θ(prefix)
    and right images θ(suffix) of u and v coincide just before and just after
    the two positions.
    """
    u, v = as_word(u), as_word(v)

    def images(w):
        left = [m.identity]
        for a in w:
            left.append(m.mul(left[-1], theta[a]))
        right = [m.identity]
        for a in reversed(w):
            right.append(m.mul(theta[a], right[-1]))
        return left, right[::-1]

    lu, ru = images(u)
    lv, rv = images(v)
    if lu[-1] != lv[-1]:
        return False

    def fits(i, j):
        return (u[i] == v[j] and lu[i] == lv[j] and lu[i + 1] == lv[j + 1]
                and ru[i] == rv[j] and ru[i + 1] == rv[j + 1])

    # reach[j]: u[:i] embeds into v[:j]
    reach = [True] * (len(v) + 1)
    for i in range(len(u)):
        row = [False] * (len(v) + 1)
        for j in range(1, len(v) + 1):
            row[j] = row[j - 1] or (reach[j - 1] and fits(i, j - 1))
        reach = row
    return reach[-1]


def order_leq(o: OrderSpec, u: Sequence, v: Sequence) -> bool:
    u, v = as_word(u), as_word(v)
    _check_word(o, u)
    _check_word(o, v)
    if isinstance(o, Subword):
        return subword_leq(u, v)
    if isinstance(o, Mod):
        return mod_leq(o.d, u, v)
    if isinstance(o, Labeling):
        return labeling_leq(o.automaton, u, v)
    if isinstance(o, ViaTransduction):
        return order_leq(o.inner, o.transducer(u), o.transducer(v))
    if isinstance(o, Conjunction):
        return all(order_leq(p, u, v) for p in o.parts)
    if isinstance(o, Counting):
        return all(x <= y for x, y in zip(counting_eval(o.automaton, u), counting_eval(o.automaton, v)))
    if isinstance(o, Morphism):
        return morphism_leq(o.monoid, o.theta, u, v)
    raise UnsupportedOrderError(f"unknown order {o!r}")


# ── Upward closures of words ──────────────────────────────────────────────────

def _subword_up(alphabet: frozenset, w: tuple) -> Nfa:
    edges = {(i, a, i) for i in range(len(w) + 1) for a in alphabet}
    edges |= {(i, x, i + 1) for i, x in enumerate(w)}
    return Nfa(range(len(w) + 1), alphabet, edges, {0}, {len(w)})


def _labeling_up(a: LabelingAutomaton, w: tuple) -> Nfa:
    run, (_, end) = labeling_run(a, w)
    n = len(run)
    states = {(i, s) for i in range(n + 1) for s in a.states}
    edges = set()
    for i in range(n + 1):
        for (s, x), t in a.delta.items():
            edges.add(((i, s), x, (i, t)))
            if i < n and run[i] == (s, x, t):
                edges.add(((i, s), x, (i + 1, t)))
    return trim(Nfa(states, a.alphabet, edges, {(0, a.initial)}, {(n, end)}))


def _counting_up(a: CountingAutomaton, w: tuple) -> Nfa:
    target = counting_eval(a, w)
    letters = sorted_letters(a.alphabet)

    def cap(vec, inc):
        return tuple(min(x + y, t) for x, y, t in zip(vec, inc, target))

    start = (a.initial, (0,) * len(target))
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        q, vec = queue.popleft()
        for x in letters:
            r, inc = a.delta[q, x]
            nxt = (r, cap(vec, inc))
            edges.add(((q, vec), x, nxt))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    final = {(q, vec) for q, vec in seen if cap(vec, a.final_increment[q]) == target}
    return Nfa(seen, a.alphabet, edges, {start}, final)


def upward_closure_word(o: OrderSpec, w: Sequence) -> Nfa:
    """Automaton for {v | w ⪯ v}."""
    w = as_word(w)
    _check_word(o, w)
    if isinstance(o, Subword):
        return _subword_up(o.alphabet, w)
    if isinstance(o, (Mod, Labeling)):
        return _labeling_up(labeling_automaton(o), w)
    if isinstance(o, ViaTransduction):
        return inverse_apply_transducer(o.transducer, upward_closure_word(o.inner, o.transducer(w)))
    if isinstance(o, Conjunction):
        return intersect_all(o.alphabet, [upward_closure_word(p, w) for p in o.parts])
    if isinstance(o, Counting):
        return _counting_up(o.automaton, w)
    raise UnsupportedOrderError(f"upward closures are not available for {describe_order(o)}")


# ── Order mini-language ───────────────────────────────────────────────────────

class _OrderParser:
    def __init__(self, text: str, base_dir: Path):
        self.text = text
        self.pos = 0
        self.base_dir = base_dir

    def error(self, message: str) -> OrderSyntaxError:
        return OrderSyntaxError(f"{message} at offset {self.pos} in {self.text!r}")

    def take_until(self, stops: str) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in stops:
            self.pos += 1
        return self.text[start:self.pos].strip()

    def expect(self, s: str) -> None:
        if not self.text.startswith(s, self.pos):
            raise self.error(f"expected {s!r}")
        self.pos += len(s)

    def path(self, name: str) -> Path:
        p = Path(name)
        return p if p.is_absolute() else self.base_dir / p

    def order(self, alphabet: frozenset) -> OrderSpec:
        from . import formats

        if self.text.startswith("conj(", self.pos):
            self.pos += len("conj(")
            parts = [self.order(alphabet)]
            while self.text.startswith(",", self.pos):
                self.pos += 1
                parts.append(self.order(alphabet))
            self.expect(")")
            return conjunction(*parts)
        if self.text.startswith("via:", self.pos):
            self.pos += len("via:")
            f = formats.read_transducer(self.path(self.take_until(">")))
            self.expect(">")
            if alphabet and f.input_alphabet != alphabet:
                raise AlphabetMismatchError(f.input_alphabet, alphabet)
            return ViaTransduction(f, self.order(f.output_alphabet))
        kind, _, arg = self.take_until(",)").partition(":")
        if kind == "subword" and not arg:
            return Subword(alphabet)
        if kind == "mod":
            return Mod(self.integer(arg), alphabet)
        if kind == "ltt":
            return Counting(build_pk(self.integer(arg), alphabet))
        if kind == "labeling":
            order = Labeling(formats.read_labeling(self.path(arg)))
        elif kind == "counting":
            order = Counting(formats.read_counting(self.path(arg)))
        elif kind == "morphism":
            model = formats.read_monoid(self.path(arg))
            monoid = FiniteMonoid(model.elements, {(x, y): z for x, row in model.table.items()
                                                   for y, z in row.items()}, model.identity)
            order = Morphism(monoid, dict(model.theta))
        else:
            raise self.error(f"unknown order {kind!r}")
        if alphabet and order.alphabet != alphabet:
            raise AlphabetMismatchError(order.alphabet, alphabet)
        return order

    def integer(self, arg: str) -> int:
        if not arg.isdigit() or int(arg) < 1:
            raise self.error(f"expected a positive integer, got {arg!r}")
        return int(arg)


def parse_order(text: str, alphabet: Iterable = (), base_dir: Union[str, Path] = ".") -> OrderSpec:
    """Parse ``subword``, ``mod:<d>``, ``ltt:<k>``, ``labeling:<file>``, ``counting:<file>``,
    ``morphism:<file>``, ``via:<file>><inner>`` and ``conj(<o1>,<o2>,...)``."""
    parser = _OrderParser(text.strip(), Path(base_dir))
    order = parser.order(frozenset(alphabet))
    if parser.pos != len(parser.text):
        raise parser.error("trailing input")
    if not order.alphabet:
        raise OrderSyntaxError(f"no alphabet known for {text!r}")
    return order
