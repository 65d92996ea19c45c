"""
Finite automata, sequential transducers, labeling automata and counter
automata, together with the regular-language algebra the engines build on.

Words are handled as tuples of letters internally; any sequence (a ``str`` for
single-character alphabets) is accepted on input. Edge labels use
``EPSILON`` (the empty string) for silent moves.
"""
from __future__ import annotations

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from . import config
from .errors import (
    AlphabetMismatchError,
    AutomatonFormatError,
    DeterminizationLimitError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

EPSILON = ""

Symbol = Hashable
State = Hashable
Word = tuple


# ── Words ─────────────────────────────────────────────────────────────────────

def as_word(w: Sequence[Symbol]) -> Word:
    return tuple(w)


def join_word(w: Sequence[Symbol]):
    """Render a word as ``str`` when every letter is a one-character string."""
    w = tuple(w)
    if all(isinstance(x, str) and len(x) == 1 for x in w):
        return "".join(w)
    return w


def sort_key(x):
    """Total, run-independent ordering key for states and letters of mixed types."""
    if isinstance(x, (frozenset, set)):
        return (2, tuple(sorted(sort_key(y) for y in x)))
    if isinstance(x, tuple):
        return (1, tuple(sort_key(y) for y in x))
    if isinstance(x, int) and not isinstance(x, bool):
        return (0, "", x)
    return (0, type(x).__name__, str(x))


def sorted_letters(alphabet: Iterable[Symbol]) -> list:
    return sorted(alphabet, key=sort_key)


def _check_same_alphabet(a, b) -> None:
    if frozenset(a) != frozenset(b):
        raise AlphabetMismatchError(a, b)


# ── Nfa ───────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Nfa:
    """Nondeterministic automaton with ε-edges (label ``EPSILON``)."""

    states: frozenset
    alphabet: frozenset
    edges: frozenset
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        for name in ("states", "alphabet", "edges", "initial", "final"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if not self.alphabet:
            raise AutomatonFormatError("alphabet must be non-empty")
        if EPSILON in self.alphabet:
            raise AutomatonFormatError("the empty string is reserved for ε")
        for src, label, dst in self.edges:
            if src not in self.states or dst not in self.states:
                raise AutomatonFormatError(f"edge ({src!r}, {label!r}, {dst!r}) leaves the state set")
            if label != EPSILON and label not in self.alphabet:
                raise AutomatonFormatError(f"edge label {label!r} is not in the alphabet")
        if not self.initial <= self.states or not self.final <= self.states:
            raise AutomatonFormatError("initial and final states must be states")

    @cached_property
    def successors(self) -> dict:
        index: dict = defaultdict(lambda: defaultdict(set))
        for src, label, dst in self.edges:
            index[src][label].add(dst)
        return {q: {a: frozenset(ds) for a, ds in out.items()} for q, out in index.items()}

    @cached_property
    def closures(self) -> dict:
        result = {}
        for q in self.states:
            seen = {q}
            stack = [q]
            while stack:
                p = stack.pop()
                for r in self.successors.get(p, {}).get(EPSILON, ()):
                    if r not in seen:
                        seen.add(r)
                        stack.append(r)
            result[q] = frozenset(seen)
        return result

    @property
    def has_epsilon(self) -> bool:
        return any(label == EPSILON for _, label, _ in self.edges)

    def __len__(self) -> int:
        return len(self.states)


def epsilon_closure(nfa: Nfa, states: Iterable[State]) -> frozenset:
    out: set = set()
    for q in states:
        out |= nfa.closures[q]
    return frozenset(out)


def step(nfa: Nfa, states: frozenset, letter: Symbol) -> frozenset:
    """Letter successors of an ε-closed state set, ε-closed again."""
    nxt: set = set()
    for q in states:
        nxt |= nfa.successors.get(q, {}).get(letter, frozenset())
    return epsilon_closure(nfa, nxt)


def read(nfa: Nfa, states: Iterable[State], word: Sequence[Symbol]) -> frozenset:
    current = epsilon_closure(nfa, states)
    for x in word:
        current = step(nfa, current, x)
        if not current:
            break
    return current


def accepts(nfa: Nfa, word: Sequence[Symbol]) -> bool:
    return bool(read(nfa, nfa.initial, word) & nfa.final)


# ── Constructors ──────────────────────────────────────────────────────────────

def universal(alphabet: Iterable[Symbol]) -> Nfa:
    alphabet = frozenset(alphabet)
    return Nfa({0}, alphabet, {(0, a, 0) for a in alphabet}, {0}, {0})


def empty_language(alphabet: Iterable[Symbol]) -> Nfa:
    return Nfa({0}, alphabet, set(), {0}, set())


def word_nfa(alphabet: Iterable[Symbol], word: Sequence[Symbol]) -> Nfa:
    word = as_word(word)
    edges = {(i, x, i + 1) for i, x in enumerate(word)}
    return Nfa(range(len(word) + 1), alphabet, edges, {0}, {len(word)})


def from_words(alphabet: Iterable[Symbol], words: Iterable[Sequence[Symbol]]) -> Nfa:
    """Prefix-tree automaton of a finite word set."""
    states: set = {()}
    edges = set()
    final = set()
    for w in words:
        w = as_word(w)
        for i in range(len(w)):
            states.add(w[: i + 1])
            edges.add((w[:i], w[i], w[: i + 1]))
        final.add(w)
    return Nfa(states, alphabet, edges, {()}, final)


def letters_star(alphabet: Iterable[Symbol], letters: Iterable[Symbol]) -> Nfa:
    return Nfa({0}, alphabet, {(0, a, 0) for a in letters}, {0}, {0})


def _tag(nfa: Nfa, tag) -> tuple:
    states = {(tag, q) for q in nfa.states}
    edges = {((tag, p), a, (tag, q)) for p, a, q in nfa.edges}
    return states, edges


def union(a: Nfa, b: Nfa) -> Nfa:
    _check_same_alphabet(a.alphabet, b.alphabet)
    sa, ea = _tag(a, 0)
    sb, eb = _tag(b, 1)
    return Nfa(
        sa | sb,
        a.alphabet,
        ea | eb,
        {(0, q) for q in a.initial} | {(1, q) for q in b.initial},
        {(0, q) for q in a.final} | {(1, q) for q in b.final},
    )


def union_all(alphabet: Iterable[Symbol], nfas: Iterable[Nfa]) -> Nfa:
    result = empty_language(alphabet)
    for n in nfas:
        result = union(result, n)
    return result


def concat(*parts: Nfa) -> Nfa:
    if not parts:
        raise PreconditionError("concat", "needs at least one automaton")
    for p in parts[1:]:
        _check_same_alphabet(parts[0].alphabet, p.alphabet)
    states: set = set()
    edges: set = set()
    for i, p in enumerate(parts):
        s, e = _tag(p, i)
        states |= s
        edges |= e
        if i + 1 < len(parts):
            edges |= {((i, f), EPSILON, (i + 1, q)) for f in p.final for q in parts[i + 1].initial}
    last = len(parts) - 1
    return Nfa(
        states,
        parts[0].alphabet,
        edges,
        {(0, q) for q in parts[0].initial},
        {(last, q) for q in parts[last].final},
    )


def star(a: Nfa) -> Nfa:
    states, edges = _tag(a, 0)
    hub = ("star",)
    edges |= {(hub, EPSILON, (0, q)) for q in a.initial}
    edges |= {((0, f), EPSILON, hub) for f in a.final}
    return Nfa(states | {hub}, a.alphabet, edges, {hub}, {hub})


def map_letters(nfa: Nfa, image: Callable[[Symbol], Sequence[Symbol]], alphabet: Iterable[Symbol]) -> Nfa:
    """Homomorphic image: every letter edge is replaced by a path reading ``image(letter)``."""
    states = set(nfa.states)
    edges = set()
    for src, label, dst in nfa.edges:
        if label == EPSILON:
            edges.add((src, EPSILON, dst))
            continue
        _emit_chain(edges, states, src, dst, as_word(image(label)), ("map", src, label, dst))
    return Nfa(states, alphabet, edges, nfa.initial, nfa.final)


def _emit_chain(edges: set, states: set, src, dst, out: Word, tag) -> None:
    if not out:
        edges.add((src, EPSILON, dst))
        return
    prev = src
    for i, x in enumerate(out):
        nxt = dst if i == len(out) - 1 else (tag, i)
        states.add(nxt)
        edges.add((prev, x, nxt))
        prev = nxt


# ── Structure ─────────────────────────────────────────────────────────────────

def reachable(nfa: Nfa) -> frozenset:
    seen = set(nfa.initial)
    stack = list(nfa.initial)
    while stack:
        q = stack.pop()
        for dsts in nfa.successors.get(q, {}).values():
            for r in dsts:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
    return frozenset(seen)


def coreachable(nfa: Nfa) -> frozenset:
    preds: dict = defaultdict(set)
    for src, _, dst in nfa.edges:
        preds[dst].add(src)
    seen = set(nfa.final)
    stack = list(nfa.final)
    while stack:
        q = stack.pop()
        for p in preds.get(q, ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def trim(nfa: Nfa) -> Nfa:
    useful = reachable(nfa) & coreachable(nfa)
    return Nfa(
        useful,
        nfa.alphabet,
        {(p, a, q) for p, a, q in nfa.edges if p in useful and q in useful},
        nfa.initial & useful,
        nfa.final & useful,
    )


def relabel(nfa: Nfa) -> Nfa:
    """Rename states to ``q0, q1, ...`` in breadth-first order; unreachable states are dropped."""
    order: dict = {}
    queue = deque(sorted(nfa.initial, key=sort_key))
    for q in queue:
        order.setdefault(q, len(order))
    while queue:
        q = queue.popleft()
        out = nfa.successors.get(q, {})
        for label in sorted(out, key=sort_key):
            for r in sorted(out[label], key=sort_key):
                if r not in order:
                    order[r] = len(order)
                    queue.append(r)
    name = {q: f"q{i}" for q, i in order.items()}
    return Nfa(
        name.values(),
        nfa.alphabet,
        {(name[p], a, name[q]) for p, a, q in nfa.edges if p in name and q in name},
        {name[q] for q in nfa.initial},
        {name[q] for q in nfa.final if q in name},
    )


def remove_epsilon(nfa: Nfa) -> Nfa:
    if not nfa.has_epsilon:
        return nfa
    edges = set()
    for p in nfa.states:
        for q in nfa.closures[p]:
            for label, dsts in nfa.successors.get(q, {}).items():
                if label != EPSILON:
                    edges |= {(p, label, r) for r in dsts}
    final = {p for p in nfa.states if nfa.closures[p] & nfa.final}
    return Nfa(nfa.states, nfa.alphabet, edges, nfa.initial, final)


def is_empty(nfa: Nfa) -> bool:
    return not (reachable(nfa) & nfa.final)


def shortest_word(nfa: Nfa):
    """A shortest accepted word (as a tuple), or ``None`` for the empty language."""
    start = epsilon_closure(nfa, nfa.initial)
    if start & nfa.final:
        return ()
    parent: dict = {q: None for q in start}
    queue = deque(sorted(start, key=sort_key))
    letters = sorted_letters(nfa.alphabet)
    while queue:
        q = queue.popleft()
        for a in letters:
            for r in sorted(step(nfa, frozenset({q}), a), key=sort_key):
                if r in parent:
                    continue
                parent[r] = (q, a)
                if r in nfa.final:
                    word = []
                    cur = r
                    while parent[cur] is not None:
                        cur, x = parent[cur]
                        word.append(x)
                    return tuple(reversed(word))
                queue.append(r)
    return None


def intersect(a: Nfa, b: Nfa) -> Nfa:
    _check_same_alphabet(a.alphabet, b.alphabet)
    start = [(p, q) for p in a.initial for q in b.initial]
    seen = set(start)
    queue = deque(start)
    edges = set()

    def add(src, label, dst):
        edges.add((src, label, dst))
        if dst not in seen:
            seen.add(dst)
            queue.append(dst)

    while queue:
        p, q = queue.popleft()
        sa = a.successors.get(p, {})
        sb = b.successors.get(q, {})
        for label, dsts in sa.items():
            if label == EPSILON:
                for p2 in dsts:
                    add((p, q), EPSILON, (p2, q))
                continue
            for q2 in sb.get(label, ()):
                for p2 in dsts:
                    add((p, q), label, (p2, q2))
        for q2 in sb.get(EPSILON, ()):
            add((p, q), EPSILON, (p, q2))
    final = {(p, q) for p, q in seen if p in a.final and q in b.final}
    return Nfa(seen, a.alphabet, edges, start, final)


def intersect_all(alphabet: Iterable[Symbol], nfas: Iterable[Nfa]) -> Nfa:
    result = universal(alphabet)
    for n in nfas:
        result = trim(intersect(result, n))
    return result


# ── Determinization ───────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Dfa:
    states: frozenset
    alphabet: frozenset
    initial: State
    delta: Mapping = field(hash=False)
    final: frozenset

    def run(self, word: Sequence[Symbol]) -> State:
        q = self.initial
        for x in word:
            q = self.delta[q, x]
        return q

    def accepts(self, word: Sequence[Symbol]) -> bool:
        return self.run(word) in self.final

    def to_nfa(self) -> Nfa:
        return Nfa(
            self.states,
            self.alphabet,
            {(q, a, r) for (q, a), r in self.delta.items()},
            {self.initial},
            self.final,
        )


def determinize(nfa: Nfa, cap: Optional[int] = None) -> Dfa:
    """Complete subset construction; raises ``DeterminizationLimitError`` past ``cap`` states."""
    cap = config.DETERMINIZE_CAP if cap is None else cap
    letters = sorted_letters(nfa.alphabet)
    start = epsilon_closure(nfa, nfa.initial)
    delta = {}
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for a in letters:
            t = step(nfa, s, a)
            delta[s, a] = t
            if t not in seen:
                if len(seen) >= cap:
                    raise DeterminizationLimitError(cap)
                seen.add(t)
                queue.append(t)
    logger.debug("determinized %d states into %d", len(nfa.states), len(seen))
    return Dfa(frozenset(seen), nfa.alphabet, start, delta, frozenset(s for s in seen if s & nfa.final))


def complement(nfa: Nfa, cap: Optional[int] = None) -> Nfa:
    dfa = determinize(nfa, cap)
    return Dfa(dfa.states, dfa.alphabet, dfa.initial, dfa.delta, dfa.states - dfa.final).to_nfa()


def is_subset(a: Nfa, b: Nfa, cap: Optional[int] = None) -> bool:
    """L(a) ⊆ L(b), exploring a against the subset construction of b on the fly."""
    _check_same_alphabet(a.alphabet, b.alphabet)
    cap = config.DETERMINIZE_CAP if cap is None else cap
    a = remove_epsilon(a)
    start_b = epsilon_closure(b, b.initial)
    frontier = [(p, start_b) for p in a.initial]
    seen = set(frontier)
    subsets = {start_b}
    while frontier:
        p, s = frontier.pop()
        if p in a.final and not (s & b.final):
            return False
        for label, dsts in a.successors.get(p, {}).items():
            t = step(b, s, label)
            if t not in subsets:
                if len(subsets) >= cap:
                    raise DeterminizationLimitError(cap)
                subsets.add(t)
            for p2 in dsts:
                if (p2, t) not in seen:
                    seen.add((p2, t))
                    frontier.append((p2, t))
    return True


def includes(big: Nfa, small: Nfa, cap: Optional[int] = None) -> bool:
    return is_subset(small, big, cap)


def equivalent(a: Nfa, b: Nfa, cap: Optional[int] = None) -> bool:
    return is_subset(a, b, cap) and is_subset(b, a, cap)


def difference(a: Nfa, b: Nfa, cap: Optional[int] = None) -> Nfa:
    return intersect(a, complement(b, cap))


_ALGEBRA = {
    "intersect": lambda a, b, cap: intersect(a, b),
    "union": lambda a, b, cap: union(a, b),
    "concat": lambda a, b, cap: concat(a, b),
    "difference": difference,
    "includes": includes,
    "equivalent": equivalent,
    "determinize": lambda a, b, cap: determinize(a, cap).to_nfa(),
    "complement": lambda a, b, cap: complement(a, cap),
    "is_empty": lambda a, b, cap: is_empty(a),
    "trim": lambda a, b, cap: trim(a),
}

_UNARY = {"determinize", "complement", "is_empty", "trim"}


def regular_algebra(kind: str, a: Nfa, b: Optional[Nfa] = None, cap: Optional[int] = None):
    """Dispatch one regular-language operation by name."""
    if kind not in _ALGEBRA:
        raise PreconditionError("op-kind", f"unknown operation {kind!r}; expected one of {sorted(_ALGEBRA)}")
    if kind not in _UNARY and b is None:
        raise PreconditionError("op-kind", f"{kind} needs two automata")
    return _ALGEBRA[kind](a, b, cap)


# ── Transducers ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SequentialTransducer:
    """Deterministic complete transducer with per-edge and per-state final outputs."""

    states: frozenset
    input_alphabet: frozenset
    output_alphabet: frozenset
    initial: State
    delta: Mapping = field(hash=False)
    final_output: Mapping = field(hash=False)

    def __post_init__(self):
        for name in ("states", "input_alphabet", "output_alphabet"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        object.__setattr__(self, "delta", {k: (q, as_word(o)) for k, (q, o) in self.delta.items()})
        object.__setattr__(
            self, "final_output", {q: as_word(self.final_output.get(q, ())) for q in self.states}
        )
        if self.initial not in self.states:
            raise AutomatonFormatError("transducer initial state is not a state")
        for q in self.states:
            for a in self.input_alphabet:
                if (q, a) not in self.delta:
                    raise AutomatonFormatError(f"transducer is not complete at ({q!r}, {a!r})")
        for (q, a), (r, out) in self.delta.items():
            if r not in self.states or a not in self.input_alphabet:
                raise AutomatonFormatError(f"transducer edge ({q!r}, {a!r}) is malformed")
            if not set(out) <= self.output_alphabet:
                raise AutomatonFormatError(f"output {out!r} leaves the output alphabet")

    def __call__(self, word: Sequence[Symbol]) -> Word:
        q = self.initial
        out: list = []
        for x in word:
            if (q, x) not in self.delta:
                raise AlphabetMismatchError({x}, self.input_alphabet)
            q, o = self.delta[q, x]
            out.extend(o)
        out.extend(self.final_output[q])
        return tuple(out)


def projection(alphabet: Iterable[Symbol], keep: Iterable[Symbol]) -> SequentialTransducer:
    """The morphism erasing every letter outside ``keep``."""
    alphabet = frozenset(alphabet)
    keep = frozenset(keep) & alphabet
    delta = {(0, a): (0, (a,) if a in keep else ()) for a in alphabet}
    return SequentialTransducer({0}, alphabet, keep, 0, delta, {0: ()})


def _as_transducer(f) -> SequentialTransducer:
    if isinstance(f, LabelingAutomaton):
        return f.run_transducer
    return f


def apply_transducer(f, l: Nfa) -> Nfa:
    """Automaton for f(L(l)); a labeling automaton stands for its run map."""
    f = _as_transducer(f)
    _check_same_alphabet(f.input_alphabet, l.alphabet)
    states = {(p, q) for p in l.states for q in f.states}
    edges: set = set()
    for src, label, dst in l.edges:
        for q in f.states:
            if label == EPSILON:
                edges.add(((src, q), EPSILON, (dst, q)))
                continue
            q2, out = f.delta[q, label]
            _emit_chain(edges, states, (src, q), (dst, q2), out, ("out", src, label, dst, q))
    accept = ("accept",)
    states.add(accept)
    for p in l.final:
        for q in f.states:
            _emit_chain(edges, states, (p, q), accept, f.final_output[q], ("fin", p, q))
    if not f.output_alphabet:
        raise PreconditionError("output alphabet", "the transducer erases every letter")
    return trim(Nfa(states, f.output_alphabet, edges, {(p, f.initial) for p in l.initial}, {accept}))


def inverse_apply_transducer(f, l: Nfa) -> Nfa:
    """Automaton for {w | f(w) ∈ L(l)}."""
    f = _as_transducer(f)
    _check_same_alphabet(f.output_alphabet, l.alphabet)
    cache: dict = {}

    def reach(p, out):
        key = (p, out)
        if key not in cache:
            cache[key] = read(l, {p}, out)
        return cache[key]

    letters = sorted_letters(f.input_alphabet)
    start = [(f.initial, p) for p in sorted(epsilon_closure(l, l.initial), key=sort_key)]
    seen = set(start)
    queue = deque(start)
    edges = set()
    while queue:
        q, p = queue.popleft()
        for a in letters:
            q2, out = f.delta[q, a]
            for p2 in reach(p, out):
                edges.add(((q, p), a, (q2, p2)))
                if (q2, p2) not in seen:
                    seen.add((q2, p2))
                    queue.append((q2, p2))
    final = {(q, p) for q, p in seen if reach(p, f.final_output[q]) & l.final}
    return Nfa(seen, f.input_alphabet, edges, start, final)


# ── Labeling automata ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class LabelingAutomaton:
    """Deterministic, complete, all-final automaton; every word has exactly one run.

    ``modulus`` is set when the automaton is the d-cycle built by ``build_md``.
    """

    states: frozenset
    alphabet: frozenset
    initial: State
    delta: Mapping = field(hash=False)
    modulus: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "delta", dict(self.delta))
        if not self.alphabet:
            raise AutomatonFormatError("alphabet must be non-empty")
        if self.initial not in self.states:
            raise AutomatonFormatError("initial state is not a state")
        for q in self.states:
            for a in self.alphabet:
                if self.delta.get((q, a)) not in self.states:
                    raise AutomatonFormatError(f"labeling automaton is not complete at ({q!r}, {a!r})")

    @cached_property
    def edge_ids(self) -> frozenset:
        return frozenset((q, a, r) for (q, a), r in self.delta.items())

    @cached_property
    def nfa(self) -> Nfa:
        return Nfa(self.states, self.alphabet, self.edge_ids, {self.initial}, self.states)

    @cached_property
    def run_transducer(self) -> SequentialTransducer:
        delta = {(q, a): (r, ((q, a, r),)) for (q, a), r in self.delta.items()}
        return SequentialTransducer(self.states, self.alphabet, self.edge_ids, self.initial, delta, {})

    def runs_between(self, p: State, q: State) -> Nfa:
        """Run words (over edge ids) of paths from p to q."""
        edges = {(s, (s, a, t), t) for s, a, t in self.edge_ids}
        return Nfa(self.states, self.edge_ids, edges, {p}, {q})

    def target(self, source: State, word: Sequence[Symbol]) -> State:
        q = source
        for x in word:
            try:
                q = self.delta[q, x]
            except KeyError:
                raise AlphabetMismatchError({x}, self.alphabet) from None
        return q

    @classmethod
    def from_nfa(cls, nfa: Nfa) -> "LabelingAutomaton":
        if nfa.has_epsilon or len(nfa.initial) != 1 or nfa.final != nfa.states:
            raise AutomatonFormatError("labeling automata must be ε-free, singly initial and all-final")
        delta = {}
        for p, a, q in nfa.edges:
            if (p, a) in delta:
                raise AutomatonFormatError(f"labeling automaton is not deterministic at ({p!r}, {a!r})")
            delta[p, a] = q
        (start,) = nfa.initial
        return cls(nfa.states, nfa.alphabet, start, delta)


def labeling_run(a: LabelingAutomaton, w: Sequence[Symbol]) -> tuple:
    """The unique run of ``a`` on ``w`` and its σ pair (first state, last state)."""
    q = a.initial
    run = []
    for x in w:
        try:
            r = a.delta[q, x]
        except KeyError:
            raise AlphabetMismatchError({x}, a.alphabet) from None
        run.append((q, x, r))
        q = r
    return tuple(run), (a.initial, q)


def check_one_run(nfa: Nfa, cap: Optional[int] = None) -> bool:
    """True iff the automaton has exactly one accepting run on every word."""
    nfa = remove_epsilon(nfa)
    if not is_subset(universal(nfa.alphabet), nfa, cap):
        return False
    square = trim(intersect(nfa, nfa))
    return all(p == q for p, q in square.states)


def build_md(d: int, alphabet: Iterable[Symbol]) -> LabelingAutomaton:
    """The single d-cycle M_d: every letter advances one step."""
    if d < 1:
        raise PreconditionError("d ≥ 1", f"got d = {d}")
    alphabet = frozenset(alphabet)
    states = [f"s{i}" for i in range(d)]
    delta = {(states[i], a): states[(i + 1) % d] for i in range(d) for a in alphabet}
    return LabelingAutomaton(states, alphabet, states[0], delta, modulus=d)


# ── Counter automata ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CounterEdge:
    source: State
    label: Symbol
    increment: tuple
    target: State


@dataclass(frozen=True)
class CounterAutomaton:
    states: frozenset
    alphabet: frozenset
    counters: tuple
    edges: tuple
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        for name in ("states", "alphabet", "initial", "final"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        object.__setattr__(self, "counters", tuple(self.counters))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.counters)) != len(self.counters):
            raise AutomatonFormatError("counter names must be distinct")
        for e in self.edges:
            if e.source not in self.states or e.target not in self.states:
                raise AutomatonFormatError(f"counter edge {e!r} leaves the state set")
            if e.label != EPSILON and e.label not in self.alphabet:
                raise AutomatonFormatError(f"counter edge label {e.label!r} is not in the alphabet")
            if len(e.increment) != len(self.counters) or any(x < 0 for x in e.increment):
                raise AutomatonFormatError(f"counter edge {e!r} has a malformed increment")
        if not self.initial <= self.states or not self.final <= self.states:
            raise AutomatonFormatError("initial and final states must be states")

    @cached_property
    def out_edges(self) -> dict:
        index: dict = defaultdict(list)
        for e in self.edges:
            index[e.source].append(e)
        return dict(index)

    @property
    def underlying(self) -> Nfa:
        return Nfa(self.states, self.alphabet, {(e.source, e.label, e.target) for e in self.edges},
                   self.initial, self.final)


def nfa_to_counter(nfa: Nfa, counters: Sequence[str] = ()) -> CounterAutomaton:
    zero = (0,) * len(counters)
    edges = [CounterEdge(p, a, zero, q) for p, a, q in sorted(nfa.edges, key=sort_key)]
    return CounterAutomaton(nfa.states, nfa.alphabet, counters, edges, nfa.initial, nfa.final)


def rename_counters(ca: CounterAutomaton, prefix: str) -> CounterAutomaton:
    return CounterAutomaton(ca.states, ca.alphabet, [f"{prefix}{c}" for c in ca.counters],
                            ca.edges, ca.initial, ca.final)


def counter_product(a: CounterAutomaton, b: CounterAutomaton) -> CounterAutomaton:
    """Synchronous product on letters, interleaving ε-moves; counters are concatenated."""
    _check_same_alphabet(a.alphabet, b.alphabet)
    za = (0,) * len(a.counters)
    zb = (0,) * len(b.counters)
    start = [(p, q) for p in sorted(a.initial, key=sort_key) for q in sorted(b.initial, key=sort_key)]
    seen = set(start)
    queue = deque(start)
    edges = []

    def add(src, label, inc, dst):
        edges.append(CounterEdge(src, label, inc, dst))
        if dst not in seen:
            seen.add(dst)
            queue.append(dst)

    while queue:
        p, q = queue.popleft()
        ea = a.out_edges.get(p, [])
        eb = b.out_edges.get(q, [])
        for x in ea:
            if x.label == EPSILON:
                add((p, q), EPSILON, x.increment + zb, (x.target, q))
                continue
            for y in eb:
                if y.label == x.label:
                    add((p, q), x.label, x.increment + y.increment, (x.target, y.target))
        for y in eb:
            if y.label == EPSILON:
                add((p, q), EPSILON, za + y.increment, (p, y.target))
    final = {(p, q) for p, q in seen if p in a.final and q in b.final}
    return CounterAutomaton(seen, a.alphabet, a.counters + b.counters, edges, start, final)


def counter_restrict(ca: CounterAutomaton, nfa: Nfa) -> CounterAutomaton:
    """Product of a counter automaton with an Nfa; only the former's counters remain."""
    return counter_product(ca, nfa_to_counter(nfa))


def counter_concat(parts: Sequence[CounterAutomaton]) -> CounterAutomaton:
    """Runs of the result read one word of each part in order; counters are pooled."""
    for p in parts[1:]:
        _check_same_alphabet(parts[0].alphabet, p.alphabet)
    counters: list = []
    for p in parts:
        counters.extend(c for c in p.counters if c not in counters)
    index = {c: i for i, c in enumerate(counters)}
    zero = (0,) * len(counters)
    states: set = set()
    edges: list = []
    for i, p in enumerate(parts):
        states |= {(i, q) for q in p.states}
        slots = [index[c] for c in p.counters]
        for e in p.edges:
            inc = list(zero)
            for slot, x in zip(slots, e.increment):
                inc[slot] += x
            edges.append(CounterEdge((i, e.source), e.label, tuple(inc), (i, e.target)))
        if i + 1 < len(parts):
            for f in sorted(p.final, key=sort_key):
                for q in sorted(parts[i + 1].initial, key=sort_key):
                    edges.append(CounterEdge((i, f), EPSILON, zero, (i + 1, q)))
    last = len(parts) - 1
    return CounterAutomaton(states, parts[0].alphabet, counters, edges,
                            {(0, q) for q in parts[0].initial}, {(last, q) for q in parts[last].final})


def compose_counter(ca: CounterAutomaton, f) -> CounterAutomaton:
    """Counter automaton over f's input alphabet computing ``ca`` on f(w)."""
    f = _as_transducer(f)
    _check_same_alphabet(f.output_alphabet, ca.alphabet)
    zero = (0,) * len(ca.counters)
    states: set = set()
    edges: list = []

    def simulate(tag, out: Word, exits: Callable):
        # (tag, i, s): i letters of `out` consumed, ca in state s
        for s in ca.states:
            for i in range(len(out) + 1):
                states.add((tag, i, s))
                for e in ca.out_edges.get(s, []):
                    if e.label == EPSILON:
                        edges.append(CounterEdge((tag, i, s), EPSILON, e.increment, (tag, i, e.target)))
                    elif i < len(out) and e.label == out[i]:
                        edges.append(CounterEdge((tag, i, s), EPSILON, e.increment, (tag, i + 1, e.target)))
            exits(s, (tag, len(out), s))

    for q in sorted(f.states, key=sort_key):
        for s in ca.states:
            states.add((q, s))
    for (q, a), (q2, out) in sorted(f.delta.items(), key=sort_key):
        tag = ("read", q, a)
        for s in ca.states:
            edges.append(CounterEdge((q, s), a, zero, (tag, 0, s)))
        simulate(tag, out, lambda s, node, q2=q2: edges.append(CounterEdge(node, EPSILON, zero, (q2, s))))
    accept = ("accept",)
    states.add(accept)
    for q in sorted(f.states, key=sort_key):
        tag = ("final", q)
        for s in ca.states:
            edges.append(CounterEdge((q, s), EPSILON, zero, (tag, 0, s)))

        def finish(s, node):
            if s in ca.final:
                edges.append(CounterEdge(node, EPSILON, zero, accept))

        simulate(tag, f.final_output[q], finish)
    return CounterAutomaton(states, f.input_alphabet, ca.counters, edges,
                            {(f.initial, s) for s in ca.initial}, {accept})


def trim_counter(ca: CounterAutomaton) -> CounterAutomaton:
    useful = reachable(ca.underlying) & coreachable(ca.underlying)
    return CounterAutomaton(
        useful, ca.alphabet, ca.counters,
        [e for e in ca.edges if e.source in useful and e.target in useful],
        ca.initial & useful, ca.final & useful,
    )


# ── Counting automata ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CountingAutomaton:
    """Deterministic complete counter automaton with a final increment per state."""

    states: frozenset
    alphabet: frozenset
    counters: tuple
    initial: State
    delta: Mapping = field(hash=False)
    final_increment: Mapping = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "counters", tuple(self.counters))
        zero = (0,) * len(self.counters)
        object.__setattr__(self, "final_increment",
                           {q: tuple(self.final_increment.get(q, zero)) for q in self.states})
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.delta:
                    raise AutomatonFormatError(f"counting automaton is not complete at ({q!r}, {a!r})")
        for (q, a), (r, inc) in self.delta.items():
            if r not in self.states or len(inc) != len(self.counters) or min(inc, default=0) < 0:
                raise AutomatonFormatError(f"counting edge ({q!r}, {a!r}) is malformed")

    @cached_property
    def labeling(self) -> LabelingAutomaton:
        return LabelingAutomaton(self.states, self.alphabet, self.initial,
                                 {k: r for k, (r, _) in self.delta.items()})


def counting_eval(a: CountingAutomaton, w: Sequence[Symbol]) -> tuple:
    totals = [0] * len(a.counters)
    q = a.initial
    for x in w:
        try:
            q, inc = a.delta[q, x]
        except KeyError:
            raise AlphabetMismatchError({x}, a.alphabet) from None
        for i, v in enumerate(inc):
            totals[i] += v
    for i, v in enumerate(a.final_increment[q]):
        totals[i] += v
    return tuple(totals)


def _words_up_to(letters: list, k: int) -> list:
    words = [()]
    layer = [()]
    for _ in range(k):
        layer = [w + (a,) for w in layer for a in letters]
        words.extend(layer)
    return words


def counter_name(kind: str, u: Sequence[Symbol]) -> str:
    return f"{kind}:{''.join(map(str, u))}"


def build_pk(k: int, alphabet: Iterable[Symbol]) -> CountingAutomaton:
    """Counting automaton of prefix flags, suffix flags and occurrence counts of words of length ≤ k.

    The state is the last ``min(|w|, k)`` letters. ``occ:`` of the empty word
    counts the |w| + 1 positions of w.
    """
    if k < 1:
        raise PreconditionError("k ≥ 1", f"got k = {k}")
    letters = sorted_letters(alphabet)
    words = _words_up_to(letters, k)
    counters = [counter_name(kind, u) for u in words for kind in ("pre", "suf", "occ")]
    slot = {c: i for i, c in enumerate(counters)}
    n = len(counters)

    def vector(names):
        inc = [0] * n
        for c in names:
            inc[slot[c]] += 1
        return tuple(inc)

    delta = {}
    final_increment = {}
    for x in words:
        for a in letters:
            y = x + (a,)
            names = [counter_name("occ", ())]
            names += [counter_name("occ", y[-j:]) for j in range(1, min(len(y), k) + 1)]
            if len(x) < k:
                names.append(counter_name("pre", y))
            delta[x, a] = (y[-k:], vector(names))
        names = [counter_name("pre", ()), counter_name("occ", ())]
        names += [counter_name("suf", x[len(x) - j:]) for j in range(len(x) + 1)]
        final_increment[x] = vector(names)
    return CountingAutomaton(words, letters, counters, (), delta, final_increment)
