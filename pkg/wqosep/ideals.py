"""
Ideal representations and the operations on them.

- Subword ideals are sequences of atoms {a, ε} and Γ*.
- Labeling orders (and M_d) use loop patterns u₀ (v₁) u₁ ⋯ (vₙ) uₙ, whose
  ideal is the downward closure of u₀ v₁* u₁ ⋯ vₙ* uₙ.
- Orders pulled back along a transducer use f⁻¹(J) for an ideal J of the
  inner order; conjunctions use tuples of component ideals.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Union

import networkx as nx

from .automata import (
    EPSILON,
    LabelingAutomaton,
    Nfa,
    apply_transducer,
    accepts,
    as_word,
    build_md,
    concat,
    equivalent,
    includes,
    intersect_all,
    inverse_apply_transducer,
    join_word,
    remove_epsilon,
    sort_key,
    sorted_letters,
    star,
    trim,
    union_all,
    word_nfa,
)
from .errors import (
    CertificationError,
    InvalidIdealError,
    PatternSyntaxError,
    PreconditionError,
    UnsupportedOrderError,
)
from .orders import (
    Conjunction,
    Labeling,
    Mod,
    OrderSpec,
    Subword,
    ViaTransduction,
    describe_order,
    labeling_automaton,
    order_leq,
)
from .patterns import (
    AnyPattern,
    ExtLoopPattern,
    KappaProfile,
    LoopPattern,
    canonical_loop_word,
    format_pattern,
    kappa,
    parse_pattern,
    period,
    profile_nfa,
    rotate,
)

logger = logging.getLogger(__name__)


# ── Representations ───────────────────────────────────────────────────────────

@dataclass(frozen=True)
class OptLetter:
    letter: str


@dataclass(frozen=True)
class Star:
    letters: frozenset

    def __post_init__(self):
        object.__setattr__(self, "letters", frozenset(self.letters))
        if not self.letters:
            raise InvalidIdealError("Star atoms need a non-empty letter set")


@dataclass(frozen=True)
class SubwordIdeal:
    atoms: tuple
    alphabet: frozenset

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        for atom in self.atoms:
            letters = {atom.letter} if isinstance(atom, OptLetter) else atom.letters
            if not letters <= self.alphabet:
                raise InvalidIdealError(f"atom {atom!r} leaves the alphabet")

    def normalized(self) -> "SubwordIdeal":
        """Absorb {a, ε} next to Γ* with a ∈ Γ and merge comparable neighbouring stars."""
        atoms = list(self.atoms)
        changed = True
        while changed:
            changed = False
            for i in range(len(atoms) - 1):
                x, y = atoms[i], atoms[i + 1]
                if isinstance(x, Star) and isinstance(y, Star) and (x.letters <= y.letters or y.letters <= x.letters):
                    atoms[i:i + 2] = [x if y.letters <= x.letters else y]
                elif isinstance(x, OptLetter) and isinstance(y, Star) and x.letter in y.letters:
                    del atoms[i]
                elif isinstance(x, Star) and isinstance(y, OptLetter) and y.letter in x.letters:
                    del atoms[i + 1]
                else:
                    continue
                changed = True
                break
        return SubwordIdeal(atoms, self.alphabet)


@dataclass(frozen=True)
class ConjIdeal:
    parts: tuple
    order: Conjunction

    @classmethod
    def build(cls, o: Conjunction, parts: Sequence) -> "ConjIdeal":
        """Validate the components and that the tuple is adherent to its own intersection."""
        from .adherence import tuple_adherent

        if not isinstance(o, Conjunction) or len(parts) != len(o.parts):
            raise InvalidIdealError("a conjunction ideal has one component per conjunct")
        for p, part in zip(o.parts, parts):
            check_ideal(p, part)
        ideal = cls(tuple(parts), o)
        if not tuple_adherent(o, ideal.parts, ideal_to_nfa(o, ideal)):
            raise InvalidIdealError("the component ideals are not jointly adherent to their intersection")
        return ideal


@dataclass(frozen=True)
class TransductionIdeal:
    inner: object
    order: ViaTransduction

    @classmethod
    def build(cls, o: ViaTransduction, inner) -> "TransductionIdeal":
        """Validate that ↓f(f⁻¹(J)) = J."""
        from .closures import downward_closure

        check_ideal(o.inner, inner)
        j = ideal_to_nfa(o.inner, inner)
        saturated = downward_closure(o.inner, apply_transducer(o.transducer, inverse_apply_transducer(o.transducer, j)))
        if not includes(saturated, j):
            raise InvalidIdealError("the inner ideal is not the closure of its part in the image of f")
        return cls(inner, o)


IdealRep = Union[SubwordIdeal, LoopPattern, ExtLoopPattern, ConjIdeal, TransductionIdeal]


def check_ideal(o: OrderSpec, i) -> None:
    if isinstance(o, Subword) and isinstance(i, SubwordIdeal):
        if i.alphabet != o.alphabet:
            raise InvalidIdealError("ideal and order alphabets differ")
        return
    if isinstance(o, (Subword, Mod, Labeling)) and isinstance(i, (LoopPattern, ExtLoopPattern)):
        if i.automaton != labeling_automaton(o):
            raise InvalidIdealError(f"pattern is not over the automaton of {describe_order(o)}")
        return
    if isinstance(o, Conjunction) and isinstance(i, ConjIdeal) and i.order == o:
        return
    if isinstance(o, ViaTransduction) and isinstance(i, TransductionIdeal) and i.order == o:
        return
    raise InvalidIdealError(f"{type(i).__name__} is not an ideal representation for {describe_order(o)}")


# ── Languages ─────────────────────────────────────────────────────────────────

def subword_ideal_nfa(i: SubwordIdeal) -> Nfa:
    edges = set()
    for k, atom in enumerate(i.atoms):
        edges.add((k, EPSILON, k + 1))
        if isinstance(atom, OptLetter):
            edges.add((k, atom.letter, k + 1))
        else:
            edges |= {(k, x, k) for x in atom.letters}
    n = len(i.atoms)
    return Nfa(range(n + 1), i.alphabet, edges, {0}, {n})


def _pattern_nfa(p: LoopPattern) -> Nfa:
    from .closures import downward_closure

    a = p.automaton
    if a.modulus is not None and len(p.loops) == 1 and not any(p.connectors):
        return profile_nfa(kappa(a.modulus, p.loops[0]), 0, a.alphabet)
    parts = [word_nfa(a.alphabet, p.connectors[0])]
    for v, u in zip(p.loops, p.connectors[1:]):
        parts += [star(word_nfa(a.alphabet, v)), word_nfa(a.alphabet, u)]
    return downward_closure(Labeling(a), concat(*parts))


@lru_cache(maxsize=4096)
def _ideal_nfa(i) -> Nfa:
    if isinstance(i, SubwordIdeal):
        return subword_ideal_nfa(i)
    if isinstance(i, ExtLoopPattern):
        return _ideal_nfa(i.as_loop_pattern())
    if isinstance(i, LoopPattern):
        return _pattern_nfa(i)
    if isinstance(i, ConjIdeal):
        return intersect_all(i.order.alphabet, [_ideal_nfa(p) for p in i.parts])
    if isinstance(i, TransductionIdeal):
        return trim(inverse_apply_transducer(i.order.transducer, _ideal_nfa(i.inner)))
    raise InvalidIdealError(f"unknown ideal representation {i!r}")


def ideal_to_nfa(o: OrderSpec, i) -> Nfa:
    check_ideal(o, i)
    return _ideal_nfa(i)


def ideal_includes(o: OrderSpec, i, j) -> bool:
    """Language inclusion I ⊆ J; single-loop M_d patterns compare κ profiles."""
    check_ideal(o, i)
    check_ideal(o, j)
    if _single_loop(i) and _single_loop(j):
        (ri, vi), (rj, vj) = _single_loop(i), _single_loop(j)
        d = i.d
        return ri == rj and kappa(d, vi) <= kappa(d, vj)
    return includes(_ideal_nfa(j), _ideal_nfa(i))


def _single_loop(i):
    """(residue, loop) for ↓_d v^[r] with empty connectors, else None."""
    if not isinstance(i, (LoopPattern, ExtLoopPattern)) or i.d is None:
        return None
    if len(i.loops) != 1 or any(i.connectors):
        return None
    return (i.residues[0] if isinstance(i, ExtLoopPattern) else 0), i.loops[0]


def principal_ideal(o: OrderSpec, w: Sequence):
    """Representation of ↓_o w."""
    w = as_word(w)
    if isinstance(o, Subword):
        return SubwordIdeal([OptLetter(x) for x in w], o.alphabet)
    if isinstance(o, (Mod, Labeling)):
        return LoopPattern((w,), (), labeling_automaton(o))
    if isinstance(o, ViaTransduction):
        return TransductionIdeal(principal_ideal(o.inner, o.transducer(w)), o)
    if isinstance(o, Conjunction):
        return ConjIdeal(tuple(principal_ideal(p, w) for p in o.parts), o)
    raise UnsupportedOrderError(f"no ideal representation for {describe_order(o)}")


# ── Irreducibility ────────────────────────────────────────────────────────────

def _loops_needed(p: LoopPattern) -> bool:
    full = _ideal_nfa(p)
    return all(not includes(_ideal_nfa(p.drop_loop(i)), full) for i in range(len(p.loops)))


def pattern_irreducible(p: AnyPattern) -> bool:
    """No loop can be dropped; extended patterns also need clean connector borders."""
    if isinstance(p, LoopPattern):
        return _loops_needed(p)
    if not _loops_needed(p.as_loop_pattern()):
        return False
    d = p.d
    n = len(p.loops)
    for i, u in enumerate(p.connectors):
        if not u:
            continue
        if i < n and u[-1] in kappa(d, p.loops[i])[d]:
            return False
        if i >= 1 and u[0] in kappa(d, p.loops[i - 1])[p.residues[i - 1] + 1]:
            return False
    return True


def _ext(connectors, loops, residues, a: LabelingAutomaton) -> ExtLoopPattern:
    return ExtLoopPattern(LoopPattern(connectors, loops, a), residues)


def _reduce_once(p: ExtLoopPattern):
    c, v, r = list(p.connectors), list(p.loops), list(p.residues)
    d, a = p.d, p.automaton
    base = p.as_loop_pattern()
    full = _ideal_nfa(base)
    prefixes = p.prefixes()
    for i in range(len(v)):
        if includes(_ideal_nfa(base.drop_loop(i)), full):
            merged = c[:i] + [c[i] + prefixes[i] + c[i + 1]] + c[i + 2:]
            return _ext(merged, v[:i] + v[i + 1:], r[:i] + r[i + 1:], a)
    for i in range(1, len(c)):
        if c[i] and c[i][0] in kappa(d, v[i - 1])[r[i - 1] + 1]:
            r[i - 1] += 1
            c[i] = c[i][1:]
            return _ext(c, v, r, a)
    for i in range(len(v)):
        if c[i] and c[i][-1] in kappa(d, v[i])[d]:
            c[i] = c[i][:-1]
            v[i] = rotate(v[i], "right")
            r[i] += 1
            return _ext(c, v, r, a)
    return None


def make_extended_irreducible(p: AnyPattern, m: int) -> ExtLoopPattern:
    """Shorten p until no loop is redundant and no connector letter can move into a loop.

    Each step lowers Σ|uᵢ| + n·d: dropping a loop whose removal keeps the ideal,
    absorbing a connector's first letter into the preceding loop's residue, or
    moving a connector's last letter into the next loop (rotated so that letter
    comes first). Rotation keeps periods, so the bound m survives.
    """
    if isinstance(p, LoopPattern):
        if p.d is None:
            raise PreconditionError("M_d pattern", "extended patterns need a modular host")
        p = ExtLoopPattern.from_loop_pattern(p)
    for v in p.loops:
        if period(p.d, v) > m:
            raise PreconditionError("period bound", f"π_{p.d}({join_word(v)}) exceeds {m}")
    target = _ideal_nfa(p)
    steps = 0
    while (nxt := _reduce_once(p)) is not None:
        p = nxt
        steps += 1
    if not equivalent(_ideal_nfa(p), target):
        raise CertificationError(f"rewriting changed the ideal of {format_pattern(p)}")
    if not pattern_irreducible(p):
        raise CertificationError(f"{format_pattern(p)} is still reducible")
    logger.debug("reduced pattern in %d steps to %s", steps, format_pattern(p))
    return p


# ── Decomposition ─────────────────────────────────────────────────────────────

def _enumerate_small_words(alphabet, bound: int) -> Iterator[tuple]:
    letters = sorted_letters(alphabet)
    for n in range(bound + 1):
        yield from itertools.product(letters, repeat=n)


def validate_downward_closed(o: OrderSpec, l: Nfa, bound: int = 3) -> None:
    """Sample words up to ``bound``; raises PreconditionError on a counterexample."""
    words = list(_enumerate_small_words(o.alphabet, bound))
    for w in words:
        if not accepts(l, w):
            continue
        for u in words:
            if len(u) <= len(w) and order_leq(o, u, w) and not accepts(l, u):
                raise PreconditionError(
                    "downward closed", f"{join_word(u)!r} ⪯ {join_word(w)!r} but only the latter is accepted"
                )


def _lift(a: LabelingAutomaton, l: Nfa) -> tuple:
    """ε-free product of l with a: states (p, s), edges and the accepting states."""
    l = trim(remove_epsilon(l))
    start = sorted(((p, a.initial) for p in l.initial), key=sort_key)
    seen = set(start)
    stack = list(start)
    edges = []
    while stack:
        p, s = stack.pop()
        for x, dsts in sorted(l.successors.get(p, {}).items(), key=sort_key):
            t = a.delta[s, x]
            for p2 in sorted(dsts, key=sort_key):
                edges.append(((p, s), x, (p2, t)))
                if (p2, t) not in seen:
                    seen.add((p2, t))
                    stack.append((p2, t))
    final = {(p, s) for p, s in seen if p in l.final}
    return start, sorted(set(edges), key=sort_key), final


def _loop_patterns(a: LabelingAutomaton, l: Nfa) -> list:
    start, edges, final = _lift(a, l)
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted({e[0] for e in edges} | {e[2] for e in edges} | set(start), key=sort_key))
    for src, x, dst in edges:
        if not graph.has_edge(src, dst):
            graph.add_edge(src, dst, letter=x)
    cond = nx.condensation(graph)
    scc = cond.graph["mapping"]
    internal: dict = {}
    bridges: dict = {}
    for e in edges:
        if scc[e[0]] == scc[e[2]]:
            internal.setdefault(scc[e[0]], []).append(e)
        else:
            bridges.setdefault(e[0], []).append(e)
    paths: dict = {}

    def path_word(src, dst) -> tuple:
        if (src, dst) not in paths:
            members = cond.nodes[scc[src]]["members"]
            nodes = nx.shortest_path(graph.subgraph(members), src, dst)
            paths[src, dst] = tuple(graph.edges[x, y]["letter"] for x, y in zip(nodes, nodes[1:]))
        return paths[src, dst]

    def loop_word(z) -> tuple:
        return tuple(itertools.chain.from_iterable(
            path_word(z, s) + (x,) + path_word(t, z) for s, x, t in internal[scc[z]]
        ))

    found: set = set()

    def walk(entry, connectors: tuple, loops: tuple, current: tuple):
        c = scc[entry]
        if c in internal:
            connectors, loops, current = connectors + (current,), loops + (loop_word(entry),), ()
        for exit_ in sorted(cond.nodes[c]["members"], key=sort_key):
            through = current + path_word(entry, exit_)
            if exit_ in final:
                found.add((connectors + (through,), loops))
            for _, x, nxt in bridges.get(exit_, ()):
                walk(nxt, connectors, loops, through + (x,))

    for z in start:
        walk(z, (), (), ())
    return [LoopPattern(cs, vs, a) for cs, vs in sorted(found, key=sort_key)]


def pattern_to_subword_ideal(p: LoopPattern) -> SubwordIdeal:
    atoms = [OptLetter(x) for x in p.connectors[0]]
    for v, u in zip(p.loops, p.connectors[1:]):
        atoms.append(Star(v))
        atoms.extend(OptLetter(x) for x in u)
    return SubwordIdeal(atoms, p.alphabet).normalized()


def _canonical_loops(p: LoopPattern) -> LoopPattern:
    d = p.d
    return LoopPattern(p.connectors, [canonical_loop_word(kappa(d, v)) for v in p.loops], p.automaton)


def maximal_ideals(o: OrderSpec, ideals: Sequence) -> list:
    """⊆-maximal members, first representative kept among equal ideals."""
    unique = list(dict.fromkeys(ideals))
    keep = []
    for k, i in enumerate(unique):
        dominated = False
        for m, j in enumerate(unique):
            if k == m or not ideal_includes(o, i, j):
                continue
            if m < k or not ideal_includes(o, j, i):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return keep


def ideal_decompose(o: OrderSpec, l: Nfa, check_bound: int = 3) -> list:
    """Pairwise incomparable ideals whose union is the downward-closed language L(l)."""
    if not isinstance(o, (Subword, Mod, Labeling)):
        raise UnsupportedOrderError(f"ideal decomposition is not available for {describe_order(o)}")
    if check_bound:
        validate_downward_closed(o, l, check_bound)
    a = labeling_automaton(o)
    patterns = _loop_patterns(a, l)
    if isinstance(o, Subword):
        candidates = [pattern_to_subword_ideal(p) for p in patterns]
    elif a.modulus is not None:
        candidates = [_canonical_loops(p) for p in patterns]
    else:
        candidates = patterns
    ideals = maximal_ideals(o, candidates)
    union = union_all(o.alphabet, [_ideal_nfa(i) for i in ideals])
    if not includes(union, l):
        raise CertificationError("decomposition misses words of the language")
    if not includes(l, union):
        raise PreconditionError("downward closed", "the language is not downward closed")
    logger.debug("decomposed into %d ideals (from %d patterns)", len(ideals), len(patterns))
    return ideals


# ── Enumeration ───────────────────────────────────────────────────────────────

def _compositions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _words_of_lengths(letters, lengths) -> Iterator[tuple]:
    pools = [list(itertools.product(letters, repeat=n)) for n in lengths]
    yield from itertools.product(*pools)


def _nonempty_subsets(letters) -> list:
    return [frozenset(c) for n in range(1, len(letters) + 1) for c in itertools.combinations(letters, n)]


def _subword_ideals(alphabet, budget: int) -> Iterator[SubwordIdeal]:
    letters = sorted_letters(alphabet)
    atoms = [OptLetter(x) for x in letters] + [Star(s) for s in _nonempty_subsets(letters)]
    seen = set()
    for n in range(budget + 1):
        for combo in itertools.product(atoms, repeat=n):
            ideal = SubwordIdeal(combo, alphabet).normalized()
            if ideal not in seen:
                seen.add(ideal)
                yield ideal


def _profiles(d: int, letters) -> Iterator[KappaProfile]:
    for sets in itertools.product(_nonempty_subsets(letters), repeat=d):
        yield KappaProfile(d, tuple(sets))


def _loop_pattern_ideals(a: LabelingAutomaton, budget: int) -> Iterator[LoopPattern]:
    """Patterns of size Σ|uᵢ| + n ≤ budget; M_d loops are canonical profile words."""
    letters = sorted_letters(a.alphabet)
    if a.modulus is not None:
        loop_pool = [canonical_loop_word(p) for p in _profiles(a.modulus, letters)]
    else:
        loop_pool = [w for n in range(1, budget + 1) for w in itertools.product(letters, repeat=n)]
    for size in range(budget + 1):
        for n in range(size + 1):
            for lengths in _compositions(size - n, n + 1):
                for connectors in _words_of_lengths(letters, lengths):
                    for loops in itertools.product(loop_pool, repeat=n):
                        try:
                            yield LoopPattern(connectors, loops, a)
                        except InvalidIdealError:
                            continue


def ideal_size(i) -> int:
    if isinstance(i, SubwordIdeal):
        return len(i.atoms)
    if isinstance(i, (LoopPattern, ExtLoopPattern)):
        return sum(map(len, i.connectors)) + len(i.loops)
    if isinstance(i, ConjIdeal):
        return sum(ideal_size(p) for p in i.parts)
    if isinstance(i, TransductionIdeal):
        return ideal_size(i.inner)
    raise InvalidIdealError(f"unknown ideal representation {i!r}")


def enumerate_ideals(o: OrderSpec, budget: int) -> Iterator:
    """Canonical enumeration of ideal representations up to size ``budget``."""
    if isinstance(o, Subword):
        yield from _subword_ideals(o.alphabet, budget)
    elif isinstance(o, (Mod, Labeling)):
        yield from _loop_pattern_ideals(labeling_automaton(o), budget)
    elif isinstance(o, ViaTransduction):
        for j in enumerate_ideals(o.inner, budget):
            try:
                yield TransductionIdeal.build(o, j)
            except InvalidIdealError:
                continue
    elif isinstance(o, Conjunction):
        pools = [list(enumerate_ideals(p, budget)) for p in o.parts]
        combos = sorted(itertools.product(*pools), key=lambda c: sum(map(ideal_size, c)))
        for parts in combos:
            try:
                yield ConjIdeal.build(o, parts)
            except InvalidIdealError:
                continue
    else:
        raise UnsupportedOrderError(f"ideal enumeration is not available for {describe_order(o)}")


# ── Text form ─────────────────────────────────────────────────────────────────

def ideal_text(i) -> str:
    if isinstance(i, SubwordIdeal):
        parts = [
            f"{a.letter}?" if isinstance(a, OptLetter) else "(" + "".join(sorted_letters(a.letters)) + ")*"
            for a in i.atoms
        ]
        return " ".join(parts) or "ε"
    if isinstance(i, (LoopPattern, ExtLoopPattern)):
        return format_pattern(i)
    if isinstance(i, ConjIdeal):
        return "conj[" + " ; ".join(ideal_text(p) for p in i.parts) + "]"
    if isinstance(i, TransductionIdeal):
        return "via[" + ideal_text(i.inner) + "]"
    raise InvalidIdealError(f"unknown ideal representation {i!r}")


def _split_top(text: str) -> list:
    parts, depth, start = [], 0, 0
    for k, ch in enumerate(text):
        depth += ch == "["
        depth -= ch == "]"
        if ch == ";" and depth == 0:
            parts.append(text[start:k])
            start = k + 1
    parts.append(text[start:])
    return [p.strip() for p in parts]


def _parse_subword_atoms(text: str, alphabet) -> SubwordIdeal:
    atoms = []
    for token in text.split():
        if token.endswith("?") and len(token) == 2:
            atoms.append(OptLetter(token[0]))
        elif token.startswith("(") and token.endswith(")*"):
            atoms.append(Star(token[1:-2]))
        elif token != "ε":
            raise PatternSyntaxError(f"bad subword atom {token!r}")
    return SubwordIdeal(atoms, alphabet)


def parse_ideal(o: OrderSpec, text: str):
    """Inverse of ``ideal_text`` for the given order."""
    text = text.strip()
    if isinstance(o, Conjunction):
        if not (text.startswith("conj[") and text.endswith("]")):
            raise PatternSyntaxError(f"expected conj[...] for {describe_order(o)}")
        inner = _split_top(text[len("conj["):-1])
        if len(inner) != len(o.parts):
            raise PatternSyntaxError("one component ideal per conjunct")
        return ConjIdeal.build(o, [parse_ideal(p, t) for p, t in zip(o.parts, inner)])
    if isinstance(o, ViaTransduction):
        if not (text.startswith("via[") and text.endswith("]")):
            raise PatternSyntaxError(f"expected via[...] for {describe_order(o)}")
        return TransductionIdeal.build(o, parse_ideal(o.inner, text[len("via["):-1]))
    if isinstance(o, Subword):
        tokens = text.split()
        if all(t.endswith(("?", ")*")) or t == "ε" for t in tokens):
            return _parse_subword_atoms(text, o.alphabet)
        p = parse_pattern(text, build_md(1, o.alphabet))
        return pattern_to_subword_ideal(p if isinstance(p, LoopPattern) else p.as_loop_pattern())
    if isinstance(o, (Mod, Labeling)):
        return parse_pattern(text, labeling_automaton(o))
    raise UnsupportedOrderError(f"no ideal representation for {describe_order(o)}")
