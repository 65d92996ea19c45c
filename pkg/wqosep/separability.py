"""
Separability of regular languages by piecewise testable languages.

K and L are separated by a boolean combination of upward closures ↑w exactly
when no ideal lies in the adherence of both. Two searches run per call:

- separators: every round B takes the atoms ↑w with |w| ≤ B, computes the
  atom types realized by words of K and of L, and when no type is shared
  greedily drops atoms and writes the K side as a formula;
- certificates: for labeling orders the common ideals are found by descending
  through decompositions of ↓K ∩ ↓L, which is complete; transduction orders
  reduce to their images and conjunctions search tuples of component ideals
  under the budget.

Every verdict is re-checked before it is returned: separators against both
languages, certificates with the adherence engine.
"""
from __future__ import annotations

import itertools
import logging
import re
import threading
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, replace
from math import factorial
from typing import Optional, Sequence, Union

from . import config
from .adherence import adherence_member, component_candidates, tuple_adherent
from .automata import (
    Nfa,
    apply_transducer,
    as_word,
    complement,
    determinize,
    includes,
    intersect,
    intersect_all,
    is_empty,
    join_word,
    remove_epsilon,
    shortest_word,
    sort_key,
    sorted_letters,
    trim,
    union_all,
)
from .closures import downward_closure
from .errors import (
    AlphabetMismatchError,
    CertificationError,
    PreconditionError,
    UnsupportedOrderError,
)
from .formats import automaton_model
from .ideals import (
    ConjIdeal,
    TransductionIdeal,
    ideal_decompose,
    ideal_size,
    ideal_text,
    ideal_to_nfa,
    make_extended_irreducible,
    principal_ideal,
)
from .orders import (
    Conjunction,
    Counting,
    Labeling,
    Mod,
    OrderSpec,
    Subword,
    ViaTransduction,
    describe_order,
    upward_closure_word,
)
from .patterns import LoopPattern, period
from .schemas import FormulaModel, VerdictModel

logger = logging.getLogger(__name__)


# ── Formulas ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Atom:
    """↑w, under the main order or under ``atom_orders[component]``."""

    word: tuple
    component: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "word", as_word(self.word))


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


Formula = Union[Atom, Not, And, Or]


def _and(args: Sequence) -> "Formula":
    return args[0] if len(args) == 1 else And(tuple(args))


def _or(args: Sequence) -> "Formula":
    return args[0] if len(args) == 1 else Or(tuple(args))


def _atom_order(o: OrderSpec, atom: Atom, atom_orders: Optional[Sequence]) -> OrderSpec:
    if atom.component is None:
        return o
    if not atom_orders or not 0 <= atom.component < len(atom_orders):
        raise PreconditionError("atom order", f"no order for atom component {atom.component}")
    return atom_orders[atom.component]


def formula_to_nfa(o: OrderSpec, f: Formula, atom_orders: Optional[Sequence] = None) -> Nfa:
    if isinstance(f, Atom):
        return upward_closure_word(_atom_order(o, f, atom_orders), f.word)
    if isinstance(f, Not):
        return trim(complement(formula_to_nfa(o, f.arg, atom_orders)))
    if isinstance(f, And):
        return intersect_all(o.alphabet, [formula_to_nfa(o, g, atom_orders) for g in f.args])
    if isinstance(f, Or):
        return trim(union_all(o.alphabet, [formula_to_nfa(o, g, atom_orders) for g in f.args]))
    raise PreconditionError("formula", f"unknown formula node {f!r}")


def formula_text(f: Formula) -> str:
    if isinstance(f, Atom):
        tag = "" if f.component is None else f"[{f.component}]"
        return "↑" + tag + ("".join(map(str, f.word)) or "ε")
    if isinstance(f, Not):
        inner = formula_text(f.arg)
        return "NOT " + (f"({inner})" if isinstance(f.arg, (And, Or)) else inner)
    if isinstance(f, And):
        if not f.args:
            return "TRUE"
        return " AND ".join(f"({formula_text(g)})" if isinstance(g, Or) else formula_text(g) for g in f.args)
    if not f.args:
        return "FALSE"
    return " OR ".join(formula_text(g) for g in f.args)


_FORMULA_TOKEN = re.compile(r"\s*(?:(?P<kw>NOT|AND|OR|TRUE|FALSE)\b|(?P<paren>[()])|↑(?:\[(?P<comp>\d+)\])?(?P<word>[^\s()]+))")


def parse_formula(text: str) -> Formula:
    """Inverse of ``formula_text``; AND binds tighter than OR."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _FORMULA_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PreconditionError("formula syntax", f"cannot parse formula at offset {pos} in {text!r}")
        pos = m.end()
        if m.group("word") is not None:
            word = () if m.group("word") == "ε" else tuple(m.group("word"))
            comp = m.group("comp")
            tokens.append(Atom(word, int(comp) if comp is not None else None))
        else:
            tokens.append(m.group("kw") or m.group("paren"))
    tokens.append(None)
    k = 0

    def peek():
        return tokens[k]

    def take():
        nonlocal k
        k += 1
        return tokens[k - 1]

    def disjunction():
        args = [conjunction()]
        while peek() == "OR":
            take()
            args.append(conjunction())
        return _or(args)

    def conjunction():
        args = [negation()]
        while peek() == "AND":
            take()
            args.append(negation())
        return _and(args)

    def negation():
        tok = take()
        if tok == "NOT":
            return Not(negation())
        if tok == "(":
            inner = disjunction()
            if take() != ")":
                raise PreconditionError("formula syntax", f"unbalanced parentheses in {text!r}")
            return inner
        if tok == "TRUE":
            return And(())
        if tok == "FALSE":
            return Or(())
        if isinstance(tok, Atom):
            return tok
        raise PreconditionError("formula syntax", f"unexpected {tok!r} in {text!r}")

    result = disjunction()
    if peek() is not None:
        raise PreconditionError("formula syntax", f"trailing input in {text!r}")
    return result


def formula_model(f: Formula) -> FormulaModel:
    if isinstance(f, Atom):
        return FormulaModel(op="atom", word="".join(map(str, f.word)), component=f.component)
    if isinstance(f, Not):
        return FormulaModel(op="not", args=[formula_model(f.arg)])
    op = "and" if isinstance(f, And) else "or"
    return FormulaModel(op=op, args=[formula_model(g) for g in f.args])


def formula_from_model(model: FormulaModel) -> Formula:
    if model.op == "atom":
        return Atom(tuple(model.word or ""), model.component)
    args = [formula_from_model(a) for a in model.args]
    if model.op == "not":
        if len(args) != 1:
            raise PreconditionError("formula", "NOT takes exactly one argument")
        return Not(args[0])
    return And(tuple(args)) if model.op == "and" else Or(tuple(args))


def verify_separator(o: OrderSpec, f: Formula, k: Nfa, l: Nfa, atom_orders: Optional[Sequence] = None) -> bool:
    """K ⊆ S and L ∩ S = ∅ for the language S of f."""
    for x in (k, l):
        if x.alphabet != o.alphabet:
            raise AlphabetMismatchError(x.alphabet, o.alphabet)
    s = formula_to_nfa(o, f, atom_orders)
    return includes(s, k) and is_empty(intersect(l, s))


# ── Verdicts ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Separable:
    formula: Formula
    separator: Nfa
    order: str
    budget: Optional[int] = None
    d_used: Optional[int] = None
    definitive: bool = True


@dataclass(frozen=True)
class Inseparable:
    certificate: object
    order: str
    witness: Optional[tuple] = None
    budget: Optional[int] = None
    d_used: Optional[int] = None
    definitive: bool = True


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    order: str
    certificate: object = None
    budget: Optional[int] = None
    d_used: Optional[int] = None
    definitive: bool = False


Verdict = Union[Separable, Inseparable, Inconclusive]


def verdict_name(v: Verdict) -> str:
    return {Separable: "separable", Inseparable: "inseparable", Inconclusive: "inconclusive"}[type(v)]


def verdict_model(v: Verdict) -> VerdictModel:
    data = dict(verdict=verdict_name(v), order=v.order, budget=v.budget, d_used=v.d_used, definitive=v.definitive)
    if isinstance(v, Separable):
        data.update(formula=formula_model(v.formula), formula_text=formula_text(v.formula),
                    separator=automaton_model(v.separator))
    else:
        if v.certificate is not None:
            data["certificate"] = ideal_text(v.certificate)
        if isinstance(v, Inseparable) and v.witness is not None:
            data["witness"] = "".join(map(str, v.witness))
        if isinstance(v, Inconclusive):
            data["reason"] = v.reason
    return VerdictModel(**data)


# ── Separators ────────────────────────────────────────────────────────────────

def _words_up_to(alphabet, bound: int) -> list:
    letters = sorted_letters(alphabet)
    return [w for n in range(bound + 1) for w in itertools.product(letters, repeat=n)]


def _types(nfa: Nfa, dfas: list) -> set:
    """Atom membership vectors of the accepted words."""
    e = trim(remove_epsilon(nfa))
    start = [(q, tuple(d.initial for d in dfas)) for q in sorted(e.initial, key=sort_key)]
    seen = set(start)
    stack = list(start)
    out = set()
    while stack:
        q, vec = stack.pop()
        if q in e.final:
            out.add(tuple(s in d.final for s, d in zip(vec, dfas)))
        for x, dsts in e.successors.get(q, {}).items():
            nvec = tuple(d.delta[s, x] for s, d in zip(vec, dfas))
            for q2 in dsts:
                if (q2, nvec) not in seen:
                    seen.add((q2, nvec))
                    stack.append((q2, nvec))
    return out


def _project(types: set, keep: list) -> set:
    return {tuple(t[j] for j in keep) for t in types}


def _dnf(types: set, atoms: list) -> Formula:
    terms = []
    for t in sorted(types):
        terms.append(_and([a if bit else Not(a) for a, bit in zip(atoms, t)]))
    return _or(terms)


def _separator_round(o: OrderSpec, k: Nfa, l: Nfa, bound: int, atom_orders: Optional[Sequence]) -> Optional[Formula]:
    components = [None] if not atom_orders else list(range(len(atom_orders)))
    atoms = [Atom(w, c) for c in components for w in _words_up_to(o.alphabet, bound)]
    dfas = [determinize(upward_closure_word(_atom_order(o, a, atom_orders), a.word)) for a in atoms]
    tk, tl = _types(k, dfas), _types(l, dfas)
    if tk & tl:
        logger.debug("round %d: %d shared atom types", bound, len(tk & tl))
        return None
    keep = list(range(len(atoms)))
    for j in reversed(range(len(atoms))):
        trial = [i for i in keep if i != j]
        if not _project(tk, trial) & _project(tl, trial):
            keep = trial
    kept = [atoms[i] for i in keep]
    pk, pl = _project(tk, keep), _project(tl, keep)
    if len(pl) < len(pk):
        return Not(_dnf(pl, kept))
    return _dnf(pk, kept)


# ── Certificates ──────────────────────────────────────────────────────────────

def _labeling_common(o: OrderSpec, k: Nfa, l: Nfa):
    """An ideal adherent to both K and L, or None; complete for labeling orders.

    A common adherent ideal lies in some maximal ideal J of ↓K ∩ ↓L. Either J
    itself adheres to both, or the ideal lies in ↓(K ∩ J) ∩ ↓(L ∩ J), which is
    strictly smaller than J; the descent terminates because the order is a wqo.
    """
    explored: dict = {}

    def descend(z: Nfa, depth: int):
        if z in explored:
            return explored[z]
        explored[z] = None
        for j in ideal_decompose(o, z, check_bound=0):
            jn = ideal_to_nfa(o, j)
            dk = downward_closure(o, trim(intersect(k, jn)))
            dl = downward_closure(o, trim(intersect(l, jn)))
            if includes(dk, jn) and includes(dl, jn):
                logger.debug("common adherent ideal %s at depth %d", ideal_text(j), depth)
                explored[z] = j
                return j
            inner = trim(intersect(dk, dl))
            if is_empty(inner):
                continue
            found = descend(inner, depth + 1)
            if found is not None:
                explored[z] = found
                return found
        return None

    z = trim(intersect(downward_closure(o, k), downward_closure(o, l)))
    return None if is_empty(z) else descend(z, 0)


def _conjunction_common(o: Conjunction, k: Nfa, l: Nfa, budget: int):
    for extra in (False, True):
        pools = [component_candidates(p, [k, l], budget, extra) for p in o.parts]
        combos = sorted(itertools.product(*pools), key=lambda c: (sum(map(ideal_size, c)), [ideal_text(i) for i in c]))
        for parts in combos:
            inter = intersect_all(o.alphabet, [ideal_to_nfa(p, i) for p, i in zip(o.parts, parts)])
            if is_empty(inter):
                continue
            if tuple_adherent(o, parts, k) and tuple_adherent(o, parts, l):
                return ConjIdeal(tuple(parts), o)
    return None


def _common_ideal(o: OrderSpec, k: Nfa, l: Nfa, budget: int) -> tuple:
    """(ideal or None, whether None is a proof that none exists)."""
    if isinstance(o, (Subword, Mod, Labeling)):
        return _labeling_common(o, k, l), True
    if isinstance(o, ViaTransduction):
        inner, complete = _common_ideal(o.inner, apply_transducer(o.transducer, k), apply_transducer(o.transducer, l), budget)
        return (None if inner is None else TransductionIdeal(inner, o)), complete
    if isinstance(o, Conjunction):
        return _conjunction_common(o, k, l, budget), False
    if isinstance(o, Counting):
        return None, False
    raise UnsupportedOrderError(f"separability is not available for {describe_order(o)}")


def _prefer_irreducible(cert, period_bound: Optional[int]):
    """Turn an M_d loop pattern into an irreducible extended pattern when its periods allow."""
    if not isinstance(cert, LoopPattern) or cert.d is None or not cert.loops:
        return cert
    m = max(period(cert.d, v) for v in cert.loops)
    if period_bound is not None and m > period_bound:
        logger.debug("certificate periods exceed %d; kept as found", period_bound)
        return cert
    return make_extended_irreducible(cert, m)


def _certify(o: OrderSpec, cert, k: Nfa, l: Nfa) -> None:
    if not (adherence_member(o, cert, k) and adherence_member(o, cert, l)):
        raise CertificationError(f"{ideal_text(cert)} is not adherent to both languages")


# ── Entry points ──────────────────────────────────────────────────────────────

def ptl_separate(
    o: OrderSpec,
    k: Nfa,
    l: Nfa,
    budget: Optional[int] = None,
    deepen: bool = False,
    atom_orders: Optional[Sequence] = None,
    period_bound: Optional[int] = None,
    parallel: bool = False,
) -> Verdict:
    """Decide whether a boolean combination of upward closures separates K from L.

    With ``atom_orders`` the atoms are upward closures under those orders
    instead of o; o still drives the certificate search. ``deepen`` keeps
    adding separator rounds past the budget once no common ideal can exist;
    it is ignored with ``atom_orders``, whose atoms may never separate.

    Languages sharing a word are Inseparable with that word as witness. The
    certificate is ↓_o of the word, or None for orders without an ideal
    representation such as counting orders.

    With ``parallel`` both searches run in threads and the first decisive
    one wins; the other stops at its next round.
    """
    budget = config.DEFAULT_BUDGET if budget is None else budget
    for x in (k, l):
        if x.alphabet != o.alphabet:
            raise AlphabetMismatchError(x.alphabet, o.alphabet)
    name = describe_order(o)
    k, l = trim(k), trim(l)
    meet = shortest_word(trim(intersect(k, l)))
    if meet is not None:
        try:
            cert = principal_ideal(o, meet)
        except UnsupportedOrderError:
            cert = None
        if cert is not None:
            _certify(o, cert, k, l)
        logger.debug("languages share %r", join_word(meet))
        return Inseparable(cert, name, witness=meet, budget=budget)

    def certificates():
        try:
            return _common_ideal(o, k, l, budget)
        except UnsupportedOrderError:
            if atom_orders is None:
                raise
            return None, False

    def separators(limit: int, stop: Optional[threading.Event] = None):
        for b in range(limit + 1):
            if stop is not None and stop.is_set():
                return None, b
            f = _separator_round(o, k, l, b, atom_orders)
            if f is not None:
                return f, b
        return None, limit

    if parallel:
        stop = threading.Event()
        pool = ThreadPoolExecutor(max_workers=2)
        try:
            side2 = pool.submit(certificates)
            side1 = pool.submit(separators, budget, stop)
            wait([side1, side2], return_when=FIRST_COMPLETED)
            if side1.done() and side1.result()[0] is not None:
                (cert, complete), (formula, used) = (None, False), side1.result()
            else:
                cert, complete = side2.result()
                formula, used = (None, budget) if cert is not None else side1.result()
        finally:
            # a round already running finishes in the background
            stop.set()
            pool.shutdown(wait=False, cancel_futures=True)
    else:
        cert, complete = certificates()
        formula, used = (None, budget) if cert is not None else separators(budget)

    if cert is not None:
        cert = _prefer_irreducible(cert, period_bound)
        _certify(o, cert, k, l)
        return Inseparable(cert, name, budget=budget)

    if formula is None and complete and deepen and atom_orders is None:
        b = budget
        while formula is None:
            b += 1
            logger.info("deepening separator search to words of length %d", b)
            formula = _separator_round(o, k, l, b, atom_orders)
        used = b

    if formula is None:
        reason = (
            f"no common adherent ideal exists, but no separator over words of length ≤ {budget} was found"
            if complete else f"neither a separator nor a common ideal within budget {budget}"
        )
        return Inconclusive(reason, name, budget=budget)

    if not verify_separator(o, formula, k, l, atom_orders):
        raise CertificationError(f"formula {formula_text(formula)} does not separate")
    logger.debug("separator %s at round %d", formula_text(formula), used)
    return Separable(formula, formula_to_nfa(o, formula, atom_orders), name, budget=used)


def is_ptl(o: OrderSpec, l: Nfa, budget: Optional[int] = None, deepen: bool = False, parallel: bool = False) -> Verdict:
    """L is a PTL for o iff it is separable from its complement."""
    return ptl_separate(o, l, trim(complement(l)), budget, deepen=deepen, parallel=parallel)


def mod_bound(m: int) -> int:
    """2·(m³)!: the modulus up to which BΣ1[MOD] separability is decided."""
    if m < 1:
        raise PreconditionError("m ≥ 1", f"got m = {m}")
    return 2 * factorial(m ** 3)


def _bound_fits(m: int, cap: int) -> bool:
    value = 2
    for i in range(2, m ** 3 + 1):
        value *= i
        if value > cap:
            return False
    return value <= cap


def _divisor_ladder(cap: int) -> list:
    """Highly composite numbers up to cap: 1, 2, 4, 6, 12, 24, 36, 48, 60, ..."""
    counts = [0] * (cap + 1)
    for i in range(1, cap + 1):
        for j in range(i, cap + 1, i):
            counts[j] += 1
    ladder, best = [], 0
    for n in range(1, cap + 1):
        if counts[n] > best:
            ladder.append(n)
            best = counts[n]
    return ladder


def _state_bound(k: Nfa, l: Nfa) -> int:
    return max(len(k.states), len(l.states), 1)


def mod_separate_fixed(
    d: int, k: Nfa, l: Nfa, budget: Optional[int] = None, deepen: bool = False, parallel: bool = False,
) -> Verdict:
    """Separability by BΣ1[MOD[d]]: PTLs of the order M_d."""
    m = _state_bound(k, l)
    v = ptl_separate(Mod(d, k.alphabet), k, l, budget, deepen=deepen, period_bound=m * m, parallel=parallel)
    return replace(v, d_used=d)


def mod_separate(
    k: Nfa, l: Nfa, max_d: Optional[int] = None, budget: Optional[int] = None, deepen: bool = False, parallel: bool = False,
) -> Verdict:
    """Separability by BΣ1[MOD]; definitive when 2·(m³)! fits under ``max_d`` or a separator is found."""
    max_d = config.MAX_D if max_d is None else max_d
    if k.alphabet != l.alphabet:
        raise AlphabetMismatchError(k.alphabet, l.alphabet)
    meet = shortest_word(trim(intersect(k, l)))
    if meet is not None:
        return Inseparable(principal_ideal(Mod(1, k.alphabet), meet), "mod", witness=meet, budget=budget, d_used=1)
    m = _state_bound(k, l)
    if _bound_fits(m, max_d):
        d = mod_bound(m)
        v = mod_separate_fixed(d, k, l, budget, deepen, parallel)
        return replace(v, order="mod", definitive=not isinstance(v, Inconclusive))
    last: Optional[Verdict] = None
    for d in _divisor_ladder(max_d):
        v = mod_separate_fixed(d, k, l, budget, deepen, parallel)
        logger.debug("d = %d: %s", d, verdict_name(v))
        if isinstance(v, Separable):
            return replace(v, order="mod", definitive=True)
        last = v
    reason = f"no separator for d ≤ {max_d}; deciding BΣ1[MOD] needs d = 2·({m}³)!"
    certificate = last.certificate if last is not None else None
    return Inconclusive(reason, "mod", certificate=certificate, budget=last.budget if last else budget,
                        d_used=last.d_used if last else None)
