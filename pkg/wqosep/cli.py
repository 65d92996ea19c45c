"""
Command-line interface: one subcommand per engine operation.

Exit codes: 0 when a decision was computed (whatever it is), 2 for an
inconclusive separability verdict, 1 for input errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import config
from .adherence import adherence_member, association_check
from .automata import accepts, build_md, join_word, sorted_letters
from .closures import downward_closure, sup_decide, upward_closure
from .counters import counter_unbounded
from .errors import WqoError
from .formats import dump_automaton, format_lines, read_counter_automaton, read_nfa, to_dot
from .ideals import ideal_decompose, ideal_text, ideal_to_nfa, make_extended_irreducible, parse_ideal, pattern_irreducible
from .orders import order_leq, parse_order, upward_closure_word
from .patterns import d_embedding, format_pattern, kappa, parse_pattern, period
from .pumping import pump_pattern, pump_word_up
from .schemas import FormulaModel
from .separability import (
    Inconclusive,
    Inseparable,
    Separable,
    formula_from_model,
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

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


# ── Argument helpers ──────────────────────────────────────────────────────────

def _word(text: str) -> tuple:
    return () if text in ("", "ε", "-") else tuple(text)


def _alphabet(args, *words) -> frozenset:
    if getattr(args, "alphabet", None):
        return frozenset(args.alphabet)
    letters = frozenset(x for w in words for x in w)
    if not letters:
        raise WqoError("the alphabet cannot be inferred from empty words; pass --alphabet")
    return letters


def _order(args, alphabet) -> object:
    return parse_order(args.order, alphabet, base_dir=Path.cwd())


def _print_bool(args, value: bool) -> int:
    print(json.dumps({"result": value}) if args.json else str(value).lower())
    return EXIT_OK


def _print_automaton(args, automaton) -> int:
    if args.dot:
        print(to_dot(automaton), end="")
    elif args.json:
        print(dump_automaton(automaton))
    else:
        print(format_lines(automaton), end="")
    return EXIT_OK


def _print_verdict(args, v) -> int:
    if args.json:
        print(verdict_model(v).model_dump_json(indent=2, exclude_none=True))
    else:
        suffix = f" (d = {v.d_used})" if v.d_used is not None else ""
        if isinstance(v, Separable):
            print(f"SEPARABLE formula: {formula_text(v.formula)}{suffix}")
        elif isinstance(v, Inseparable):
            line = "INSEPARABLE"
            if v.certificate is not None:
                line += f" certificate: {ideal_text(v.certificate)}"
            if v.witness is not None:
                line += f" witness: {join_word(v.witness) or 'ε'}"
            print(line + suffix)
        else:
            print(f"INCONCLUSIVE {v.reason}{suffix}")
            if v.certificate is not None:
                print(f"certificate: {ideal_text(v.certificate)}")
    return EXIT_INCONCLUSIVE if isinstance(v, Inconclusive) else EXIT_OK


# ── Subcommands ───────────────────────────────────────────────────────────────

def cmd_compare(args) -> int:
    u, v = _word(args.u), _word(args.v)
    return _print_bool(args, order_leq(_order(args, _alphabet(args, u, v)), u, v))


def cmd_up_word(args) -> int:
    w = _word(args.word)
    return _print_automaton(args, upward_closure_word(_order(args, _alphabet(args, w)), w))


def cmd_down(args) -> int:
    l = read_nfa(args.file)
    return _print_automaton(args, downward_closure(_order(args, l.alphabet), l, args.budget))


def cmd_up(args) -> int:
    l = read_nfa(args.file)
    return _print_automaton(args, upward_closure(_order(args, l.alphabet), l))


def cmd_ideals(args) -> int:
    l = read_nfa(args.file)
    o = _order(args, l.alphabet)
    closed = l if args.closed else downward_closure(o, l, args.budget)
    texts = [ideal_text(i) for i in ideal_decompose(o, closed, check_bound=3 if args.closed else 0)]
    print(json.dumps({"ideals": texts}) if args.json else "\n".join(texts))
    return EXIT_OK


def cmd_member(args) -> int:
    w = _word(args.word)
    o = _order(args, _alphabet(args, w))
    ideal = ideal_to_nfa(o, parse_ideal(o, args.ideal))
    return _print_bool(args, accepts(ideal, w))


def cmd_adhere(args) -> int:
    l = read_nfa(args.file)
    o = _order(args, l.alphabet)
    return _print_bool(args, adherence_member(o, parse_ideal(o, args.ideal), l, route=args.route))


def cmd_kappa(args) -> int:
    w = _word(args.word)
    profile = kappa(args.d, w)
    t = period(args.d, w) if w and len(w) % args.d == 0 else None
    if args.json:
        print(json.dumps({"d": args.d, "profile": profile.as_dict(), "period": t}))
    else:
        for residue, letters in profile.as_dict().items():
            print(f"{residue}: {' '.join(map(str, letters))}")
    return EXIT_OK


def cmd_period(args) -> int:
    t = period(args.d, _word(args.word))
    print(json.dumps({"period": t}) if args.json else t)
    return EXIT_OK


def cmd_embed(args) -> int:
    positions = d_embedding(args.d, _word(args.u), _word(args.v))
    if args.json:
        print(json.dumps({"embedding": list(positions) if positions is not None else None}))
    else:
        print("none" if positions is None else " ".join(map(str, positions)))
    return EXIT_OK


def _pattern(args, *extra_words):
    alphabet = frozenset(args.alphabet) if args.alphabet else frozenset(
        x for x in args.pattern + "".join(extra_words) if x not in "()[]0123456789 ε"
    )
    return parse_pattern(args.pattern, build_md(args.d, alphabet))


def cmd_irreducible(args) -> int:
    return _print_bool(args, pattern_irreducible(_pattern(args)))


def cmd_reduce_pattern(args) -> int:
    p = make_extended_irreducible(_pattern(args), args.m)
    print(json.dumps({"pattern": format_pattern(p)}) if args.json else format_pattern(p))
    return EXIT_OK


def cmd_associate(args) -> int:
    l = read_nfa(args.file)
    args.alphabet = args.alphabet or "".join(sorted_letters(l.alphabet))
    return _print_bool(args, association_check(_pattern(args), l))


def cmd_unbounded(args) -> int:
    ca = read_counter_automaton(args.file)
    restrict = read_nfa(args.restrict) if args.restrict else None
    result = counter_unbounded(ca, restrict)
    if args.json:
        data = {"unbounded": result.unbounded, "best": sorted(result.best)}
        if result.witness is not None:
            data["components"] = len(result.witness.segments)
            data["word_k2"] = result.witness.word(2)
        print(json.dumps(data))
        return EXIT_OK
    print("unbounded" if result else "bounded")
    if result.witness is not None:
        print(f"witness for k=2: {result.witness.word(2) or 'ε'}")
    elif result.best:
        print(f"jointly pumpable: {' '.join(sorted(result.best))}")
    return EXIT_OK


def cmd_sup(args) -> int:
    return _print_bool(args, sup_decide(read_nfa(args.file), list(args.letters)))


def cmd_separate(args) -> int:
    k, l = read_nfa(args.left), read_nfa(args.right)
    o = _order(args, k.alphabet)
    return _print_verdict(args, ptl_separate(o, k, l, args.budget, deepen=args.deepen, parallel=args.parallel))


def cmd_is_ptl(args) -> int:
    l = read_nfa(args.file)
    return _print_verdict(args, is_ptl(_order(args, l.alphabet), l, args.budget, args.deepen, args.parallel))


def cmd_mod_separate(args) -> int:
    k, l = read_nfa(args.left), read_nfa(args.right)
    if args.d is not None:
        v = mod_separate_fixed(args.d, k, l, args.budget, args.deepen, args.parallel)
    else:
        v = mod_separate(k, l, args.max_d, args.budget, args.deepen, args.parallel)
    return _print_verdict(args, v)


def cmd_mod_bound(args) -> int:
    value = mod_bound(args.m)
    print(json.dumps({"m": args.m, "d": str(value)}) if args.json else value)
    return EXIT_OK


def cmd_pump(args) -> int:
    a = read_nfa(args.file)
    args.alphabet = args.alphabet or "".join(sorted_letters(a.alphabet))
    if args.loop is not None:
        u = pump_word_up(a, args.m, args.d, _word(args.loop), args.residue, _word(args.pattern), args.ell)
        text = join_word(u) or "ε"
        print(json.dumps({"word": text}) if args.json else text)
        return EXIT_OK
    p = pump_pattern(a, args.m, args.d, _pattern(args), args.ell)
    print(json.dumps({"pattern": format_pattern(p)}) if args.json else format_pattern(p))
    return EXIT_OK


def cmd_verify(args) -> int:
    k, l = read_nfa(args.left), read_nfa(args.right)
    o = _order(args, k.alphabet)
    source = Path(args.formula)
    if source.is_file():
        formula = formula_from_model(FormulaModel.model_validate_json(source.read_text(encoding="utf-8")))
    else:
        formula = parse_formula(args.formula)
    return _print_bool(args, verify_separator(o, formula, k, l))


# ── Parser ────────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--dot", action="store_true", help="DOT output for automata")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    common.add_argument("--alphabet", help="letters of the alphabet, e.g. ab")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--budget", type=int, default=None, help=f"search budget (default {config.DEFAULT_BUDGET})")
    search.add_argument("--deepen", action="store_true", help="keep deepening once no certificate can exist")
    search.add_argument("--parallel", action="store_true", help="run both searches concurrently")

    parser = argparse.ArgumentParser(prog="wqosep", description="Well-quasi-orders on words and PTL separability")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, parents=(common,)):
        p = sub.add_parser(name, help=help_text, parents=list(parents))
        p.set_defaults(func=func)
        return p

    p = add("compare", cmd_compare, "decide u ⪯ v")
    p.add_argument("--order", required=True)
    p.add_argument("u")
    p.add_argument("v")

    p = add("up-word", cmd_up_word, "automaton of ↑w")
    p.add_argument("--order", required=True)
    p.add_argument("word")

    for name, func, text in (("down", cmd_down, "automaton of ↓L"), ("up", cmd_up, "automaton of ↑L")):
        p = add(name, func, text, (common, search))
        p.add_argument("--order", required=True)
        p.add_argument("file")

    p = add("ideals", cmd_ideals, "ideal decomposition of ↓L", (common, search))
    p.add_argument("--order", required=True)
    p.add_argument("--closed", action="store_true", help="the input is already downward closed")
    p.add_argument("file")

    p = add("member", cmd_member, "decide w ∈ I")
    p.add_argument("--order", required=True)
    p.add_argument("ideal")
    p.add_argument("word")

    p = add("adhere", cmd_adhere, "decide I ∈ Adh(L)")
    p.add_argument("--order", required=True)
    p.add_argument("--route", choices=["counter", "closure"], default="counter")
    p.add_argument("file")
    p.add_argument("ideal")

    for name, func, text in (("kappa", cmd_kappa, "residue profile κ_d(w)"), ("period", cmd_period, "period π_d(v)")):
        p = add(name, func, text)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("word")

    p = add("embed", cmd_embed, "leftmost d-embedding of u into v")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("u")
    p.add_argument("v")

    p = add("irreducible", cmd_irreducible, "decide irreducibility of a loop pattern")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("pattern")

    p = add("reduce-pattern", cmd_reduce_pattern, "irreducible extended form of a pattern")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True, help="period bound")
    p.add_argument("pattern")

    p = add("associate", cmd_associate, "association of a pattern with L")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("file")
    p.add_argument("pattern")

    p = add("unbounded", cmd_unbounded, "unboundedness of a counter automaton")
    p.add_argument("--restrict", help="automaton of the language to restrict to")
    p.add_argument("file")

    p = add("sup", cmd_sup, "decide a₁*⋯aₙ* ⊆ ↓L")
    p.add_argument("file")
    p.add_argument("letters")

    p = add("separate", cmd_separate, "PTL separability of K and L", (common, search))
    p.add_argument("--order", default="subword")
    p.add_argument("left")
    p.add_argument("right")

    p = add("is-ptl", cmd_is_ptl, "decide whether L is a PTL", (common, search))
    p.add_argument("--order", default="subword")
    p.add_argument("file")

    p = add("mod-separate", cmd_mod_separate, "BΣ1[MOD] separability", (common, search))
    p.add_argument("--d", type=int, default=None, help="fixed modulus")
    p.add_argument("--max-d", type=int, default=None, help=f"largest modulus tried (default {config.MAX_D})")
    p.add_argument("left")
    p.add_argument("right")

    p = add("mod-bound", cmd_mod_bound, "the modulus 2·(m³)!")
    p.add_argument("m", type=int)

    p = add("pump", cmd_pump, "lift an adherent pattern (or a word with --loop) from d to ℓ·d")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--loop", help="pump the word argument inside ↓_d loop^[residue]")
    p.add_argument("--residue", type=int, default=0)
    p.add_argument("file")
    p.add_argument("pattern", help="pattern, or the word with --loop")

    p = add("verify", cmd_verify, "check a separator formula")
    p.add_argument("--order", default="subword")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("formula", help="formula text or a JSON file")
    return parser


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config.setup_logging(args.verbose)
    try:
        return args.func(args)
    except (WqoError, OSError, ValueError) as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_cli())
