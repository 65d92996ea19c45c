"""
Pumping for the modular orders.

A word of ↓_d v^[r] read by an m-state automaton can be stretched by (ℓ−1)d
letters without leaving the automaton's language: some block of at most m
period-length factors is read on a cycle and can be repeated. The same move
applied to the length-d factors of a d-embedding's gaps lifts it to an
ℓd-embedding (``pad_power``), applied around the border of two loops it lifts
↓_d v₁*v₂* to ↓_ℓd (v₁^ℓ)*(v₂^ℓ)* (``pad_border``), and applied segment by
segment to an association witness it lifts an adherent pattern at d to one
at ℓd (``pump_pattern``).

A repeated block keeps the profile relative to v^ℓ whenever gcd(|v|/d, ℓ) = 1,
since κ_ℓd(v^ℓ) then repeats κ_d(v). Otherwise a gap is resized by repeating
or dropping one cycle-read block; when that fails too the construction raises
CertificationError.
"""
from __future__ import annotations

import logging
from math import factorial
from typing import Optional, Sequence

from .adherence import adherence_member
from .automata import (
    EPSILON,
    Nfa,
    accepts,
    as_word,
    build_md,
    concat,
    intersect,
    intersect_all,
    join_word,
    remove_epsilon,
    shortest_word,
    sort_key,
    step,
    trim,
    word_nfa,
)
from .errors import CertificationError, PreconditionError
from .ideals import ideal_to_nfa, pattern_irreducible
from .orders import Mod, mod_leq, upward_closure_word
from .patterns import (
    AnyPattern,
    ExtLoopPattern,
    KappaProfile,
    LoopPattern,
    d_embedding,
    format_pattern,
    in_single_loop_ideal,
    kappa,
    period,
    profile_nfa,
    rotate,
)

logger = logging.getLogger(__name__)


# ── Preconditions ─────────────────────────────────────────────────────────────

def _check_host(a: Nfa, m: int) -> None:
    if m < 1:
        raise PreconditionError("m ≥ 1", f"got m = {m}")
    if len(a.states) > m:
        raise PreconditionError("|A| ≤ m", f"the automaton has {len(a.states)} states, m = {m}")


def _check_loop(m: int, d: int, v: tuple) -> int:
    if not v or len(v) % d:
        raise PreconditionError("|v| ∈ dℕ", f"loop {join_word(v)!r} has length {len(v)}, d = {d}")
    t = period(d, v)
    if t > m * m:
        raise PreconditionError("π_d(v) ≤ m²", f"π_{d}({join_word(v)}) = {t} exceeds {m * m}")
    return t


def _check_factor(ell: int) -> None:
    if ell < 1:
        raise PreconditionError("ℓ ≥ 1", f"got ℓ = {ell}")


def _check_modulus(m: int, d: int, factor: int = 1) -> None:
    bound = factor * factorial(m ** 3)
    if d % bound:
        name = "(m³)! | d" if factor == 1 else f"{factor}·(m³)! | d"
        raise PreconditionError(name, f"d = {d} is not a multiple of {bound}")


# ── Runs and blocks ───────────────────────────────────────────────────────────

def _accepting_run(a: Nfa, u: tuple) -> list:
    """States q₀ ⋯ q_|u| of one accepting run of the ε-free version of a."""
    e = remove_epsilon(a)
    layers = [frozenset(e.initial)]
    for x in u:
        layers.append(step(e, layers[-1], x))
    ends = sorted(layers[-1] & e.final, key=sort_key)
    if not ends:
        raise PreconditionError("u ∈ L(A)", f"{join_word(u)!r} is not accepted")
    run = [ends[0]]
    for i in range(len(u) - 1, -1, -1):
        run.append(min(
            (q for q in layers[i] if run[-1] in e.successors.get(q, {}).get(u[i], ())),
            key=sort_key,
        ))
    run.reverse()
    return run


def _pumps(run: list, word: tuple, lo: int, hi: int, t: int, m: int, gap: int):
    """word[lo:hi] with one cycle-read block, cut on multiples of t from lo, repeated to add ``gap`` letters."""
    cuts = range(lo, hi + 1, t)
    for i in cuts:
        for j in cuts:
            size = j - i
            if size <= 0 or size > m * t or gap % size:
                continue
            if run[i] == run[j]:
                yield word[lo:i] + word[i:j] * (1 + gap // size) + word[j:hi]


def _fits(profile: KappaProfile, piece: tuple, offset: int = 0) -> bool:
    """Whether ``piece`` placed after ``offset`` letters stays inside ``profile``."""
    return all(x in profile[offset + j + 1] for j, x in enumerate(piece))


def _lift_factor(run, word, lo, hi, t, m, gap, profile, offset) -> Optional[tuple]:
    for piece in _pumps(run, word, lo, hi, t, m, gap):
        if _fits(profile, piece, offset):
            return piece
    return None


def _resize(run: list, word: tuple, lo: int, hi: int, big: int, profile: KappaProfile, offset: int) -> Optional[tuple]:
    """word[lo:hi] with one cycle-read block repeated or dropped until its length is a multiple of ``big``."""
    n = hi - lo
    for i in range(lo, hi):
        for j in range(i + 1, hi + 1):
            if run[i] != run[j]:
                continue
            size = j - i
            for copies in range(big + 1):
                if (n + (copies - 1) * size) % big:
                    continue
                piece = word[lo:i] + word[i:j] * copies + word[j:hi]
                if _fits(profile, piece, offset):
                    return piece
    return None


def _pad_gap(run, word, lo, hi, m, d, t, ell, profile, offset) -> Optional[tuple]:
    big = ell * d
    piece = word[lo:hi]
    if len(piece) % big == 0 and _fits(profile, piece, offset):
        return piece
    factors = []
    for f in range(lo, hi, d):
        lifted = _lift_factor(run, word, f, f + d, t, m, (ell - 1) * d, profile, offset + (f - lo) // d * big)
        if lifted is None:
            break
        factors.append(lifted)
    else:
        return sum(factors, ())
    logger.debug("no factor-wise pump keeps %r inside κ_%d; resizing one block", join_word(piece), big)
    return _resize(run, word, lo, hi, big, profile, offset)


def _exact_length(alphabet, n: int) -> Nfa:
    edges = {(i, x, i + 1) for i in range(n) for x in alphabet}
    return Nfa(range(n + 1), alphabet, edges, {0}, {n})


# ── Words ─────────────────────────────────────────────────────────────────────

def pump_word_up(a: Nfa, m: int, d: int, v: Sequence, r: int, u: Sequence, ell: int):
    """A word u' ∈ L(a) of length |u| + (ℓ−1)d lying in ↓_ℓd (v^ℓ)^[|u'| mod ℓd]."""
    v, u = as_word(v), as_word(u)
    _check_host(a, m)
    _check_factor(ell)
    _check_modulus(m, d)
    t = _check_loop(m, d, v)
    if not in_single_loop_ideal(d, u, v, r):
        raise PreconditionError("u ∈ ↓_d v^[r]", f"{join_word(u)!r} is not in the ideal of ({join_word(v)})[{r}]")
    if len(u) < m * t:
        raise PreconditionError("|u| ≥ m·π_d(v)", f"|u| = {len(u)} is shorter than {m * t}")
    if not accepts(a, u):
        raise PreconditionError("u ∈ L(A)", f"{join_word(u)!r} is not accepted")
    if ell == 1:
        return join_word(u)
    big = ell * d
    target = kappa(big, v * ell)
    gap = (ell - 1) * d
    run = _accepting_run(a, u)
    for candidate in _pumps(run, u, 0, len(u), t, m, gap):
        if kappa(big, candidate) <= target:
            logger.debug("pumped %r to %r", join_word(u), join_word(candidate))
            return join_word(candidate)
    n = len(u) + gap
    logger.info("no aligned block of %r pumps into κ_%d(v^%d); searching words of length %d", join_word(u), big, ell, n)
    found = shortest_word(intersect_all(a.alphabet, [a, _exact_length(a.alphabet, n), profile_nfa(target, n, a.alphabet)]))
    if found is None:
        raise CertificationError(f"no word of length {n} in L(A) ∩ ↓_{big}({join_word(v)})^{ell}")
    return join_word(found)


def _power_window(run, word, lo, hi, m, d, v, w, ell) -> tuple:
    """Pad every gap of the leftmost d-embedding of w into word[lo:hi] to a multiple of ℓd."""
    x = word[lo:hi]
    positions = d_embedding(d, w, x)
    big = ell * d
    target = kappa(big, v * ell)
    t = period(d, v)
    out = ()
    start = 0
    for p in list(positions) + [len(x) + 1]:
        piece = _pad_gap(run, word, lo + start, lo + p - 1, m, d, t, ell, target, len(out))
        if piece is None:
            raise CertificationError(
                f"the gap of {join_word(x)!r} at {start} cannot be brought to a multiple of {big} inside κ_{big}"
            )
        out += piece
        if p <= len(x):
            out += x[p - 1:p]
        start = p
    if not (mod_leq(big, w, out) and in_single_loop_ideal(big, out, v * ell, len(w) % big)):
        raise CertificationError(f"{join_word(w)!r} has no ℓd-embedding inside ↓_{big}({join_word(v)})^{ell}")
    return out


def pad_power(a: Nfa, m: int, d: int, v: Sequence, r: int, u: Sequence, w: Sequence, ell: int):
    """From w ⊑_d u ∈ L(a) ∩ ↓_d v^[r], a word u' ∈ L(a) with w ⊑_ℓd u' ∈ ↓_ℓd (v^ℓ)^[|w| mod ℓd].

    Every gap of the leftmost d-embedding is kept when its length is already a
    multiple of ℓd, otherwise each of its length-d factors is pumped by (ℓ−1)d
    letters along a cycle of the run.
    """
    v, u, w = as_word(v), as_word(u), as_word(w)
    _check_host(a, m)
    _check_factor(ell)
    _check_modulus(m, d)
    _check_loop(m, d, v)
    if not in_single_loop_ideal(d, u, v, r):
        raise PreconditionError("u ∈ ↓_d v^[r]", f"{join_word(u)!r} is not in the ideal of ({join_word(v)})[{r}]")
    if d_embedding(d, w, u) is None:
        raise PreconditionError("w ⊑_d u", f"{join_word(w)!r} does not d-embed into {join_word(u)!r}")
    run = _accepting_run(a, u)
    out = _power_window(run, u, 0, len(u), m, d, v, w, ell)
    if not accepts(a, out):
        raise CertificationError(f"padded word {join_word(out)!r} left L(A)")
    logger.debug("padded %r to %r", join_word(u), join_word(out))
    return join_word(out)


def _border_split(d: int, u: tuple, v1: tuple, v2: tuple) -> Optional[int]:
    """A cut k with u[:k] inside κ_d(v₁) and u[k:] inside κ_d(v₂), cuts on multiples of d first."""
    if len(u) % d:
        return None
    left, right = kappa(d, v1), kappa(d, v2)
    n = len(u)
    prefix = [True]
    for j, x in enumerate(u):
        prefix.append(prefix[-1] and x in left[j + 1])
    suffix = [True] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix[j] = suffix[j + 1] and u[j] in right[j + 1]
    cuts = [k for k in range(n + 1) if prefix[k] and suffix[k]]
    if not cuts:
        return None
    return min(cuts, key=lambda k: (k % d != 0, k))


def _border_window(run, word, lo, hi, m, d, v1, v2, ell) -> tuple:
    """Lift word[lo:hi] ∈ ↓_d v₁*v₂* to ↓_ℓd (v₁^ℓ)*(v₂^ℓ)*.

    The word splits as x₁⋯x_p s t y₁⋯y_q with |s| + |t| = d; every x and y is
    pumped, and so is the longer of s and t, which has at least d/2 letters.
    """
    u = word[lo:hi]
    k = _border_split(d, u, v1, v2)
    big = ell * d
    gap = (ell - 1) * d
    left, right = kappa(big, v1 * ell), kappa(big, v2 * ell)
    t1, t2 = period(d, v1), period(d, v2)
    p, r = divmod(k, d)
    segments = [(f, f + d, t1, left, True) for f in range(0, p * d, d)]
    y0 = k
    if r:
        segments.append((p * d, k, t1, left, 2 * r >= d))
        segments.append((k, (p + 1) * d, t2, right, 2 * r < d))
        y0 = (p + 1) * d
    segments.extend((f, f + d, t2, right, True) for f in range(y0, len(u), d))
    out = ()
    for start, end, t, profile, pumped in segments:
        if not pumped:
            out += u[start:end]
            continue
        piece = _lift_factor(run, word, lo + start, lo + end, t, m, gap, profile, len(out))
        if piece is None:
            raise CertificationError(f"no cycle-read block of {join_word(u[start:end])!r} stays inside κ_{big}")
        out += piece
    if _border_split(big, out, v1 * ell, v2 * ell) is None:
        raise CertificationError(
            f"{join_word(out)!r} left ↓_{big}({join_word(v1)})^{ell}*({join_word(v2)})^{ell}*"
        )
    return out


def pad_border(a: Nfa, m: int, d: int, v1: Sequence, v2: Sequence, u: Sequence, ell: int):
    """From u ∈ L(a) ∩ ↓_d v₁*v₂*, a word u' ∈ L(a) ∩ ↓_ℓd (v₁^ℓ)*(v₂^ℓ)* read along the same cycles."""
    v1, v2, u = as_word(v1), as_word(v2), as_word(u)
    _check_host(a, m)
    _check_factor(ell)
    _check_modulus(m, d, 2)
    _check_loop(m, d, v1)
    _check_loop(m, d, v2)
    if _border_split(d, u, v1, v2) is None:
        raise PreconditionError(
            "u ∈ ↓_d v₁*v₂*", f"{join_word(u)!r} is not in ↓_{d}({join_word(v1)})*({join_word(v2)})*"
        )
    if not accepts(a, u):
        raise PreconditionError("u ∈ L(A)", f"{join_word(u)!r} is not accepted")
    if ell == 1:
        return join_word(u)
    out = _border_window(_accepting_run(a, u), u, 0, len(u), m, d, v1, v2, ell)
    if not accepts(a, out):
        raise CertificationError(f"padded word {join_word(out)!r} left L(A)")
    logger.debug("padded border %r to %r", join_word(u), join_word(out))
    return join_word(out)


# ── Association witnesses ─────────────────────────────────────────────────────

def _extended(p: AnyPattern) -> ExtLoopPattern:
    return p if isinstance(p, ExtLoopPattern) else ExtLoopPattern.from_loop_pattern(p)


def _association_parts(p: ExtLoopPattern, k: int) -> list:
    """ū₀ v̄₁ ū₁ ⋯ as (kind, …) entries; loops must hold v^k followed by their residue prefix."""
    n = len(p.loops)
    parts = []
    for i, u in enumerate(p.connectors):
        if u or i in (0, n):
            parts.append(("word", u))
        else:
            parts.append(("border", rotate(p.loops[i - 1], "left", p.residues[i - 1]), p.loops[i]))
        if i < n:
            v, r = p.loops[i], p.residues[i]
            parts.append(("loop", v, r, v * k + v[:r]))
    return parts


def _border_nfa(d: int, v1: tuple, v2: tuple, alphabet) -> Nfa:
    left, right = kappa(d, v1), kappa(d, v2)
    edges = {((1, i), x, (1, (i + 1) % d)) for i in range(d) for x in left.sets[i]}
    edges |= {((2, i), x, (2, (i + 1) % d)) for i in range(d) for x in right.sets[i]}
    edges |= {((1, i), EPSILON, (2, i)) for i in range(d)}
    states = {(h, i) for h in (1, 2) for i in range(d)}
    return Nfa(states, alphabet, edges, {(1, 0)}, {(2, 0)})


def _part_nfa(d: int, part: tuple, alphabet) -> Nfa:
    kind = part[0]
    if kind == "word":
        return word_nfa(alphabet, part[1])
    if kind == "border":
        return _border_nfa(d, part[1], part[2], alphabet)
    _, v, r, need = part
    return intersect(upward_closure_word(Mod(d, alphabet), need), profile_nfa(kappa(d, v), r, alphabet))


def _part_holds(d: int, part: tuple, x: tuple) -> bool:
    kind = part[0]
    if kind == "word":
        return x == part[1]
    if kind == "border":
        return _border_split(d, x, part[1], part[2]) is not None
    _, v, r, need = part
    return in_single_loop_ideal(d, x, v, r) and mod_leq(d, need, x)


def _segments(d: int, parts: list, word: tuple) -> Optional[list]:
    """Cut points (lo, hi) of word, one per part, taking the shortest fitting segment first."""
    n = len(word)
    failed = set()

    def walk(j: int, pos: int):
        if j == len(parts):
            return [] if pos == n else None
        if (j, pos) in failed:
            return None
        for end in range(pos, n + 1):
            if _part_holds(d, parts[j], word[pos:end]):
                rest = walk(j + 1, end)
                if rest is not None:
                    return [(pos, end)] + rest
        failed.add((j, pos))
        return None

    return walk(0, 0)


def association_witness(a: Nfa, p: AnyPattern, k: int):
    """A shortest ū₀ v̄₁ ū₁ ⋯ v̄ₙ ūₙ ∈ L(a) with vᵢ^k wᵢ ⊑_d v̄ᵢ ∈ ↓_d vᵢ^[rᵢ], or None."""
    p = _extended(p)
    if a.alphabet != p.alphabet:
        raise PreconditionError("same alphabet", "the automaton and the pattern use different alphabets")
    parts = [_part_nfa(p.d, part, a.alphabet) for part in _association_parts(p, k)]
    found = shortest_word(intersect_all(a.alphabet, [a, concat(*parts)]))
    return None if found is None else join_word(found)


def pump_witness(a: Nfa, m: int, p: AnyPattern, word: Sequence, ell: int, k: int = 1):
    """Lift an association witness of p for k·ℓ to a word of the lifted pattern's ideal holding its k-th word.

    Loop segments go through the gap padding of ``pad_power``, empty inner
    connectors through the border padding of ``pad_border``; the other
    connectors are kept.
    """
    p = _extended(p)
    word = as_word(word)
    _check_host(a, m)
    _check_factor(ell)
    d = p.d
    _check_modulus(m, d, 2)
    for v in p.loops:
        _check_loop(m, d, v)
    if not accepts(a, word):
        raise PreconditionError("witness ∈ L(A)", f"{join_word(word)!r} is not accepted")
    parts = _association_parts(p, k * ell)
    cuts = _segments(d, parts, word)
    if cuts is None:
        raise PreconditionError(
            "association witness", f"{join_word(word)!r} does not split along {format_pattern(p)} for k = {k * ell}"
        )
    run = _accepting_run(a, word)
    out = ()
    for part, (lo, hi) in zip(parts, cuts):
        if part[0] == "word":
            out += word[lo:hi]
        elif part[0] == "border":
            out += _border_window(run, word, lo, hi, m, d, part[1], part[2], ell)
        else:
            out += _power_window(run, word, lo, hi, m, d, part[1], part[3], ell)
    lifted = lift_pattern(p, ell)
    big = ell * d
    if not accepts(a, out):
        raise CertificationError(f"lifted witness {join_word(out)!r} left L(A)")
    if not mod_leq(big, lifted.word(k), out):
        raise CertificationError(f"{format_pattern(lifted)} at k = {k} does not embed into {join_word(out)!r}")
    if not accepts(ideal_to_nfa(Mod(big, a.alphabet), lifted), out):
        raise CertificationError(f"{join_word(out)!r} is outside {format_pattern(lifted)}")
    logger.debug("lifted witness %r to %r", join_word(word), join_word(out))
    return join_word(out)


# ── Patterns ──────────────────────────────────────────────────────────────────

def lift_pattern(p: AnyPattern, ell: int) -> ExtLoopPattern:
    """u₀ (v₁^ℓ)[r₁] u₁ ⋯ over M_ℓd."""
    _check_factor(ell)
    if p.d is None:
        raise PreconditionError("M_d pattern", "only M_d patterns can be lifted")
    p = _extended(p)
    host = build_md(ell * p.d, p.alphabet)
    base = LoopPattern(p.connectors, [v * ell for v in p.loops], host)
    return ExtLoopPattern(base, p.residues)


def pump_pattern(a: Nfa, m: int, d: int, p: AnyPattern, ell: int, k: int = 1) -> ExtLoopPattern:
    """Lift an irreducible pattern adherent at d to M_ℓd.

    An association witness for k·ℓ is lifted by ``pump_witness``; the lifted
    pattern is then certified by the adherence engine.
    """
    _check_host(a, m)
    _check_factor(ell)
    if p.d != d:
        raise PreconditionError("pattern over M_d", f"the pattern lives over M_{p.d}, d = {d}")
    _check_modulus(m, d, 2)
    for v in p.loops:
        _check_loop(m, d, v)
    ext = _extended(p)
    if not pattern_irreducible(ext):
        raise PreconditionError("irreducible", f"{format_pattern(ext)} is reducible as an extended pattern")
    if not adherence_member(Mod(d, a.alphabet), p, trim(a)):
        raise PreconditionError("adherence", f"{format_pattern(p)} is not in the adherence of L(A) at d = {d}")
    word = association_witness(a, ext, k * ell)
    if word is None:
        raise CertificationError(f"L(A) holds no association witness of {format_pattern(ext)} for k = {k * ell}")
    lifted_word = pump_witness(a, m, ext, word, ell, k)
    lifted = lift_pattern(ext, ell)
    if not adherence_member(Mod(ell * d, a.alphabet), lifted, trim(a)):
        raise CertificationError(f"{format_pattern(lifted)} is not adherent at d = {ell * d}")
    logger.debug("pumped %s to %s through %r", format_pattern(p), format_pattern(lifted), lifted_word)
    return lifted
