"""
Residue profiles and loop patterns for the modular orders.

Positions are 1-based; the residue of position p modulo d is taken in
``[1, d]``. ``kappa(d, w)`` maps every residue to the letters occurring at such
positions; a word w lies in the single-loop ideal ↓_d v^[r] exactly when
|w| ≡ r (mod d) and ``kappa(d, w) <= kappa(d, v)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .automata import EPSILON, LabelingAutomaton, Nfa, as_word, join_word, sorted_letters
from .errors import InvalidIdealError, PatternSyntaxError, PreconditionError


# ── κ profiles ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class KappaProfile:
    d: int
    sets: tuple

    def __getitem__(self, residue: int) -> frozenset:
        return self.sets[(residue - 1) % self.d]

    def __le__(self, other: "KappaProfile") -> bool:
        if self.d != other.d:
            raise PreconditionError("same modulus", f"cannot compare κ_{self.d} with κ_{other.d}")
        return all(a <= b for a, b in zip(self.sets, other.sets))

    @property
    def letters(self) -> frozenset:
        return frozenset().union(*self.sets)

    def as_dict(self) -> dict:
        return {i + 1: sorted_letters(s) for i, s in enumerate(self.sets)}


def kappa(d: int, w: Sequence) -> KappaProfile:
    if d < 1:
        raise PreconditionError("d ≥ 1", f"got d = {d}")
    sets = [set() for _ in range(d)]
    for p, x in enumerate(w):
        sets[p % d].add(x)
    return KappaProfile(d, tuple(frozenset(s) for s in sets))


def divisors(n: int) -> list:
    return [t for t in range(1, n + 1) if n % t == 0]


def period(d: int, v: Sequence) -> int:
    """Least divisor t of d with κ_d(v)(i + t) = κ_d(v)(i) for i in [1, d − t]."""
    profile = kappa(d, v)
    for t in divisors(d):
        if all(profile.sets[i] == profile.sets[i + t] for i in range(d - t)):
            return t
    return d


def rotate(w: Sequence, direction: str = "right", count: int = 1) -> tuple:
    """ρ (``"right"``: va ↦ av) or λ (``"left"``), applied ``count`` times."""
    w = as_word(w)
    if not w:
        return w
    c = count % len(w)
    if direction == "right":
        return w[len(w) - c:] + w[:len(w) - c]
    if direction == "left":
        return w[c:] + w[:c]
    raise PreconditionError("direction", f"expected 'right' or 'left', got {direction!r}")


def d_embedding(d: int, u: Sequence, v: Sequence) -> Optional[tuple]:
    """Leftmost residue-preserving embedding of u into v as 1-based positions, or None."""
    u, v = as_word(u), as_word(v)
    if (len(v) - len(u)) % d:
        return None
    positions = []
    j = 0
    for i, x in enumerate(u):
        while j < len(v) and (v[j] != x or (j - i) % d):
            j += 1
        if j == len(v):
            return None
        positions.append(j + 1)
        j += 1
    return tuple(positions)


def canonical_loop_word(profile: KappaProfile) -> tuple:
    """A word of length divisible by d realizing ``profile``; block j holds the j-th letter of each residue."""
    if not all(profile.sets):
        raise PreconditionError("full profile", "a loop profile needs a letter at every residue")
    columns = [sorted_letters(s) for s in profile.sets]
    blocks = max(len(c) for c in columns)
    return tuple(c[j] if j < len(c) else c[0] for j in range(blocks) for c in columns)


def profile_nfa(profile: KappaProfile, residue: int, alphabet: Iterable) -> Nfa:
    """Automaton for {w : |w| ≡ residue (mod d), κ_d(w) ⊆ profile}."""
    d = profile.d
    edges = {(i, x, (i + 1) % d) for i in range(d) for x in profile.sets[i]}
    return Nfa(range(d), alphabet, edges, {0}, {residue % d})


def in_single_loop_ideal(d: int, w: Sequence, v: Sequence, r: int = 0) -> bool:
    return (len(w) - r) % d == 0 and kappa(d, w) <= kappa(d, v)


# ── Loop patterns ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class LoopPattern:
    """u₀ (v₁) u₁ ⋯ (vₙ) uₙ over a labeling automaton; every vᵢ is read on a cycle."""

    connectors: tuple
    loops: tuple
    automaton: LabelingAutomaton

    def __post_init__(self):
        object.__setattr__(self, "connectors", tuple(as_word(u) for u in self.connectors))
        object.__setattr__(self, "loops", tuple(as_word(v) for v in self.loops))
        if len(self.connectors) != len(self.loops) + 1:
            raise InvalidIdealError("a pattern with n loops has n + 1 connectors")
        for w in self.connectors + self.loops:
            if not set(w) <= self.automaton.alphabet:
                raise InvalidIdealError(f"pattern word {join_word(w)!r} leaves the alphabet")
        if any(not v for v in self.loops):
            raise InvalidIdealError("loops must be non-empty")
        d = self.automaton.modulus
        if d is not None:
            if any(len(v) % d for v in self.loops):
                raise InvalidIdealError(f"loops of M_{d} patterns have length divisible by {d}")
            return
        q = self.automaton.initial
        for u, v in zip(self.connectors, self.loops):
            q = self.automaton.target(q, u)
            if self.automaton.target(q, v) != q:
                raise InvalidIdealError(f"loop {join_word(v)!r} is not read on a cycle")

    @property
    def d(self) -> Optional[int]:
        return self.automaton.modulus

    @property
    def alphabet(self) -> frozenset:
        return self.automaton.alphabet

    def word(self, k: int) -> tuple:
        """u₀ v₁^k u₁ ⋯ vₙ^k uₙ."""
        out = self.connectors[0]
        for v, u in zip(self.loops, self.connectors[1:]):
            out += v * k + u
        return out

    def drop_loop(self, i: int) -> "LoopPattern":
        connectors = self.connectors[:i] + (self.connectors[i] + self.connectors[i + 1],) + self.connectors[i + 2:]
        return LoopPattern(connectors, self.loops[:i] + self.loops[i + 1:], self.automaton)


@dataclass(frozen=True)
class ExtLoopPattern:
    """u₀ v₁^[r₁] u₁ ⋯ vₙ^[rₙ] uₙ for M_d, denoting ↓_d u₀ v₁* w₁ u₁ ⋯ with wᵢ the rᵢ-prefix of vᵢ."""

    base: LoopPattern
    residues: tuple

    def __post_init__(self):
        d = self.base.d
        if d is None:
            raise InvalidIdealError("extended loop patterns live over M_d")
        object.__setattr__(self, "residues", tuple(r % d for r in self.residues))
        if len(self.residues) != len(self.base.loops):
            raise InvalidIdealError("one residue per loop")

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def connectors(self) -> tuple:
        return self.base.connectors

    @property
    def loops(self) -> tuple:
        return self.base.loops

    @property
    def automaton(self) -> LabelingAutomaton:
        return self.base.automaton

    @property
    def alphabet(self) -> frozenset:
        return self.base.alphabet

    def prefixes(self) -> tuple:
        return tuple(v[:r] for v, r in zip(self.loops, self.residues))

    def as_loop_pattern(self) -> LoopPattern:
        """The plain pattern u₀ (v₁) w₁u₁ ⋯ (vₙ) wₙuₙ generating the same ideal."""
        moved = tuple(w + u for w, u in zip(self.prefixes(), self.connectors[1:]))
        return LoopPattern((self.connectors[0],) + moved, self.loops, self.automaton)

    def word(self, k: int) -> tuple:
        return self.as_loop_pattern().word(k)

    @classmethod
    def from_loop_pattern(cls, p: LoopPattern) -> "ExtLoopPattern":
        return cls(p, (0,) * len(p.loops))


AnyPattern = Union[LoopPattern, ExtLoopPattern]


# ── Pattern literals ──────────────────────────────────────────────────────────

_TOKEN = re.compile(r"\s*(?:\((?P<loop>[^()\s]*)\)(?:\[(?P<res>\d+)\])?|(?P<word>[^()\[\]\s]+))")


def _letters(text: str) -> tuple:
    return () if text in ("", "ε", EPSILON) else tuple(text)


def parse_pattern(text: str, automaton: LabelingAutomaton) -> AnyPattern:
    """Parse ``u0 (v1)[r1] u1 ... un``; any explicit residue makes the pattern extended."""
    connectors = [()]
    loops = []
    residues = []
    extended = False
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PatternSyntaxError(f"cannot parse pattern at offset {pos} in {text!r}")
        pos = m.end()
        if m.group("word") is not None:
            connectors[-1] += _letters(m.group("word"))
            continue
        loops.append(_letters(m.group("loop")))
        residues.append(int(m.group("res") or 0))
        extended |= m.group("res") is not None
        connectors.append(())
    try:
        base = LoopPattern(connectors, loops, automaton)
        return ExtLoopPattern(base, residues) if extended else base
    except InvalidIdealError as exc:
        raise PatternSyntaxError(f"{text!r}: {exc}") from exc


def format_pattern(p: AnyPattern) -> str:
    parts = []
    residues = p.residues if isinstance(p, ExtLoopPattern) else None
    for i, u in enumerate(p.connectors):
        if u:
            parts.append("".join(map(str, u)))
        if i < len(p.loops):
            loop = "(" + "".join(map(str, p.loops[i])) + ")"
            if residues is not None:
                loop += f"[{residues[i]}]"
            parts.append(loop)
    return " ".join(parts) or "ε"
