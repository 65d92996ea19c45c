"""
Unboundedness of counter automata.

A counter automaton is unbounded on L when for every k some accepted word of
L has a run whose every counter is at least k. On the trimmed product with L
this holds iff some path through the SCC condensation, from an initial to a
final component, passes components whose internal edges jointly increment
every counter: each such component can be looped k times.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .automata import (
    CounterAutomaton,
    CounterEdge,
    EPSILON,
    Nfa,
    counter_restrict,
    join_word,
    sort_key,
    trim_counter,
)
from .errors import AlphabetMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Segment:
    """One visited component: enter at ``entry``, pump ``pumped`` edges, leave from ``exit``."""

    members: frozenset
    entry: object
    exit: object
    pumped: tuple
    covered: frozenset
    bridge: Optional[CounterEdge]


@dataclass(frozen=True)
class UnboundednessWitness:
    automaton: CounterAutomaton
    segments: tuple
    union: frozenset
    graph: nx.DiGraph = field(compare=False, repr=False)

    @property
    def components(self) -> tuple:
        return tuple(s.members for s in self.segments)

    def _path(self, members, src, dst) -> list:
        nodes = nx.shortest_path(self.graph.subgraph(members), src, dst)
        return [self.graph.edges[x, y]["edge"] for x, y in zip(nodes, nodes[1:])]

    def _tour(self, segment: Segment) -> list:
        """Closed walk from the entry through every pumped edge."""
        walk = []
        for e in segment.pumped:
            walk += self._path(segment.members, segment.entry, e.source)
            walk.append(e)
            walk += self._path(segment.members, e.target, segment.entry)
        return walk

    def run(self, k: int) -> tuple:
        """An accepting run on which every counter is at least k."""
        edges: list = []
        for s in self.segments:
            if s.pumped:
                edges += self._tour(s) * k
            edges += self._path(s.members, s.entry, s.exit)
            if s.bridge is not None:
                edges.append(s.bridge)
        return tuple(edges)

    def word(self, k: int):
        return join_word(e.label for e in self.run(k) if e.label != EPSILON)

    def values(self, k: int) -> dict:
        totals = [0] * len(self.automaton.counters)
        for e in self.run(k):
            for i, x in enumerate(e.increment):
                totals[i] += x
        return dict(zip(self.automaton.counters, totals))


@dataclass(frozen=True)
class UnboundednessResult:
    unbounded: bool
    witness: Optional[UnboundednessWitness] = None
    best: frozenset = frozenset()

    def __bool__(self) -> bool:
        return self.unbounded


def _mask_names(ca: CounterAutomaton, mask: int) -> frozenset:
    return frozenset(c for i, c in enumerate(ca.counters) if mask >> i & 1)


def _support(e: CounterEdge) -> int:
    return sum(1 << i for i, x in enumerate(e.increment) if x > 0)


def _edge_key(e: CounterEdge):
    return sort_key((e.source, e.label, e.increment, e.target))


def _antichain_add(masks: dict, mask: int, parent) -> bool:
    """Keep only ⊆-maximal masks; returns whether ``mask`` was added."""
    if any(mask | m == m for m in masks):
        return False
    for m in [m for m in masks if m | mask == mask]:
        del masks[m]
    masks[mask] = parent
    return True


def counter_unbounded(ca: CounterAutomaton, restrict: Optional[Nfa] = None) -> UnboundednessResult:
    """Decide unboundedness of ``ca`` on L(restrict) (on Σ* when omitted)."""
    if restrict is not None:
        if restrict.alphabet != ca.alphabet:
            raise AlphabetMismatchError(restrict.alphabet, ca.alphabet)
        ca = counter_restrict(ca, restrict)
    ca = trim_counter(ca)
    if not ca.final:
        return UnboundednessResult(False)
    edges = sorted(ca.edges, key=_edge_key)
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(ca.states, key=sort_key))
    for e in edges:
        if not graph.has_edge(e.source, e.target):
            graph.add_edge(e.source, e.target, edge=e)
    cond = nx.condensation(graph)
    scc = cond.graph["mapping"]
    pumped: dict = {c: {} for c in cond.nodes}
    for e in edges:
        c = scc[e.source]
        if c == scc[e.target] and _support(e):
            bits = _support(e)
            if all(bits | b != b for b in pumped[c]):
                pumped[c][bits] = e
    support = {c: 0 for c in cond.nodes}
    for c, by_bits in pumped.items():
        for bits in by_bits:
            support[c] |= bits
    full = (1 << len(ca.counters)) - 1
    order = list(nx.topological_sort(cond))
    masks: dict = {c: {} for c in cond.nodes}
    for q in ca.initial:
        _antichain_add(masks[scc[q]], support[scc[q]], None)
    for c in order:
        for nxt in sorted(cond.successors(c)):
            for mask in list(masks[c]):
                _antichain_add(masks[nxt], mask | support[nxt], (c, mask))
    final_components = sorted({scc[q] for q in ca.final})
    best = 0
    for c in final_components:
        for mask in masks[c]:
            if bin(mask).count("1") > bin(best).count("1"):
                best = mask
            if mask == full:
                witness = _witness(ca, graph, cond, scc, pumped, c, mask, masks)
                logger.debug("unbounded via %d components", len(witness.segments))
                return UnboundednessResult(True, witness, _mask_names(ca, full))
    logger.debug("bounded; best jointly pumpable counters %s", sorted(_mask_names(ca, best)))
    return UnboundednessResult(False, None, _mask_names(ca, best))


def _witness(ca, graph, cond, scc, pumped, last, mask, masks) -> UnboundednessWitness:
    chain = [last]
    key = (last, mask)
    while masks[key[0]][key[1]] is not None:
        key = masks[key[0]][key[1]]
        chain.append(key[0])
    chain.reverse()
    bridges = []
    for c, nxt in zip(chain, chain[1:]):
        bridges.append(min(
            (e for e in ca.edges if scc[e.source] == c and scc[e.target] == nxt),
            key=_edge_key,
        ))
    entry = min((q for q in ca.initial if scc[q] == chain[0]), key=sort_key)
    segments = []
    covered_so_far = 0
    for i, c in enumerate(chain):
        members = frozenset(cond.nodes[c]["members"])
        if i + 1 < len(chain):
            exit_ = bridges[i].source
        else:
            exit_ = min((q for q in ca.final if q in members), key=sort_key)
        edges = tuple(sorted(pumped[c].values(), key=_edge_key))
        covered = 0
        for e in edges:
            covered |= _support(e)
        covered_so_far |= covered
        segments.append(Segment(members, entry, exit_, edges, _mask_names(ca, covered),
                                bridges[i] if i + 1 < len(chain) else None))
        if i + 1 < len(chain):
            entry = bridges[i].target
    return UnboundednessWitness(ca, tuple(segments), _mask_names(ca, covered_so_far), graph)
