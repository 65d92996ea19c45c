"""
Reading and writing automata.

Two formats are supported: the structured format (JSON or YAML, validated by
``schemas.AutomatonModel``) and a line-oriented ``.aut`` format::

    alphabet a b
    states q0 q1
    initial q0
    final q1
    counters c
    q0 a q1 c=1
    q1 - q0

``-`` is the ε label. DOT export is provided for rendering.
"""
import json
from pathlib import Path
from typing import Union

import yaml
from pydantic import ValidationError

from .automata import (
    CounterAutomaton,
    CounterEdge,
    CountingAutomaton,
    LabelingAutomaton,
    Nfa,
    SequentialTransducer,
    check_one_run,
    relabel,
    sort_key,
    sorted_letters,
)
from .errors import AutomatonFormatError
from .schemas import AutomatonModel, EdgeModel, MonoidModel, TransducerModel

EPSILON_TOKEN = "-"
DIRECTIVES = ("alphabet", "states", "initial", "final", "counters")


# ── Loading raw documents ─────────────────────────────────────────────────────

def _load_document(path: Path):
    text = path.read_text(encoding="utf-8")
    suffix = path.suffix.lower()
    try:
        if suffix in (".yaml", ".yml"):
            return yaml.safe_load(text)
        if suffix == ".json":
            return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise AutomatonFormatError(f"{path}: {exc}") from exc
    if suffix == ".aut" or not text.lstrip().startswith("{"):
        return parse_lines(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise AutomatonFormatError(f"{path}: {exc}") from exc


def _validate(model_cls, data, origin: str):
    try:
        return model_cls.model_validate(data)
    except ValidationError as exc:
        raise AutomatonFormatError(f"{origin}: {exc}") from exc


# ── Line format ───────────────────────────────────────────────────────────────

def parse_lines(text: str) -> dict:
    """Parse the line-oriented format into the structured-format dictionary."""
    doc: dict = {"states": [], "alphabet": [], "edges": [], "initial": [], "final": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head in DIRECTIVES:
            doc[head] = rest
            continue
        if len(rest) < 2:
            raise AutomatonFormatError(f"line {lineno}: expected 'src label dst [counter=inc ...]'")
        label, target, *incs = rest
        edge = {"from": head, "label": "" if label == EPSILON_TOKEN else label, "to": target}
        if incs:
            edge["inc"] = {}
            for item in incs:
                name, sep, value = item.partition("=")
                if not sep or not value.isdigit():
                    raise AutomatonFormatError(f"line {lineno}: bad increment {item!r}")
                edge["inc"][name] = int(value)
        doc["edges"].append(edge)
    return doc


def format_lines(automaton: Union[Nfa, CounterAutomaton]) -> str:
    model = automaton_model(automaton)
    lines = [
        "alphabet " + " ".join(model.alphabet),
        "states " + " ".join(model.states),
        "initial " + " ".join(model.initial),
        "final " + " ".join(model.final),
    ]
    if model.counters is not None:
        lines.append("counters " + " ".join(model.counters))
    for e in model.edges:
        parts = [e.source, e.label or EPSILON_TOKEN, e.target]
        parts += [f"{c}={v}" for c, v in sorted((e.inc or {}).items())]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


# ── Structured format ─────────────────────────────────────────────────────────

def nfa_from_model(model: AutomatonModel) -> Nfa:
    if model.counters:
        raise AutomatonFormatError("automaton declares counters; read it as a counter automaton")
    return Nfa(
        model.states,
        model.alphabet,
        {(e.source, e.label, e.target) for e in model.edges},
        model.initial,
        model.final,
    )


def counter_from_model(model: AutomatonModel) -> CounterAutomaton:
    counters = model.counters or []
    edges = []
    for e in model.edges:
        inc = e.inc or {}
        unknown = set(inc) - set(counters)
        if unknown:
            raise AutomatonFormatError(f"undeclared counters {sorted(unknown)}")
        edges.append(CounterEdge(e.source, e.label, tuple(inc.get(c, 0) for c in counters), e.target))
    return CounterAutomaton(model.states, model.alphabet, counters, edges, model.initial, model.final)


def counting_from_model(model: AutomatonModel) -> CountingAutomaton:
    if len(model.initial) != 1:
        raise AutomatonFormatError("counting automata have exactly one initial state")
    counters = model.counters or []
    delta = {}
    for e in model.edges:
        if not e.label or (e.source, e.label) in delta:
            raise AutomatonFormatError("counting automata are deterministic and ε-free")
        inc = e.inc or {}
        delta[e.source, e.label] = (e.target, tuple(inc.get(c, 0) for c in counters))
    final_increment = {
        q: tuple(vec.get(c, 0) for c in counters) for q, vec in (model.final_inc or {}).items()
    }
    return CountingAutomaton(model.states, model.alphabet, counters, model.initial[0], delta, final_increment)


def _state_names(automaton) -> dict:
    if all(isinstance(q, str) for q in automaton.states):
        return {q: q for q in automaton.states}
    ordered = sorted(automaton.states, key=sort_key)
    return {q: f"q{i}" for i, q in enumerate(ordered)}


def automaton_model(automaton: Union[Nfa, CounterAutomaton]) -> AutomatonModel:
    """Structured model with sorted, string-named components."""
    if isinstance(automaton, Nfa) and not all(isinstance(q, str) for q in automaton.states):
        automaton = relabel(automaton)
    for a in automaton.alphabet:
        if not (isinstance(a, str) and len(a) == 1):
            raise AutomatonFormatError(f"letter {a!r} cannot be serialized; letters are single characters")
    name = _state_names(automaton)
    if isinstance(automaton, CounterAutomaton):
        edges = [
            EdgeModel(source=name[e.source], label=e.label, target=name[e.target],
                      inc={c: v for c, v in zip(automaton.counters, e.increment) if v})
            for e in automaton.edges
        ]
        counters = list(automaton.counters)
    else:
        edges = [EdgeModel(source=name[p], label=a, target=name[q]) for p, a, q in automaton.edges]
        counters = None
    edges.sort(key=lambda e: (e.source, e.label, e.target, sorted((e.inc or {}).items())))
    return AutomatonModel(
        states=sorted(name.values()),
        alphabet=sorted_letters(automaton.alphabet),
        edges=edges,
        initial=sorted(name[q] for q in automaton.initial),
        final=sorted(name[q] for q in automaton.final),
        counters=counters,
    )


def dump_automaton(automaton: Union[Nfa, CounterAutomaton]) -> str:
    return json.dumps(automaton_model(automaton).model_dump(by_alias=True, exclude_none=True), indent=2)


# ── Files ─────────────────────────────────────────────────────────────────────

def read_model(path: Union[str, Path]) -> AutomatonModel:
    path = Path(path)
    return _validate(AutomatonModel, _load_document(path), str(path))


def read_nfa(path: Union[str, Path]) -> Nfa:
    return nfa_from_model(read_model(path))


def read_counter_automaton(path: Union[str, Path]) -> CounterAutomaton:
    return counter_from_model(read_model(path))


def read_counting(path: Union[str, Path]) -> CountingAutomaton:
    return counting_from_model(read_model(path))


def read_labeling(path: Union[str, Path]) -> LabelingAutomaton:
    nfa = read_nfa(path)
    if not check_one_run(nfa):
        raise AutomatonFormatError(f"{path}: a labeling automaton needs exactly one run on every word")
    return LabelingAutomaton.from_nfa(nfa)


def transducer_from_model(model: TransducerModel) -> SequentialTransducer:
    delta = {}
    for e in model.edges:
        if (e.source, e.label) in delta:
            raise AutomatonFormatError(f"transducer is not deterministic at ({e.source}, {e.label})")
        delta[e.source, e.label] = (e.target, tuple(e.output))
    return SequentialTransducer(
        model.states, model.input_alphabet, model.output_alphabet, model.initial, delta,
        {q: tuple(w) for q, w in model.final_output.items()},
    )


def read_transducer(path: Union[str, Path]) -> SequentialTransducer:
    path = Path(path)
    return transducer_from_model(_validate(TransducerModel, _load_document(path), str(path)))


def read_monoid(path: Union[str, Path]) -> MonoidModel:
    path = Path(path)
    return _validate(MonoidModel, _load_document(path), str(path))


# ── DOT ───────────────────────────────────────────────────────────────────────

def to_dot(automaton: Union[Nfa, CounterAutomaton], name: str = "A") -> str:
    model = automaton_model(automaton)
    lines = [f'digraph "{name}" {{', "  rankdir=LR;", '  node [shape=circle];']
    for q in model.states:
        shape = "doublecircle" if q in model.final else "circle"
        lines.append(f'  "{q}" [shape={shape}];')
    for i, q in enumerate(model.initial):
        lines.append(f'  "__start{i}" [shape=point]; "__start{i}" -> "{q}";')
    for e in model.edges:
        label = e.label or "ε"
        if e.inc:
            label += " / " + ",".join(f"{c}+{v}" for c, v in sorted(e.inc.items()))
        lines.append(f'  "{e.source}" -> "{e.target}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
