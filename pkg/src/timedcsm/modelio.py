"""Reading and writing the line-oriented model format.

::

    # comment
    automaton TRAIN
      clocks x
      state s0 init
      state s1 outputs app
      trans s0 -> s1 when 1 reset x
      trans s1 -> s1 when 1 guard x <= 5
    end

Composite states are written as tuples ``(s0,t1)``.  Region automata use
``STATE@ints=... zero=... order=... beyond=...`` state names and may
declare ``bounds x:5`` and ``outputs a b`` at block level.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .clock import parse_constraint, parse_descriptor
from .csm import CsmAutomaton
from .errors import ModelError, TcsmError
from .formula import FormulaSyntaxError, parse_formula, to_text
from .rcsm import ACTION, PROGRESS, RcsmAutomaton, RState, RTransition
from .tcsm import TcsmAutomaton, TimedTransition

_IDENT = r"[A-Za-z_][A-Za-z0-9_']*"
_IDENT_RE = re.compile(_IDENT + r"\Z")
_DESC_RE = re.compile(r"@ints=(\S*) zero=(\S*) order=(\S*) beyond=(\S*)")
_GLUE = "\x00"
_TRANS_RE = re.compile(
    r"trans\s+(?P<src>\S+)\s*->\s*(?P<dst>\S+)\s+when\s+(?P<when>.*?)"
    r"(?:\s+guard\s+(?P<guard>.*?))?(?:\s+reset(?P<reset>(?:\s+\S+)*))?\s*\Z"
)


@dataclass
class ModelFile:
    automata: list = field(default_factory=list)
    name: str = ""
    path: Optional[str] = None

    def get(self, name):
        for a in self.automata:
            if a.name == name:
                return a
        raise KeyError(name)


# -- state names ----------------------------------------------------------

def format_state(s) -> str:
    if isinstance(s, RState):
        return f"{format_state(s.state)}@{s.region.descriptor()}"
    if isinstance(s, tuple):
        return "(" + ",".join(format_state(x) for x in s) + ")"
    return str(s)


def parse_state_name(text: str):
    """Inverse of ``format_state`` for plain and tuple states."""
    pos = 0

    def parse():
        nonlocal pos
        if text.startswith("(", pos):
            pos += 1
            items = [parse()]
            while text.startswith(",", pos):
                pos += 1
                items.append(parse())
            if not text.startswith(")", pos):
                raise TcsmError(f"malformed state tuple {text!r}")
            pos += 1
            return tuple(items)
        m = re.compile(_IDENT).match(text, pos)
        if not m:
            raise TcsmError(f"malformed state name {text!r}")
        pos = m.end()
        return m.group(0)

    value = parse()
    if pos != len(text):
        raise TcsmError(f"malformed state name {text!r}")
    return value


# -- reader ---------------------------------------------------------------

class _Block:
    def __init__(self, name, line):
        self.name = name
        self.line = line
        self.clocks = None
        self.bounds = None
        self.outputs = None
        self.states = []
        self.state_lines = {}
        self.out = {}
        self.init = None
        self.trans = []
        self.pairs = {}
        self.regional = None


def _glue(line):
    return _DESC_RE.sub(lambda m: "@" + _GLUE.join(
        f"{k}={v}" for k, v in zip(("ints", "zero", "order", "beyond"), m.groups())), line)


def _split_state(token):
    """'name' or 'name@desc' -> (state, descriptor or None)."""
    name, at, desc = token.partition("@")
    return parse_state_name(name), (desc.replace(_GLUE, " ") if at else None)


def parse_model(text: str, path: Optional[str] = None, name: str = "") -> ModelFile:
    model = ModelFile([], name, path)
    block = None
    seen_names = {}

    def fail(msg, lineno):
        raise ModelError(msg, lineno, path)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        line = _glue(line)
        words = line.split()
        head = words[0]
        if head == "automaton":
            if block is not None:
                fail(f"automaton {block.name!r} is missing 'end'", lineno)
            if len(words) != 2 or not _IDENT_RE.match(words[1]):
                fail("expected 'automaton NAME'", lineno)
            if words[1] in seen_names:
                fail(f"duplicate automaton {words[1]!r} (first at line {seen_names[words[1]]})", lineno)
            seen_names[words[1]] = lineno
            block = _Block(words[1], lineno)
            continue
        if block is None:
            fail(f"{head!r} outside an automaton block", lineno)
        try:
            if head == "end":
                if len(words) != 1:
                    fail("unexpected text after 'end'", lineno)
                model.automata.append(_finish(block, path))
                block = None
            elif head == "clocks":
                if block.clocks is not None:
                    fail("'clocks' given twice", lineno)
                for x in words[1:]:
                    if not _IDENT_RE.match(x):
                        fail(f"invalid clock name {x!r}", lineno)
                if len(set(words[1:])) != len(words) - 1:
                    fail("duplicate clock", lineno)
                block.clocks = words[1:]
            elif head == "bounds":
                if block.bounds is not None:
                    fail("'bounds' given twice", lineno)
                block.bounds = {}
                for item in words[1:]:
                    x, colon, n = item.partition(":")
                    if not colon or not n.isdigit():
                        fail(f"malformed bound {item!r} (expected clock:NAT)", lineno)
                    block.bounds[x] = int(n)
            elif head == "outputs":
                if block.outputs is not None:
                    fail("'outputs' given twice", lineno)
                block.outputs = words[1:]
            elif head == "state":
                _read_state(block, words, lineno, fail)
            elif head == "trans":
                m = _TRANS_RE.match(line)
                if not m:
                    fail("expected 'trans SRC -> DST when FORMULA [guard GUARD] [reset CLOCKS]'", lineno)
                src, src_desc = _split_state(m["src"])
                dst, dst_desc = _split_state(m["dst"])
                key = ((src, src_desc), (dst, dst_desc))
                if key in block.pairs:
                    fail(
                        f"duplicate transition {m['src']} -> {m['dst']} "
                        f"(first declared at line {block.pairs[key]})".replace(_GLUE, " "),
                        lineno,
                    )
                block.pairs[key] = lineno
                try:
                    trigger = parse_formula(m["when"])
                except FormulaSyntaxError as exc:
                    fail(f"bad formula: {exc}", lineno)
                guard = parse_constraint(m["guard"]) if m["guard"] is not None else None
                resets = (m["reset"] or "").split()
                block.trans.append((lineno, src, src_desc, dst, dst_desc, trigger, guard, resets))
            else:
                fail(f"unknown directive {head!r}", lineno)
        except ModelError:
            raise
        except TcsmError as exc:
            fail(str(exc), lineno)
    if block is not None:
        raise ModelError(f"automaton {block.name!r} is missing 'end'", block.line, path)
    return model


def _read_state(block, words, lineno, fail):
    if len(words) < 2:
        fail("expected 'state NAME [init] [outputs ...]'", lineno)
    state, desc = _split_state(words[1])
    regional = desc is not None
    if block.regional is None:
        block.regional = regional
    elif block.regional != regional:
        fail("mixing region states and plain states in one automaton", lineno)
    key = (state, desc)
    if key in block.state_lines:
        fail(f"duplicate state {words[1].replace(_GLUE, ' ')!r} "
             f"(first declared at line {block.state_lines[key]})", lineno)
    block.state_lines[key] = lineno
    rest = words[2:]
    if rest and rest[0] == "init":
        if block.init is not None:
            fail("more than one initial state", lineno)
        block.init = key
        rest = rest[1:]
    outs = []
    if rest:
        if rest[0] != "outputs":
            fail(f"unexpected {rest[0]!r} in state declaration", lineno)
        outs = rest[1:]
        for x in outs:
            if not _IDENT_RE.match(x):
                fail(f"invalid signal name {x!r}", lineno)
    block.states.append(key)
    block.out[key] = frozenset(outs)


def _finish(block, path):
    def fail(msg, lineno=block.line):
        raise ModelError(msg, lineno, path)

    if block.init is None:
        fail(f"automaton {block.name!r} has no initial state")
    clocks = block.clocks or []
    known = set(block.states)
    for lineno, src, sd, dst, dd, trigger, guard, resets in block.trans:
        for s in ((src, sd), (dst, dd)):
            if s not in known:
                fail(f"unknown state {format_state(s[0])}", lineno)
        stray = set(resets) - set(clocks)
        if guard is not None:
            stray |= guard.clocks - set(clocks)
        if stray:
            fail(f"unknown clock {sorted(stray)[0]!r}", lineno)
    if block.bounds and set(block.bounds) - set(clocks):
        fail(f"bounds given for unknown clock {sorted(set(block.bounds) - set(clocks))[0]!r}")

    if block.regional:
        return _finish_rcsm(block, clocks, fail)

    transitions = {}
    for lineno, src, _, dst, _, trigger, guard, resets in block.trans:
        transitions[(src, dst)] = TimedTransition(src, dst, trigger, guard or parse_constraint(""), frozenset(resets))
    if block.outputs is not None:
        fail("'outputs' is only allowed in region automata")
    try:
        return TcsmAutomaton(
            block.name,
            [s for s, _ in block.states],
            clocks,
            {s: o for (s, _), o in block.out.items()},
            block.init[0],
            transitions,
            dict(block.bounds or {}),
        )
    except TcsmError as exc:
        fail(str(exc))


def _finish_rcsm(block, clocks, fail):
    bounds = {x: 0 for x in clocks}
    bounds.update(block.bounds or {})
    rstates = {}
    for key in block.states:
        state, desc = key
        try:
            rstates[key] = RState(state, parse_descriptor(desc, bounds))
        except TcsmError as exc:
            fail(str(exc), block.state_lines[key])
    transitions = {}
    for lineno, src, sd, dst, dd, trigger, guard, resets in block.trans:
        if guard is not None:
            fail("region automata carry no guards", lineno)
        a, b = rstates[(src, sd)], rstates[(dst, dd)]
        kind = PROGRESS if a.state == b.state else ACTION
        transitions[(a, b)] = RTransition(a, b, trigger, frozenset(resets), kind)
    out = {rstates[k]: o for k, o in block.out.items()}
    outputs = frozenset(block.outputs) if block.outputs is not None else frozenset().union(*out.values())
    missing = frozenset().union(*out.values()) - outputs
    if missing:
        fail(f"state outputs {sorted(missing)} are missing from the 'outputs' alphabet")
    try:
        return RcsmAutomaton(
            block.name, clocks, bounds, [rstates[k] for k in block.states],
            rstates[block.init], transitions, outputs, out,
        )
    except TcsmError as exc:
        fail(str(exc))


def read_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_model(text, str(path))


# -- writer ---------------------------------------------------------------

def _words(items):
    return " ".join(sorted(items))


def serialize_automaton(a) -> str:
    """Render one automaton; ``parse_model`` reads it back."""
    lines = [f"automaton {a.name}"]
    if isinstance(a, RcsmAutomaton):
        if a.clocks:
            lines.append("  clocks " + " ".join(a.clocks))
            lines.append("  bounds " + " ".join(f"{x}:{a.bounds[x]}" for x in a.clocks))
        lines.append(("  outputs " + _words(a.outputs)).rstrip())
        for rs in a.rstates:
            lines.append(_state_line(format_state(rs), rs == a.init, a.out[rs]))
        index = {rs: i for i, rs in enumerate(a.rstates)}
        for (s, t) in sorted(a.transitions, key=lambda k: (index[k[0]], index[k[1]])):
            tr = a.transitions[(s, t)]
            lines.append(_trans_line(format_state(s), format_state(t), tr.trigger, None, tr.resets))
    elif isinstance(a, TcsmAutomaton):
        if a.clocks:
            lines.append("  clocks " + " ".join(a.clocks))
        if a.declared_bounds:
            lines.append("  bounds " + " ".join(f"{x}:{n}" for x, n in a.declared_bounds.items()))
        for s in a.states:
            lines.append(_state_line(format_state(s), s == a.init, a.out[s]))
        index = {s: i for i, s in enumerate(a.states)}
        for (s, t) in sorted(a.transitions, key=lambda k: (index[k[0]], index[k[1]])):
            tr = a.transitions[(s, t)]
            lines.append(_trans_line(format_state(s), format_state(t), tr.trigger, tr.guard, tr.resets))
    elif isinstance(a, CsmAutomaton):
        for s in a.states:
            lines.append(_state_line(format_state(s), s == a.init, a.out[s]))
        index = {s: i for i, s in enumerate(a.states)}
        for (s, t) in sorted(a.form, key=lambda k: (index[k[0]], index[k[1]])):
            lines.append(_trans_line(format_state(s), format_state(t), a.form[(s, t)], None, ()))
    else:
        raise TypeError(f"cannot serialize {type(a).__name__}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _state_line(name, is_init, outs):
    parts = [f"  state {name}"]
    if is_init:
        parts.append("init")
    if outs:
        parts.append("outputs " + _words(outs))
    return " ".join(parts)


def _trans_line(src, dst, trigger, guard, resets):
    line = f"  trans {src} -> {dst} when {to_text(trigger)}"
    if guard is not None and guard.bounds:
        line += f" guard {guard}"
    if resets:
        line += " reset " + _words(resets)
    return line


def serialize_model(automata) -> str:
    return "\n".join(serialize_automaton(a) for a in automata)
