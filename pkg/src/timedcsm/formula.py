"""Boolean formulas over signal occurrences.

Formulas are immutable trees.  The module-level constructors ``neg``,
``conj`` and ``disj`` apply a fixed set of simplifications (constant
absorption and double-negation elimination) and nothing else, so that
printed forms are stable.  Signals are plain strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .errors import AtomCapExceeded, OutSetNotInAlphabet, TcsmError

SIGNAL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")

#: Largest number of atoms the exhaustive decision procedures accept.
DEFAULT_ATOM_CAP = 24


def check_signal(name: str) -> str:
    if not isinstance(name, str) or not SIGNAL_RE.match(name):
        raise TcsmError(f"invalid signal name {name!r}")
    return name


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: bool

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Or({self.left!r}, {self.right!r})"


TRUE = Const(True)
FALSE = Const(False)


def atom(name: str) -> Atom:
    return Atom(check_signal(name))


def neg(f: Formula) -> Formula:
    if f is TRUE or f == TRUE:
        return FALSE
    if f is FALSE or f == FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def conj(a: Formula, b: Formula) -> Formula:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    return And(a, b)


def disj(a: Formula, b: Formula) -> Formula:
    if a == TRUE or b == TRUE:
        return TRUE
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    return Or(a, b)


def conj_all(parts: Iterable[Formula]) -> Formula:
    result = TRUE
    for p in parts:
        result = conj(result, p)
    return result


def disj_all(parts: Iterable[Formula]) -> Formula:
    result = FALSE
    for p in parts:
        result = disj(result, p)
    return result


def signals(w: Formula) -> frozenset:
    """sig(w): the set of signals mentioned in ``w``."""
    out = set()
    stack = [w]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            out.add(f.name)
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack.append(f.left)
            stack.append(f.right)
    return frozenset(out)


def evaluate(w: Formula, present) -> bool:
    """Truth value of ``w`` when exactly the signals in ``present`` occur."""
    if isinstance(w, Atom):
        return w.name in present
    if isinstance(w, Const):
        return w.value
    if isinstance(w, Not):
        return not evaluate(w.arg, present)
    if isinstance(w, And):
        return evaluate(w.left, present) and evaluate(w.right, present)
    if isinstance(w, Or):
        return evaluate(w.left, present) or evaluate(w.right, present)
    raise TypeError(f"not a formula: {w!r}")


def substitute(w: Formula, values: Mapping[str, bool]) -> Formula:
    """Replace atoms named in ``values`` by constants and simplify."""
    if isinstance(w, Atom):
        if w.name in values:
            return TRUE if values[w.name] else FALSE
        return w
    if isinstance(w, Const):
        return w
    if isinstance(w, Not):
        return neg(substitute(w.arg, values))
    if isinstance(w, And):
        left = substitute(w.left, values)
        if left == FALSE:
            return FALSE
        return conj(left, substitute(w.right, values))
    if isinstance(w, Or):
        left = substitute(w.left, values)
        if left == TRUE:
            return TRUE
        return disj(left, substitute(w.right, values))
    raise TypeError(f"not a formula: {w!r}")


def simplify(w: Formula) -> Formula:
    return substitute(w, {})


def reduce_formula(w: Formula, x_set, out_alphabet) -> Formula:
    """w \\ X: atoms in ``x_set`` become true, atoms in OUT minus X become false."""
    values = {y: False for y in out_alphabet}
    values.update((x, True) for x in x_set)
    return substitute(w, values)


def output_formula(out_s, out_alphabet) -> Formula:
    """alpha(s): affirm the generated signals, negate the rest of the alphabet."""
    out_s = frozenset(out_s)
    out_alphabet = frozenset(out_alphabet)
    stray = out_s - out_alphabet
    if stray:
        raise OutSetNotInAlphabet(
            f"signals {sorted(stray)} are not in the output alphabet"
        )
    parts = []
    for x in sorted(out_alphabet):
        parts.append(Atom(x) if x in out_s else Not(Atom(x)))
    return conj_all(parts)


def find_model(w: Formula, cap: int = DEFAULT_ATOM_CAP) -> Optional[frozenset]:
    """Some set of signals satisfying ``w``, or None if unsatisfiable.

    Decides by splitting on atoms in sorted order, which visits the same
    assignments as a truth table but cuts branches whose residue is constant.
    """
    names = sorted(signals(w))
    if len(names) > cap:
        raise AtomCapExceeded(f"formula has {len(names)} atoms, cap is {cap}")
    return _search(simplify(w), tuple(names), 0, frozenset())


def _search(w, names, i, chosen):
    if w == TRUE:
        return chosen
    if w == FALSE:
        return None
    name = names[i]
    found = _search(substitute(w, {name: True}), names, i + 1, chosen | {name})
    if found is not None:
        return found
    return _search(substitute(w, {name: False}), names, i + 1, chosen)


@lru_cache(maxsize=1 << 16)
def _unsat_cached(w: Formula) -> bool:
    return find_model(w) is None


def is_unsatisfiable(w: Formula, cap: int = DEFAULT_ATOM_CAP) -> bool:
    if cap != DEFAULT_ATOM_CAP:
        return find_model(w, cap) is None
    return _unsat_cached(w)


def is_tautology(w: Formula, cap: int = DEFAULT_ATOM_CAP) -> bool:
    return is_unsatisfiable(neg(w), cap)


def equivalent(a: Formula, b: Formula) -> bool:
    diff = disj(conj(a, neg(b)), conj(neg(a), b))
    return is_unsatisfiable(diff)


# -- concrete syntax ------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_']*)|([01])|([-+*()]))")


class FormulaSyntaxError(TcsmError):
    def __init__(self, message, column):
        super().__init__(f"{message} at column {column + 1}")
        self.column = column


def _tokenize(text):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            bad = pos + len(rest) - len(rest.lstrip())
            raise FormulaSyntaxError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), m.lastindex, start))
        pos = m.end()
    return tokens


def parse_formula(text: str) -> Formula:
    """Parse ``+`` / ``*`` / prefix ``-`` / ``0`` / ``1`` syntax.

    Precedence is ``-`` over ``*`` over ``+``; both binary operators
    associate to the left.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos][0] if pos < len(tokens) else None

    def column():
        return tokens[pos][2] if pos < len(tokens) else len(text)

    def parse_or():
        nonlocal pos
        left = parse_and()
        while peek() == "+":
            pos += 1
            left = disj(left, parse_and())
        return left

    def parse_and():
        nonlocal pos
        left = parse_unary()
        while peek() == "*":
            pos += 1
            left = conj(left, parse_unary())
        return left

    def parse_unary():
        nonlocal pos
        if pos >= len(tokens):
            raise FormulaSyntaxError("unexpected end of formula", len(text))
        tok, kind, _ = tokens[pos]
        if tok == "-":
            pos += 1
            return neg(parse_unary())
        if tok == "(":
            pos += 1
            inner = parse_or()
            if peek() != ")":
                raise FormulaSyntaxError("expected ')'", column())
            pos += 1
            return inner
        if kind == 1:
            pos += 1
            return Atom(tok)
        if kind == 2:
            pos += 1
            return TRUE if tok == "1" else FALSE
        raise FormulaSyntaxError(f"unexpected {tok!r}", column())

    if not tokens:
        raise FormulaSyntaxError("empty formula", 0)
    result = parse_or()
    if pos != len(tokens):
        raise FormulaSyntaxError(f"unexpected {peek()!r}", column())
    return result


_PREC = {Or: 1, And: 2, Not: 3, Atom: 4, Const: 4}


def to_text(w: Formula) -> str:
    """Render in the concrete syntax; ``parse_formula`` inverts this on simplified trees."""
    if isinstance(w, Const):
        return "1" if w.value else "0"
    if isinstance(w, Atom):
        return w.name
    if isinstance(w, Not):
        inner = to_text(w.arg)
        if _PREC[type(w.arg)] < 3:
            inner = f"({inner})"
        return "-" + inner
    op = "+" if isinstance(w, Or) else "*"
    prec = _PREC[type(w)]
    left = to_text(w.left)
    if _PREC[type(w.left)] < prec:
        left = f"({left})"
    right = to_text(w.right)
    if _PREC[type(w.right)] <= prec:
        right = f"({right})"
    return f"{left}{op}{right}"
