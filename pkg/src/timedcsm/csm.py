"""Untimed concurrent state machines and their coincidence product."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, NamedTuple, Optional

from .errors import OverlappingOutputs, TcsmError, UnknownState
from .formula import (
    FALSE,
    Formula,
    conj,
    conj_all,
    disj_all,
    find_model,
    is_unsatisfiable,
    neg,
    output_formula,
    reduce_formula,
    signals,
)

State = Hashable


class Violation(NamedTuple):
    """A state whose outgoing formulas do not cover ``witness``."""

    state: State
    witness: frozenset
    region: Optional[str] = None


def flatten_state(s) -> tuple:
    """Flatten nested product tuples into one tuple of component states."""
    if isinstance(s, tuple):
        return tuple(itertools.chain.from_iterable(flatten_state(x) for x in s))
    return (s,)


def check_outputs_disjoint(components):
    owner = {}
    for comp in components:
        for x in sorted(comp.OUT):
            if x in owner:
                raise OverlappingOutputs(x, owner[x], comp.name)
            owner[x] = comp.name


@dataclass(frozen=True, eq=False)
class CsmAutomaton:
    """<S, form, out, s_init>.

    ``form`` stores only non-void pairs; every missing pair is the constant
    false.  ``outputs`` optionally pins the output alphabet when it must be
    wider than the union of the state outputs (e.g. after pruning).
    """

    name: str
    states: tuple
    form: dict
    out: dict
    init: State
    outputs: Optional[frozenset] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if len(set(self.states)) != len(self.states):
            raise TcsmError(f"duplicate states in automaton {self.name!r}")
        known = set(self.states)
        if self.init not in known:
            raise UnknownState(f"initial state {self.init!r} is not a state of {self.name!r}")
        out = {s: frozenset(self.out.get(s, ())) for s in self.states}
        object.__setattr__(self, "out", out)
        form = {}
        for (s, t), w in self.form.items():
            if s not in known or t not in known:
                raise UnknownState(f"transition {s!r} -> {t!r} mentions an unknown state")
            if w != FALSE:
                form[(s, t)] = w
        object.__setattr__(self, "form", form)
        if self.outputs is not None:
            object.__setattr__(self, "outputs", frozenset(self.outputs))

    def formula(self, s, t) -> Formula:
        return self.form.get((s, t), FALSE)

    @cached_property
    def _outgoing(self):
        succ = {s: [] for s in self.states}
        for (s, t) in self.form:
            succ[s].append(t)
        order = {s: i for i, s in enumerate(self.states)}
        for s in succ:
            succ[s].sort(key=order.__getitem__)
        return succ

    def outgoing(self, s):
        """Targets of non-void transitions from ``s`` in declaration order."""
        if s not in self._outgoing:
            raise UnknownState(f"{s!r} is not a state of {self.name!r}")
        return self._outgoing[s]

    @cached_property
    def OUT(self) -> frozenset:
        derived = frozenset().union(*self.out.values())
        if self.outputs is not None:
            return self.outputs | derived
        return derived

    @cached_property
    def INP(self) -> frozenset:
        return frozenset().union(*(signals(w) for w in self.form.values()))

    @property
    def EXT(self) -> frozenset:
        return self.INP - self.OUT

    @property
    def ALL(self) -> frozenset:
        return self.INP | self.OUT

    def alpha(self, s) -> Formula:
        return output_formula(self.out[s], self.OUT)


class ReachabilityGraph(CsmAutomaton):
    """A CSM restricted to reachable states with formulas reduced by out(source)."""


def check_complete(p: CsmAutomaton) -> list:
    """States whose outgoing formulas fail to sum to true, with a falsifying input."""
    violations = []
    for s in p.states:
        cover = disj_all(p.form[(s, t)] for t in p.outgoing(s))
        witness = find_model(neg(cover))
        if witness is not None:
            violations.append(Violation(s, witness))
    return violations


def successors(p: CsmAutomaton, s) -> list:
    """The r relation: targets t with form(s, t) * alpha(s) satisfiable."""
    alpha = p.alpha(s) if s in p.out else None
    if alpha is None:
        raise UnknownState(f"{s!r} is not a state of {p.name!r}")
    return [t for t in p.outgoing(s) if not is_unsatisfiable(conj(p.form[(s, t)], alpha))]


def product_csm(components, name=None) -> CsmAutomaton:
    components = list(components)
    if not components:
        raise TcsmError("product needs at least one automaton")
    check_outputs_disjoint(components)
    states = list(itertools.product(*(c.states for c in components)))
    form = {}
    for src in states:
        per_comp = [[(t, c.form[(s, t)]) for t in c.outgoing(s)] for c, s in zip(components, src)]
        for choice in itertools.product(*per_comp):
            w = conj_all(f for _, f in choice)
            if w != FALSE:
                form[(src, tuple(t for t, _ in choice))] = w
    out = {s: frozenset().union(*(c.out[x] for c, x in zip(components, s))) for s in states}
    init = tuple(c.init for c in components)
    outputs = frozenset().union(*(c.OUT for c in components))
    return CsmAutomaton(
        name or "_".join(c.name for c in components), states, form, out, init, outputs
    )


def reachability_graph(p: CsmAutomaton) -> ReachabilityGraph:
    """Breadth-first closure from init; formulas reduced by the source's outputs."""
    seen = {p.init}
    order = [p.init]
    queue = deque([p.init])
    form = {}
    while queue:
        s = queue.popleft()
        for t in p.outgoing(s):
            w = reduce_formula(p.form[(s, t)], p.out[s], p.OUT)
            if is_unsatisfiable(w):
                continue
            form[(s, t)] = w
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return ReachabilityGraph(
        p.name, order, form, {s: p.out[s] for s in order}, p.init, p.OUT
    )
