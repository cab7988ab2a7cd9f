"""Timed concurrent state machines."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable

from .clock import NO_CONSTRAINT, ClockConstraint, all_regions, constraint_agrees
from .csm import CsmAutomaton, Violation, check_outputs_disjoint
from .errors import OverlappingClocks, TcsmError, UnknownClock, UnknownState
from .formula import FALSE, Formula, conj_all, disj_all, find_model, neg, signals


@dataclass(frozen=True)
class TimedTransition:
    source: Hashable
    target: Hashable
    trigger: Formula
    guard: ClockConstraint = NO_CONSTRAINT
    resets: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "resets", frozenset(self.resets))

    @property
    def is_ear(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True, eq=False)
class TcsmAutomaton:
    """<TS, out, X, lab, s_init> with at most one transition per state pair."""

    name: str
    states: tuple
    clocks: tuple
    out: dict
    init: Hashable
    transitions: dict = field(default_factory=dict)
    declared_bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "clocks", tuple(self.clocks))
        if len(set(self.states)) != len(self.states):
            raise TcsmError(f"duplicate states in automaton {self.name!r}")
        if len(set(self.clocks)) != len(self.clocks):
            raise TcsmError(f"duplicate clocks in automaton {self.name!r}")
        known = set(self.states)
        if self.init not in known:
            raise UnknownState(f"initial state {self.init!r} is not a state of {self.name!r}")
        object.__setattr__(self, "out", {s: frozenset(self.out.get(s, ())) for s in self.states})
        clocks = set(self.clocks)
        trans = {}
        for key, t in self.transitions.items():
            if key != (t.source, t.target):
                raise TcsmError(f"transition stored under wrong key {key!r}")
            if t.source not in known or t.target not in known:
                raise UnknownState(f"transition {t.source!r} -> {t.target!r} mentions an unknown state")
            stray = (t.guard.clocks | t.resets) - clocks
            if stray:
                raise UnknownClock(
                    f"transition {t.source!r} -> {t.target!r} uses undeclared clocks {sorted(stray)}"
                )
            if t.trigger != FALSE:
                trans[key] = t
        object.__setattr__(self, "transitions", trans)

    @cached_property
    def _outgoing(self):
        order = {s: i for i, s in enumerate(self.states)}
        succ = {s: [] for s in self.states}
        for (s, t), tr in self.transitions.items():
            succ[s].append(tr)
        for s in succ:
            succ[s].sort(key=lambda tr: order[tr.target])
        return succ

    def outgoing(self, s) -> list:
        if s not in self._outgoing:
            raise UnknownState(f"{s!r} is not a state of {self.name!r}")
        return self._outgoing[s]

    def ear(self, s):
        return self.transitions.get((s, s))

    @property
    def instantaneous_states(self) -> list:
        return [s for s in self.states if (s, s) not in self.transitions]

    @cached_property
    def OUT(self) -> frozenset:
        return frozenset().union(*self.out.values())

    @cached_property
    def INP(self) -> frozenset:
        return frozenset().union(*(signals(t.trigger) for t in self.transitions.values()))

    @property
    def EXT(self) -> frozenset:
        return self.INP - self.OUT

    @property
    def ALL(self) -> frozenset:
        return self.INP | self.OUT

    @cached_property
    def bounds(self) -> dict:
        """Largest constant each clock is compared with (0 if never compared)."""
        c = {x: 0 for x in self.clocks}
        for x, n in self.declared_bounds.items():
            if x not in c:
                raise UnknownClock(f"bound given for undeclared clock {x!r}")
            c[x] = max(c[x], n)
        for t in self.transitions.values():
            for b in t.guard.bounds:
                c[b.clock] = max(c[b.clock], b.const)
        return c

    @property
    def is_untimed(self) -> bool:
        return not self.clocks and all(
            not t.guard.bounds and not t.resets for t in self.transitions.values()
        )

    def to_csm(self) -> CsmAutomaton:
        if not self.is_untimed:
            raise TcsmError(f"automaton {self.name!r} uses clocks")
        form = {k: t.trigger for k, t in self.transitions.items()}
        return CsmAutomaton(self.name, self.states, form, self.out, self.init)


def from_csm(p: CsmAutomaton) -> TcsmAutomaton:
    trans = {(s, t): TimedTransition(s, t, w) for (s, t), w in p.form.items()}
    return TcsmAutomaton(p.name, p.states, (), p.out, p.init, trans)


def check_timed_complete(p: TcsmAutomaton) -> list:
    """Per state and region: the triggers of transitions enabled throughout the region must cover every input."""
    regions = all_regions(p.bounds)
    violations = []
    for s in p.states:
        outgoing = p.outgoing(s)
        for region in regions:
            cover = disj_all(t.trigger for t in outgoing if constraint_agrees(t.guard, region))
            witness = find_model(neg(cover))
            if witness is not None:
                violations.append(Violation(s, witness, region.descriptor()))
    return violations


def check_clocks_disjoint(components):
    owner = {}
    for comp in components:
        for x in comp.clocks:
            if x in owner:
                raise OverlappingClocks(x, owner[x], comp.name)
            owner[x] = comp.name


def product_tcsm(components, name=None) -> TcsmAutomaton:
    components = list(components)
    if not components:
        raise TcsmError("product needs at least one automaton")
    check_outputs_disjoint(components)
    check_clocks_disjoint(components)
    states = list(itertools.product(*(c.states for c in components)))
    trans = {}
    for src in states:
        per_comp = [c.outgoing(s) for c, s in zip(components, src)]
        for choice in itertools.product(*per_comp):
            trigger = conj_all(t.trigger for t in choice)
            if trigger == FALSE:
                continue
            guard = ClockConstraint(tuple(itertools.chain.from_iterable(t.guard.bounds for t in choice)))
            resets = frozenset().union(*(t.resets for t in choice))
            dst = tuple(t.target for t in choice)
            trans[(src, dst)] = TimedTransition(src, dst, trigger, guard, resets)
    out = {s: frozenset().union(*(c.out[x] for c, x in zip(components, s))) for s in states}
    return TcsmAutomaton(
        name or "_".join(c.name for c in components),
        states,
        tuple(itertools.chain.from_iterable(c.clocks for c in components)),
        out,
        tuple(c.init for c in components),
        trans,
        {x: n for c in components for x, n in c.bounds.items()},
    )
