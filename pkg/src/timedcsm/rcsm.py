"""Region automata: construction from a TCSM, direct product, trap detection.

An r.state is a pair ``(state, region)``.  Transitions out of an r.state
are either *progress* (same underlying state, time may pass) or *action*
(zero-time change of the underlying state).  Both builders explore
breadth-first and order new targets by ``(flattened state, descriptor)``,
so results are deterministic.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, NamedTuple, Optional

import networkx as nx

from .clock import (
    Region,
    constraint_agrees,
    project_region,
    reset_region,
    time_successor,
    zero_region,
)
from .csm import check_outputs_disjoint, flatten_state
from .errors import (
    IncomparableAlphabets,
    OverlappingClocks,
    RegionBudgetExceeded,
    TcsmError,
    UnknownRState,
)
from .formula import (
    Formula,
    conj,
    conj_all,
    disj,
    disj_all,
    equivalent,
    find_model,
    is_unsatisfiable,
    neg,
    output_formula,
    reduce_formula,
    signals,
)
from .tcsm import TcsmAutomaton

PROGRESS = "progress"
ACTION = "action"

DEFAULT_MAX_REGIONS = 10 ** 6


class RState(NamedTuple):
    state: Hashable
    region: Region

    def key(self):
        return (flatten_state(self.state), self.region.descriptor())


@dataclass(frozen=True)
class RTransition:
    source: RState
    target: RState
    trigger: Formula
    resets: frozenset
    kind: str
    origin: Optional[object] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=False)
class RcsmAutomaton:
    """<RS, out, X, lab, (s_init, R_init)> restricted to its reachable part.

    ``outputs`` is the output alphabet of the automaton the r.states came
    from; it can be wider than the outputs of the reachable r.states and is
    what triggers are reduced against.
    """

    name: str
    clocks: tuple
    bounds: dict
    rstates: tuple
    init: RState
    transitions: dict
    outputs: frozenset
    out: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rstates", tuple(self.rstates))
        object.__setattr__(self, "clocks", tuple(self.clocks))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        known = set(self.rstates)
        if self.init not in known:
            raise UnknownRState(f"initial r.state {self.init!r} missing from {self.name!r}")
        for (a, b), t in self.transitions.items():
            if a not in known or b not in known:
                raise UnknownRState(f"transition {a!r} -> {b!r} mentions an unknown r.state")
            expected = PROGRESS if a.state == b.state else ACTION
            if t.kind != expected:
                raise TcsmError(f"transition {a!r} -> {b!r} has kind {t.kind}, expected {expected}")

    @cached_property
    def _outgoing(self):
        index = {rs: i for i, rs in enumerate(self.rstates)}
        succ = {rs: [] for rs in self.rstates}
        for (a, b), t in self.transitions.items():
            succ[a].append(t)
        for a in succ:
            succ[a].sort(key=lambda t: index[t.target])
        return succ

    def outgoing(self, rs) -> list:
        if rs not in self._outgoing:
            raise UnknownRState(f"{rs!r} is not an r.state of {self.name!r}")
        return self._outgoing[rs]

    @cached_property
    def states(self) -> tuple:
        """Underlying (timed) states in first-visit order."""
        return tuple(dict.fromkeys(rs.state for rs in self.rstates))

    @property
    def OUT(self) -> frozenset:
        return self.outputs

    @cached_property
    def INP(self) -> frozenset:
        return frozenset().union(*(signals(t.trigger) for t in self.transitions.values()))

    @property
    def EXT(self) -> frozenset:
        return self.INP - self.OUT

    def alpha(self, rs) -> Formula:
        return output_formula(self.out[rs], self.outputs)


class _Builder:
    """Shared breadth-first exploration with transition merging."""

    def __init__(self, outputs, max_regions):
        self.outputs = outputs
        self.max_regions = max_regions
        self.order = []
        self.seen = set()
        self.queue = deque()
        self.transitions = {}

    def visit(self, rs):
        if rs in self.seen:
            return
        if len(self.order) >= self.max_regions:
            raise RegionBudgetExceeded(self.max_regions)
        self.seen.add(rs)
        self.order.append(rs)
        self.queue.append(rs)

    def expand(self, source, out_s, candidates):
        """candidates: iterable of (target, raw trigger, resets, origin)."""
        merged = {}
        for target, trigger, resets, origin in candidates:
            w = reduce_formula(trigger, out_s, self.outputs)
            if is_unsatisfiable(w):
                continue
            if target in merged:
                prev_w, prev_resets, prev_origin = merged[target]
                merged[target] = (disj(prev_w, w), prev_resets | resets, prev_origin)
            else:
                merged[target] = (w, frozenset(resets), origin)
        for target in sorted(merged, key=RState.key):
            w, resets, origin = merged[target]
            kind = PROGRESS if target.state == source.state else ACTION
            self.transitions[(source, target)] = RTransition(source, target, w, resets, kind, origin)
            self.visit(target)


def build_rcsm(p: TcsmAutomaton, max_regions: int = DEFAULT_MAX_REGIONS) -> RcsmAutomaton:
    """Regionize a TCSM, keeping only the reachable part.

    From every r.state ``(s, R)``:

    * the ear of ``s``, if its guard agrees with ``R``, gives a progress
      transition to ``(s, R[resets:=0])`` and, when different from ``R``,
      one to ``(s, succ(R)[resets:=0])``;
    * every other transition whose guard agrees with ``R`` gives an action
      transition to ``(target, R[resets:=0])``.

    Triggers are reduced by ``out(s)``; unsatisfiable ones are dropped.
    """
    bounds = dict(p.bounds)
    outputs = p.OUT
    builder = _Builder(outputs, max_regions)
    init = RState(p.init, zero_region(bounds))
    builder.visit(init)
    while builder.queue:
        rs = builder.queue.popleft()
        s, region = rs
        candidates = []
        for t in p.outgoing(s):
            if not constraint_agrees(t.guard, region):
                continue
            if t.is_ear:
                stay = reset_region(region, t.resets)
                candidates.append((RState(s, stay), t.trigger, t.resets, t))
                advance = reset_region(time_successor(region), t.resets)
                if advance != region:
                    candidates.append((RState(s, advance), t.trigger, t.resets, t))
            else:
                target = RState(t.target, reset_region(region, t.resets))
                candidates.append((target, t.trigger, t.resets, t))
        builder.expand(rs, p.out[s], candidates)
    return RcsmAutomaton(
        p.name,
        p.clocks,
        bounds,
        builder.order,
        init,
        builder.transitions,
        outputs,
        {rs: p.out[rs.state] for rs in builder.order},
    )


def region_successors(a: RcsmAutomaton, rs: RState) -> list:
    """The rr relation: targets whose trigger is compatible with the outputs of ``rs``."""
    alpha = a.alpha(rs) if rs in a.out else None
    if alpha is None:
        raise UnknownRState(f"{rs!r} is not an r.state of {a.name!r}")
    return [t.target for t in a.outgoing(rs) if not is_unsatisfiable(conj(t.trigger, alpha))]


def reachable(a: RcsmAutomaton) -> list:
    """r.states reachable from init under rr, in breadth-first order."""
    seen = {a.init}
    order = [a.init]
    queue = deque(order)
    while queue:
        rs = queue.popleft()
        for nxt in region_successors(a, rs):
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    return order


def product_rcsm(components, name=None, max_regions: int = DEFAULT_MAX_REGIONS) -> RcsmAutomaton:
    """Multiply region automata directly, without going back to the TCSMs."""
    components = list(components)
    if not components:
        raise TcsmError("product needs at least one automaton")
    check_outputs_disjoint(components)
    owner = {}
    for c in components:
        for x in c.clocks:
            if x in owner:
                raise OverlappingClocks(x, owner[x], c.name)
            owner[x] = c.name
    clocks = tuple(itertools.chain.from_iterable(c.clocks for c in components))
    bounds = {x: n for c in components for x, n in c.bounds.items()}
    outputs = frozenset().union(*(c.outputs for c in components))
    clock_sets = [frozenset(c.clocks) for c in components]

    builder = _Builder(outputs, max_regions)
    init = RState(tuple(c.init.state for c in components), zero_region(bounds))
    builder.visit(init)
    out = {}
    while builder.queue:
        rs = builder.queue.popleft()
        s, region = rs
        parts = []
        for c, si, xs in zip(components, s, clock_sets):
            part = RState(si, project_region(region, xs))
            if part not in c.out:
                raise TcsmError(
                    f"r.state {rs.key()} projects to {part.key()}, which {c.name!r} never reaches"
                )
            parts.append(part)
        out_s = frozenset().union(*(c.out[part] for c, part in zip(components, parts)))
        out[rs] = out_s
        advanced = time_successor(region)
        candidates = []
        for choice in itertools.product(*(c.outgoing(part) for c, part in zip(components, parts))):
            resets = frozenset().union(*(h.resets for h in choice))
            trigger = conj_all(h.trigger for h in choice)
            if all(h.kind == PROGRESS for h in choice):
                candidates.append((RState(s, reset_region(region, resets)), trigger, resets, choice))
                target = reset_region(advanced, resets)
                if target != region:
                    candidates.append((RState(s, target), trigger, resets, choice))
            else:
                dst = tuple(
                    h.target.state if h.kind == ACTION else si for h, si in zip(choice, s)
                )
                candidates.append((RState(dst, reset_region(region, resets)), trigger, resets, choice))
        builder.expand(rs, out_s, candidates)
    return RcsmAutomaton(
        name or "_".join(c.name for c in components),
        clocks,
        bounds,
        builder.order,
        init,
        builder.transitions,
        outputs,
        out,
    )


def canonical_compare(a: RcsmAutomaton, b: RcsmAutomaton) -> bool:
    """Graph equality under (flattened state, region descriptor) keys.

    Triggers are compared semantically; resets and kinds exactly.
    """
    if set(a.clocks) != set(b.clocks) or a.outputs != b.outputs:
        raise IncomparableAlphabets(
            f"{a.name!r} and {b.name!r} differ in clocks or output alphabet"
        )
    if a.bounds != b.bounds:
        return False
    if a.init.key() != b.init.key():
        return False
    a_out = {rs.key(): a.out[rs] for rs in a.rstates}
    b_out = {rs.key(): b.out[rs] for rs in b.rstates}
    if a_out != b_out:
        return False
    a_tr = {(s.key(), t.key()): tr for (s, t), tr in a.transitions.items()}
    b_tr = {(s.key(), t.key()): tr for (s, t), tr in b.transitions.items()}
    if a_tr.keys() != b_tr.keys():
        return False
    for k, ta in a_tr.items():
        tb = b_tr[k]
        if ta.resets != tb.resets or ta.kind != tb.kind:
            return False
        if not equivalent(ta.trigger, tb.trigger):
            return False
    return True


def check_zero_time_trap(a: RcsmAutomaton) -> list:
    """Terminal strongly connected components without any progress transition.

    Each trap is returned as a list of r.states in automaton order.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(a.rstates)
    graph.add_edges_from(a.transitions)
    index = {rs: i for i, rs in enumerate(a.rstates)}
    cond = nx.condensation(graph)
    traps = []
    for node in cond.nodes:
        if cond.out_degree(node):
            continue
        members = cond.nodes[node]["members"]
        timed = any(
            a.transitions[(u, v)].kind == PROGRESS
            for u in members
            for v in graph.successors(u)
            if v in members
        )
        if not timed:
            traps.append(sorted(members, key=index.__getitem__))
    traps.sort(key=lambda comp: index[comp[0]])
    return traps


def check_region_complete(a: RcsmAutomaton) -> list:
    """Optional lint: r.states whose outgoing triggers do not sum to true."""
    bad = []
    for rs in a.rstates:
        cover = disj_all(t.trigger for t in a.outgoing(rs))
        witness = find_model(neg(cover))
        if witness is not None:
            bad.append((rs, witness))
    return bad
