"""Safety checking with testing automata.

The system and the testing automaton are multiplied as region automata;
the property holds iff no reachable product r.state puts the testing
automaton in one of its error states.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import NonExternalSignal, UnknownErrorState, UnknownRState, UnknownState
from .formula import check_signal, evaluate, to_text
from .modelio import format_state
from .rcsm import DEFAULT_MAX_REGIONS, RcsmAutomaton, product_rcsm
from .tcsm import TcsmAutomaton


def attach_signal(p: TcsmAutomaton, state, signal: str) -> TcsmAutomaton:
    """Return a copy of ``p`` in which ``state`` also generates ``signal``."""
    check_signal(signal)
    if state not in p.out:
        raise UnknownState(f"{state!r} is not a state of {p.name!r}")
    out = dict(p.out)
    out[state] = out[state] | {signal}
    return TcsmAutomaton(p.name, p.states, p.clocks, out, p.init, p.transitions, p.declared_bounds)


@dataclass
class SafetyVerdict:
    holds: bool
    explored: int
    witness: Optional[list] = None
    product: Optional[RcsmAutomaton] = field(default=None, repr=False)

    @property
    def error_rstate(self):
        if not self.witness:
            return None if self.holds else self.product.init
        return self.witness[-1].target


def shortest_path(a: RcsmAutomaton, is_error):
    """Transitions of a shortest path from init to an r.state satisfying ``is_error``.

    Returns [] when init itself qualifies and None when nothing reachable does.
    """
    if is_error(a.init):
        return []
    parent = {a.init: None}
    queue = deque([a.init])
    while queue:
        rs = queue.popleft()
        for t in a.outgoing(rs):
            nxt = t.target
            if nxt in parent:
                continue
            parent[nxt] = t
            if is_error(nxt):
                path = []
                while parent[nxt] is not None:
                    path.append(parent[nxt])
                    nxt = parent[nxt].source
                return path[::-1]
            queue.append(nxt)
    return None


def check_safety(system: RcsmAutomaton, test: RcsmAutomaton, error_states,
                 max_regions: int = DEFAULT_MAX_REGIONS) -> SafetyVerdict:
    error_states = set(error_states)
    unknown = error_states - set(test.states)
    if unknown:
        raise UnknownErrorState(
            f"error states {sorted(map(str, unknown))} are not states of {test.name!r}"
        )
    product = product_rcsm([system, test], max_regions=max_regions)
    path = shortest_path(product, lambda rs: rs.state[1] in error_states)
    return SafetyVerdict(path is None, len(product.rstates), path, product)


def simulate_step(a: RcsmAutomaton, rs, external) -> list:
    """Targets enabled from ``rs`` when exactly ``external`` signals arrive."""
    external = frozenset(external)
    if rs not in a.out:
        raise UnknownRState(f"{rs!r} is not an r.state of {a.name!r}")
    stray = external - a.EXT
    if stray:
        raise NonExternalSignal(f"signals {sorted(stray)} are not external inputs of {a.name!r}")
    return [t.target for t in a.outgoing(rs) if evaluate(t.trigger, external)]


def format_witness(verdict: SafetyVerdict) -> str:
    """One line per step: ``STEP k: (state)@region --kind[trigger/resets]--> (state)@region``."""
    if verdict.holds:
        return ""
    lines = [f"INIT: {format_state(verdict.product.init)}"]
    for k, t in enumerate(verdict.witness, start=1):
        resets = ",".join(sorted(t.resets))
        lines.append(
            f"STEP {k}: {format_state(t.source)} --{t.kind}[{to_text(t.trigger)}/{resets}]--> "
            f"{format_state(t.target)}"
        )
    return "\n".join(lines) + "\n"
