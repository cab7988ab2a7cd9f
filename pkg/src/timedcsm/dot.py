"""Graphviz export."""

from __future__ import annotations

from .csm import CsmAutomaton
from .formula import to_text
from .modelio import format_state
from .rcsm import PROGRESS, RcsmAutomaton


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _edge_label(trigger, resets):
    label = to_text(trigger)
    if resets:
        label += " / " + ",".join(sorted(resets))
    return label


def export_dot(a, highlight=()) -> str:
    """Render an RCSM or a (reachability-restricted) CSM as a ``digraph``.

    The initial node has a double border, progress edges are dashed and
    nodes listed in ``highlight`` are filled red.
    """
    highlight = set(highlight)
    lines = [f"digraph {_quote(a.name)} {{", "  node [shape=box];"]
    if isinstance(a, RcsmAutomaton):
        nodes = list(a.rstates)
        labels = {rs: f"{format_state(rs.state)}\n{rs.region.descriptor()}" for rs in nodes}
        edges = [
            (s, t, _edge_label(tr.trigger, tr.resets), tr.kind == PROGRESS)
            for (s, t), tr in a.transitions.items()
        ]
    elif isinstance(a, CsmAutomaton):
        nodes = list(a.states)
        labels = {s: format_state(s) for s in nodes}
        edges = [(s, t, to_text(w), s == t) for (s, t), w in a.form.items()]
    else:
        raise TypeError(f"cannot export {type(a).__name__}")
    ids = {n: f"n{i}" for i, n in enumerate(nodes)}
    for n in nodes:
        attrs = [f"label={_quote(labels[n])}"]
        if n == a.init:
            attrs.append("peripheries=2")
        if n in highlight:
            attrs.append('style=filled fillcolor="red"')
        lines.append(f"  {ids[n]} [{' '.join(attrs)}];")
    edges.sort(key=lambda e: (int(ids[e[0]][1:]), int(ids[e[1]][1:])))
    for s, t, label, dashed in edges:
        style = "dashed" if dashed else "solid"
        lines.append(f"  {ids[s]} -> {ids[t]} [style={style} label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
