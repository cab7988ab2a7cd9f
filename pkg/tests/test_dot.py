import re

from timedcsm.csm import reachability_graph
from timedcsm.dot import export_dot
from timedcsm.formula import parse_formula
from timedcsm.rcsm import build_rcsm, product_rcsm
from timedcsm.tcsm import TcsmAutomaton, TimedTransition

NODE = re.compile(r'^  n\d+ \[label="(?:[^"\\]|\\.)*"( peripheries=2)?( style=filled fillcolor="red")?\];$')
EDGE = re.compile(r'^  n\d+ -> n\d+ \[style=(solid|dashed) label="(?:[^"\\]|\\.)*"\];$')


def well_formed(text):
    lines = text.splitlines()
    assert lines[0].startswith("digraph ") and lines[0].endswith("{")
    assert lines[1] == "  node [shape=box];"
    assert lines[-1] == "}"
    assert text.count("{") == text.count("}")
    for line in lines[2:-1]:
        assert NODE.match(line) or EDGE.match(line), line
    return lines


def test_single_state():
    p = TcsmAutomaton("P", ["s"], (), {}, "s", {("s", "s"): TimedTransition("s", "s", parse_formula("1"))})
    lines = well_formed(export_dot(build_rcsm(p)))
    assert [l for l in lines if NODE.match(l)] == [
        '  n0 [label="s\\nints= zero= order= beyond=" peripheries=2];'
    ]
    assert [l for l in lines if EDGE.match(l)] == ['  n0 -> n0 [style=dashed label="1"];']


def test_train_gate_product(train_gate):
    prod = product_rcsm([build_rcsm(a) for a in train_gate.automata])
    bad = [rs for rs in prod.rstates if rs.state[0] == "s2"]
    text = export_dot(prod, highlight=bad)
    lines = well_formed(text)
    nodes = [l for l in lines if NODE.match(l)]
    edges = [l for l in lines if EDGE.match(l)]
    assert len(nodes) == len(prod.rstates) and len(edges) == len(prod.transitions)
    assert sum("fillcolor" in l for l in nodes) == len(bad) > 0
    assert [l for l in nodes if "peripheries=2" in l] == [nodes[0]]
    assert "s0,t0,u0" in nodes[0]
    assert export_dot(prod, highlight=bad) == text


def test_csm_graph(monitor):
    g = reachability_graph(monitor.to_csm())
    text = export_dot(g, highlight=["q1"])
    well_formed(text)
    assert '  n1 [label="q1" style=filled fillcolor="red"];' in text
    assert "style=solid" in text


def test_quoting():
    p = TcsmAutomaton('we"ird', ["s"], (), {}, "s",
                      {("s", "s"): TimedTransition("s", "s", parse_formula("1"))})
    assert export_dot(build_rcsm(p)).startswith('digraph "we\\"ird" {')
