import pytest
from hypothesis import given, settings, strategies as st

from oracles import edge_map, layered_distances
from randmodels import random_pair
from timedcsm.clock import (
    Region,
    constraint_agrees,
    parse_constraint,
    project_region,
    reset_region,
    time_successor,
    zero_region,
)
from timedcsm.errors import IncomparableAlphabets, RegionBudgetExceeded, UnknownRState
from timedcsm.formula import TRUE, parse_formula
from timedcsm.rcsm import (
    ACTION,
    PROGRESS,
    RcsmAutomaton,
    RState,
    RTransition,
    build_rcsm,
    canonical_compare,
    check_region_complete,
    check_zero_time_trap,
    product_rcsm,
    reachable,
    region_successors,
)
from timedcsm.tcsm import TcsmAutomaton, TimedTransition, product_tcsm

F = parse_formula


def T(s, t, w="1", guard="true", resets=()):
    return TimedTransition(s, t, F(w), parse_constraint(guard), frozenset(resets))


def make(name, states, trans, clocks=(), out=None, bounds=None):
    return TcsmAutomaton(
        name, states, clocks, out or {}, states[0],
        {(t.source, t.target): t for t in trans}, bounds or {},
    )


UNIT = make("U", ["u"], [T("u", "u")])


def trap_pair():
    """Two valid automata that keep disabling each other's ears."""
    p1 = make("P1", ["u0", "u1"],
              [T("u0", "u0", "-b"), T("u0", "u1", "b"), T("u1", "u1", "-b"), T("u1", "u0", "b")],
              out={"u0": {"a"}})
    p2 = make("P2", ["v0", "v1"],
              [T("v0", "v0", "-a"), T("v0", "v1", "a"), T("v1", "v1", "-a"), T("v1", "v0", "a")],
              out={"v0": {"b"}, "v1": {"b"}})
    return p1, p2


def check_invariants(a):
    for (src, dst), t in a.transitions.items():
        assert (t.kind == PROGRESS) == (src.state == dst.state)
        if t.kind == ACTION:
            assert dst.region == reset_region(src.region, t.resets)
        else:
            assert dst.region in (
                reset_region(src.region, t.resets),
                reset_region(time_successor(src.region), t.resets),
            )


class TestBuild:
    def test_single_clock_chain(self):
        p = make("P", ["s"], [T("s", "s")], ("x",), bounds={"x": 1})
        a = build_rcsm(p)
        assert [rs.region.descriptor() for rs in a.rstates] == [
            "ints=x:0 zero=x order= beyond=",
            "ints=x:0 zero= order=(x) beyond=",
            "ints=x:1 zero=x order= beyond=",
            "ints= zero= order= beyond=x",
        ]
        r = a.rstates
        chain = {(r[0], r[1]), (r[1], r[2]), (r[2], r[3])}
        loops = {(rs, rs) for rs in r}  # an unreset ear lets the state idle in its region
        assert set(a.transitions) == chain | loops
        assert all(t.kind == PROGRESS for t in a.transitions.values())

    def test_unreachable_guard(self):
        p = make("P", ["s", "t", "u"],
                 [T("s", "s", guard="x <= 1"), T("s", "t", guard="x > 2"), T("s", "u", guard="x > 1"),
                  T("t", "t"), T("u", "u")], ("x",))
        a = build_rcsm(p)
        assert "u" in a.states and "t" not in a.states
        assert not any(t.origin.target == "t" for t in a.transitions.values())

    def test_trigger_reduced_by_outputs(self):
        p = make("P", ["s", "t"], [T("s", "t", "a"), T("t", "t")], out={"s": {"a"}})
        a = build_rcsm(p)
        [t] = [t for t in a.transitions.values() if t.kind == ACTION]
        assert t.trigger == TRUE

    def test_unsatisfiable_rejected(self):
        p = make("P", ["s", "t"], [T("s", "s"), T("s", "t", "a")], out={"t": {"a"}})
        a = build_rcsm(p)
        assert a.states == ("s",)

    def test_reset_on_ear(self):
        p = make("P", ["s"], [T("s", "s", guard="x < 1", resets={"x"})], ("x",))
        a = build_rcsm(p)
        # both the stay and the advance target reset x back to the zero region
        assert [rs.region.descriptor() for rs in a.rstates] == ["ints=x:0 zero=x order= beyond="]
        [t] = a.transitions.values()
        assert t.resets == {"x"} and t.kind == PROGRESS

    def test_budget(self):
        p = make("P", ["s"], [T("s", "s")], ("x",), bounds={"x": 3})
        with pytest.raises(RegionBudgetExceeded):
            build_rcsm(p, max_regions=3)
        assert len(build_rcsm(p, max_regions=8).rstates) == 8

    @given(st.integers(0, 10 ** 6))
    def test_soundness_from_provenance(self, seed):
        p, _ = random_pair(seed)
        a = build_rcsm(p)
        check_invariants(a)
        for (src, dst), t in a.transitions.items():
            origins = t.origin if isinstance(t.origin, tuple) else (t.origin,)
            for o in origins:
                assert constraint_agrees(o.guard, src.region)
                assert o.source == src.state

    @given(st.integers(0, 10 ** 6))
    def test_only_reachable(self, seed):
        p, _ = random_pair(seed)
        a = build_rcsm(p)
        assert set(layered_distances(a.init, edge_map(a))) == set(a.rstates)
        assert a.init == RState(p.init, zero_region(p.bounds))


class TestSuccessors:
    def test_true_and_forced_false(self):
        p = make("P", ["s", "t"], [T("s", "s", "-b"), T("s", "t", "b")])
        a = build_rcsm(p)
        init = a.init
        assert set(region_successors(a, init)) == {init, RState("t", init.region)}
        # as part of a system where b belongs to the automaton, it is forced off
        wide = RcsmAutomaton(a.name, a.clocks, a.bounds, a.rstates, a.init,
                             a.transitions, frozenset({"b"}), a.out)
        assert region_successors(wide, init) == [init]

    def test_unknown(self):
        a = build_rcsm(UNIT)
        with pytest.raises(UnknownRState):
            region_successors(a, RState("zz", a.init.region))

    @given(st.integers(0, 10 ** 6))
    def test_closed_system_keeps_all(self, seed):
        p, q = random_pair(seed)
        a = product_rcsm([build_rcsm(p), build_rcsm(q)])
        for rs in a.rstates:
            if not a.EXT:
                assert len(region_successors(a, rs)) == len(a.outgoing(rs))
        assert set(reachable(a)) <= set(a.rstates)


class TestTraps:
    def test_cycle_is_trap(self):
        p = make("P", ["a", "b"], [T("a", "b"), T("b", "a")])
        [trap] = check_zero_time_trap(build_rcsm(p))
        assert [rs.state for rs in trap] == ["a", "b"]

    def test_escape_is_not_trap(self):
        p = make("P", ["a", "b", "c"], [T("a", "b", "-e"), T("a", "c", "e"), T("b", "a"), T("c", "c")])
        assert check_zero_time_trap(build_rcsm(p)) == []

    def test_product_of_valid_automata(self):
        p1, p2 = trap_pair()
        assert check_zero_time_trap(build_rcsm(p1)) == []
        assert check_zero_time_trap(build_rcsm(p2)) == []
        prod = product_rcsm([build_rcsm(p1), build_rcsm(p2)])
        [trap] = check_zero_time_trap(prod)
        assert {rs.state for rs in trap} == {("u0", "v0"), ("u1", "v1"), ("u0", "v1"), ("u1", "v0")}
        assert check_zero_time_trap(build_rcsm(product_tcsm([p1, p2]))) != []

    def test_time_passing_cycle_is_not_trap(self):
        p = make("P", ["s"], [T("s", "s")], ("x",), bounds={"x": 1})
        assert check_zero_time_trap(build_rcsm(p)) == []


class TestProduct:
    def test_identity(self):
        p, _ = random_pair(17)
        a = build_rcsm(p)
        prod = product_rcsm([a, build_rcsm(UNIT)])
        assert canonical_compare(prod, RcsmAutomaton(
            a.name, a.clocks, a.bounds,
            [RState((rs.state, "u"), rs.region) for rs in a.rstates],
            RState((a.init.state, "u"), a.init.region),
            {(RState((s.state, "u"), s.region), RState((t.state, "u"), t.region)):
                RTransition(RState((s.state, "u"), s.region), RState((t.state, "u"), t.region),
                            tr.trigger, tr.resets, tr.kind, None)
             for (s, t), tr in a.transitions.items()},
            a.outputs,
            {RState((rs.state, "u"), rs.region): a.out[rs] for rs in a.rstates},
        ))

    def test_mixed_selection_moves_acting_component(self):
        p = make("P", ["p0", "p1"], [T("p0", "p1"), T("p1", "p1")])
        q = make("Q", ["q0"], [T("q0", "q0")], ("y",), bounds={"y": 1})
        prod = product_rcsm([build_rcsm(p), build_rcsm(q)])
        actions = [t for t in prod.transitions.values() if t.kind == ACTION]
        assert actions and all(t.target.state == ("p1", "q0") for t in actions)

    @given(st.integers(0, 10 ** 6))
    def test_projection_coherence(self, seed):
        p, q = random_pair(seed)
        a, b = build_rcsm(p), build_rcsm(q)
        prod = product_rcsm([a, b])
        check_invariants(prod)
        for rs in prod.rstates:
            assert RState(rs.state[0], project_region(rs.region, {"x"})) in a.out
            assert RState(rs.state[1], project_region(rs.region, {"y"})) in b.out

    @settings(max_examples=200)
    @given(st.integers(0, 10 ** 6))
    def test_product_theorem(self, seed):
        p, q = random_pair(seed)
        assert canonical_compare(
            build_rcsm(product_tcsm([p, q])),
            product_rcsm([build_rcsm(p), build_rcsm(q)]),
        )

    def test_product_theorem_train_gate(self, train_gate):
        train, gate = train_gate.get("TRAIN"), train_gate.get("GATE")
        assert canonical_compare(
            build_rcsm(product_tcsm([train, gate])),
            product_rcsm([build_rcsm(train), build_rcsm(gate)]),
        )

    def test_deterministic(self):
        p, q = random_pair(23)
        one = product_rcsm([build_rcsm(p), build_rcsm(q)])
        two = product_rcsm([build_rcsm(p), build_rcsm(q)])
        assert one.rstates == two.rstates
        assert list(one.transitions) == list(two.transitions)


class TestCompare:
    def test_reflexive(self):
        a = build_rcsm(random_pair(3)[0])
        assert canonical_compare(a, a)

    def test_reset_change(self):
        p = make("P", ["s", "t"], [T("s", "t", resets={"x"}), T("t", "t")], ("x",), bounds={"x": 1})
        a = build_rcsm(p)
        (key, t), = [(k, t) for k, t in a.transitions.items() if t.kind == ACTION]
        changed = dict(a.transitions)
        changed[key] = RTransition(t.source, t.target, t.trigger, frozenset(), t.kind, t.origin)
        b = RcsmAutomaton(a.name, a.clocks, a.bounds, a.rstates, a.init, changed, a.outputs, a.out)
        assert not canonical_compare(a, b)

    def test_semantic_trigger(self):
        p = make("P", ["s", "t"], [T("s", "t", "e+e"), T("s", "s", "-e"), T("t", "t")])
        q = make("P", ["s", "t"], [T("s", "t", "e"), T("s", "s", "-(e*1)"), T("t", "t")])
        assert canonical_compare(build_rcsm(p), build_rcsm(q))

    def test_incomparable(self):
        a = build_rcsm(make("P", ["s"], [T("s", "s")], ("x",)))
        b = build_rcsm(make("P", ["s"], [T("s", "s")], ("y",)))
        with pytest.raises(IncomparableAlphabets):
            canonical_compare(a, b)


def test_region_complete_lint():
    complete = build_rcsm(make("P", ["s"], [T("s", "s")], ("x",)))
    assert check_region_complete(complete) == []
    gap = build_rcsm(make("P", ["s", "t"], [T("s", "t", "e"), T("t", "t")]))
    [(rs, witness)] = check_region_complete(gap)
    assert rs.state == "s" and witness == frozenset()


def test_region_type():
    assert isinstance(build_rcsm(UNIT).init.region, Region)
