import pytest

from amasnets import errors
from amasnets.gallery import _net, read_arc_net
from amasnets.net import (LabeledNet, enabled, fire, is_sequential_component, marking_graph,
                          reachable_markings, read_to_selfloops)

from oracles import brute_marking_graph


def cycle():
    return _net(["p", "q"], ["p"], {"a": ("a", ["p"], ["q"]), "b": ("b", ["q"], ["p"])})


def test_enabled_and_fire():
    n = cycle()
    assert enabled(n, {"p"}) == {"a"}
    assert fire(n, {"p"}, "a") == {"q"}
    with pytest.raises(errors.FiringError):
        fire(n, {"p"}, "b")


def test_unsafe_firing_detected():
    n = _net(["p", "q"], ["p", "q"], {"a": ("a", ["p"], ["q"])})
    with pytest.raises(errors.SafetyError):
        marking_graph(n)


def test_read_arc_gates_without_consuming():
    n = read_arc_net()
    assert "t3" not in enabled(n, n.initial)
    m = fire(n, n.initial, "t1")
    assert "t3" in enabled(n, m)
    assert "p3" in fire(n, m, "t3")


def test_inhibitor_arc():
    n = _net(["p", "q", "r"], ["p", "r"], {"a": ("a", ["p"], ["q"])}, inhibit=[("r", "a")])
    assert enabled(n, n.initial) == frozenset()
    assert enabled(n, {"p"}) == {"a"}


def test_read_arc_net_graph_matches_oracle():
    n = read_arc_net()
    g = marking_graph(n)
    states, edges, _ = brute_marking_graph(n)
    assert len(g.states) == len(states) == 6
    assert len(g.edges) == len(edges)


def test_read_to_selfloops_preserves_graph():
    n = read_arc_net()
    g1, g2 = marking_graph(n), marking_graph(read_to_selfloops(n))
    assert g1.states == g2.states and g1.edges == g2.edges


@pytest.mark.parametrize("bad", [
    dict(flow=[("p", "zz")]),
    dict(initial=["nowhere"]),
    dict(read=[("nowhere", "a")]),
])
def test_structural_validation(bad):
    base = dict(places={"p", "q"}, transitions={"a"}, flow=[("p", "a"), ("a", "q")],
                initial={"p"}, labels={"a": "a"})
    base.update(bad)
    with pytest.raises(errors.StructuralError):
        LabeledNet(**base)


def test_empty_preset_rejected():
    with pytest.raises(errors.StructuralError):
        LabeledNet(places={"p"}, transitions={"a"}, flow=[("a", "p")], initial=set())


def test_state_bound(monkeypatch):
    n = read_arc_net()
    with pytest.raises(errors.CapacityError):
        marking_graph(n, state_bound=3)
    monkeypatch.setenv("AMASNETS_STATE_BOUND", "2")
    with pytest.raises(errors.CapacityError):
        reachable_markings(n)


def test_sequential_component():
    n = cycle()
    assert is_sequential_component(n, {"p", "q"})
    assert not is_sequential_component(read_arc_net(), {"p1", "p3"})
