import pytest

from amasnets import errors
from amasnets.amas import (Agent, canonical_iis, canonical_iis_reachable, compose_action_based,
                           dead_transitions, sync_vectors, synthesize_agent, verify_prop1)
from amasnets.gallery import _net, tgc_agents
from amasnets.lts import isomorphic
from amasnets.net import marking_graph

from oracles import brute_iis


def test_agent_nets_have_one_place_per_state():
    for a in tgc_agents():
        net = synthesize_agent(a)
        assert len(net.places) == 3
        assert net.places == a.states
        assert all(t.startswith(a.name + ".") for t in net.transitions)
        assert isomorphic(marking_graph(net), a.to_lts()) is not None


def test_iis_sizes():
    agents = tgc_agents()
    assert len(canonical_iis(agents).states) == 27
    r = canonical_iis_reachable(agents)
    assert (len(r.states), len(r.edges)) == (8, 14)
    states, edges, _ = brute_iis(agents)
    assert (len(states), len(edges)) == (8, 14)


def test_composed_net_matches_iis():
    agents = tgc_agents()
    net = compose_action_based([synthesize_agent(a) for a in agents])
    g = marking_graph(net)
    assert (len(g.states), len(g.edges)) == (8, 14)
    assert isomorphic(g, canonical_iis_reachable(agents)) is not None
    assert verify_prop1(agents).holds


def test_sync_vectors_cover_shared_labels():
    nets = [synthesize_agent(a) for a in tgc_agents()]
    vecs = sync_vectors(nets)
    assert len(vecs) == 6
    shared = [v for v in vecs.values() if sum(x is not None for x in v) == 2]
    assert len(shared) == 4


def test_dead_transitions():
    net = _net(["x", "y", "z"], ["x"], {"a": ("a", ["x"], ["y"]), "b": ("b", ["z"], ["x"])})
    assert dead_transitions(net) == ["b"]


def test_agent_rejects_nondeterminism():
    with pytest.raises(errors.NetError):
        Agent.from_edges("bad", "x", [("x", "a", "y"), ("x", "a", "z")])


def test_event_only_on_unreachable_edge_still_blocks():
    a = Agent.from_edges("a", "x", [("x", "e", "y"), ("z", "f", "x")])
    b = Agent.from_edges("b", "u", [("u", "f", "v")])
    net = synthesize_agent(a)
    assert {"f"} in [set(l) for l in net.labels.values()]
    assert verify_prop1([a, b]).holds
    states, _, _ = brute_iis([a, b])
    assert len(canonical_iis_reachable([a, b]).states) == len(states) == 2
