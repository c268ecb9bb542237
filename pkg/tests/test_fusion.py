import pytest

from amasnets import errors
from amasnets.fusion import SeqFusionSpec, describe, fuse_seq_components, fuse_transitions, pair_name
from amasnets.gallery import (_net, autofused_train, autofusion_pair, component_fusion_pair,
                              transition_fusion_pair)
from amasnets.net import marking_graph

from oracles import brute_marking_graph, canonical_structure

FULL = SeqFusionSpec(rho=[{"p1": "p4", "p2": "p5", "p3": "p6"}])
PARTIAL = SeqFusionSpec(rho=[{"p1": "p4", "p2": "p6"}])


def test_transition_fusion_keeps_both_a_branches():
    left, right = transition_fusion_pair()
    n = fuse_transitions(left, right)
    a_moves = [t for t in n.transitions if n.labels[t] == {"a"}]
    assert len(a_moves) == 2
    assert all(n.pre[t] == {"p1", "p4"} for t in a_moves)
    assert {frozenset(n.post[t]) for t in a_moves} == {frozenset({"p2", "p5"}),
                                                        frozenset({"p3", "p5"})}
    assert len(n.transitions) == 5


def test_full_cycle_fusion():
    left, right = component_fusion_pair()
    n = fuse_seq_components(left, right, FULL)
    expected = _net(["p1", "p2", "p3"], ["p1"], {
        "x": ({"a", "e"}, ["p1"], ["p2"]), "y": ({"b", "f"}, ["p2"], ["p3"]),
        "z": ({"c", "g"}, ["p3"], ["p1"])})
    assert canonical_structure(n) == canonical_structure(expected)


def test_partial_fusion():
    left, right = component_fusion_pair()
    n = fuse_seq_components(left, right, PARTIAL)
    expected = _net(["p1", "p2", "p3", "p5"], ["p1"], {
        "ah": ({"a", "h"}, ["p1"], ["p2"]), "dg": ({"d", "g"}, ["p2"], ["p1"]),
        "b": ("b", ["p2"], ["p3"]), "c": ("c", ["p3"], ["p1"]),
        "e": ("e", ["p1"], ["p5"]), "f": ("f", ["p5"], ["p2"]), "k": ("k", ["p2"], ["p5"])})
    assert canonical_structure(n) == canonical_structure(expected)
    assert n.labels["a|h"] == {"a", "h"}


def test_partial_fusion_behaviour_matches_oracle():
    left, right = component_fusion_pair()
    n = fuse_seq_components(left, right, PARTIAL)
    states, edges, _ = brute_marking_graph(n)
    g = marking_graph(n)
    assert len(g.states) == len(states) and len(g.edges) == len(edges)


def test_autofusion_merges_observers():
    left, right = autofusion_pair()
    spec = SeqFusionSpec(rho_prime=[{"r1": "x1", "~r1": "~x1"}, {"r1": "y1", "~r1": "~y1"}])
    n = fuse_seq_components(left, right, spec)
    want = autofused_train()
    assert describe(n) == describe(want)
    assert n.places == want.places and n.initial == want.initial


def test_spec_validation():
    left, right = component_fusion_pair()
    with pytest.raises(errors.CompositionError):
        fuse_seq_components(left, right, SeqFusionSpec(rho=[{"p1": "p4", "p2": "p4"}]))
    with pytest.raises(errors.CompositionError):
        fuse_seq_components(left, right, SeqFusionSpec(rho=[{"p1": "p5", "p2": "p4"}]))
    with pytest.raises(errors.CompositionError):
        fuse_seq_components(left, right, SeqFusionSpec(rho=[{"p1": "zz"}]))


def test_pair_name():
    assert pair_name("a", "b") == "(a,b)"
    assert pair_name("a", None) == "(a,ε)"
