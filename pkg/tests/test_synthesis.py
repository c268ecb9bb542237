import pytest

from amasnets import errors
from amasnets.gallery import diamond_lts, split_needed_lts
from amasnets.lts import Lts, isomorphic
from amasnets.net import marking_graph
from amasnets.synthesis import (add_complementary_places, check_separation, is_region,
                                minimal_regions, synthesize, synthesize_detailed,
                                synthesize_with_splitting)

from oracles import is_region_naive


def test_diamond_exact():
    net = synthesize(diamond_lts())
    assert len(net.places) == 4
    assert len(net.transitions) == 3
    assert isomorphic(marking_graph(net), diamond_lts()) is not None


def test_regions_agree_with_naive_check():
    l = split_needed_lts()
    for r in minimal_regions(l):
        assert is_region_naive(l.states, l.edges, r.members)
    assert is_region(l, {"l1", "l3"}) is not None
    assert is_region_naive(l.states, l.edges, {"l1", "l3"})
    assert is_region(l, {"l1"}) is None
    assert not is_region_naive(l.states, l.edges, {"l1"})


def test_split_needed_fails_exact_on_c():
    with pytest.raises(errors.SynthesisError) as exc:
        synthesize(split_needed_lts())
    report = exc.value.report
    assert frozenset({"c"}) in {lab for lab, _ in report.essp_failures}


def test_splitting_counts():
    res = synthesize_detailed(split_needed_lts(), split=True)
    counts = {next(iter(k)): v for k, v in res.split_counts.items()}
    assert counts == {"a": 1, "b": 1, "c": 3, "d": 1}
    assert isomorphic(marking_graph(res.net), split_needed_lts()) is not None


def test_separation_report_clean_for_diamond():
    l = diamond_lts()
    assert not check_separation(l, minimal_regions(l))


def test_complementary_places_keep_behaviour():
    l = diamond_lts()
    net = add_complementary_places(synthesize_detailed(l).net, l)
    assert isomorphic(marking_graph(net), l) is not None


def test_too_large_refused():
    l = Lts.from_edges(0, [(i, "a", i + 1) for i in range(30)])
    with pytest.raises(errors.CapacityError):
        synthesize_with_splitting(l, max_states=20)


def test_self_loop_lts():
    l = Lts.from_edges(0, [(0, "a", 0), (0, "b", 1)])
    net = synthesize_with_splitting(l)
    assert isomorphic(marking_graph(net), l) is not None
