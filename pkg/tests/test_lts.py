from amasnets.amas import compare_graphs
from amasnets.lts import Lts, distinguishing_trace, is_deterministic, isomorphic, prune_unreachable

from oracles import brute_isomorphic


def ring(n, root=0, lab="a"):
    return Lts.from_edges(root, [(i, lab, (i + 1) % n) for i in range(n)])


def test_isomorphic_rings():
    phi = isomorphic(ring(4), Lts.from_edges("x0", [(f"x{i}", "a", f"x{(i + 1) % 4}")
                                                    for i in range(4)]))
    assert phi == {i: f"x{i}" for i in range(4)}


def test_trace_equivalent_but_not_isomorphic():
    assert isomorphic(ring(3), ring(4)) is None
    assert distinguishing_trace(ring(3), ring(4)) is None


def test_compare_graphs_witnesses():
    v = compare_graphs("iso", ring(3), ring(4))
    assert v.status == "fails" and v.witness == {"reason": "not isomorphic"}
    line = Lts.from_edges(0, [(0, "a", 1)])
    v = compare_graphs("iso", ring(3), line)
    assert v.witness == {"trace": ["a", "a"]}


def test_label_matters():
    assert isomorphic(ring(3), ring(3, lab="b")) is None
    assert distinguishing_trace(ring(3), ring(3, lab="b")) == [frozenset({"a"})]


def test_root_matters():
    a = Lts.from_edges(0, [(0, "a", 1), (1, "b", 2)])
    b = Lts.from_edges(1, [(0, "a", 1), (1, "b", 2)], states=[0, 2])
    assert isomorphic(a, b) is None
    assert not brute_isomorphic(a.states, a.edges, a.root, b.states, b.edges, b.root)


def test_symmetric_branching_agrees_with_brute_force():
    edges = [(0, "a", 1), (0, "a", 2), (1, "b", 3), (2, "b", 3), (3, "c", 0)]
    a = Lts.from_edges(0, edges)
    b = Lts.from_edges(0, [(0, "a", 2), (0, "a", 1), (2, "b", 3), (1, "b", 3), (3, "c", 0)])
    assert isomorphic(a, b) is not None
    assert brute_isomorphic(a.states, a.edges, 0, b.states, b.edges, 0)
    assert not is_deterministic(a)


def test_prune_unreachable():
    l = Lts.from_edges(0, [(0, "a", 1), (2, "b", 0)])
    p = prune_unreachable(l)
    assert p.states == {0, 1}
    assert len(p.edges) == 1
