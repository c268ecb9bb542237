"""Ready-made systems: the train-gate-controller benchmark and small
examples for regions and compositions."""

from __future__ import annotations

from .amas import Agent
from .datamod import Module
from .lts import Lts
from .net import LabeledNet

BINARY = ("0", "1")


def tgc_agents() -> list:
    """Two trains and a controller; n*/m* are the trains' event families."""
    train1 = Agent.from_edges("train1", "w1", [("w1", "n1", "t1"), ("t1", "n2", "a1"),
                                                ("a1", "n3", "w1")])
    controller = Agent.from_edges("controller", "g", [("g", "n1", "r1"), ("r1", "n2", "g"),
                                                      ("g", "m1", "r2"), ("r2", "m2", "g")])
    train2 = Agent.from_edges("train2", "w2", [("w2", "m1", "t2"), ("t2", "m2", "a2"),
                                                ("a2", "m3", "w2")])
    return [controller, train1, train2]


def _one_hot(names, on):
    return {x: "1" if x == on else "0" for x in names}


def _train_binary(i: int) -> Module:
    w, t, a, r = f"w{i}", f"t{i}", f"a{i}", f"r{i}"
    ev = "n" if i == 1 else "m"
    xs = (w, t, a)
    lab = f"tr{i}"
    return Module.from_guards(
        f"train{i}", xs, [r], {x: BINARY for x in (*xs, r)},
        {s: _one_hot(xs, s) for s in xs}, w,
        [(w, f"{lab}:{ev}1", t, {r: "1"}),
         (t, f"{lab}:{ev}2", a, {r: "1"}),
         (a, f"{lab}:{ev}3", w, None)])


def _controller_binary() -> Module:
    xs = ("g", "r1", "r2")
    ins = ("w1", "a1", "w2", "a2")
    return Module.from_guards(
        "controller", xs, ins, {x: BINARY for x in (*xs, *ins)},
        {s: _one_hot(xs, s) for s in xs}, "g",
        [("g", "c:n1", "r1", {"w1": "1"}),
         ("r1", "c:n2", "g", {"a1": "1"}),
         ("g", "c:m1", "r2", {"w2": "1"}),
         ("r2", "c:m2", "g", {"a2": "1"})])


def _train_ternary(i: int) -> Module:
    w, t, a, r = f"w{i}", f"t{i}", f"a{i}", f"r{i}"
    ev = "n" if i == 1 else "m"
    s = f"s{i}"
    lab = f"tr{i}"
    return Module.from_guards(
        f"train{i}", [s], ["sc"], {s: (w, t, a), "sc": ("g", "r1", "r2")},
        {x: {s: x} for x in (w, t, a)}, w,
        [(w, f"{lab}:{ev}1", t, {"sc": r}),
         (t, f"{lab}:{ev}2", a, {"sc": r}),
         (a, f"{lab}:{ev}3", w, None)])


def _controller_ternary() -> Module:
    return Module.from_guards(
        "controller", ["sc"], ["s1", "s2"],
        {"sc": ("g", "r1", "r2"), "s1": ("w1", "t1", "a1"), "s2": ("w2", "t2", "a2")},
        {x: {"sc": x} for x in ("g", "r1", "r2")}, "g",
        [("g", "c:n1", "r1", {"s1": "w1"}),
         ("r1", "c:n2", "g", {"s1": "a1"}),
         ("g", "c:m1", "r2", {"s2": "w2"}),
         ("r2", "c:m2", "g", {"s2": "a2"})])


def tgc_modules(design: str = "binary") -> list:
    """Modules of the data-synchronised benchmark, ordered controller,
    train1, train2.  ``binary`` uses one 0/1 variable per local state,
    ``ternary`` one variable per agent."""
    if design == "binary":
        return [_controller_binary(), _train_binary(1), _train_binary(2)]
    if design == "ternary":
        return [_controller_ternary(), _train_ternary(1), _train_ternary(2)]
    raise ValueError(f"unknown design {design!r}")


def _net(places, initial, transitions, read=(), **kw):
    """Compact constructor: ``transitions`` maps name -> (label, pre, post)."""
    flow = set()
    labels = {}
    for t, (label, pre, post) in transitions.items():
        labels[t] = label
        flow |= {(p, t) for p in pre} | {(t, p) for p in post}
    return LabeledNet(places=frozenset(places), transitions=frozenset(transitions),
                      flow=frozenset(flow), read=frozenset(read), initial=frozenset(initial),
                      labels=labels, **kw)


def diamond_lts() -> Lts:
    """Two independent steps a, b closed by c; exactly synthesisable."""
    return Lts.from_edges("l1", [("l1", "a", "l2"), ("l3", "a", "l4"), ("l1", "b", "l3"),
                                 ("l2", "b", "l4"), ("l4", "c", "l1")])


def split_needed_lts() -> Lts:
    """Needs three c-transitions: l4 sits both before and after a c-step."""
    return Lts.from_edges("l2", [("l1", "c", "l3"), ("l3", "d", "l1"), ("l2", "a", "l1"),
                                 ("l2", "b", "l4"), ("l4", "c", "l5"), ("l5", "d", "l6"),
                                 ("l6", "c", "l4")])


def read_arc_net() -> LabeledNet:
    """Two choices whose second halves are gated by read arcs."""
    return _net(["p1", "p2", "p3", "p4", "p5", "p6", "p7"], ["p1", "p2"], {
        "t1": ("a", ["p1"], ["p3"]), "t2": ("b", ["p1"], ["p4"]),
        "t3": ("c", ["p2"], ["p5"]), "t4": ("d", ["p2"], ["p6"]),
        "t5": ("c", ["p3", "p5"], ["p7"]), "t6": ("d", ["p4", "p6"], ["p7"])},
        read=[("p3", "t3"), ("p4", "t4")])


def transition_fusion_pair() -> tuple:
    """A net with two a-branches and a single-a cycle."""
    left = _net(["p1", "p2", "p3"], ["p1"], {
        "a1": ("a", ["p1"], ["p2"]), "a2": ("a", ["p1"], ["p3"]),
        "b": ("b", ["p2"], ["p1"]), "c": ("c", ["p3"], ["p1"])})
    right = _net(["p4", "p5"], ["p4"], {
        "a3": ("a", ["p4"], ["p5"]), "d": ("d", ["p5"], ["p4"])})
    return left, right


def component_fusion_pair() -> tuple:
    """Two cyclic agents with extra shortcuts, used for component fusion."""
    left = _net(["p1", "p2", "p3"], ["p1"], {
        "a": ("a", ["p1"], ["p2"]), "b": ("b", ["p2"], ["p3"]),
        "c": ("c", ["p3"], ["p1"]), "d": ("d", ["p2"], ["p1"])})
    right = _net(["p4", "p5", "p6"], ["p4"], {
        "e": ("e", ["p4"], ["p5"]), "f": ("f", ["p5"], ["p6"]),
        "g": ("g", ["p6"], ["p4"]), "h": ("h", ["p4"], ["p6"]),
        "k": ("k", ["p6"], ["p5"])})
    return left, right


def autofusion_pair() -> tuple:
    """A train with two observed copies of one variable, and a free
    two-valued component that merges them."""
    left = _net(["w1", "~w1", "a1", "~a1", "t1", "~t1", "x1", "~x1", "y1", "~y1"],
                ["w1", "~a1", "~t1", "~x1", "~y1"], {
                    "n1": ("n1", ["w1", "~t1"], ["~w1", "t1"]),
                    "n2": ("n2", ["t1", "~a1"], ["a1", "~t1"]),
                    "n3": ("n3", ["a1", "~w1"], ["w1", "~a1"]),
                    "x1>~x1": (None, ["x1"], ["~x1"]), "~x1>x1": (None, ["~x1"], ["x1"]),
                    "y1>~y1": (None, ["y1"], ["~y1"]), "~y1>y1": (None, ["~y1"], ["y1"])},
                read=[("y1", "n1"), ("x1", "n2")])
    right = _net(["r1", "~r1"], ["~r1"], {
        "r1>~r1": (None, ["r1"], ["~r1"]), "~r1>r1": (None, ["~r1"], ["r1"])})
    return left, right


def autofused_train() -> LabeledNet:
    """Expected merge of ``autofusion_pair``: one observed component."""
    return _net(["w1", "~w1", "a1", "~a1", "t1", "~t1", "r1", "~r1"],
                ["w1", "~a1", "~t1", "~r1"], {
                    "n1": ("n1", ["w1", "~t1"], ["~w1", "t1"]),
                    "n2": ("n2", ["t1", "~a1"], ["a1", "~t1"]),
                    "n3": ("n3", ["a1", "~w1"], ["w1", "~a1"]),
                    "r1>~r1": (None, ["r1"], ["~r1"]), "~r1>r1": (None, ["~r1"], ["r1"])},
                read=[("r1", "n1"), ("r1", "n2")])
