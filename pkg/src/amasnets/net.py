"""1-safe labelled Petri nets with read (activator) and inhibitor arcs.

Markings are frozensets of place names.  A transition ``t`` is enabled in
``m`` when its preset and activators are marked and none of its
inhibitors is; firing gives ``(m - (pre - post)) | (post - pre)``.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping

from .errors import CapacityError, FiringError, ProjectionError, SafetyError, StructuralError
from .lts import Lts, as_label

Marking = frozenset

DEFAULT_STATE_BOUND = 1_000_000


def default_state_bound() -> int:
    """Bound used when callers pass none; ``AMASNETS_STATE_BOUND`` overrides."""
    env = os.environ.get("AMASNETS_STATE_BOUND")
    return int(env) if env else DEFAULT_STATE_BOUND


def _freeze_vars(vs) -> dict:
    return {str(x): {str(v): p for v, p in vals.items()} for x, vals in (vs or {}).items()}


@dataclass(frozen=True)
class LabeledNet:
    """An immutable labelled net system.

    ``internal_vars``/``external_vars`` map a variable name to its
    value -> place table; they annotate sequential components that carry
    data and are consumed by the data-driven compositions.  ``regions``
    records, for synthesised nets, the state set behind each place.
    """

    places: frozenset
    transitions: frozenset
    flow: frozenset
    initial: frozenset
    labels: Mapping = field(default_factory=dict)
    read: frozenset = frozenset()
    inhibit: frozenset = frozenset()
    internal_vars: Mapping = field(default_factory=dict)
    external_vars: Mapping = field(default_factory=dict)
    regions: Mapping | None = field(default=None, compare=False)

    def __post_init__(self):
        fs = lambda x: frozenset(x)
        object.__setattr__(self, "places", fs(self.places))
        object.__setattr__(self, "transitions", fs(self.transitions))
        object.__setattr__(self, "flow", fs(tuple(a) for a in self.flow))
        object.__setattr__(self, "read", fs(tuple(a) for a in self.read))
        object.__setattr__(self, "inhibit", fs(tuple(a) for a in self.inhibit))
        object.__setattr__(self, "initial", fs(self.initial))
        object.__setattr__(self, "labels",
                           {t: as_label(self.labels.get(t)) for t in self.transitions})
        object.__setattr__(self, "internal_vars", _freeze_vars(self.internal_vars))
        object.__setattr__(self, "external_vars", _freeze_vars(self.external_vars))
        self._validate()

    def _validate(self):
        P, T = self.places, self.transitions
        if P & T:
            raise StructuralError(f"names used both as place and transition: {sorted(P & T)}")
        for x, y in self.flow:
            if not ((x in P and y in T) or (x in T and y in P)):
                raise StructuralError(f"flow arc {(x, y)} references unknown nodes")
        for kind, rel in (("read", self.read), ("inhibit", self.inhibit)):
            for p, t in rel:
                if p not in P or t not in T:
                    raise StructuralError(f"{kind} arc {(p, t)} references unknown nodes")
        if not self.initial <= P:
            raise StructuralError(f"initial marking uses unknown places {sorted(self.initial - P)}")
        for t in T:
            if not self.pre[t] or not self.post[t]:
                raise StructuralError(f"transition {t!r} has an empty preset or postset")
        for kind, vs in (("internal", self.internal_vars), ("external", self.external_vars)):
            for x, vals in vs.items():
                for p in vals.values():
                    if p not in P:
                        raise StructuralError(f"{kind} variable {x!r} names unknown place {p!r}")

    @cached_property
    def pre(self) -> dict:
        out = {t: set() for t in self.transitions}
        for x, y in self.flow:
            if y in out:
                out[y].add(x)
        return {t: frozenset(v) for t, v in out.items()}

    @cached_property
    def post(self) -> dict:
        out = {t: set() for t in self.transitions}
        for x, y in self.flow:
            if x in out:
                out[x].add(y)
        return {t: frozenset(v) for t, v in out.items()}

    @cached_property
    def activators(self) -> dict:
        out = {t: set() for t in self.transitions}
        for p, t in self.read:
            out[t].add(p)
        return {t: frozenset(v) for t, v in out.items()}

    @cached_property
    def inhibitors(self) -> dict:
        out = {t: set() for t in self.transitions}
        for p, t in self.inhibit:
            out[t].add(p)
        return {t: frozenset(v) for t, v in out.items()}

    @cached_property
    def _needs(self) -> list:
        # (t, must-be-marked, must-be-empty) in sorted order for determinism
        return [(t, self.pre[t] | self.activators[t], self.inhibitors[t])
                for t in sorted(self.transitions)]

    @property
    def alphabet(self) -> frozenset:
        return frozenset(self.labels.values())

    def with_(self, **changes) -> "LabeledNet":
        """Copy with some fields replaced (regions are dropped unless given)."""
        changes.setdefault("regions", None)
        return replace(self, **changes)


def _check_marking(net: LabeledNet, m) -> frozenset:
    m = frozenset(m)
    if not m <= net.places:
        raise StructuralError(f"marking uses unknown places {sorted(m - net.places)}")
    return m


def enabled(net: LabeledNet, m) -> frozenset:
    m = _check_marking(net, m)
    return frozenset(t for t, need, forbid in net._needs
                     if need <= m and not (forbid & m))


def fire(net: LabeledNet, m, t) -> frozenset:
    """Fire ``t`` in ``m``; raises on a disabled transition or a safety breach."""
    m = _check_marking(net, m)
    if t not in net.transitions:
        raise StructuralError(f"unknown transition {t!r}")
    pre, post = net.pre[t], net.post[t]
    if not (pre | net.activators[t]) <= m or net.inhibitors[t] & m:
        raise FiringError(f"{t!r} is not enabled in {sorted(m)}")
    if (post & m) - pre:
        raise SafetyError(m, t)
    return (m - pre) | post


def marking_graph(net: LabeledNet, state_bound: int | None = None) -> Lts:
    """Breadth-first reachability graph; edges carry ``labels[t]``.

    ``Lts.witnesses`` maps each edge to the transitions producing it.
    """
    bound = state_bound or default_state_bound()
    if bound <= 0:
        raise ValueError("state_bound must be positive")
    root = net.initial
    seen = {root}
    queue = deque([root])
    edges = {}
    while queue:
        m = queue.popleft()
        for t, need, forbid in net._needs:
            if not need <= m or forbid & m:
                continue
            pre, post = net.pre[t], net.post[t]
            if (post & m) - pre:
                raise SafetyError(m, t)
            m2 = (m - pre) | post
            e = (m, net.labels[t], m2)
            edges.setdefault(e, set()).add(t)
            if m2 not in seen:
                if len(seen) >= bound:
                    raise CapacityError(f"more than {bound} reachable markings")
                seen.add(m2)
                queue.append(m2)
    return Lts(frozenset(seen), frozenset(edges), root,
               {e: frozenset(ts) for e, ts in edges.items()})


def reachable_markings(net: LabeledNet, state_bound: int | None = None) -> frozenset:
    return marking_graph(net, state_bound).states


@dataclass(frozen=True)
class Subnet:
    """Subsystem generated by a set of places."""

    places: frozenset
    transitions: frozenset
    flow: frozenset
    read: frozenset
    initial: frozenset

    @cached_property
    def pre(self):
        return {t: frozenset(p for p, u in self.flow if u == t) for t in self.transitions}

    @cached_property
    def post(self):
        return {t: frozenset(p for u, p in self.flow if u == t) for t in self.transitions}


def subnet(net: LabeledNet, place_subset: Iterable) -> Subnet:
    ps = frozenset(place_subset)
    if not ps <= net.places:
        raise StructuralError(f"unknown places {sorted(ps - net.places)}")
    ts = frozenset(t for t in net.transitions if (net.pre[t] | net.post[t]) & ps)
    flow = frozenset((x, y) for x, y in net.flow
                     if (x in ps and y in ts) or (x in ts and y in ps))
    read = frozenset((p, t) for p, t in net.read if p in ps and t in ts)
    return Subnet(ps, ts, flow, read, net.initial & ps)


@dataclass(frozen=True)
class ComponentCheck:
    ok: bool
    reason: str = ""
    witness: object = None

    def __bool__(self):
        return self.ok


def is_sequential_component(net: LabeledNet, place_subset: Iterable) -> ComponentCheck:
    """Degree condition on the generated subnet plus a one-token invariant."""
    sub = subnet(net, place_subset)
    if not sub.places:
        return ComponentCheck(False, "empty place set")
    for t in sorted(sub.transitions):
        if len(sub.pre[t]) != 1 or len(sub.post[t]) != 1:
            return ComponentCheck(False, "degree", t)
    # the subnet is a state machine, so reachable markings are token moves
    seen = {sub.initial}
    queue = deque([sub.initial])
    while queue:
        m = queue.popleft()
        if len(m) != 1:
            return ComponentCheck(False, "token count", m)
        for t in sub.transitions:
            if sub.pre[t] <= m:
                m2 = (m - sub.pre[t]) | sub.post[t]
                if m2 not in seen:
                    seen.add(m2)
                    queue.append(m2)
    return ComponentCheck(True)


def project_marking(net: LabeledNet, sub: Subnet, m, renaming: Mapping | None = None) -> frozenset:
    """Restrict ``m`` to ``sub``; places absent from ``net`` are read through ``renaming``."""
    renaming = renaming or {}
    m = frozenset(m)
    out = set()
    for p in sub.places:
        q = p if p in net.places else renaming.get(p)
        if q is None or q not in net.places:
            raise ProjectionError(f"place {p!r} has no counterpart in the projected net")
        if q in m:
            out.add(p)
    return frozenset(out)


def read_to_selfloops(net: LabeledNet) -> LabeledNet:
    """Replace every read arc (p, t) by the flow loop p -> t -> p."""
    flow = set(net.flow)
    for p, t in net.read:
        flow.add((p, t))
        flow.add((t, p))
    return net.with_(flow=frozenset(flow), read=frozenset())
