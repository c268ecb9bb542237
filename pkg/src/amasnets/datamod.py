"""Reactive modules synchronising on data, and their net counterparts.

A module owns controlled variables, observes external ones, and moves
along guarded transitions ``(state, valuation of externals, state)``.
Nets built from modules annotate the sequential components that store
variable values, so they can later be glued together by fusing each
observed copy of a variable with its owner's component.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import CompositionError, ModuleError, StructuralError
from .fusion import SeqFusionSpec, fuse_seq_components
from .lts import Lts, as_label, prune_unreachable
from .net import LabeledNet, marking_graph
from .synthesis import synthesize_detailed, transition_events
from .verdict import FAILS, Verdict


class Valuation(Mapping):
    """Immutable, hashable assignment of values to variables."""

    __slots__ = ("_d", "_h")

    def __init__(self, items=(), **kw):
        d = dict(items)
        d.update(kw)
        self._d = {str(k): str(v) for k, v in d.items()}
        self._h = hash(frozenset(self._d.items()))

    def __getitem__(self, k):
        return self._d[k]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if isinstance(other, Valuation):
            return self._d == other._d
        return NotImplemented

    def __repr__(self):
        return "{" + ",".join(f"{k}:{v}" for k, v in sorted(self._d.items())) + "}"

    def restrict(self, variables: Iterable) -> "Valuation":
        vs = set(variables)
        return Valuation((k, v) for k, v in self._d.items() if k in vs)

    def union(self, other: Mapping) -> "Valuation":
        d = dict(other)
        d.update(self._d)
        return Valuation(d)

    def key(self) -> tuple:
        return tuple(sorted(self._d.items()))


def compatible(v1: Mapping, v2: Mapping) -> bool:
    return all(v2[k] == v for k, v in v1.items() if k in v2)


def all_valuations(variables: Iterable, domains: Mapping) -> list:
    vs = sorted(variables)
    return [Valuation(zip(vs, combo)) for combo in product(*(sorted(domains[x]) for x in vs))]


def _normalise_trans(trans) -> frozenset:
    """Accept ``{(p, guard, q): label}`` or an iterable of 4-tuples."""
    items = ((p, v, q, lab) for (p, v, q), lab in trans.items()) \
        if isinstance(trans, Mapping) else trans
    return frozenset((p, Valuation(v), q, as_label(lab)) for p, v, q, lab in items)


@dataclass(frozen=True)
class Module:
    name: str
    controlled: frozenset
    external: frozenset
    domains: Mapping = field(hash=False)
    states: frozenset = frozenset()
    valuation: Mapping = field(default_factory=dict, hash=False)  # state -> Valuation of X
    trans: frozenset = frozenset()   # (p, Valuation of I, q, label)
    initial: object = None

    def __post_init__(self):
        object.__setattr__(self, "controlled", frozenset(self.controlled))
        object.__setattr__(self, "external", frozenset(self.external))
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "domains", {x: tuple(sorted(str(v) for v in d))
                                             for x, d in self.domains.items()})
        object.__setattr__(self, "valuation", {s: Valuation(v) for s, v in self.valuation.items()})
        object.__setattr__(self, "trans", _normalise_trans(self.trans))
        self._validate()

    def _validate(self):
        if self.controlled & self.external:
            raise ModuleError(f"{self.name}: controlled and external variables overlap")
        for x in self.controlled | self.external:
            if x not in self.domains or not self.domains[x]:
                raise ModuleError(f"{self.name}: variable {x!r} has no domain")
        if self.initial not in self.states:
            raise ModuleError(f"{self.name}: initial state {self.initial!r} unknown")
        for s in self.states:
            v = self.valuation.get(s)
            if v is None or set(v) != set(self.controlled):
                raise ModuleError(f"{self.name}: state {s!r} lacks a total valuation")
            for x, val in v.items():
                if val not in self.domains[x]:
                    raise ModuleError(f"{self.name}: {x}={val} outside the domain")
        for p, v, q, _ in self.trans:
            if p not in self.states or q not in self.states:
                raise ModuleError(f"{self.name}: transition {(p, q)} has unknown endpoints")
            if set(v) != set(self.external):
                raise ModuleError(f"{self.name}: guard {v!r} is not total on the externals")

    @classmethod
    def from_guards(cls, name, controlled, external, domains, valuation, initial, edges):
        """Build a module from ``(src, label, dst, guard)`` edges.

        A guard is a partial valuation of the externals; it is expanded
        into every total valuation compatible with it.
        """
        trans = set()
        full = all_valuations(external, domains)
        for src, label, dst, guard in edges:
            for v in full:
                if compatible(guard or {}, v):
                    trans.add((src, v, dst, as_label(label)))
        return cls(name, frozenset(controlled), frozenset(external), domains,
                   frozenset(valuation), valuation, trans, initial)

    @property
    def alphabet(self) -> frozenset:
        return frozenset().union(*(t[3] for t in self.trans))

    def initial_valuation(self) -> Valuation:
        return self.valuation[self.initial]


def label_consistency_violations(m: Module) -> list:
    """Labels whose transitions disagree on endpoints' valuations or guards."""
    by_label = {}
    for p, v, q, lab in m.trans:
        by_label.setdefault(lab, {}).setdefault((p, q), set()).add(v)
    bad = []
    for lab, pairs in by_label.items():
        guards = {frozenset(vs) for vs in pairs.values()}
        src_vals = {m.valuation[p] for p, _ in pairs}
        dst_vals = {m.valuation[q] for _, q in pairs}
        if len(guards) > 1 or len(src_vals) > 1 or len(dst_vals) > 1:
            bad.append(lab)
    return sorted(bad, key=sorted)


def universal_closure(m: Module, v_init: Mapping) -> Module:
    """Close ``m`` by letting the environment change one external at a time."""
    v_init = Valuation(v_init)
    if set(v_init) != set(m.external):
        raise ModuleError(f"{m.name}: initial external valuation must be total on {sorted(m.external)}")
    for x, val in v_init.items():
        if val not in m.domains[x]:
            raise ModuleError(f"{m.name}: {x}={val} outside the domain")
    envs = all_valuations(m.external, m.domains)
    states = [(x, v) for x in sorted(m.states, key=str) for v in envs]
    empty = Valuation()
    trans = {((x, v), empty, (y, v), lab) for x, v, y, lab in m.trans}
    for x, v in states:
        for var in sorted(m.external):
            for val in m.domains[var]:
                if val != v[var]:
                    w = Valuation({**v, var: val})
                    trans.add(((x, v), empty, (x, w), frozenset()))
    valuation = {(x, v): m.valuation[x].union(v) for x, v in states}
    domains = dict(m.domains)
    return Module(m.name, m.controlled | m.external, frozenset(), domains,
                  frozenset(states), valuation, trans, (m.initial, v_init))


def compose_modules(m1: Module, m2: Module) -> Module:
    """Asynchronous composition: one module moves, the other stutters.

    A move of ``m1`` under guard ``a1`` is allowed in ``(q1, q2)`` when
    ``a1`` agrees with the variables ``m2`` controls in ``q2``; the
    composite guard keeps ``a1`` on the remaining externals and leaves
    the other remaining externals free.  Symmetrically for ``m2``.
    """
    if m1.controlled & m2.controlled:
        raise CompositionError(f"{m1.name} and {m2.name} control the same variables")
    if m1.alphabet & m2.alphabet:
        raise CompositionError(f"{m1.name} and {m2.name} share labels {sorted(m1.alphabet & m2.alphabet)}")
    X = m1.controlled | m2.controlled
    I = (m1.external | m2.external) - X
    domains = {**m1.domains, **m2.domains}
    for x in m1.domains.keys() & m2.domains.keys():
        if set(m1.domains[x]) != set(m2.domains[x]):
            raise CompositionError(f"variable {x!r} has different domains")
    guards = all_valuations(I, domains)
    states = [(a, b) for a in sorted(m1.states, key=str) for b in sorted(m2.states, key=str)]
    valuation = {(a, b): m1.valuation[a].union(m2.valuation[b]) for a, b in states}
    trans = set()
    for q1, a1, r1, lab in m1.trans:
        keep = a1.restrict(I)
        for q2 in m2.states:
            if compatible(m2.valuation[q2], a1):
                trans |= {((q1, q2), g, (r1, q2), lab) for g in guards if compatible(keep, g)}
    for q2, a2, r2, lab in m2.trans:
        keep = a2.restrict(I)
        for q1 in m1.states:
            if compatible(m1.valuation[q1], a2):
                trans |= {((q1, q2), g, (q1, r2), lab) for g in guards if compatible(keep, g)}
    return Module(f"{m1.name}|{m2.name}", X, I, domains, frozenset(states), valuation,
                  trans, (m1.initial, m2.initial))


def compose_all(modules: Sequence[Module]) -> Module:
    out = modules[0]
    for m in modules[1:]:
        out = compose_modules(out, m)
    return out


def module_to_lts(m: Module) -> Lts:
    """Underlying graph: guards erased, one edge per label and endpoints."""
    edges = {(p, lab, q) for p, _, q, lab in m.trans}
    return Lts(m.states, frozenset(edges), m.initial)


def reachable_module_graph(m: Module) -> Lts:
    """Reachable part of the underlying graph, explored from the initial state."""
    succ = {}
    for p, _, q, lab in m.trans:
        succ.setdefault(p, set()).add((lab, q))
    seen, queue, edges = {m.initial}, deque([m.initial]), set()
    while queue:
        p = queue.popleft()
        for lab, q in succ.get(p, ()):
            edges.add((p, lab, q))
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return Lts(frozenset(seen), frozenset(edges), m.initial)


def _module_lts_events(m: Module):
    """Underlying graph plus, per edge, the guard set admitting it."""
    l = prune_unreachable(module_to_lts(m))
    guards = {}
    for p, v, q, lab in m.trans:
        guards.setdefault((p, lab, q), set()).add(v)
    return l, guards


def value_place(var: str, value: str) -> str:
    return f"{var}={value}"


def build_net_with_vars(m: Module, prefix: str = "") -> LabeledNet:
    """Synthesised net of ``m`` plus one place per value of each controlled
    variable; each variable's places form a sequential component."""
    l, _ = _module_lts_events(m)
    res = synthesize_detailed(l, split=True, prefix=prefix)
    net = res.net
    states = l.states
    places, flow, initial = set(net.places), set(net.flow), set(net.initial)
    regions = dict(res.regions)
    loops = {p for p in net.places for t in net.transitions if p in net.pre[t] and p in net.post[t]}
    internal = {}
    for x in sorted(m.controlled):
        internal[x] = {}
        for val in m.domains[x]:
            region = frozenset(s for s in states if m.valuation[s][x] == val)
            reuse = [p for p in sorted(net.places)
                     if res.regions[p] == region and p not in loops and region]
            if reuse:
                internal[x][val] = reuse[0]
                continue
            p = value_place(x, val)
            if p in places or p in net.transitions:
                raise StructuralError(f"value place name {p!r} clashes with an existing node")
            places.add(p)
            regions[p] = region
            if l.root in region:
                initial.add(p)
            for t, edges in res.events.items():
                crossing = {(s in region, s2 in region) for s, _, s2 in edges}
                if crossing == {(True, False)}:
                    flow.add((p, t))
                elif crossing == {(False, True)}:
                    flow.add((t, p))
                elif not crossing <= {(True, True), (False, False)}:
                    raise ModuleError(f"{m.name}: values of {x!r} are not a region for {t!r}")
            internal[x][val] = p
    return LabeledNet(places=frozenset(places), transitions=net.transitions, flow=frozenset(flow),
                      initial=frozenset(initial), labels=net.labels, internal_vars=internal,
                      regions=regions)


def ext_place(var: str, value: str, owner: str) -> str:
    return f"{var}={value}@{owner}"


def build_net_with_interface(m: Module, init: Mapping, prefix: str = "") -> LabeledNet:
    """Net of ``m`` that also models its externals.

    Each external variable gets a component of value places whose tokens
    circulate freely through ∅-labelled transitions.  Every transition is
    split into one copy per admissible valuation of the externals it
    actually depends on, with read arcs on the matching value places.
    """
    init = Valuation(init)
    if set(init) != set(m.external):
        raise ModuleError(f"{m.name}: init must be total on {sorted(m.external)}")
    var_net = build_net_with_vars(m, prefix)
    l, guards = _module_lts_events(m)
    res_events = transition_events(var_net, l)
    places = set(var_net.places)
    transitions, flow, read, labels = set(), set(), set(), {}
    initial = set(var_net.initial)
    external = {}
    for y in sorted(m.external):
        external[y] = {}
        for val in m.domains[y]:
            p = ext_place(y, val, m.name)
            places.add(p)
            external[y][val] = p
            if init[y] == val:
                initial.add(p)
        for a in m.domains[y]:
            for b in m.domains[y]:
                if a != b:
                    t = f"{y}:{a}>{b}@{m.name}"
                    transitions.add(t)
                    labels[t] = frozenset()
                    flow |= {(external[y][a], t), (t, external[y][b])}
    for t in sorted(var_net.transitions):
        admitted = None
        for e in res_events[t]:
            vs = frozenset(guards[e])
            if admitted is None:
                admitted = vs
            elif admitted != vs:
                raise ModuleError(f"{m.name}: edges of {t!r} carry different guards")
        deps = dependencies(admitted, m.external, m.domains)
        vals = sorted({v.restrict(deps) for v in admitted}, key=Valuation.key)
        for val in vals:
            name = t if len(vals) == 1 else t + "[" + ",".join(f"{k}={v}" for k, v in val.key()) + "]"
            transitions.add(name)
            labels[name] = var_net.labels[t]
            flow |= {(p, name) for p in var_net.pre[t]} | {(name, p) for p in var_net.post[t]}
            read |= {(external[y][v], name) for y, v in val.items()}
    return LabeledNet(places=frozenset(places), transitions=frozenset(transitions),
                      flow=frozenset(flow), read=frozenset(read), initial=frozenset(initial),
                      labels=labels, internal_vars=var_net.internal_vars, external_vars=external)


def dependencies(admitted: frozenset, external: Iterable, domains: Mapping) -> list:
    """External variables a guard set really depends on.

    ``i`` is independent when changing ``i`` alone never leaves the set.
    """
    deps = []
    for i in sorted(external):
        for v in admitted:
            if any(Valuation({**v, i: d}) not in admitted for d in domains[i]):
                deps.append(i)
                break
    return deps


def fusion_spec_for(acc: LabeledNet, nxt: LabeledNet) -> SeqFusionSpec:
    """Match components of two annotated nets by variable name."""
    rho, rho_prime = [], []

    def bij(src, dst, var):
        if set(src) != set(dst):
            raise CompositionError(f"value ranges of {var!r} differ: {sorted(src)} vs {sorted(dst)}")
        return {src[v]: dst[v] for v in sorted(src)}

    for x in sorted(acc.internal_vars.keys() & nxt.internal_vars.keys()):
        raise CompositionError(f"variable {x!r} is controlled twice")
    for x in sorted(acc.internal_vars.keys() & nxt.external_vars.keys()):
        rho.append(bij(acc.internal_vars[x], nxt.external_vars[x], x))
    for x in sorted(nxt.internal_vars.keys() & acc.external_vars.keys()):
        rho_prime.append(bij(nxt.internal_vars[x], acc.external_vars[x], x))
    for x in sorted(acc.external_vars.keys() & nxt.external_vars.keys()):
        # two observers of the same variable: keep one copy
        rho_prime.append(bij(nxt.external_vars[x], acc.external_vars[x], x))
    return SeqFusionSpec(tuple(rho), tuple(rho_prime))


def compose_data_global(agents: Sequence[LabeledNet], require_closed: bool = True) -> LabeledNet:
    """Left fold of sequential-component fusion matched by variable name."""
    if not agents:
        raise StructuralError("at least one agent is required")
    acc = agents[0]
    for nxt in agents[1:]:
        acc = fuse_seq_components(acc, nxt, fusion_spec_for(acc, nxt))
    if require_closed and acc.external_vars:
        raise CompositionError(f"unmatched external variables: {sorted(acc.external_vars)}")
    return acc


def global_initial_valuation(modules: Sequence[Module]) -> Valuation:
    out = {}
    for m in modules:
        out.update(m.initial_valuation())
    return Valuation(out)


def interface_nets(modules: Sequence[Module], init: Mapping | None = None) -> list:
    init = Valuation(init) if init is not None else global_initial_valuation(modules)
    return [build_net_with_interface(m, init.restrict(m.external)) for m in modules]


def verify_data_props(modules: Sequence[Module], init: Mapping | None = None,
                      state_bound: int | None = None) -> Verdict:
    """Per-agent nets against closures, then the global net against the
    reachable closed composition."""
    from .amas import compare_graphs
    init = Valuation(init) if init is not None else global_initial_valuation(modules)
    nets = []
    per_agent = {}
    for m in modules:
        local = init.restrict(m.external)
        net = build_net_with_interface(m, local)
        nets.append(net)
        v = compare_graphs(f"agent:{m.name}", marking_graph(net, state_bound),
                           module_to_lts(universal_closure(m, local)))
        per_agent[m.name] = v.status
        if not v.holds:
            return Verdict("data", FAILS, {"agent": m.name, **(v.witness or {})},
                           {"agents": per_agent})
    glob = compose_data_global(nets)
    v = compare_graphs("data-global", marking_graph(glob, state_bound),
                       reachable_module_graph(compose_all(modules)))
    details = {"agents": per_agent, **v.details}
    return Verdict("data", v.status, v.witness, details)
