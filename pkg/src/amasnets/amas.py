"""Asynchronous multi-agent systems synchronising on shared events.

Covers the canonical interleaved model (product of agents), the
action-based global net obtained by synchronising equally labelled
transitions of the agents' nets, and the check that both coincide.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .errors import CapacityError, StructuralError
from .fusion import pair_name, _union_vars
from .lts import Lts, as_label, distinguishing_trace, isomorphic, label_str, prune_unreachable, state_str
from .net import LabeledNet, default_state_bound, marking_graph
from .synthesis import synthesize_detailed
from .verdict import FAILS, HOLDS, Verdict


@dataclass(frozen=True)
class Agent:
    name: str
    states: frozenset
    events: frozenset
    trans: Mapping = field(hash=False)  # (state, event) -> state
    initial: str

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "events", frozenset(self.events))
        object.__setattr__(self, "trans", dict(self.trans))
        if self.initial not in self.states:
            raise StructuralError(f"agent {self.name}: initial state {self.initial!r} unknown")
        for (s, e), t in self.trans.items():
            if s not in self.states or t not in self.states or e not in self.events:
                raise StructuralError(f"agent {self.name}: bad transition {(s, e, t)}")

    @classmethod
    def from_edges(cls, name, initial, edges, events=()):
        states = {initial}
        trans = {}
        evs = set(events)
        for s, e, t in edges:
            if trans.setdefault((s, e), t) != t:
                raise StructuralError(f"agent {name}: {e!r} is not functional in {s!r}")
            states |= {s, t}
            evs.add(e)
        return cls(name, frozenset(states), frozenset(evs), trans, initial)

    def to_lts(self) -> Lts:
        return Lts(self.states, frozenset((s, as_label(e), t) for (s, e), t in self.trans.items()),
                   self.initial)


def _global_moves(agents, state):
    events = sorted(set().union(*(a.events for a in agents)))
    for e in events:
        nxt = []
        for a, s in zip(agents, state):
            if e in a.events:
                if (s, e) not in a.trans:
                    break
                nxt.append(a.trans[(s, e)])
            else:
                nxt.append(s)
        else:
            yield e, tuple(nxt)


def canonical_iis(agents: Sequence[Agent], state_bound: int | None = None) -> Lts:
    """Full product of the agents, unreachable global states included."""
    if not agents:
        raise StructuralError("at least one agent is required")
    bound = state_bound or default_state_bound()
    size = 1
    for a in agents:
        size *= len(a.states)
    if size > bound:
        raise CapacityError(f"product has {size} states, bound is {bound}")
    states = list(product(*(sorted(a.states) for a in agents)))
    edges = {(s, frozenset([e]), t) for s in states for e, t in _global_moves(agents, s)}
    return Lts(frozenset(states), frozenset(edges), tuple(a.initial for a in agents))


def canonical_iis_reachable(agents: Sequence[Agent], state_bound: int | None = None) -> Lts:
    """Reachable part of the product, explored on the fly."""
    if not agents:
        raise StructuralError("at least one agent is required")
    bound = state_bound or default_state_bound()
    root = tuple(a.initial for a in agents)
    seen, queue, edges = {root}, deque([root]), set()
    while queue:
        s = queue.popleft()
        for e, t in _global_moves(agents, s):
            edges.add((s, frozenset([e]), t))
            if t not in seen:
                if len(seen) >= bound:
                    raise CapacityError(f"more than {bound} reachable global states")
                seen.add(t)
                queue.append(t)
    return Lts(frozenset(seen), frozenset(edges), root)


def sync_vectors(nets: Sequence[LabeledNet]) -> dict:
    """Global transitions of the action-based composition.

    Maps each global transition name to its tuple of components, one per
    net, with None where the net does not know the label.
    """
    labels = sorted(set().union(*(n.alphabet for n in nets)), key=lambda x: sorted(x))
    out = {}
    for lab in labels:
        choices = []
        for n in nets:
            if lab in n.alphabet:
                choices.append(sorted(t for t in n.transitions if n.labels[t] == lab))
            else:
                choices.append([None])
        for combo in product(*choices):
            out[pair_name(*combo)] = combo
    return out


def compose_action_based(nets: Sequence[LabeledNet]) -> LabeledNet:
    """Synchronise all nets on equal labels (n-ary transition fusion)."""
    if not nets:
        raise StructuralError("at least one net is required")
    if len(nets) == 1:
        return nets[0]
    seen = set()
    for n in nets:
        if seen & n.places:
            raise StructuralError(f"place sets overlap: {sorted(seen & n.places)}")
        seen |= n.places
    vectors = sync_vectors(nets)
    flow, read, inhibit, labels = set(), set(), set(), {}
    for name, combo in vectors.items():
        lab = set()
        for n, t in zip(nets, combo):
            if t is None:
                continue
            flow.update((p, name) for p in n.pre[t])
            flow.update((name, p) for p in n.post[t])
            read.update((p, name) for p in n.activators[t])
            inhibit.update((p, name) for p in n.inhibitors[t])
            lab |= n.labels[t]
        labels[name] = frozenset(lab)
    return LabeledNet(places=frozenset(seen), transitions=frozenset(vectors),
                      flow=frozenset(flow), read=frozenset(read), inhibit=frozenset(inhibit),
                      initial=frozenset().union(*(n.initial for n in nets)), labels=labels,
                      internal_vars=_union_vars(*(n.internal_vars for n in nets)),
                      external_vars=_union_vars(*(n.external_vars for n in nets)))


def synthesize_agent(agent: Agent, split: bool = True) -> LabeledNet:
    """Net of one agent; transitions are prefixed by the agent name.

    Events that only occur on unreachable edges vanish from the
    synthesised net, yet they still block partners in the global model.
    Each gets a dead transition on a never-marked place so the label
    stays in the net's alphabet.
    """
    net = synthesize_detailed(agent.to_lts(), split=split, prefix=f"{agent.name}.").net
    missing = sorted(e for e in agent.events if as_label(e) not in net.alphabet)
    if not missing:
        return net
    never = f"{agent.name}.unreachable"
    if never in net.places:
        raise StructuralError(f"place name {never!r} already used")
    dead = {f"{agent.name}.{e}.dead": e for e in missing}
    flow = set(net.flow)
    for t in dead:
        flow |= {(never, t), (t, never)}
    return net.with_(places=net.places | {never}, transitions=net.transitions | set(dead),
                     flow=frozenset(flow), labels={**net.labels, **dead})


def dead_transitions(net: LabeledNet, state_bound: int | None = None) -> list:
    """Transitions enabled in no reachable marking (diagnostic only)."""
    mg = marking_graph(net, state_bound)
    fired = set().union(*mg.witnesses.values()) if mg.witnesses else set()
    return sorted(net.transitions - fired)


def compare_graphs(check: str, left: Lts, right: Lts, **details) -> Verdict:
    """Isomorphism verdict with a distinguishing trace on failure."""
    phi = isomorphic(left, right)
    left, right = prune_unreachable(left), prune_unreachable(right)
    details.update(left_states=len(left.states), left_edges=len(left.edges),
                   right_states=len(right.states), right_edges=len(right.edges))
    if phi is not None:
        return Verdict(check, HOLDS, None, details | {
            "bijection": {state_str(k): state_str(v) for k, v in phi.items()}})
    trace = distinguishing_trace(left, right)
    witness = {"trace": [label_str(x) for x in trace]} if trace else {"reason": "not isomorphic"}
    return Verdict(check, FAILS, witness, details)


def verify_prop1(agents: Sequence[Agent], state_bound: int | None = None) -> Verdict:
    """Marking graph of the composed agent nets versus the reachable IIS."""
    nets = [synthesize_agent(a) for a in agents]
    glob = compose_action_based(nets)
    mg = marking_graph(glob, state_bound)
    iis = canonical_iis_reachable(agents, state_bound)
    return compare_graphs("interleaving", mg, iis, dead=dead_transitions(glob, state_bound))
