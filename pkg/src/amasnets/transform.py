"""Translations between the two synchronisation styles.

``tr2data`` turns agents that synchronise on shared transitions into
agents that synchronise through shared variables, using a start/end
handshake per shared transition.  ``data2tr`` goes the other way by
turning read arcs on foreign variables into self-loops that the reader
and the owner execute together.  The ``check_theorem*`` functions test
the expected correspondences on concrete instances.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .amas import compare_graphs, compose_action_based, sync_vectors
from .datamod import compose_data_global
from .errors import StructuralError
from .lts import label_str
from .net import LabeledNet, enabled, fire, marking_graph, reachable_markings
from .verdict import FAILS, HOLDS, INCONCLUSIVE, Verdict

IN, OUT = "in", "out"


@dataclass(frozen=True)
class Handshake:
    """One shared global transition and its protocol instance."""

    name: str             # global transition name in the composed system
    label: str
    members: tuple        # (agent, transition) in priority order
    keys: tuple           # per member: prefix used for its b/e/in/out names


@dataclass
class CorrespondenceMaps:
    shared_places: frozenset
    in_places: frozenset
    out_places: frozenset
    sync_places: frozenset
    kappa: dict = field(default_factory=dict)   # global transition -> list of transitions
    pi: dict = field(default_factory=dict)      # transition of the result -> label set
    handshakes: list = field(default_factory=list)


def sp_map(maps: CorrespondenceMaps, m) -> frozenset:
    """Marking of the handshake system standing for ``m``: every protocol
    is idle (all ``in`` and sync places marked, ``out`` places empty)."""
    return (frozenset(m) & maps.shared_places) | maps.in_places | maps.sync_places


def is_idle(maps: CorrespondenceMaps, m) -> bool:
    return maps.in_places <= m and not (maps.out_places & m) and maps.sync_places <= m


def _single_label(net, t):
    lab = net.labels[t]
    if len(lab) != 1:
        shown = label_str(lab) if lab else "∅"
        raise StructuralError(f"transition {t!r} must carry exactly one label, has {shown}")
    return next(iter(lab))


def tr2data(agent_nets: Sequence[LabeledNet], order: Sequence | None = None,
            names: Sequence[str] | None = None):
    """Handshake translation.

    Returns ``(agents, maps)``: one annotated net per agent (in input order)
    plus the correspondence with the transition-synchronised composition.
    ``order`` lists agent names (or indices) by priority; the first
    participant of a shared transition initiates it.
    """
    n = len(agent_nets)
    names = list(names) if names is not None else [f"agent{i}" for i in range(n)]
    if len(set(names)) != n:
        raise StructuralError("agent names must be distinct")
    if order is None:
        rank = {nm: i for i, nm in enumerate(names)}
    else:
        order = [names[o] if isinstance(o, int) else o for o in order]
        if sorted(order) != sorted(names):
            raise StructuralError(f"order {order} is not a permutation of {names}")
        rank = {nm: i for i, nm in enumerate(order)}
    seen = set()
    for net in agent_nets:
        if seen & net.transitions:
            raise StructuralError(f"agents share transitions {sorted(seen & net.transitions)}")
        seen |= net.transitions
        for t in net.transitions:
            _single_label(net, t)
    owner = {t: i for i, net in enumerate(agent_nets) for t in net.transitions}
    nodes = set().union(*(net.places | net.transitions for net in agent_nets))

    vectors = sync_vectors(agent_nets)
    shared_labels = {lab for lab in set().union(*(net.alphabet for net in agent_nets))
                     if sum(lab in net.alphabet for net in agent_nets) > 1}
    hs_per_t = Counter()
    raw = []
    for gname, combo in vectors.items():
        parts = [(i, t) for i, t in enumerate(combo) if t is not None]
        lab = agent_nets[parts[0][0]].labels[parts[0][1]]
        if lab not in shared_labels:
            continue
        parts.sort(key=lambda it: rank[names[it[0]]])
        raw.append((gname, next(iter(lab)), parts))
        for _, t in parts:
            hs_per_t[t] += 1
    handshakes = []
    for gname, lab, parts in raw:
        keys = tuple(t if hs_per_t[t] == 1 else f"{t}{gname}" for _, t in parts)
        handshakes.append(Handshake(gname, lab, tuple((names[i], t) for i, t in parts), keys))
    for h in handshakes:
        for k in h.keys:
            for suffix in (".b", ".e", ".in", ".out"):
                if k + suffix in nodes:
                    raise StructuralError(f"generated name {k + suffix!r} clashes with an existing node")

    shared_t = {t for h in handshakes for _, t in h.members}
    out_nets = []
    for i, net in enumerate(agent_nets):
        me = names[i]
        sync = f"{me}.sync"
        places = set(net.places) | {sync}
        initial = set(net.initial) | {sync}
        transitions, flow, read, labels = set(), set(), set(), {}
        internal, external = {}, {}
        for t in sorted(net.transitions - shared_t):
            transitions.add(t)
            labels[t] = net.labels[t]
            flow |= {(p, t) for p in net.pre[t]} | {(t, p) for p in net.post[t]}
        for h in handshakes:
            idx = [k for k, (a, _) in enumerate(h.members) if a == me]
            if not idx:
                continue
            k = idx[0]
            t = h.members[k][1]
            key = h.keys[k]
            local = {}
            for j, ((agent_j, _), key_j) in enumerate(zip(h.members, h.keys)):
                tag = "" if j == k else f"@{me}"
                pin, pout = f"{key_j}.in{tag}", f"{key_j}.out{tag}"
                b, e = f"{key_j}.b{tag}", f"{key_j}.e{tag}"
                places |= {pin, pout}
                initial.add(pin)
                transitions |= {b, e}
                flow |= {(pin, b), (b, pout), (pout, e), (e, pin)}
                local[j] = (pin, pout)
                if j == k:
                    labels[b] = labels[e] = frozenset([h.label])
                    internal[key_j] = {IN: pin, OUT: pout}
                else:
                    labels[b] = labels[e] = frozenset()
                    external[key_j] = {IN: pin, OUT: pout}
            b, e = f"{key}.b", f"{key}.e"
            flow |= {(p, b) for p in net.pre[t]} | {(e, p) for p in net.post[t]}
            flow |= {(sync, b), (e, sync)}
            last = len(h.members) - 1
            if last > 0:
                if k == 0:
                    read |= {(local[last][0], b), (local[last][1], e)}
                else:
                    read |= {(local[k - 1][1], b), (local[k - 1][0], e)}
        out_nets.append(LabeledNet(places=frozenset(places), transitions=frozenset(transitions),
                                   flow=frozenset(flow), read=frozenset(read),
                                   initial=frozenset(initial), labels=labels,
                                   internal_vars=internal, external_vars=external))

    kappa, pi = {}, {}
    for gname, combo in vectors.items():
        parts = [t for t in combo if t is not None]
        if len(parts) == 1 and parts[0] not in shared_t:
            kappa[gname] = [parts[0]]
    for h in handshakes:
        kappa[h.name] = [f"{k}.b" for k in h.keys] + [f"{k}.e" for k in h.keys]
    for h in handshakes:
        for k in h.keys:
            pi[f"{k}.b"] = pi[f"{k}.e"] = frozenset()
    for t in set().union(*(net.transitions for net in agent_nets)) - shared_t:
        pi[t] = agent_nets[owner[t]].labels[t]
    for h in handshakes:
        pi[f"{h.keys[0]}.e"] = frozenset([h.label])
    maps = CorrespondenceMaps(
        shared_places=frozenset().union(*(net.places for net in agent_nets)),
        in_places=frozenset(f"{k}.in" for h in handshakes for k in h.keys),
        out_places=frozenset(f"{k}.out" for h in handshakes for k in h.keys),
        sync_places=frozenset(f"{nm}.sync" for nm in names),
        kappa=kappa, pi=pi, handshakes=handshakes)
    return out_nets, maps


def tr2data_global(agent_nets, order=None, names=None):
    """Composed handshake system plus the composed original system."""
    agents, maps = tr2data(agent_nets, order, names)
    return compose_action_based(agent_nets), compose_data_global(agents), maps


def _ptuple(c: Counter) -> tuple:
    return tuple(sorted((k, v) for k, v in c.items() if v))


def _find_sequence(net, start, goal, bag: Counter):
    """Firing sequence from ``start`` to ``goal`` using exactly ``bag``."""
    stack = [(start, bag, [])]
    seen = set()
    while stack:
        m, rest, seq = stack.pop()
        if not rest:
            if m == goal:
                return seq
            continue
        key = (m, _ptuple(rest))
        if key in seen:
            continue
        seen.add(key)
        for t in sorted(enabled(net, m)):
            if rest[t]:
                r2 = rest.copy()
                r2[t] -= 1
                stack.append((fire(net, m, t), +r2, seq + [t]))
    return None


def check_theorem1(sigma: LabeledNet, sigma_prime: LabeledNet, maps: CorrespondenceMaps,
                   depth: int | None = None, state_bound: int | None = None) -> Verdict:
    """Step correspondence between a system and its handshake translation.

    Forward: every step ``M -t-> M2`` is matched by some ordering of
    ``kappa(t)`` leading from ``sp(M)`` to ``sp(M2)``.
    Backward: every sequence of at most ``depth`` steps leaving an idle
    marking ``sp(M)`` and first returning to an idle marking is explained
    by some ``u`` from ``M`` with the same κ-Parikh vector and the same
    visible word; a sequence that gets stuck before returning must be
    matched by a word after which the original can also be stuck.
    """
    if depth is None:
        depth = 2 * max((len(v) for v in maps.kappa.values()), default=1)
    mg = marking_graph(sigma, state_bound)
    sp_of = {m: sp_map(maps, m) for m in mg.states}
    if len(set(sp_of.values())) != len(sp_of):
        return Verdict("t1", FAILS, {"reason": "sp is not injective"})
    inv = {v: k for k, v in sp_of.items()}
    checked = 0
    for (m1, lab, m2), ts in sorted(mg.witnesses.items(), key=lambda kv: sorted(kv[1])):
        for t in sorted(ts):
            seq = _find_sequence(sigma_prime, sp_of[m1], sp_of[m2], Counter(maps.kappa[t]))
            checked += 1
            if seq is None:
                return Verdict("t1", FAILS, {"direction": "forward", "transition": t,
                                             "from": sorted(m1), "to": sorted(m2),
                                             "trace": [label_str(lab)]})
    origin = {}
    for t, seq in maps.kappa.items():
        for x in seq:
            origin[x] = t
    labels_of = {t: sigma.labels[t] for t in sigma.transitions}
    succ = {}
    for (m1, lab, m2), ts in mg.witnesses.items():
        for t in ts:
            succ.setdefault(m1, []).append((t, m2))
    dead = {m for m in mg.states if m not in succ}

    def explains(m_from, m_to, parikh, word):
        # walk the original along ``word`` and compare κ-Parikh vectors
        frontier = {(m_from, ())}
        for a in word:
            nxt = set()
            for m, pk in frontier:
                for t, m2 in succ.get(m, ()):
                    if labels_of[t] == a:
                        c = Counter(dict(pk))
                        c.update(maps.kappa[t])
                        nxt.add((m2, _ptuple(c)))
            frontier = nxt
        if m_to is None:
            return any(m in dead for m, _ in frontier)
        return (m_to, parikh) in frontier

    open_paths = 0
    explored = 0
    for m in sorted(mg.states, key=sorted):
        start = sp_of[m]
        queue = deque([(start, (), ())])
        seen = {(start, (), ())}
        while queue:
            mp, pk, word = queue.popleft()
            ts = sorted(enabled(sigma_prime, mp))
            if not ts and mp != start:
                explored += 1
                if not explains(m, None, pk, word):
                    return Verdict("t1", FAILS, {"direction": "backward", "reason": "stuck",
                                                 "from": sorted(m), "stuck_at": sorted(mp),
                                                 "trace": [label_str(x) for x in word]})
                continue
            if sum(c for _, c in pk) >= depth:
                open_paths += 1
                continue
            for t in ts:
                m2 = fire(sigma_prime, mp, t)
                c = Counter(dict(pk))
                c[t] += 1
                pk2 = _ptuple(c)
                vis = maps.pi.get(t, frozenset())
                w2 = word + (vis,) if vis else word
                if is_idle(maps, m2):
                    explored += 1
                    target = inv.get(m2)
                    projected = _ptuple(Counter(x for x, k in pk2 for _ in range(k)
                                                if x in origin))
                    ok = (target is not None and projected == pk2
                          and explains(m, target, pk2, w2))
                    if not ok:
                        return Verdict("t1", FAILS, {
                            "direction": "backward", "from": sorted(m), "to": sorted(m2),
                            "trace": [label_str(x) for x in w2],
                            "sequence": [x for x, k in pk2 for _ in range(k)]})
                    continue
                key = (m2, pk2, w2)
                if key not in seen:
                    seen.add(key)
                    queue.append(key)
    details = {"edges": checked, "sequences": explored, "truncated": open_paths, "depth": depth}
    if open_paths and depth < max((len(v) for v in maps.kappa.values()), default=1):
        # not even one complete handshake fits in the bound
        return Verdict("t1", INCONCLUSIVE, None, details)
    return Verdict("t1", HOLDS, None, details)


def check_theorem2(sigma: LabeledNet, sigma_prime: LabeledNet, maps: CorrespondenceMaps,
                   state_bound: int | None = None) -> Verdict:
    """Reachable markings of the original correspond one-to-one, via sp,
    to the reachable idle markings of the handshake system."""
    reach = reachable_markings(sigma, state_bound)
    reach_p = reachable_markings(sigma_prime, state_bound)
    if sp_map(maps, sigma.initial) != sigma_prime.initial:
        return Verdict("t2", FAILS, {"reason": "sp(m0) differs from the initial marking",
                                     "sp_m0": sorted(sp_map(maps, sigma.initial)),
                                     "m0": sorted(sigma_prime.initial)})
    image = {}
    for m in sorted(reach, key=sorted):
        s = sp_map(maps, m)
        if s in image:
            return Verdict("t2", FAILS, {"reason": "sp not injective",
                                         "markings": [sorted(image[s]), sorted(m)]})
        image[s] = m
        if s not in reach_p:
            return Verdict("t2", FAILS, {"reason": "image not reachable", "marking": sorted(m)})
    idle = [mp for mp in reach_p if is_idle(maps, mp)]
    for mp in sorted(idle, key=sorted):
        if mp not in image:
            return Verdict("t2", FAILS, {"reason": "idle marking without preimage",
                                         "marking": sorted(mp)})
    return Verdict("t2", HOLDS, None, {"reachable": len(reach), "reachable_prime": len(reach_p),
                                       "idle": len(idle)})


def _strip_interface(net: LabeledNet) -> tuple:
    """Drop external places, their transitions and read arcs, then merge
    copies that became identical.  Returns the net plus, per surviving
    transition, the read sets of the copies it absorbed."""
    ext = {p for vals in net.external_vars.values() for p in vals.values()}
    keep = [t for t in sorted(net.transitions) if not ((net.pre[t] | net.post[t]) & ext)]
    groups = {}
    for t in keep:
        key = (net.labels[t], net.pre[t], net.post[t])
        groups.setdefault(key, []).append(t)
    flow, labels, reads = set(), {}, {}
    for (lab, pre, post), ts in groups.items():
        if not lab:
            raise StructuralError(f"transition {ts[0]!r} of an agent has an empty label")
        bases = {t.split("[", 1)[0] for t in ts}
        name = bases.pop() if len(bases) == 1 else ts[0]
        labels[name] = lab
        flow |= {(p, name) for p in pre} | {(name, p) for p in post}
        reads[name] = [frozenset(p for p in net.activators[t] if p in ext) for t in ts]
        for t in ts:
            if net.activators[t] - ext:
                raise StructuralError(f"{t!r} reads an internal place; only external reads are translated")
    places = net.places - ext
    stripped = LabeledNet(places=places, transitions=frozenset(labels), flow=frozenset(flow),
                          initial=net.initial & places, labels=labels,
                          internal_vars=net.internal_vars)
    return stripped, reads


def data2tr(agents: Sequence[LabeledNet], names: Sequence[str] | None = None) -> list:
    """Agents whose reads of foreign variables become shared self-loops."""
    n = len(agents)
    names = list(names) if names is not None else [f"agent{i}" for i in range(n)]
    owner_of = {}
    for i, a in enumerate(agents):
        for x in a.internal_vars:
            if x in owner_of:
                raise StructuralError(f"variable {x!r} is controlled by two agents")
            owner_of[x] = i
    stripped = [_strip_interface(a) for a in agents]
    extra = [dict() for _ in agents]  # per agent: name -> (label, places)
    for j, a in enumerate(agents):
        place_var = {p: (x, v) for x, vals in a.external_vars.items() for v, p in vals.items()}
        by_label = {}
        for t, readsets in stripped[j][1].items():
            lab = stripped[j][0].labels[t]
            vals = set()
            for rs in readsets:
                val = {}
                for p in rs:
                    x, v = place_var[p]
                    if x not in owner_of:
                        raise StructuralError(f"{t!r} reads {p!r}, whose variable has no owner")
                    val[x] = v
                vals.add(frozenset(val.items()))
            prev = by_label.setdefault(lab, vals)
            if prev != vals:
                raise StructuralError(f"copies labelled {label_str(lab)} read different guards")
        for lab, vals in sorted(by_label.items(), key=lambda kv: sorted(kv[0])):
            owners = sorted({owner_of[x] for v in vals for x, _ in v})
            proj = {i: {frozenset((x, y) for x, y in v if owner_of[x] == i) for v in vals}
                    for i in owners}
            combos = {frozenset().union(*c) for c in product(*(proj[i] for i in owners))} \
                if owners else {frozenset()}
            if combos != vals:
                raise StructuralError(f"guard of {label_str(lab)} correlates several owners; "
                                      "it cannot be expressed by shared transitions")
            for i in owners:
                for k, v in enumerate(sorted(proj[i], key=sorted)):
                    places = frozenset(agents[i].internal_vars[x][y] for x, y in v)
                    tname = f"{label_str(lab)}@{names[i]}" + (f"#{k + 1}" if len(proj[i]) > 1 else "")
                    extra[i][tname] = (lab, places)
    out = []
    for i, (net, _) in enumerate(stripped):
        flow, labels = set(net.flow), dict(net.labels)
        for t, (lab, places) in extra[i].items():
            if t in net.transitions or t in net.places:
                raise StructuralError(f"generated transition name {t!r} clashes")
            labels[t] = lab
            flow |= {(p, t) for p in places} | {(t, p) for p in places}
        out.append(net.with_(transitions=frozenset(labels), flow=frozenset(flow), labels=labels))
    return out


def check_theorem3(data_global: LabeledNet, tr_agents: Sequence[LabeledNet],
                   state_bound: int | None = None) -> Verdict:
    """Marking graph of the data-synchronised system against the one of
    the transition-synchronised agents."""
    glob = compose_action_based(tr_agents)
    v = compare_graphs("t3", marking_graph(data_global, state_bound),
                       marking_graph(glob, state_bound))
    v.details["places_equal"] = glob.places == data_global.places
    return v
