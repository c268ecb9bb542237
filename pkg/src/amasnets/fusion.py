"""Composition of nets: fusion of transitions, of places and of
sequential components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import CapacityError, CompositionError, StructuralError
from .lts import label_str
from .net import LabeledNet, is_sequential_component, marking_graph

EPS = "ε"
_COMPONENT_CHECK_BOUND = 100_000


def pair_name(*parts) -> str:
    """Name of a synchronised transition tuple; ``None`` stands for ε."""
    return "(" + ",".join(EPS if p is None else p for p in parts) + ")"


def _union_vars(*maps):
    out = {}
    for m in maps:
        for x, vals in m.items():
            out.setdefault(x, dict(vals))
    return out


def fuse_transitions(a: LabeledNet, b: LabeledNet) -> LabeledNet:
    """Synchronise every pair of equally labelled transitions.

    Unmatched transitions survive as ``(t,ε)`` / ``(ε,t)``.
    """
    if a.places & b.places:
        raise StructuralError(f"place sets overlap: {sorted(a.places & b.places)}")
    la, lb = a.labels, b.labels
    alpha_a, alpha_b = a.alphabet, b.alphabet
    members = {}
    for t1 in sorted(a.transitions):
        for t2 in sorted(b.transitions):
            if la[t1] == lb[t2]:
                members[pair_name(t1, t2)] = (t1, t2)
        if la[t1] not in alpha_b:
            members[pair_name(t1, None)] = (t1, None)
    for t2 in sorted(b.transitions):
        if lb[t2] not in alpha_a:
            members[pair_name(None, t2)] = (None, t2)
    return _build_product(a, b, members)


def _build_product(a, b, members):
    flow, read, inhibit, labels = set(), set(), set(), {}
    for name, (t1, t2) in members.items():
        lab = set()
        for net, t in ((a, t1), (b, t2)):
            if t is None:
                continue
            flow.update((p, name) for p in net.pre[t])
            flow.update((name, p) for p in net.post[t])
            read.update((p, name) for p in net.activators[t])
            inhibit.update((p, name) for p in net.inhibitors[t])
            lab |= net.labels[t]
        labels[name] = frozenset(lab)
    return LabeledNet(places=a.places | b.places, transitions=frozenset(members),
                      flow=frozenset(flow), read=frozenset(read), inhibit=frozenset(inhibit),
                      initial=a.initial | b.initial, labels=labels,
                      internal_vars=_union_vars(a.internal_vars, b.internal_vars),
                      external_vars=_union_vars(a.external_vars, b.external_vars))


def fuse_places(a: LabeledNet, b: LabeledNet) -> LabeledNet:
    """Glue the nets along equally named places."""
    if a.transitions & b.transitions:
        raise StructuralError(f"transition sets overlap: {sorted(a.transitions & b.transitions)}")
    for p in a.places & b.places:
        if (p in a.initial) != (p in b.initial):
            raise CompositionError(f"shared place {p!r} has different initial markings")
    labels = dict(a.labels)
    labels.update(b.labels)
    return LabeledNet(places=a.places | b.places, transitions=a.transitions | b.transitions,
                      flow=a.flow | b.flow, read=a.read | b.read, inhibit=a.inhibit | b.inhibit,
                      initial=a.initial | b.initial, labels=labels,
                      internal_vars=_union_vars(a.internal_vars, b.internal_vars),
                      external_vars=_union_vars(a.external_vars, b.external_vars))


@dataclass(frozen=True)
class SeqFusionSpec:
    """Matched sequential components.

    ``rho[i]`` maps a left component onto a right one (the right copy is
    absorbed); ``rho_prime[i]`` maps a right component onto a left one
    (the left copy is absorbed).  A component may appear in several
    families, which is how two observers of one variable are merged.
    """

    rho: Sequence[Mapping] = field(default_factory=tuple)
    rho_prime: Sequence[Mapping] = field(default_factory=tuple)

    @property
    def x1(self):
        return [frozenset(r) for r in self.rho]

    @property
    def x2(self):
        return [frozenset(r.values()) for r in self.rho]

    @property
    def x2_prime(self):
        return [frozenset(r) for r in self.rho_prime]

    @property
    def x1_prime(self):
        return [frozenset(r.values()) for r in self.rho_prime]


def _at_most_one_token(net, comp) -> bool:
    """Weaker fallback: ``comp`` never holds two tokens in a reachable marking.

    Partial components such as a two-place arc of a longer cycle do not
    satisfy the degree condition but still behave as a single-token slot.
    """
    try:
        states = marking_graph(net, _COMPONENT_CHECK_BOUND).states
    except CapacityError:
        return False
    return all(len(m & comp) <= 1 for m in states)


def _validate_spec(a, b, spec):
    checks = [("rho", i, r, a, b) for i, r in enumerate(spec.rho)]
    checks += [("rho_prime", i, r, b, a) for i, r in enumerate(spec.rho_prime)]
    for kind, i, r, src, dst in checks:
        if len(set(r.values())) != len(r):
            raise CompositionError(f"{kind}[{i}] is not injective")
        if not set(r) <= src.places or not set(r.values()) <= dst.places:
            raise CompositionError(f"{kind}[{i}] references unknown places")
        for side, comp in ((src, frozenset(r)), (dst, frozenset(r.values()))):
            ok = is_sequential_component(side, comp)
            if not ok and not _at_most_one_token(side, comp):
                raise CompositionError(
                    f"{kind}[{i}]: {sorted(comp)} is not a sequential component ({ok.reason})")
        for p, q in r.items():
            if (p in src.initial) != (q in dst.initial):
                raise CompositionError(f"{kind}[{i}]: initial marking differs on {p!r}/{q!r}")
    for fam_name, fam in (("x1", spec.x1 + spec.x1_prime), ("x2", spec.x2 + spec.x2_prime)):
        distinct = list(dict.fromkeys(fam))
        for i, c in enumerate(distinct):
            for d in distinct[i + 1:]:
                if c & d:
                    raise CompositionError(f"{fam_name} components overlap: {sorted(c & d)}")


def fuse_seq_components(a: LabeledNet, b: LabeledNet, spec: SeqFusionSpec) -> LabeledNet:
    """Fusion of sequential components.

    A left transition moving inside matched component i from ``p`` to ``q``
    is synchronised with every right transition moving from ``rho_i(p)``
    to ``rho_i(q)`` (the union over all such components); symmetrically
    for ``rho_prime``.  Transitions that avoid the shared components on
    their pre- or postset pass through unchanged.  Absorbed places are
    renamed to their surviving counterparts, so arcs (read arcs included)
    that pointed at them are kept.
    """
    if a.transitions & b.transitions:
        raise StructuralError(f"transition sets overlap: {sorted(a.transitions & b.transitions)}")
    _validate_spec(a, b, spec)
    X1 = frozenset().union(*spec.x1)
    X1p = frozenset().union(*spec.x1_prime)
    X2 = frozenset().union(*spec.x2)
    X2p = frozenset().union(*spec.x2_prime)
    dropped_right = X2 - X2p
    dropped_left = X1p - X1
    places = (a.places | b.places) - dropped_right - dropped_left
    rename = {}
    for r in spec.rho:
        for p, q in r.items():
            if q in dropped_right:
                rename.setdefault(q, p)
    for r in spec.rho_prime:
        for q, p in r.items():
            if p in dropped_left:
                rename.setdefault(p, q)

    pairs = []  # (left members, right members)
    for t1 in sorted(a.transitions):
        u = set()
        for r in spec.rho:
            comp = set(r)
            pin, pout = a.pre[t1] & comp, a.post[t1] & comp
            if len(pin) == 1 and len(pout) == 1:
                p, q = next(iter(pin)), next(iter(pout))
                u |= {t2 for t2 in b.transitions if r[p] in b.pre[t2] and r[q] in b.post[t2]}
        if u:
            pairs.append((frozenset([t1]), frozenset(u)))
    for t2 in sorted(b.transitions):
        u = set()
        for r in spec.rho_prime:
            comp = set(r)
            pin, pout = b.pre[t2] & comp, b.post[t2] & comp
            if len(pin) == 1 and len(pout) == 1:
                p, q = next(iter(pin)), next(iter(pout))
                u |= {t1 for t1 in a.transitions if r[p] in a.pre[t1] and r[q] in a.post[t1]}
        if u:
            pairs.append((frozenset(u), frozenset([t2])))
    shared_a, shared_b = X1 | X1p, X2 | X2p
    for t in sorted(a.transitions):
        if not (a.pre[t] & shared_a) or not (a.post[t] & shared_a):
            pairs.append((frozenset([t]), frozenset()))
    for t in sorted(b.transitions):
        if not (b.pre[t] & shared_b) or not (b.post[t] & shared_b):
            pairs.append((frozenset(), frozenset([t])))

    names = _name_pairs(pairs, a, b)
    ren = lambda p: rename.get(p, p)
    flow, read, inhibit, labels = set(), set(), set(), {}
    for (u1, u2), name in zip(pairs, names):
        lab = set()
        for net, us in ((a, u1), (b, u2)):
            for t in us:
                flow.update((ren(p), name) for p in net.pre[t])
                flow.update((name, ren(p)) for p in net.post[t])
                read.update((ren(p), name) for p in net.activators[t])
                inhibit.update((ren(p), name) for p in net.inhibitors[t])
                lab |= net.labels[t]
        labels[name] = frozenset(lab)
    initial = frozenset(p for p in places
                        if p in (a.initial if p in a.places else b.initial))

    def keep_vars(vs):
        return {x: {v: ren(p) for v, p in vals.items()} for x, vals in vs.items()}
    internal = keep_vars(_union_vars(a.internal_vars, b.internal_vars))
    external = {x: vals for x, vals in keep_vars(_union_vars(b.external_vars, a.external_vars)).items()
                if x not in internal}
    return LabeledNet(places=places, transitions=frozenset(names), flow=frozenset(flow),
                      read=frozenset(read), inhibit=frozenset(inhibit), initial=initial,
                      labels=labels, internal_vars=internal, external_vars=external)


def _name_pairs(pairs, a, b) -> list:
    """Readable names: a transition synchronised only with ∅-labelled
    partners keeps its own name; everything else gets a canonical
    ``left|right`` rendering of its member sets."""
    def canon(u1, u2):
        return "+".join(sorted(u1)) + "|" + "+".join(sorted(u2))

    def silent(net, us):
        return all(not net.labels[t] for t in us)

    preferred = []
    for u1, u2 in pairs:
        if not u2 and len(u1) == 1:
            preferred.append(next(iter(u1)))
        elif not u1 and len(u2) == 1:
            preferred.append(next(iter(u2)))
        elif len(u1) == 1 and silent(b, u2):
            preferred.append(next(iter(u1)))
        elif len(u2) == 1 and silent(a, u1):
            preferred.append(next(iter(u2)))
        else:
            preferred.append(canon(u1, u2))
    counts = {}
    for n in preferred:
        counts[n] = counts.get(n, 0) + 1
    out = []
    for (u1, u2), n in zip(pairs, preferred):
        out.append(n if counts[n] == 1 else canon(u1, u2))
    if len(set(out)) != len(out):
        raise CompositionError("fused transition names are not unique")
    return out


def describe(net: LabeledNet) -> list:
    """Sorted (label, preset, postset, activators) view, name-independent."""
    return sorted((label_str(net.labels[t]) if net.labels[t] else "",
                   tuple(sorted(net.pre[t])), tuple(sorted(net.post[t])),
                   tuple(sorted(net.activators[t]))) for t in net.transitions)
