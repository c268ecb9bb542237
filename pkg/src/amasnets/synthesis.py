"""Region-based synthesis of 1-safe nets from transition systems.

Regions are enumerated exhaustively as bitmasks over the (reachable)
states.  Edges are grouped into *events*: initially one event per label,
and label splitting refines a label's edges into several events, each of
which becomes its own transition.

Per edge the crossing code of a subset ``r`` is ``2*[src in r] + [dst in r]``
(0 outside, 1 enters, 2 leaves, 3 inside).  OR-ing ``1 << code`` over an
event's edges gives a 4-bit mask; ``r`` is a region for that event iff the
mask is 0, 1<<1, 1<<2 or a subset of {1<<0, 1<<3}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import CapacityError, StructuralError, SynthesisError
from .lts import Lts, label_str, prune_unreachable, state_str
from .net import LabeledNet, enabled, fire

DEFAULT_MAX_STATES = 20

_OUTSIDE, _ENTERS, _LEAVES, _INSIDE = 1, 2, 4, 8
_UNIFORM = np.zeros(16, dtype=bool)
_UNIFORM[[0, _ENTERS, _LEAVES, _OUTSIDE, _INSIDE, _OUTSIDE | _INSIDE]] = True
_KIND = {0: "outside", _OUTSIDE: "outside", _ENTERS: "enters", _LEAVES: "leaves",
         _INSIDE: "inside", _OUTSIDE | _INSIDE: "non-crossing"}


@dataclass(frozen=True)
class Region:
    members: frozenset
    classification: dict = field(compare=False)


@dataclass(frozen=True)
class SeparationReport:
    ssp_failures: frozenset = frozenset()
    essp_failures: frozenset = frozenset()  # (label, state)
    # the same ESSP failures keyed by event, as used by label splitting
    event_failures: frozenset = field(default=frozenset(), compare=False)

    def __bool__(self):
        return bool(self.ssp_failures or self.essp_failures)

    @property
    def count(self) -> int:
        return len(self.ssp_failures) + len(self.event_failures)

    def summary(self) -> str:
        ssp = sorted((state_str(a), state_str(b)) for a, b in self.ssp_failures)
        essp = sorted((label_str(x), state_str(s)) for x, s in self.essp_failures)
        return f"SSP {ssp}; ESSP {essp}"


def _edge_key(e):
    return (state_str(e[0]), label_str(e[1]), state_str(e[2]))


class _Space:
    """Bitmask view of an LTS together with an event partition of its edges."""

    def __init__(self, l: Lts, events: dict, max_states: int):
        self.l = l
        self.order = sorted(l.states, key=state_str)
        n = len(self.order)
        if n > max_states:
            raise CapacityError(
                f"{n} states exceed the exhaustive region bound {max_states}; "
                "raise max_states or split the system")
        self.n = n
        self.index = {s: i for i, s in enumerate(self.order)}
        self.events = events
        self.masks = np.arange(1 << n, dtype=np.int64)
        self._codes = {}

    def bits(self, s):
        return (self.masks >> self.index[s]) & 1

    def event_mask(self, ev) -> np.ndarray:
        if ev not in self._codes:
            acc = np.zeros(1 << self.n, dtype=np.int64)
            for s, _, t in self.events[ev]:
                acc |= np.left_shift(1, 2 * self.bits(s) + self.bits(t))
            self._codes[ev] = acc
        return self._codes[ev]

    def region_flags(self) -> np.ndarray:
        ok = np.ones(1 << self.n, dtype=bool)
        for ev in self.events:
            ok &= _UNIFORM[self.event_mask(ev)]
        return ok

    def members(self, mask: int) -> frozenset:
        return frozenset(s for s, i in self.index.items() if mask >> i & 1)

    def mask_of(self, subset) -> int:
        return sum(1 << self.index[s] for s in subset)

    def kind(self, ev, mask: int) -> str:
        return _KIND.get(int(self.event_mask(ev)[mask]), "mixed")

    def minimal(self) -> list:
        flags = self.region_flags()
        flags[0] = False
        pop = sum((self.masks >> i) & 1 for i in range(self.n))
        alive = flags.copy()
        found = []
        for k in range(1, self.n + 1):
            layer = np.nonzero(alive & (pop == k))[0]
            for m in layer:
                m = int(m)
                found.append(m)
                # every superset of a minimal region is not minimal
                alive &= (self.masks & m) != m
        return found


def _label_events(l: Lts) -> dict:
    events = {}
    for e in sorted(l.edges, key=_edge_key):
        events.setdefault(e[1], []).append(e)
    return {k: tuple(v) for k, v in events.items()}


def is_region(l: Lts, subset: Iterable) -> Region | None:
    subset = frozenset(subset)
    if not subset <= l.states:
        raise StructuralError("subset is not a set of states")
    cls = {}
    for label, edges in _label_events(l).items():
        seen = set()
        for s, _, t in edges:
            seen.add((s in subset, t in subset))
        if seen == {(False, True)}:
            cls[label] = "enters"
        elif seen == {(True, False)}:
            cls[label] = "leaves"
        elif seen <= {(False, False), (True, True)}:
            cls[label] = {frozenset([(True, True)]): "inside",
                          frozenset([(False, False)]): "outside"}.get(
                              frozenset(seen), "non-crossing")
        else:
            return None
    return Region(subset, cls)


def minimal_regions(l: Lts, max_states: int = DEFAULT_MAX_STATES) -> list:
    sp = _Space(l, _label_events(l), max_states)
    return [Region(sp.members(m), {ev: sp.kind(ev, m) for ev in sp.events})
            for m in sp.minimal()]


def _separation(sp: _Space, region_masks: list) -> SeparationReport:
    sig = {s: tuple(m >> sp.index[s] & 1 for m in region_masks) for s in sp.order}
    ssp = set()
    by_sig = {}
    for s in sp.order:
        by_sig.setdefault(sig[s], []).append(s)
    for group in by_sig.values():
        for a, b in combinations(group, 2):
            ssp.add((a, b))
    event_fail, label_fail = set(), set()
    for ev, edges in sp.events.items():
        sources = {s for s, _, _ in edges}
        pre_regions = [m for m in region_masks if sp.kind(ev, m) in ("leaves", "inside")]
        for s in sp.order:
            if s in sources:
                continue
            if not any(not (m >> sp.index[s] & 1) for m in pre_regions):
                event_fail.add((ev, s))
                label_fail.add((edges[0][1], s))
    return SeparationReport(frozenset(ssp), frozenset(label_fail), frozenset(event_fail))


def check_separation(l: Lts, regions: Iterable, max_states: int = DEFAULT_MAX_STATES) -> SeparationReport:
    l = prune_unreachable(l)
    sp = _Space(l, _label_events(l), max_states)
    masks = [sp.mask_of(r.members if isinstance(r, Region) else r) for r in regions]
    return _separation(sp, masks)


@dataclass
class SynthesisResult:
    net: LabeledNet
    regions: dict        # place -> state set
    events: dict         # transition -> tuple of LTS edges
    marking_of: dict     # LTS state -> marking
    split_counts: dict   # label -> number of transitions carrying it


def region_name(members: frozenset) -> str:
    if len(members) == 1:
        return state_str(next(iter(members)))
    return "{" + ",".join(sorted(state_str(s) for s in members)) + "}"


def _split_events(sp_factory, events: dict, max_states: int):
    """Greedy label splitting until separation holds."""
    while True:
        sp = sp_factory(events)
        report = _separation(sp, sp.minimal())
        if not report:
            return events, sp
        failing = sorted(report.event_failures, key=lambda x: (_ev_key(x[0]), state_str(x[1])))
        splittable = sorted((ev for ev, es in events.items() if len(es) > 1), key=_ev_key)
        # prefer the failing event, then its label's other events, then the rest
        first = [failing[0][0]] if failing else []
        same_label = [ev for ev in splittable if failing and ev[0] == failing[0][0][0]]
        candidates = []
        for ev in first + same_label + splittable:
            if ev not in candidates and len(events[ev]) > 1:
                candidates.append(ev)
        if not candidates:
            raise SynthesisError(report)
        best = None
        for ev in candidates:
            edges = events[ev]
            for k in range(1, len(edges) // 2 + 1):
                for part in combinations(edges, k):
                    trial = _apply_split(events, ev, [part, tuple(e for e in edges if e not in part)])
                    tsp = sp_factory(trial)
                    if _separation(tsp, tsp.minimal()).count < report.count:
                        best = trial
                        break
                if best:
                    break
            if best:
                break
        if best is None:
            best = _apply_split(events, candidates[0], [(e,) for e in events[candidates[0]]])
        events = best


def _ev_key(ev):
    label, idx = ev
    return (label_str(label), idx)


def _apply_split(events: dict, ev, parts: list) -> dict:
    label, _ = ev
    out = {k: v for k, v in events.items() if k != ev}
    used = {i for (lab, i) in events if lab == label}
    nxt = max(used) + 1
    parts = sorted(parts, key=lambda p: [_edge_key(e) for e in p])
    out[(label, ev[1])] = parts[0]
    for p in parts[1:]:
        out[(label, nxt)] = p
        nxt += 1
    return out


def synthesize_detailed(l: Lts, split: bool = False, prefix: str = "",
                        max_states: int = DEFAULT_MAX_STATES) -> SynthesisResult:
    """Synthesise a 1-safe net whose marking graph is isomorphic to ``l``.

    Places are the minimal regions.  Without ``split`` a separation
    failure raises SynthesisError; with it, labels are split greedily.
    """
    l = prune_unreachable(l)
    events = {(label, 0): edges for label, edges in _label_events(l).items()}
    factory = lambda evs: _Space(l, evs, max_states)
    if split:
        events, sp = _split_events(factory, events, max_states)
    else:
        sp = factory(events)
    masks = sp.minimal()
    report = _separation(sp, masks)
    if report:
        raise SynthesisError(report)

    # transition names: the label, numbered when the label was split
    per_label = {}
    for ev in sorted(events, key=_ev_key):
        per_label.setdefault(ev[0], []).append(ev)
    tname = {}
    for label, evs in per_label.items():
        for k, ev in enumerate(evs, 1):
            base = prefix + (label_str(label) if label else "eps")
            tname[ev] = base if len(evs) == 1 else f"{base}#{k}"

    def add_full_if_needed(masks):
        full = (1 << sp.n) - 1
        if full in masks:
            return masks
        for ev in events:
            kinds = [sp.kind(ev, m) for m in masks]
            has_pre = any(k in ("leaves", "inside") for k in kinds)
            has_post = any(k in ("enters", "inside") for k in kinds)
            if not (has_pre and has_post):
                return masks + [full]
        return masks

    masks = add_full_if_needed(list(masks))
    transitions = set(tname.values())
    regions, flow, initial = {}, set(), set()
    for m in masks:
        members = sp.members(m)
        p = region_name(members)
        if p in transitions or p in regions:
            p = f"[{p}]"
        regions[p] = members
        if l.root in members:
            initial.add(p)
        for ev, t in tname.items():
            kind = sp.kind(ev, m)
            if kind in ("leaves", "inside"):
                flow.add((p, t))
            if kind in ("enters", "inside"):
                flow.add((t, p))
    labels = {t: ev[0] for ev, t in tname.items()}
    net = LabeledNet(places=frozenset(regions), transitions=frozenset(transitions),
                     flow=frozenset(flow), initial=frozenset(initial), labels=labels,
                     regions={p: frozenset(r) for p, r in regions.items()})
    marking_of = {s: frozenset(p for p, r in regions.items() if s in r) for s in l.states}
    split_counts = {label: len(evs) for label, evs in per_label.items()}
    return SynthesisResult(net, regions, {tname[ev]: es for ev, es in events.items()},
                           marking_of, split_counts)


def synthesize(l: Lts, prefix: str = "", max_states: int = DEFAULT_MAX_STATES) -> LabeledNet:
    return synthesize_detailed(l, split=False, prefix=prefix, max_states=max_states).net


def synthesize_with_splitting(l: Lts, prefix: str = "",
                              max_states: int = DEFAULT_MAX_STATES) -> LabeledNet:
    return synthesize_detailed(l, split=True, prefix=prefix, max_states=max_states).net


def transition_events(net: LabeledNet, l: Lts) -> dict:
    """Recover which LTS edges each transition of a synthesised net realises."""
    if net.regions is None:
        raise StructuralError("net carries no region bookkeeping")
    l = prune_unreachable(l)
    marking = {s: frozenset(p for p, r in net.regions.items() if s in r) for s in l.states}
    out = {t: [] for t in net.transitions}
    for s, a, s2 in sorted(l.edges, key=_edge_key):
        m = marking[s]
        for t in sorted(enabled(net, m)):
            if net.labels[t] == a and fire(net, m, t) == marking[s2]:
                out[t].append((s, a, s2))
    return {t: tuple(es) for t, es in out.items()}


def add_complementary_places(net: LabeledNet, l: Lts) -> LabeledNet:
    """Add the complement of every region whose complement is not a place yet.

    Complement places get only consuming/producing arcs, never self-loops;
    this keeps each region/complement pair a sequential component.
    """
    if net.regions is None or set(net.regions) != set(net.places):
        raise StructuralError("every place needs a recorded region")
    l = prune_unreachable(l)
    states = frozenset(l.states)
    evs = transition_events(net, l)
    present = {frozenset(r) for r in net.regions.values()}
    places, flow, initial = set(net.places), set(net.flow), set(net.initial)
    regions = dict(net.regions)
    for p in sorted(net.places):
        comp = states - net.regions[p]
        if not comp or comp in present:
            continue
        present.add(comp)
        q = region_name(comp)
        if q in places or q in net.transitions:
            q = f"[{q}]"
        places.add(q)
        regions[q] = comp
        if l.root in comp:
            initial.add(q)
        for t, edges in evs.items():
            crossing = {(s in comp, s2 in comp) for s, _, s2 in edges}
            if crossing == {(True, False)}:
                flow.add((q, t))
            elif crossing == {(False, True)}:
                flow.add((t, q))
    return net.with_(places=frozenset(places), flow=frozenset(flow),
                     initial=frozenset(initial), regions=regions)
