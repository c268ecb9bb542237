"""Rooted edge-labelled transition systems and rooted isomorphism.

A label is a frozenset of strings, so the empty label (environment and
interface moves) and fused multi-labels are ordinary values.  States are
any hashable values: strings for hand-written systems, frozensets for
markings, tuples for product states.
"""

from __future__ import annotations

from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping

Label = frozenset
Edge = tuple  # (source, label, target)


def as_label(x) -> frozenset:
    """Normalise a label given as a string, an iterable of strings or None."""
    if x is None:
        return frozenset()
    if isinstance(x, str):
        return frozenset([x])
    return frozenset(x)


def label_str(label: frozenset) -> str:
    """Canonical text form: ``a`` for singletons, ``{a,b}`` otherwise."""
    if len(label) == 1:
        return next(iter(label))
    return "{" + ",".join(sorted(label)) + "}"


def state_str(s) -> str:
    """Canonical text form of a state identifier."""
    if isinstance(s, str):
        return s
    if isinstance(s, (frozenset, set)):
        return "{" + ",".join(sorted(state_str(x) for x in s)) + "}"
    if isinstance(s, tuple):
        return "(" + ",".join(state_str(x) for x in s) + ")"
    return str(s)


@dataclass(frozen=True)
class Lts:
    states: frozenset
    edges: frozenset
    root: Hashable
    # concrete transition identities per edge, kept for diagnostics only
    witnesses: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "edges", frozenset(
            (s, as_label(a), t) for s, a, t in self.edges))
        if self.root not in self.states:
            raise ValueError(f"root {self.root!r} is not a state")
        for s, _, t in self.edges:
            if s not in self.states or t not in self.states:
                raise ValueError(f"edge endpoint outside state set: {(s, t)!r}")

    @classmethod
    def from_edges(cls, root, edges: Iterable, states: Iterable = ()) -> "Lts":
        edges = [(s, as_label(a), t) for s, a, t in edges]
        st = set(states) | {root}
        for s, _, t in edges:
            st.add(s)
            st.add(t)
        return cls(frozenset(st), frozenset(edges), root)

    @property
    def labels(self) -> frozenset:
        return frozenset(a for _, a, _ in self.edges)

    @cached_property
    def succ(self) -> dict:
        out = defaultdict(list)
        for s, a, t in self.edges:
            out[s].append((a, t))
        return out

    @cached_property
    def pred(self) -> dict:
        out = defaultdict(list)
        for s, a, t in self.edges:
            out[t].append((a, s))
        return out

    def __len__(self):
        return len(self.states)


def prune_unreachable(l: Lts) -> Lts:
    """Restrict ``l`` to the states reachable from its root."""
    seen = {l.root}
    queue = deque([l.root])
    while queue:
        s = queue.popleft()
        for _, t in l.succ.get(s, ()):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    if len(seen) == len(l.states):
        return l
    edges = frozenset(e for e in l.edges if e[0] in seen)
    wit = {e: w for e, w in l.witnesses.items() if e[0] in seen}
    return Lts(frozenset(seen), edges, l.root, wit)


def is_deterministic(l: Lts) -> bool:
    seen = {}
    for s, a, t in l.edges:
        if seen.setdefault((s, a), t) != t:
            return False
    return True


def _joint_colours(a: Lts, b: Lts):
    """Refine both graphs in lockstep so that colours are comparable."""
    labels = sorted(a.labels | b.labels, key=lambda x: sorted(x))
    lid = {x: i for i, x in enumerate(labels)}
    ca = {s: (1 if s == a.root else 0) for s in a.states}
    cb = {s: (1 if s == b.root else 0) for s in b.states}
    n = -1
    while True:
        def sig(l, col):
            out = {}
            for s in l.states:
                o = sorted((lid[x], col[t]) for x, t in l.succ.get(s, ()))
                i = sorted((lid[x], col[t]) for x, t in l.pred.get(s, ()))
                out[s] = (col[s], tuple(o), tuple(i))
            return out
        sa, sb = sig(a, ca), sig(b, cb)
        keys = {k: i for i, k in enumerate(sorted(set(sa.values()) | set(sb.values())))}
        ca = {s: keys[sa[s]] for s in a.states}
        cb = {s: keys[sb[s]] for s in b.states}
        if len(keys) == n:
            return ca, cb
        n = len(keys)


def isomorphic(a: Lts, b: Lts) -> dict | None:
    """Rooted, label-preserving isomorphism ``a -> b`` or None.

    Exact backtracking over candidates restricted by colour refinement.
    Both inputs are pruned to their reachable parts first.
    """
    a, b = prune_unreachable(a), prune_unreachable(b)
    if len(a.states) != len(b.states) or len(a.edges) != len(b.edges):
        return None
    ca, cb = _joint_colours(a, b)
    if sorted(ca.values()) != sorted(cb.values()) or ca[a.root] != cb[b.root]:
        return None

    # visit order: BFS from the root so each new state hangs off a mapped one
    order, parent = [a.root], {a.root: None}
    for s in order:
        for x, t in a.succ.get(s, ()):
            if t not in parent:
                parent[t] = (s, x)
                order.append(t)

    phi: dict = {}
    used: set = set()

    def consistent(s, t):
        # edges from/to already mapped states (and self-loops) must agree
        def side(nbrs, me, image, known):
            return Counter((x, image(u)) for x, u in nbrs if u == me or u in known)
        fa = lambda u: t if u == s else phi[u]
        fb = lambda v: t if v == t else v
        if side(a.succ.get(s, ()), s, fa, phi) != side(b.succ.get(t, ()), t, fb, used):
            return False
        return side(a.pred.get(s, ()), s, fa, phi) == side(b.pred.get(t, ()), t, fb, used)

    def candidates(k):
        s = order[k]
        if parent[s] is None:
            return iter([b.root])
        u, x = parent[s]
        return iter(sorted({t for y, t in b.succ.get(phi[u], ()) if y == x},
                           key=state_str))

    # depth-first search with an explicit stack of candidate iterators
    stack = [candidates(0)]
    while stack:
        s = order[len(stack) - 1]
        if s in phi:
            used.discard(phi.pop(s))
        for t in stack[-1]:
            if t not in used and cb[t] == ca[s] and consistent(s, t):
                phi[s] = t
                used.add(t)
                break
        else:
            stack.pop()
            continue
        if len(stack) == len(order):
            return dict(phi)
        stack.append(candidates(len(stack)))
    return None


def distinguishing_trace(a: Lts, b: Lts, max_depth: int = 64) -> list | None:
    """A label word accepted by exactly one side, via subset construction.

    Returns None when the two systems are trace equivalent up to
    ``max_depth`` (they may still fail to be isomorphic).
    """
    start = (frozenset([a.root]), frozenset([b.root]))
    seen = {start}
    queue = deque([(start, [])])
    while queue:
        (sa, sb), word = queue.popleft()
        if len(word) >= max_depth:
            continue
        la = defaultdict(set)
        lb = defaultdict(set)
        for s in sa:
            for x, t in a.succ.get(s, ()):
                la[x].add(t)
        for s in sb:
            for x, t in b.succ.get(s, ()):
                lb[x].add(t)
        for x in sorted(set(la) | set(lb), key=sorted):
            w = word + [x]
            if not la.get(x) or not lb.get(x):
                return w
            nxt = (frozenset(la[x]), frozenset(lb[x]))
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, w))
    return None
