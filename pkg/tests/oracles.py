"""Independent reference computations used only by the tests.

Each oracle works from first principles on plain dicts and tuples and
shares no code with the library beyond the input data structures.
"""

from __future__ import annotations

import itertools
from collections import deque


def net_tables(net):
    pre = {t: {p for p, u in net.flow if u == t} for t in net.transitions}
    post = {t: {p for u, p in net.flow if u == t} for t in net.transitions}
    reads = {t: {p for p, u in net.read if u == t} for t in net.transitions}
    inh = {t: {p for p, u in net.inhibit if u == t} for t in net.transitions}
    return pre, post, reads, inh


def brute_marking_graph(net, limit=100_000):
    """Reachable markings and labelled edges with token counts kept as
    dicts, so a safety violation shows up as a count of two."""
    pre, post, reads, inh = net_tables(net)
    start = tuple(sorted(net.initial))
    seen, edges, queue = {start}, set(), deque([start])
    while queue:
        m = queue.popleft()
        count = {p: 1 for p in m}
        for t in sorted(net.transitions):
            if all(count.get(p, 0) >= 1 for p in pre[t] | reads[t]) and \
                    not any(count.get(p, 0) for p in inh[t]):
                c = dict(count)
                for p in pre[t]:
                    c[p] -= 1
                for p in post[t]:
                    c[p] = c.get(p, 0) + 1
                assert max(c.values(), default=0) <= 1, "not 1-safe"
                m2 = tuple(sorted(p for p, k in c.items() if k))
                edges.add((m, net.labels[t], m2))
                if m2 not in seen:
                    seen.add(m2)
                    queue.append(m2)
                    assert len(seen) <= limit
    return seen, edges, start


def brute_iis(agents):
    """Reachable global states and edges of a set of agents, computed by
    trying every event from every reached tuple."""
    events = sorted(set().union(*(a.events for a in agents)))
    start = tuple(a.initial for a in agents)
    seen, edges, queue = {start}, set(), deque([start])
    while queue:
        g = queue.popleft()
        for e in events:
            nxt = list(g)
            ok = True
            for k, a in enumerate(agents):
                if e in a.events:
                    if (g[k], e) in a.trans:
                        nxt[k] = a.trans[(g[k], e)]
                    else:
                        ok = False
            if ok:
                g2 = tuple(nxt)
                edges.add((g, e, g2))
                if g2 not in seen:
                    seen.add(g2)
                    queue.append(g2)
    return seen, edges, start


def brute_module_system(modules):
    """Reachable behaviour of closed module systems: a module moves when
    its guard matches the values the other modules currently expose."""
    start = tuple(m.initial for m in modules)
    seen, edges, queue = {start}, set(), deque([start])
    while queue:
        g = queue.popleft()
        env = {}
        for m, s in zip(modules, g):
            env.update(dict(m.valuation[s]))
        for k, m in enumerate(modules):
            for p, guard, q, lab in m.trans:
                if p != g[k]:
                    continue
                if all(env.get(x) == v for x, v in guard.items()):
                    g2 = g[:k] + (q,) + g[k + 1:]
                    edges.add((g, lab, g2))
                    if g2 not in seen:
                        seen.add(g2)
                        queue.append(g2)
    return seen, edges, start


def brute_closure_counts(m):
    """(states, environment edges) of the universal closure, by counting."""
    combos = 1
    env_per_state = 0
    for x in m.external:
        combos *= len(m.domains[x])
        env_per_state += len(m.domains[x]) - 1
    n = len(m.states) * combos
    return n, n * env_per_state


def brute_isomorphic(states_a, edges_a, root_a, states_b, edges_b, root_b):
    """Rooted labelled isomorphism by trying every bijection (small inputs)."""
    a, b = sorted(states_a, key=repr), sorted(states_b, key=repr)
    if len(a) != len(b) or len(edges_a) != len(edges_b):
        return False
    target = set(edges_b)
    for perm in itertools.permutations(b):
        phi = dict(zip(a, perm))
        if phi[root_a] != root_b:
            continue
        if {(phi[s], lab, phi[t]) for s, lab, t in edges_a} == target:
            return True
    return False


def reachable_part(states, edges, root):
    succ = {}
    for s, _, t in edges:
        succ.setdefault(s, set()).add(t)
    seen, queue = {root}, deque([root])
    while queue:
        s = queue.popleft()
        for t in succ.get(s, ()):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen, {e for e in edges if e[0] in seen}, root


def is_region_naive(states, edges, subset):
    """Every label crosses ``subset`` in one uniform way."""
    kinds = {}
    for s, lab, t in edges:
        k = (s in subset, t in subset)
        kinds.setdefault(lab, set()).add(k)
    for ks in kinds.values():
        crossing = ks - {(False, False), (True, True)}
        if crossing and ks != crossing:
            return False
        if len(crossing) > 1:
            return False
    return True


def canonical_structure(net, place_names=None):
    """Name-free view: places renamed through ``place_names``, transitions
    described by label, preset, postset and read set."""
    ren = place_names or {}
    r = lambda ps: tuple(sorted(ren.get(p, p) for p in ps))
    pre, post, reads, _ = net_tables(net)
    return (tuple(sorted(ren.get(p, p) for p in net.places)),
            tuple(sorted(ren.get(p, p) for p in net.initial)),
            tuple(sorted((tuple(sorted(net.labels[t])), r(pre[t]), r(post[t]), r(reads[t]))
                         for t in net.transitions)))
