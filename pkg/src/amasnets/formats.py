"""JSON interchange documents and DOT rendering.

Every document is ``{"kind": ..., "version": ..., "payload": {...}}``.
Serialisation is canonical (sorted keys, sorted collections), so equal
values always produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .amas import Agent
from .datamod import Module
from .errors import DocumentError, NetError
from .fusion import SeqFusionSpec
from .lts import Lts, label_str, state_str
from .net import LabeledNet
from .verdict import Verdict

VERSION = "1.0"
KINDS = ("net", "lts", "amas", "module", "spec", "verdict")


@dataclass
class Document:
    kind: str
    payload: object
    version: str = VERSION


def _sorted_label(lab) -> list:
    return sorted(lab)


# -- encoding ---------------------------------------------------------------

def _vars_out(vs: dict) -> dict:
    return {x: {"values": sorted(vals), "places": dict(sorted(vals.items()))}
            for x, vals in sorted(vs.items())}


def net_to_json(net: LabeledNet) -> dict:
    return {
        "places": [{"id": p, "initial": p in net.initial} for p in sorted(net.places)],
        "transitions": [{"id": t, "label": _sorted_label(net.labels[t])}
                        for t in sorted(net.transitions)],
        "flow": sorted([list(a) for a in net.flow]),
        "read": sorted([list(a) for a in net.read]),
        "inhibit": sorted([list(a) for a in net.inhibit]),
        "vars": {"internal": _vars_out(net.internal_vars),
                 "external": _vars_out(net.external_vars)},
    }


def lts_to_json(l: Lts) -> dict:
    return {
        "root": state_str(l.root),
        "states": sorted(state_str(s) for s in l.states),
        "edges": sorted([state_str(s), _sorted_label(a), state_str(t)] for s, a, t in l.edges),
    }


def agents_to_json(agents) -> dict:
    return {"agents": [{"name": a.name, "initial": a.initial,
                        "edges": sorted([s, e, t] for (s, e), t in a.trans.items())}
                       for a in agents]}


def module_to_json(m: Module) -> dict:
    sid = {s: state_str(s) for s in m.states}
    return {
        "name": m.name,
        "controlled": sorted(m.controlled),
        "external": sorted(m.external),
        "domains": {x: list(d) for x, d in sorted(m.domains.items())},
        "initial": sid[m.initial],
        "states": sorted(({"id": sid[s], "valuation": dict(sorted(m.valuation[s].items()))}
                          for s in m.states), key=lambda d: d["id"]),
        "transitions": sorted(({"source": sid[p], "guard": dict(sorted(v.items())),
                                "target": sid[q], "label": _sorted_label(lab)}
                               for p, v, q, lab in m.trans),
                              key=lambda d: (d["source"], d["target"], sorted(d["guard"].items()),
                                             d["label"])),
    }


def spec_to_json(spec: SeqFusionSpec) -> dict:
    return {"rho": [dict(sorted(r.items())) for r in spec.rho],
            "rho_prime": [dict(sorted(r.items())) for r in spec.rho_prime]}


def _jsonable(x):
    if isinstance(x, (frozenset, set)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    return x


def verdict_to_json(v: Verdict) -> dict:
    return {"check": v.check, "status": v.status, "witness": _jsonable(v.witness),
            "details": _jsonable(v.details)}


_ENCODERS = {"net": net_to_json, "lts": lts_to_json, "amas": agents_to_json,
             "module": lambda ms: {"modules": [module_to_json(m) for m in ms]},
             "spec": spec_to_json, "verdict": verdict_to_json}


def serialize(doc: Document) -> str:
    if doc.kind not in _ENCODERS:
        raise DocumentError(f"unknown kind {doc.kind!r}", "$.kind")
    body = {"kind": doc.kind, "version": doc.version, "payload": _ENCODERS[doc.kind](doc.payload)}
    return json.dumps(body, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- decoding ---------------------------------------------------------------

def _expect(cond, msg, path):
    if not cond:
        raise DocumentError(msg, path)


def _get(obj, key, path, typ=None, default=...):
    if not isinstance(obj, dict):
        raise DocumentError("expected an object", path)
    if key not in obj:
        if default is ...:
            raise DocumentError(f"missing field {key!r}", path)
        return default
    val = obj[key]
    if typ is not None and not isinstance(val, typ):
        raise DocumentError(f"expected {typ.__name__ if isinstance(typ, type) else typ}", f"{path}.{key}")
    return val


def _label(x, path):
    if x is None:
        return frozenset()
    if isinstance(x, str):
        return frozenset([x])
    _expect(isinstance(x, list) and all(isinstance(v, str) for v in x),
            "label must be a string or a list of strings", path)
    return frozenset(x)


def _vars_in(obj, path, places):
    out = {}
    _expect(isinstance(obj, dict), "expected an object", path)
    for x, spec in obj.items():
        ps = _get(spec, "places", f"{path}.{x}", dict)
        for v, p in ps.items():
            _expect(p in places, f"unknown place {p!r}", f"{path}.{x}.places.{v}")
        out[x] = ps
    return out


def net_from_json(obj, path="$.payload") -> LabeledNet:
    places_raw = _get(obj, "places", path, list)
    places, initial = [], []
    for i, p in enumerate(places_raw):
        pp = f"{path}.places[{i}]"
        pid = _get(p, "id", pp, str)
        places.append(pid)
        if _get(p, "initial", pp, bool, False):
            initial.append(pid)
    _expect(len(set(places)) == len(places), "duplicate place ids", f"{path}.places")
    trans, labels = [], {}
    for i, t in enumerate(_get(obj, "transitions", path, list)):
        tp = f"{path}.transitions[{i}]"
        tid = _get(t, "id", tp, str)
        trans.append(tid)
        labels[tid] = _label(t.get("label"), f"{tp}.label")
    _expect(len(set(trans)) == len(trans), "duplicate transition ids", f"{path}.transitions")
    P, T = set(places), set(trans)
    arcs = {}
    for key in ("flow", "read", "inhibit"):
        rows = _get(obj, key, path, list, [])
        out = []
        for i, a in enumerate(rows):
            ap = f"{path}.{key}[{i}]"
            _expect(isinstance(a, list) and len(a) == 2 and all(isinstance(x, str) for x in a),
                    "arc must be a pair of ids", ap)
            x, y = a
            if key == "flow":
                _expect((x in P and y in T) or (x in T and y in P),
                        f"arc {x!r}->{y!r} references unknown nodes", ap)
            else:
                _expect(x in P, f"unknown place {x!r}", ap)
                _expect(y in T, f"unknown transition {y!r}", ap)
            out.append((x, y))
        arcs[key] = out
    pre = {t: set() for t in T}
    post = {t: set() for t in T}
    for x, y in arcs["flow"]:
        if y in pre:
            pre[y].add(x)
        else:
            post[x].add(y)
    for i, t in enumerate(trans):
        _expect(pre[t], f"transition {t!r} has an empty preset", f"{path}.transitions[{i}]")
        _expect(post[t], f"transition {t!r} has an empty postset", f"{path}.transitions[{i}]")
    vs = _get(obj, "vars", path, dict, {})
    internal = _vars_in(vs.get("internal", {}), f"{path}.vars.internal", P)
    external = _vars_in(vs.get("external", {}), f"{path}.vars.external", P)
    try:
        return LabeledNet(places=frozenset(places), transitions=frozenset(trans),
                          flow=frozenset(arcs["flow"]), read=frozenset(arcs["read"]),
                          inhibit=frozenset(arcs["inhibit"]), initial=frozenset(initial),
                          labels=labels, internal_vars=internal, external_vars=external)
    except NetError as e:
        raise DocumentError(str(e), path) from e


def lts_from_json(obj, path="$.payload") -> Lts:
    root = _get(obj, "root", path, str)
    states = _get(obj, "states", path, list, [])
    edges = []
    for i, e in enumerate(_get(obj, "edges", path, list)):
        ep = f"{path}.edges[{i}]"
        _expect(isinstance(e, list) and len(e) == 3, "edge must be [source, label, target]", ep)
        edges.append((e[0], _label(e[1], f"{ep}[1]"), e[2]))
    _expect(root in states or not states, f"root {root!r} is not listed", f"{path}.root")
    return Lts.from_edges(root, edges, states)


def agents_from_json(obj, path="$.payload") -> list:
    out = []
    for i, a in enumerate(_get(obj, "agents", path, list)):
        ap = f"{path}.agents[{i}]"
        edges = []
        for k, e in enumerate(_get(a, "edges", ap, list)):
            _expect(isinstance(e, list) and len(e) == 3 and all(isinstance(x, str) for x in e),
                    "edge must be [source, event, target]", f"{ap}.edges[{k}]")
            edges.append(tuple(e))
        try:
            out.append(Agent.from_edges(_get(a, "name", ap, str), _get(a, "initial", ap, str), edges))
        except NetError as e:
            raise DocumentError(str(e), ap) from e
    _expect(len({a.name for a in out}) == len(out), "duplicate agent names", f"{path}.agents")
    return out


def module_from_json(obj, path) -> Module:
    name = _get(obj, "name", path, str)
    controlled = _get(obj, "controlled", path, list)
    external = _get(obj, "external", path, list, [])
    domains = _get(obj, "domains", path, dict)
    valuation = {}
    for i, s in enumerate(_get(obj, "states", path, list)):
        sp = f"{path}.states[{i}]"
        valuation[_get(s, "id", sp, str)] = _get(s, "valuation", sp, dict)
    edges = []
    for i, t in enumerate(_get(obj, "transitions", path, list)):
        tp = f"{path}.transitions[{i}]"
        src, dst = _get(t, "source", tp, str), _get(t, "target", tp, str)
        _expect(src in valuation, f"unknown state {src!r}", f"{tp}.source")
        _expect(dst in valuation, f"unknown state {dst!r}", f"{tp}.target")
        guard = _get(t, "guard", tp, dict, {})
        for x in guard:
            _expect(x in external, f"guard variable {x!r} is not external", f"{tp}.guard")
        edges.append((src, _label(t.get("label"), f"{tp}.label"), dst, guard))
    try:
        return Module.from_guards(name, controlled, external, domains, valuation,
                                  _get(obj, "initial", path, str), edges)
    except NetError as e:
        raise DocumentError(str(e), path) from e


def spec_from_json(obj, path="$.payload") -> SeqFusionSpec:
    fams = {}
    for key in ("rho", "rho_prime"):
        rows = _get(obj, key, path, list, [])
        for i, r in enumerate(rows):
            _expect(isinstance(r, dict) and all(isinstance(v, str) for v in r.values()),
                    "bijection must map place ids to place ids", f"{path}.{key}[{i}]")
        fams[key] = tuple(dict(r) for r in rows)
    return SeqFusionSpec(fams["rho"], fams["rho_prime"])


def verdict_from_json(obj, path="$.payload") -> Verdict:
    return Verdict(_get(obj, "check", path, str), _get(obj, "status", path, str),
                   obj.get("witness"), obj.get("details", {}))


_DECODERS = {
    "net": net_from_json, "lts": lts_from_json, "amas": agents_from_json,
    "module": lambda obj, path="$.payload": [
        module_from_json(m, f"{path}.modules[{i}]")
        for i, m in enumerate(_get(obj, "modules", path, list))],
    "spec": spec_from_json, "verdict": verdict_from_json,
}


def parse(text: str) -> Document:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})") from e
    kind = _get(obj, "kind", "$", str)
    _expect(kind in KINDS, f"unknown kind {kind!r}", "$.kind")
    version = _get(obj, "version", "$", str, VERSION)
    _expect(version.split(".")[0] == VERSION.split(".")[0],
            f"unsupported version {version!r}", "$.version")
    payload = _get(obj, "payload", "$", dict)
    return Document(kind, _DECODERS[kind](payload), version)


def load(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(doc: Document, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(doc))


# -- DOT --------------------------------------------------------------------

def _q(s) -> str:
    return json.dumps(str(s), ensure_ascii=False)


def export_dot(doc: Document) -> str:
    if doc.kind == "net":
        return _net_dot(doc.payload)
    if doc.kind == "lts":
        return _lts_dot(doc.payload)
    raise DocumentError(f"cannot render kind {doc.kind!r} as DOT", "$.kind")


def _net_dot(net: LabeledNet) -> str:
    lines = ["digraph net {", "  rankdir=LR;"]
    for p in sorted(net.places):
        tok = "●" if p in net.initial else ""
        lines.append(f"  {_q(p)} [shape=circle, label={_q(tok)}, xlabel={_q(p)}];")
    for t in sorted(net.transitions):
        lab = label_str(net.labels[t]) if net.labels[t] else "∅"
        lines.append(f"  {_q(t)} [shape=box, label={_q(t + chr(10) + lab)}];")
    for x, y in sorted(net.flow):
        lines.append(f"  {_q(x)} -> {_q(y)};")
    for p, t in sorted(net.read):
        lines.append(f"  {_q(p)} -> {_q(t)} [arrowhead=dot, style=dashed];")
    for p, t in sorted(net.inhibit):
        lines.append(f"  {_q(p)} -> {_q(t)} [arrowhead=odot, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _lts_dot(l: Lts) -> str:
    lines = ["digraph lts {", "  __start [shape=point];"]
    for s in sorted(l.states, key=state_str):
        lines.append(f"  {_q(state_str(s))} [shape=ellipse];")
    lines.append(f"  __start -> {_q(state_str(l.root))};")
    for s, a, t in sorted(l.edges, key=lambda e: (state_str(e[0]), sorted(e[1]), state_str(e[2]))):
        lab = label_str(a) if a else "∅"
        lines.append(f"  {_q(state_str(s))} -> {_q(state_str(t))} [label={_q(lab)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
