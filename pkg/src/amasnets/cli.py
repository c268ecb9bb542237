"""Command-line interface.

Exit codes: 0 the operation succeeded or the verdict holds, 1 the verdict
fails, 2 usage or structural error, 3 inconclusive or a bound was hit.
The default exploration bound can be set with ``AMASNETS_STATE_BOUND``.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import amas, datamod, fusion, synthesis, transform
from .errors import NetError, StructuralError
from .formats import Document, export_dot, load, serialize
from .net import marking_graph
from .verdict import Verdict


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _expect_kind(doc, *kinds, path=""):
    if doc.kind not in kinds:
        raise StructuralError(f"{path}: expected a {' or '.join(kinds)} document, got {doc.kind!r}")
    return doc.payload


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _parse_assignments(text: str | None) -> dict:
    out = {}
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise StructuralError(f"expected var=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _as_graph(path, bound):
    doc = load(path)
    if doc.kind == "lts":
        return doc.payload
    return marking_graph(_expect_kind(doc, "net", path=path), bound)


def _agent_nets(files):
    """Agent nets and names from either one AMAS file or several net files."""
    docs = [load(f) for f in files]
    if len(docs) == 1 and docs[0].kind == "amas":
        agents = docs[0].payload
        return [amas.synthesize_agent(a) for a in agents], [a.name for a in agents]
    return [_expect_kind(d, "net", path=f) for d, f in zip(docs, files)], [_stem(f) for f in files]


def _modules(files):
    out = []
    for f in files:
        out.extend(_expect_kind(load(f), "module", path=f))
    return out


def _pick_module(args):
    ms = _modules([args.module])
    if args.name:
        found = [m for m in ms if m.name == args.name]
        if not found:
            raise StructuralError(f"no module named {args.name!r}")
        return found[0]
    if len(ms) != 1:
        raise StructuralError("the file holds several modules; choose one with --name")
    return ms[0]


def _verdict_out(args, v: Verdict) -> int:
    _emit(args, serialize(Document("verdict", v)))
    return v.exit_code


def cmd_mg(args):
    net = _expect_kind(load(args.net), "net", path=args.net)
    _emit(args, serialize(Document("lts", marking_graph(net, args.state_bound))))
    return 0


def cmd_synth(args):
    l = _expect_kind(load(args.lts), "lts", path=args.lts)
    res = synthesis.synthesize_detailed(l, split=args.split, max_states=args.max_states)
    net = res.net
    if args.complement:
        net = synthesis.add_complementary_places(net, l)
    _emit(args, serialize(Document("net", net.with_(regions=None))))
    return 0


def cmd_iis(args):
    agents = _expect_kind(load(args.amas), "amas", path=args.amas)
    fn = amas.canonical_iis if args.full else amas.canonical_iis_reachable
    _emit(args, serialize(Document("lts", fn(agents, args.state_bound))))
    return 0


def cmd_compose_tr(args):
    if args.from_amas:
        nets, _ = _agent_nets([args.from_amas])
    else:
        if not args.nets:
            raise StructuralError("give agent nets or --from-amas")
        nets, _ = _agent_nets(args.nets)
    _emit(args, serialize(Document("net", amas.compose_action_based(nets))))
    return 0


def cmd_compose_data(args):
    nets = [_expect_kind(load(f), "net", path=f) for f in args.nets]
    glob = datamod.compose_data_global(nets, require_closed=not args.open)
    _emit(args, serialize(Document("net", glob)))
    return 0


def cmd_fuse_seq(args):
    a = _expect_kind(load(args.left), "net", path=args.left)
    b = _expect_kind(load(args.right), "net", path=args.right)
    spec = _expect_kind(load(args.spec), "spec", path=args.spec)
    _emit(args, serialize(Document("net", fusion.fuse_seq_components(a, b, spec))))
    return 0


def _module_init(args, m) -> dict:
    """``--init`` restricted to the variables ``m`` observes."""
    return {k: v for k, v in _parse_assignments(args.init).items() if k in m.external}


def cmd_close(args):
    m = _pick_module(args)
    closed = datamod.universal_closure(m, _module_init(args, m))
    _emit(args, serialize(Document("module", [closed])))
    return 0


def cmd_build_int(args):
    m = _pick_module(args)
    net = datamod.build_net_with_interface(m, _module_init(args, m))
    _emit(args, serialize(Document("net", net)))
    return 0


def _order(args):
    return [x.strip() for x in args.order.split(",")] if args.order else None


def cmd_tr2data(args):
    nets, names = _agent_nets(args.inputs)
    agents, maps = transform.tr2data(nets, _order(args), names)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        for name, net in zip(names, agents):
            with open(os.path.join(args.out_dir, f"{name}.json"), "w", encoding="utf-8") as fh:
                fh.write(serialize(Document("net", net)))
    _emit(args, serialize(Document("net", datamod.compose_data_global(agents))))
    return 0


def cmd_data2tr(args):
    nets = [_expect_kind(load(f), "net", path=f) for f in args.nets]
    names = [_stem(f) for f in args.nets]
    agents = transform.data2tr(nets, names)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        for name, net in zip(names, agents):
            with open(os.path.join(args.out_dir, f"{name}.json"), "w", encoding="utf-8") as fh:
                fh.write(serialize(Document("net", net)))
    _emit(args, serialize(Document("net", amas.compose_action_based(agents))))
    return 0


def cmd_check_iso(args):
    left = _as_graph(args.left, args.state_bound)
    right = _as_graph(args.right, args.state_bound)
    return _verdict_out(args, amas.compare_graphs("iso", left, right))


def cmd_check(args):
    if args.theorem in ("t1", "t2"):
        nets, names = _agent_nets(args.inputs)
        sigma, sigma_p, maps = transform.tr2data_global(nets, _order(args), names)
        if args.theorem == "t1":
            v = transform.check_theorem1(sigma, sigma_p, maps, args.depth, args.state_bound)
        else:
            v = transform.check_theorem2(sigma, sigma_p, maps, args.state_bound)
        return _verdict_out(args, v)
    docs = [load(f) for f in args.inputs]
    if all(d.kind == "module" for d in docs):
        ms = _modules(args.inputs)
        init = _parse_assignments(args.init) or None
        nets = datamod.interface_nets(ms, init)
        names = [m.name for m in ms]
    else:
        nets = [_expect_kind(d, "net", path=f) for d, f in zip(docs, args.inputs)]
        names = [_stem(f) for f in args.inputs]
    glob = datamod.compose_data_global(nets)
    v = transform.check_theorem3(glob, transform.data2tr(nets, names), args.state_bound)
    return _verdict_out(args, v)


def cmd_dot(args):
    _emit(args, export_dot(load(args.doc)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amasnets", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("-o", "--output", help="write here instead of stdout")
        sp.add_argument("--state-bound", type=int, default=None,
                        help="maximum number of explored states")
        return sp

    sp = add("mg", cmd_mg, "marking graph of a net")
    sp.add_argument("net")
    sp = add("synth", cmd_synth, "synthesise a 1-safe net from an LTS")
    sp.add_argument("lts")
    sp.add_argument("--split", action="store_true", help="split labels when needed")
    sp.add_argument("--complement", action="store_true", help="add complementary places")
    sp.add_argument("--max-states", type=int, default=synthesis.DEFAULT_MAX_STATES)
    sp = add("iis", cmd_iis, "global interleaved model of an AMAS")
    sp.add_argument("amas")
    sp.add_argument("--full", action="store_true", help="include unreachable global states")
    sp = add("compose-tr", cmd_compose_tr, "synchronise agent nets on shared labels")
    sp.add_argument("nets", nargs="*")
    sp.add_argument("--from-amas", help="synthesise the agents of this AMAS first")
    sp = add("compose-data", cmd_compose_data, "fuse annotated agent nets by variable name")
    sp.add_argument("nets", nargs="+")
    sp.add_argument("--open", action="store_true", help="allow unmatched external variables")
    sp = add("fuse-seq", cmd_fuse_seq, "fuse sequential components of two nets")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--spec", required=True, help="spec document with rho / rho_prime")
    for name, fn, help_ in (("close", cmd_close, "universal closure of a module"),
                            ("build-int", cmd_build_int, "net of a module with its interface")):
        sp = add(name, fn, help_)
        sp.add_argument("module")
        sp.add_argument("--init", required=True, help="external valuation, e.g. r1=0,r2=0; "
                        "variables the module does not observe are ignored")
        sp.add_argument("--name", help="module to use when the file holds several")
    sp = add("tr2data", cmd_tr2data, "handshake translation of transition-synchronised agents")
    sp.add_argument("inputs", nargs="+", help="one AMAS document or several agent nets")
    sp.add_argument("--order", help="agent priority, e.g. controller,train1,train2")
    sp.add_argument("--out-dir", help="also write one net per agent here")
    sp = add("data2tr", cmd_data2tr, "turn foreign reads into shared self-loops")
    sp.add_argument("nets", nargs="+")
    sp.add_argument("--out-dir", help="also write one net per agent here")
    sp = add("check-iso", cmd_check_iso, "rooted isomorphism of two LTS or marking graphs")
    sp.add_argument("left")
    sp.add_argument("right")
    sp = add("check", cmd_check, "check a correspondence between the two styles")
    sp.add_argument("theorem", choices=["t1", "t2", "t3"])
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--order")
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--init", help="external valuation for module inputs (t3)")
    sp = add("dot", cmd_dot, "render a net or LTS document as DOT")
    sp.add_argument("doc")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NetError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
