import json
import os

import pytest

from amasnets.amas import compose_action_based, synthesize_agent
from amasnets.errors import DocumentError
from amasnets.formats import Document, dump, export_dot, load, parse, serialize
from amasnets.fusion import SeqFusionSpec
from amasnets.gallery import diamond_lts, read_arc_net, tgc_agents, tgc_modules
from amasnets.transform import check_theorem2, tr2data_global
from amasnets.datamod import build_net_with_interface

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "tgc_transition_net.json")


def roundtrip(kind, value):
    doc = parse(serialize(Document(kind, value)))
    assert doc.kind == kind
    return doc.payload


def test_net_golden_bytes():
    net = compose_action_based([synthesize_agent(a) for a in tgc_agents()])
    with open(GOLDEN, encoding="utf-8") as fh:
        assert serialize(Document("net", net)) == fh.read()


@pytest.mark.parametrize("net", [read_arc_net(),
                                 build_net_with_interface(tgc_modules()[1], {"r1": "0"})])
def test_net_roundtrip(net):
    back = roundtrip("net", net)
    assert back == net
    assert serialize(Document("net", back)) == serialize(Document("net", net))


def test_other_kinds_roundtrip(tmp_path):
    l = diamond_lts()
    assert roundtrip("lts", l).edges == l.edges
    agents = roundtrip("amas", tgc_agents())
    assert [a.trans for a in agents] == [a.trans for a in tgc_agents()]
    ms = roundtrip("module", tgc_modules("ternary"))
    assert [m.trans for m in ms] == [m.trans for m in tgc_modules("ternary")]
    spec = SeqFusionSpec(rho=({"p1": "p4"},), rho_prime=({"q": "r"},))
    assert roundtrip("spec", spec) == spec
    v = check_theorem2(*tr2data_global([synthesize_agent(a) for a in tgc_agents()]))
    assert roundtrip("verdict", v).status == v.status
    dump(Document("lts", l), tmp_path / "l.json")
    assert load(tmp_path / "l.json").payload.states == l.states


def test_error_paths():
    good = json.loads(serialize(Document("net", read_arc_net())))
    bad = json.loads(json.dumps(good))
    bad["payload"]["transitions"][0]["label"] = 3
    with pytest.raises(DocumentError) as exc:
        parse(json.dumps(bad))
    assert exc.value.path == "$.payload.transitions[0].label"
    bad = json.loads(json.dumps(good))
    bad["payload"]["read"].append(["ghost", "t1"])
    with pytest.raises(DocumentError, match="ghost"):
        parse(json.dumps(bad))
    with pytest.raises(DocumentError, match="line 1"):
        parse("{nope")
    with pytest.raises(DocumentError, match="unknown kind"):
        parse('{"kind": "cake", "payload": {}}')
    with pytest.raises(DocumentError, match="version"):
        parse('{"kind": "lts", "version": "2.0", "payload": {}}')


def test_dot_export():
    dot = export_dot(Document("net", read_arc_net()))
    assert dot.startswith("digraph")
    assert "arrowhead=dot" in dot
    assert dot.count("shape=box") >= 1
    lts_dot = export_dot(Document("lts", diamond_lts()))
    assert "__start" in lts_dot
    with pytest.raises(DocumentError):
        export_dot(Document("spec", SeqFusionSpec()))
