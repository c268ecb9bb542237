"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed at the end of the
session (see ``conftest.py``); running this file directly prints the same
lines.  All comparisons are exact; the only tolerance is the wall-clock
budget per check.
"""

import time

from amasnets.amas import (canonical_iis_reachable, compose_action_based, synthesize_agent,
                           verify_prop1)
from amasnets.datamod import compose_data_global, interface_nets
from amasnets.errors import SynthesisError
from amasnets.fusion import SeqFusionSpec, describe, fuse_seq_components, fuse_transitions
from amasnets.gallery import (_net, autofused_train, autofusion_pair, component_fusion_pair,
                              diamond_lts, split_needed_lts, tgc_agents, tgc_modules,
                              transition_fusion_pair)
from amasnets.lts import Lts, isomorphic
from amasnets.net import marking_graph
from amasnets.synthesis import synthesize, synthesize_detailed
from amasnets.transform import (check_theorem1, check_theorem2, check_theorem3, data2tr,
                                sp_map, tr2data_global)

import test_properties
from oracles import brute_iis, brute_module_system, canonical_structure

TIME_LIMIT_S = 10.0     # per criterion
T1_DEPTH = 8
ORDER = ["controller", "train1", "train2"]

RESULTS = {}


def record(n, ok, note):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {note}"
    RESULTS[n] = line
    print(line)
    return ok


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def tgc_data_graph():
    ms = tgc_modules("binary")
    return ms, marking_graph(compose_data_global(interface_nets(ms)))


def test_criterion_1_transition_pipeline():
    with Timer() as tm:
        agents = tgc_agents()
        nets = [synthesize_agent(a) for a in agents]
        shapes = {a.name: (len(n.places), len(n.transitions)) for a, n in zip(agents, nets)}
        state_places = all(n.places == a.states for a, n in zip(agents, nets))
        g = marking_graph(compose_action_based(nets))
        iso = isomorphic(g, canonical_iis_reachable(agents)) is not None
        o_states, o_edges, _ = brute_iis(agents)
    ok = (shapes == {"controller": (3, 4), "train1": (3, 3), "train2": (3, 3)} and state_places
          and (len(g.states), len(g.edges)) == (8, 14) == (len(o_states), len(o_edges))
          and iso and verify_prop1(agents).holds and tm.elapsed < TIME_LIMIT_S)
    assert record(1, ok, f"agent nets {shapes}, marking graph {len(g.states)} states / "
                         f"{len(g.edges)} edges, isomorphic to IIS: {iso}")


def test_criterion_2_data_pipeline():
    with Timer() as tm:
        ms, g = tgc_data_graph()
        states, edges, root = brute_module_system(ms)
        iso = isomorphic(g, Lts(states, edges, root)) is not None
    ok = len(g.states) == 16 and len(g.edges) == len(edges) and iso and tm.elapsed < TIME_LIMIT_S
    assert record(2, ok, f"global marking graph {len(g.states)} states / {len(g.edges)} edges, "
                         f"oracle {len(states)} / {len(edges)}, isomorphic: {iso}")


def test_criterion_3_region_synthesis():
    with Timer() as tm:
        net = synthesize(diamond_lts())
        exact = (len(net.places), len(net.transitions)) == (4, 3)
        rt1 = isomorphic(marking_graph(net), diamond_lts()) is not None
        try:
            synthesize(split_needed_lts())
            essp_c = False
        except SynthesisError as e:
            essp_c = frozenset({"c"}) in {lab for lab, _ in e.report.essp_failures}
        res = synthesize_detailed(split_needed_lts(), split=True)
        counts = {"".join(sorted(k)): v for k, v in res.split_counts.items()}
        rt2 = isomorphic(marking_graph(res.net), split_needed_lts()) is not None
    ok = exact and rt1 and essp_c and counts.get("c") == 3 and counts.get("d") == 1 and rt2 \
        and tm.elapsed < TIME_LIMIT_S
    assert record(3, ok, f"exact net {len(net.places)} places / {len(net.transitions)} "
                         f"transitions, ESSP failure on c: {essp_c}, split counts {counts}")


def test_criterion_4_fusion_golden():
    with Timer() as tm:
        left, right = transition_fusion_pair()
        tf = fuse_transitions(left, right)
        a_pre = sorted(sorted(tf.pre[t]) for t in tf.transitions if tf.labels[t] == {"a"})
        l2, r2 = component_fusion_pair()
        full = fuse_seq_components(l2, r2, SeqFusionSpec(rho=[{"p1": "p4", "p2": "p5",
                                                                "p3": "p6"}]))
        part = fuse_seq_components(l2, r2, SeqFusionSpec(rho=[{"p1": "p4", "p2": "p6"}]))
        full_want = _net(["p1", "p2", "p3"], ["p1"], {
            "x": ({"a", "e"}, ["p1"], ["p2"]), "y": ({"b", "f"}, ["p2"], ["p3"]),
            "z": ({"c", "g"}, ["p3"], ["p1"])})
        fused_part = sorted(sorted(l) for l in part.labels.values() if len(l) == 2)
        a, b = autofusion_pair()
        auto = fuse_seq_components(a, b, SeqFusionSpec(
            rho_prime=[{"r1": "x1", "~r1": "~x1"}, {"r1": "y1", "~r1": "~y1"}]))
        auto_ok = describe(auto) == describe(autofused_train()) and \
            auto.places == autofused_train().places
    ok = (a_pre == [["p1", "p4"], ["p1", "p4"]]
          and canonical_structure(full) == canonical_structure(full_want)
          and fused_part == [["a", "h"], ["d", "g"]] and auto_ok and tm.elapsed < TIME_LIMIT_S)
    assert record(4, ok, f"a-presets {a_pre}, partial fusion labels {fused_part}, "
                         f"autofusion reproduced: {auto_ok}")


def test_criterion_5_data_to_transition():
    with Timer() as tm:
        ms, g_data = tgc_data_graph()
        nets = interface_nets(ms)
        agents = data2tr(nets, [m.name for m in ms])
        g_tr = marking_graph(compose_action_based(agents))
        iso = isomorphic(g_tr, g_data) is not None
        v = check_theorem3(compose_data_global(nets), agents)
    ok = iso and v.holds and tm.elapsed < TIME_LIMIT_S
    assert record(5, ok, f"translated agents give {len(g_tr.states)} states, "
                         f"isomorphic to the data graph: {iso}")


def test_criterion_6_transition_to_data():
    with Timer() as tm:
        nets = [synthesize_agent(a) for a in tgc_agents()]
        sigma, sigma_p, maps = tr2data_global(nets, ORDER, ORDER)
        sp0 = sp_map(maps, sigma.initial) == sigma_p.initial
        v2 = check_theorem2(sigma, sigma_p, maps)
        v1 = check_theorem1(sigma, sigma_p, maps, depth=T1_DEPTH)
    ok = sp0 and v2.holds and v1.holds and v1.details["edges"] == 14 and tm.elapsed < TIME_LIMIT_S
    assert record(6, ok, f"sp(m0)=m0': {sp0}, bijection: {v2.status} {v2.details}, "
                         f"step check at depth {T1_DEPTH}: {v1.status} {v1.details}")


def test_criterion_7_property_suites():
    suites = [test_properties.test_synthesis_round_trip,
              test_properties.test_global_net_matches_interleaving,
              test_properties.test_data_translation_matches_module_semantics,
              test_properties.test_read_arcs_as_self_loops]
    failed = []
    with Timer() as tm:
        for suite in suites:
            try:
                suite()
            except AssertionError:
                failed.append(suite.__name__)
    ok = not failed and tm.elapsed < 4 * TIME_LIMIT_S
    assert record(7, ok, f"4 suites x 50 seeded instances, failing suites: {failed or 'none'}")


def mutation_outcomes():
    nets = [synthesize_agent(a) for a in tgc_agents()]
    sigma, sigma_p, maps = tr2data_global(nets, ORDER, ORDER)
    out = {}
    for arc in sorted(sigma_p.read):
        mutant = sigma_p.with_(read=sigma_p.read - {arc})
        v2 = check_theorem2(sigma, mutant, maps)
        v1 = check_theorem1(sigma, mutant, maps, depth=T1_DEPTH) if v2.holds else v2
        out[arc] = v2 if not v2.holds else v1
    return out


def test_criterion_8_mutation_sensitivity():
    with Timer() as tm:
        out = mutation_outcomes()
    silent = [arc for arc, v in out.items() if v.status != "fails" or not v.witness]
    ok = not silent and tm.elapsed < TIME_LIMIT_S
    record(8, ok, f"{len(out) - len(silent)}/{len(out)} single read-arc removals detected; "
                  f"silent: {silent}")
    assert not silent, f"removals not detected: {silent}"


def test_undetected_mutants_leave_behaviour_unchanged():
    # the silent mutants of criterion 8 are behaviourally invisible
    nets = [synthesize_agent(a) for a in tgc_agents()]
    _, sigma_p, _ = tr2data_global(nets, ORDER, ORDER)
    g = marking_graph(sigma_p)
    for arc, v in mutation_outcomes().items():
        if v.status != "fails":
            mg = marking_graph(sigma_p.with_(read=sigma_p.read - {arc}))
            assert mg.states == g.states and mg.edges == g.edges


if __name__ == "__main__":
    import subprocess
    import sys
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", "-q", __file__]))
