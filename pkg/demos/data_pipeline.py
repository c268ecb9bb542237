"""Train-gate-controller with agents that synchronise by reading each
other's variables.

Each module becomes a net whose guards are read arcs on copies of the
variables it observes; the copies are then glued onto the owners'
value places.
"""

import sys

from amasnets.datamod import (build_net_with_interface, compose_all, compose_data_global,
                              global_initial_valuation, interface_nets, reachable_module_graph,
                              universal_closure, verify_data_props)
from amasnets.gallery import tgc_modules
from amasnets.net import marking_graph


def main(design="binary"):
    ms = tgc_modules(design)
    init = global_initial_valuation(ms)
    print(f"design {design!r}, initial valuation {dict(sorted(init.items()))}")
    for m in ms:
        local = init.restrict(m.external)
        closure = universal_closure(m, local)
        net = build_net_with_interface(m, local)
        print(f"{m.name}: closure {len(closure.states)} states; interface net "
              f"{len(net.places)} places, {len(net.read)} read arcs")

    glob = compose_data_global(interface_nets(ms))
    g = marking_graph(glob)
    ref = reachable_module_graph(compose_all(ms))
    print(f"\nglobal net: {len(glob.places)} places, reads "
          f"{sorted((p, t) for p, t in glob.read)}")
    print(f"marking graph {len(g.states)} states / {len(g.edges)} edges; "
          f"module composition {len(ref.states)} / {len(ref.edges)}")
    print(f"all correspondences: {verify_data_props(ms).status}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
