"""Moving a system between the two synchronisation styles.

First the shared-event system is rewritten into a handshake protocol on
shared variables and the step and state correspondences are checked.
Then the variable-sharing system is rewritten into shared self-loops and
the two marking graphs are compared.  Finally one protocol read arc is
removed to show how the checks react.
"""

from amasnets.amas import synthesize_agent
from amasnets.datamod import compose_data_global, interface_nets
from amasnets.gallery import tgc_agents, tgc_modules
from amasnets.net import marking_graph
from amasnets.transform import (check_theorem1, check_theorem2, check_theorem3, data2tr,
                                tr2data_global)

ORDER = ["controller", "train1", "train2"]


def main():
    nets = [synthesize_agent(a) for a in tgc_agents()]
    sigma, sigma_p, maps = tr2data_global(nets, ORDER, ORDER)
    print(f"handshake system: {len(sigma_p.places)} places, {len(sigma_p.transitions)} "
          f"transitions, {len(sigma_p.read)} read arcs, "
          f"{len(marking_graph(sigma_p).states)} reachable markings")
    for h in maps.handshakes:
        print(f"  {h.label}: {' then '.join(maps.kappa[h.name])}")
    print("state correspondence:", check_theorem2(sigma, sigma_p, maps).status)
    print("step correspondence: ", check_theorem1(sigma, sigma_p, maps, depth=8).status)

    ms = tgc_modules("binary")
    nets = interface_nets(ms)
    agents = data2tr(nets, [m.name for m in ms])
    for m, a in zip(ms, agents):
        loops = sorted(t for t in a.transitions if "@" in t)
        print(f"{m.name}: shared self-loops {loops}")
    v = check_theorem3(compose_data_global(nets), agents)
    print("variable sharing vs shared self-loops:", v.status)

    arc = ("train1.n1.out", "controller.n1.e")
    mutant = sigma_p.with_(read=sigma_p.read - {arc})
    v = check_theorem2(sigma, mutant, maps)
    print(f"\nwithout read arc {arc}: {v.status}, witness {v.witness}")


if __name__ == "__main__":
    main()
