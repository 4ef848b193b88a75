"""
Greedy routing on a small world
===============================

Every node of a torus gets long-range contacts with probability falling
off as distance^-2. With one contact per node, greedy delivery needs on
the order of (ln n)^2 hops; with (ln n)^2 contacts it needs about ln n.
"""

import numpy as np

from radarlab.smallworld import Constant, LogSquared, build_graph, greedy_route, route_pairs

g = build_graph("torus", 4096, LogSquared(1), rng_seed=0)
print("contacts per node:", g.k)
res = greedy_route(g, 0, 2080, record_path=True)
print("hops:", res.hops, "path:", res.path)

for policy in (Constant(1), LogSquared(1)):
    for n in (1024, 4096, 16384):
        hops = route_pairs(build_graph("torus", n, policy, rng_seed=1), 200, np.random.default_rng(2))
        print(f"{str(policy):16s} n={n:6d}  mean hops {hops.mean():6.2f}")
