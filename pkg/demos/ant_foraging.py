"""
Pheromone trails and foraging colonies
======================================

Ants choose among neighbouring cells with probability proportional to
pheromone^alpha. Laden ants lay pheromone on the way home, so a found
pile attracts more traffic.
"""

import numpy as np

from radarlab.ants import ColonyConfig, clustered_world, run_colony, transition_probs, two_pile_world

print(transition_probs([2, 1, 1], alpha=2))  # [2/3, 1/6, 1/6]
print(transition_probs([5, 3, 9], alpha=0))  # alpha = 0 ignores pheromone

# two equally distant piles: recruitment usually settles on one of them
shares = []
for seed in range(10):
    stats = run_colony(two_pile_world(), ColonyConfig(20, alpha=2.0, rng_seed=seed, max_ticks=500))
    shares.append(stats.dominant_share)
print("dominant pile share per run:", np.round(shares, 2))

# per-capita rate in a clustered world, small and larger colony
for n in (8, 64):
    stats = run_colony(clustered_world(n), ColonyConfig(n, alpha=2.0, rng_seed=1, max_ticks=400))
    print(f"n={n:3d}  seeds={stats.seeds_collected:4d}  per-capita rate={stats.per_capita_rate:.5f}")
