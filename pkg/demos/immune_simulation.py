"""
Detect, then recruit: an event simulation
=========================================

Each run drops an antigen carrier uniformly inside a spherical node,
lets it crawl to the centre, then contacts remote nodes one at a time
until enough responders are active.
"""

import numpy as np

from radarlab.immune import ImmuneSimConfig, des_run, des_volume_sweep

cfg = ImmuneSimConfig(M=1e4, V=8.0, kappa=1.0)
run = des_run(cfg, record_events=True)
print("detection", run.detection_time, "recruitment", run.recruitment_time)
print("first events:", run.events[:3])

# the average crawl from a uniform point in a ball is three quarters of the radius
draws = [des_run(cfg.replace(rng_seed=s)).detection_time for s in range(20_000)]
print("mean crawl / (3R/4):", np.mean(draws) / (0.75 * cfg.radius))

sweep = des_volume_sweep(cfg, np.geomspace(1, 64, 7), replicates=30)
print("detection slope vs V  :", sweep.detection.slope)
print("recruitment slope vs V:", sweep.recruitment.slope)
