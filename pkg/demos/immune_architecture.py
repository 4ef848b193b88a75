"""
How big should a lymph node be?
===============================

Bigger nodes mean longer crawls for the cell carrying antigen to the
node centre (time grows as V^(1/3)); smaller nodes mean more nodes to
recruit from before enough responders are active (time grows as M/V^2).
The optimum balances the two.
"""

from radarlab.immune import (
    ArchitectureConstants,
    optimize_architecture,
    scaling_exponents,
)

consts = ArchitectureConstants(A=1.0, B=1.0)

for M in (1.0, 1e2, 1e4, 1e6):
    opt = optimize_architecture(consts, M)
    t = opt.times
    print(f"M={M:8.0e}  V*={opt.V_star:10.3f}  N*={opt.N_star:10.3f}  "
          f"t_detect/t_comm={t.t_detect / t.t_comm:.6f}  t_total={t.t_total:.4f}")

# across six orders of magnitude the optimal response time creeps up as M^(1/7)
s = scaling_exponents(consts, [10.0**k for k in range(7)])
print("slope of V*     :", s.volume.slope)
print("slope of N*     :", s.count.slope)
print("slope of t_total:", s.total.slope)
