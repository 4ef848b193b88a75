"""
Growth toward an asymptote, and growth that blows up
====================================================

An organism whose energy intake scales as m^(3/4) and whose maintenance
cost scales as m levels off at M = (a/b)^4. A city whose output scales
superlinearly, n^1.2, does not level off: it diverges in finite time.
"""

import numpy as np

from radarlab.scaling import (
    CityGrowthParams,
    GrowthParams,
    asymptotic_mass,
    city_growth,
    growth_analytic,
    integrate_growth,
    loglog_fit,
)

organism = GrowthParams(a=1.0, b=0.5, p=0.75, m0=1.0)
traj = integrate_growth(organism, t_end=80.0, dt=0.01)
print("asymptote (a/b)^4 =", asymptotic_mass(organism))
for t in (0, 10, 20, 40, 80):
    i = int(round(t / 0.01))
    print(f"t={t:3d}  rk4 {traj.value[i]:9.5f}  closed form {growth_analytic(organism, traj.t[i]):9.5f}")

# the sublinear case settles; the superlinear one runs away
city = CityGrowthParams(a=1.0, b=0.1, gamma=1.2, n0=10.0)
boom = city_growth(city, t_end=10.0, dt=1e-3)
print("city blow-up time:", boom.blow_up)
print("same with a 10x finer step:", city_growth(city, 10.0, 1e-4).blow_up)

# slopes on log-log axes recover the exponent of a power law
mass = np.geomspace(0.01, 1e4, 12)
rate = 3.4 * mass**0.75
print("fitted metabolic exponent:", loglog_fit(mass, rate).slope)
