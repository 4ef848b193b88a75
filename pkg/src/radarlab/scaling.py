"""Power laws, growth ODEs and log-log regression.

Every other module reports its scaling exponents through :func:`loglog_fit`,
so the regression here is the common yardstick of the package.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from radarlab.errors import (
    ConfigurationError,
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    NoFiniteAsymptoteError,
    NumericalError,
    UnsupportedExponentError,
)

# Relative residual below which a fit is treated as exact.
_PERFECT_FIT_RTOL = 1e-24


@dataclass(frozen=True)
class PowerLaw:
    """``y = coefficient * x ** exponent``."""

    coefficient: float
    exponent: float

    def __post_init__(self):
        if not self.coefficient > 0:
            raise DomainError(f"coefficient must be positive, got {self.coefficient}")


def power_eval(law: PowerLaw, x):
    """Evaluate a power law at ``x > 0`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("power law evaluated at non-positive x")
    y = law.coefficient * xa**law.exponent
    return float(y) if y.ndim == 0 else y


@dataclass(frozen=True)
class GrowthParams:
    """Coefficients of ``dm/dt = a m^p - b m``.

    ``a`` is the intake coefficient, ``b`` the maintenance coefficient and
    ``p`` the metabolic exponent. ``m0`` may equal or exceed the asymptote;
    the trajectory is then constant or decreasing.
    """

    a: float
    b: float
    p: float = 0.75
    m0: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ConfigurationError("a and b must be positive")
        if not self.m0 > 0:
            raise ConfigurationError("m0 must be positive")
        if not 0 < self.p:
            raise ConfigurationError("p must be positive")

    def rate(self, m: float) -> float:
        return self.a * m**self.p - self.b * m


@dataclass(frozen=True)
class CityGrowthParams:
    """Coefficients of ``dn/dt = a n^gamma - b n``."""

    a: float
    b: float
    gamma: float
    n0: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.n0 > 0):
            raise ConfigurationError("a, b and n0 must be positive")

    def rate(self, n: float) -> float:
        return self.a * n**self.gamma - self.b * n


@dataclass
class Trajectory:
    """Sampled solution of a scalar ODE.

    ``blow_up`` holds the first sample time at which the value exceeded the
    ceiling, or ``None`` when integration reached ``t_end``.
    """

    t: np.ndarray
    value: np.ndarray
    blow_up: Optional[float] = None

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for ti, vi in zip(self.t, self.value):
                w.writerow([repr(float(ti)), repr(float(vi))])
        return path


def asymptotic_mass(params: GrowthParams) -> float:
    """Positive fixed point ``(a/b)^(1/(1-p))`` of the growth equation."""
    if params.p >= 1:
        raise NoFiniteAsymptoteError(f"p={params.p} >= 1 has no finite asymptote")
    return (params.a / params.b) ** (1.0 / (1.0 - params.p))


def _rk4(
    f: Callable[[float], float],
    y0: float,
    t_end: float,
    dt: float,
    ceiling: Optional[float] = None,
) -> Trajectory:
    """Classical fixed-step RK4 for an autonomous scalar ODE.

    The final step is shortened so the last sample lands on ``t_end``.
    With a ``ceiling``, integration stops at the first sample above it and
    overflow is treated the same way.
    """
    if not dt > 0 or not t_end > 0:
        raise ConfigurationError("dt and t_end must be positive")
    if dt >= t_end:
        raise ConfigurationError(f"dt={dt} must be smaller than t_end={t_end}")
    nsteps = int(math.ceil(t_end / dt - 1e-9))
    ts = [0.0]
    ys = [float(y0)]
    y = float(y0)
    for i in range(1, nsteps + 1):
        t_prev = (i - 1) * dt
        t_next = t_end if i == nsteps else i * dt
        h = t_next - t_prev
        try:
            k1 = f(y)
            k2 = f(y + 0.5 * h * k1)
            k3 = f(y + 0.5 * h * k2)
            k4 = f(y + h * k3)
            y_new = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        except (OverflowError, ZeroDivisionError):
            y_new = math.inf
        if not math.isfinite(y_new):
            if ceiling is not None and y_new > 0:
                ts.append(t_next)
                ys.append(math.inf)
                return Trajectory(np.array(ts), np.array(ys), blow_up=t_next)
            raise NumericalError(f"non-finite value at step {i} (t={t_next:g}, previous y={y:g})")
        ts.append(t_next)
        ys.append(y_new)
        y = y_new
        if ceiling is not None and y > ceiling:
            return Trajectory(np.array(ts), np.array(ys), blow_up=t_next)
    return Trajectory(np.array(ts), np.array(ys))


def integrate_growth(params: GrowthParams, t_end: float, dt: float) -> Trajectory:
    """Integrate ``dm/dt = a m^p - b m`` from ``m0`` with RK4."""

    def f(m):
        if m < 0:
            raise NumericalError(f"mass went negative ({m:g}); step too large")
        return params.rate(m)

    return _rk4(f, params.m0, t_end, dt)


def growth_time_scale(params: GrowthParams) -> float:
    """Relaxation time ``4 M^(1/4) / a`` of the p = 3/4 growth law."""
    return 4.0 * asymptotic_mass(params) ** 0.25 / params.a


def growth_analytic(params: GrowthParams, t):
    """Closed-form solution of the growth equation for ``p = 3/4``.

    With ``u = m^(1/4)`` the equation becomes linear, ``du/dt = (a - b u)/4``,
    which gives ``m(t) = M (1 - (1 - (m0/M)^(1/4)) exp(-a t / (4 M^(1/4))))^4``.
    """
    if params.p != 0.75:
        raise UnsupportedExponentError(f"closed form needs p=3/4, got {params.p}")
    M = asymptotic_mass(params)
    ta = np.asarray(t, dtype=float)
    inner = 1.0 - (1.0 - (params.m0 / M) ** 0.25) * np.exp(-params.a * ta / (4.0 * M**0.25))
    m = M * inner**4
    return float(m) if m.ndim == 0 else m


def city_growth(
    params: CityGrowthParams,
    t_end: float,
    dt: float,
    ceiling: Optional[float] = None,
) -> Trajectory:
    """Integrate ``dn/dt = a n^gamma - b n``.

    Integration stops when ``n`` exceeds ``ceiling`` (default ``1e12 * n0``)
    and the trajectory's ``blow_up`` records that time.
    """
    if ceiling is None:
        ceiling = 1e12 * params.n0

    def f(n):
        if n < 0:
            raise NumericalError(f"size went negative ({n:g}); step too large")
        return params.rate(n)

    return _rk4(f, params.n0, t_end, dt, ceiling=ceiling)


def city_asymptote(params: CityGrowthParams) -> float:
    """Stable size ``(a/b)^(1/(1-gamma))`` for sublinear growth."""
    if params.gamma >= 1:
        raise NoFiniteAsymptoteError(f"gamma={params.gamma} >= 1 has no stable asymptote")
    return (params.a / params.b) ** (1.0 / (1.0 - params.gamma))


@dataclass(frozen=True)
class RegressionResult:
    """Ordinary least squares fit of ``y = intercept + slope * x``.

    ``p_value`` is the two-sided t-test of a zero slope on ``n - 2`` degrees
    of freedom. It is ``None`` for exact fits, where the slope standard error
    is zero and the statistic is undefined.
    """

    slope: float
    intercept: float
    r_squared: float
    slope_stderr: float
    p_value: Optional[float]
    n_points: int

    @property
    def exact(self) -> bool:
        return self.p_value is None


def linear_fit(x: Sequence[float], y: Sequence[float]) -> RegressionResult:
    """OLS of ``y`` on ``x`` with slope significance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-d arrays of equal length")
    n = x.size
    if n < 3:
        raise InsufficientDataError(f"need at least 3 points, got {n}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("non-finite coordinate")
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx <= 1e-300 or np.ptp(x) <= 1e-14 * max(1.0, float(np.max(np.abs(x)))):
        raise DegenerateFitError("predictor has zero variance")
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    resid = dy - slope * dx
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    rounding = n * (64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(y))))) ** 2
    if ss_res <= max(_PERFECT_FIT_RTOL * ss_tot, rounding):
        return RegressionResult(slope, intercept, 1.0, 0.0, None, n)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    r2 = min(1.0, max(0.0, r2))
    stderr = math.sqrt(ss_res / (n - 2) / sxx)
    tstat = slope / stderr
    p = float(2.0 * stats.t.sf(abs(tstat), n - 2))
    return RegressionResult(slope, intercept, r2, stderr, min(1.0, max(0.0, p)), n)


def loglog_fit(x: Sequence[float], y: Sequence[float]) -> RegressionResult:
    """Fit ``ln y = intercept + slope * ln x``; the slope is the exponent."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise InsufficientDataError(f"need at least 3 points, got {x.size}")
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise DomainError("log-log fit requires strictly positive coordinates")
    return linear_fit(np.log(x), np.log(y))


def interaction_count(n: int, directed: bool = False) -> int:
    """Potential pairwise interactions among ``n`` nodes."""
    if n < 1:
        raise DomainError("n must be at least 1")
    pairs = n * (n - 1)
    return pairs if directed else pairs // 2
