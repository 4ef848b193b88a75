"""Semi-modular immune search: lymph-node sizing and detect-then-recruit simulation.

Detection time grows with the radius of a node's draining region,
``t_detect = A V^(1/3)``. Recruitment has to pool responders from
``kappa M / (rho V)`` nodes through a port whose rate grows with ``V``, so
``t_comm = B M / V^2``. Minimizing the sum over ``V`` gives

    V* = (6 B M / A)^(3/7),   N* = M / V*,   t_total(V*) = 7/6 A V*^(1/3)

which makes both terms, and their sum, grow as ``M^(1/7)``. At the optimum the
detection term is always six times the communication term.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from radarlab.errors import ConfigurationError, DomainError, NumericalError
from radarlab.scaling import RegressionResult, loglog_fit

# Exponents of the optimal architecture, from the stationarity condition above.
VOLUME_EXPONENT = 3.0 / 7.0
COUNT_EXPONENT = 4.0 / 7.0
TIME_EXPONENT = 1.0 / 7.0
DETECT_TO_COMM_RATIO = 6.0

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ArchitectureConstants:
    """Proportionality constants of the detection and communication times."""

    A: float
    B: float

    def __post_init__(self):
        if not (self.A > 0 and self.B > 0):
            raise DomainError("A and B must be positive")


@dataclass(frozen=True)
class Architecture:
    M: float
    V_LN: float
    N: float


@dataclass(frozen=True)
class TimeBreakdown:
    t_detect: float
    t_comm: float

    @property
    def t_total(self) -> float:
        return self.t_detect + self.t_comm


def _positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")


def detection_time(consts: ArchitectureConstants, V: float) -> float:
    _positive(V=V)
    return consts.A * V ** (1.0 / 3.0)


def comm_lymphnodes(M: float, V: float, rho: float, kappa: float = 1.0) -> float:
    """Number of nodes whose resident responders must be pooled, ``kappa M / (rho V)``."""
    _positive(M=M, V=V, rho=rho, kappa=kappa)
    return kappa * M / (rho * V)


def communication_time(consts: ArchitectureConstants, M: float, V: float) -> float:
    _positive(M=M, V=V)
    return consts.B * M / V**2


def total_time(consts: ArchitectureConstants, M: float, V: float) -> TimeBreakdown:
    return TimeBreakdown(detection_time(consts, V), communication_time(consts, M, V))


def analytic_optimal_volume(consts: ArchitectureConstants, M: float) -> float:
    """Root of ``A/3 V^(-2/3) - 2 B M V^(-3) = 0``."""
    _positive(M=M)
    return (6.0 * consts.B * M / consts.A) ** VOLUME_EXPONENT


def golden_section(
    diff: Callable[[float, float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 500,
) -> float:
    """Minimize a unimodal function on ``[lo, hi]`` by golden-section search.

    ``diff(u, v)`` must return ``f(u) - f(v)``. Passing the difference instead
    of ``f`` lets the caller evaluate it without cancellation, which is what
    allows convergence well below ``sqrt(eps)`` near a flat minimum.
    """
    if not hi > lo:
        raise DomainError("empty bracket")
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if diff(x1, x2) < 0:
            hi, x2 = x2, x1
            x1 = hi - _GOLDEN * (hi - lo)
        else:
            lo, x1 = x1, x2
            x2 = lo + _GOLDEN * (hi - lo)
    return 0.5 * (lo + hi)


def _bracket(diff: Callable[[float, float], float], center: float, step: float = 1.0):
    """Expand ``[a, c]`` around ``center`` until an interior point beats both ends."""
    a, b, c = center - step, center, center + step
    for _ in range(200):
        if diff(a, b) <= 0:
            c, b = b, a
            a = b - 2.0 * (c - b)
        elif diff(c, b) <= 0:
            a, b = b, c
            c = b + 2.0 * (b - a)
        else:
            return a, c
    raise NumericalError("could not bracket the minimum")


def _log_objective_diff(consts: ArchitectureConstants, M: float):
    """``g(u) - g(v)`` for ``g(u) = A e^(u/3) + B M e^(-2u)``, with ``u = ln V``."""
    A, BM = consts.A, consts.B * M

    def diff(u, v):
        d = u - v
        return A * math.exp(v / 3.0) * math.expm1(d / 3.0) + BM * math.exp(-2.0 * v) * math.expm1(-2.0 * d)

    return diff


@dataclass(frozen=True)
class OptimalArchitecture:
    architecture: Architecture
    times: TimeBreakdown
    stationarity_root: float

    @property
    def V_star(self) -> float:
        return self.architecture.V_LN

    @property
    def N_star(self) -> float:
        return self.architecture.N


def optimize_architecture(
    consts: ArchitectureConstants,
    M: float,
    tissue_constant: float = 1.0,
    rtol: float = 1e-9,
) -> OptimalArchitecture:
    """Node volume minimizing ``t_detect + t_comm`` for a system of size ``M``.

    Golden-section search on ``ln V`` finds the minimum; the closed-form
    stationarity root is computed independently and the two must agree to
    ``rtol``. ``N* = tissue_constant * M / V*``.
    """
    _positive(M=M, tissue_constant=tissue_constant)
    diff = _log_objective_diff(consts, M)
    # start from the crossover of the two terms; any positive guess works
    guess = 0.5 * math.log(consts.B * M / consts.A)
    lo, hi = _bracket(diff, guess)
    V = math.exp(golden_section(diff, lo, hi, tol=min(rtol, 1e-9) * 1e-3))
    root = analytic_optimal_volume(consts, M)
    if abs(V - root) > rtol * root:
        raise NumericalError(f"golden-section minimum {V!r} disagrees with stationarity root {root!r}")
    arch = Architecture(M=M, V_LN=V, N=tissue_constant * M / V)
    return OptimalArchitecture(arch, total_time(consts, M, V), root)


@dataclass(frozen=True)
class ScalingExponents:
    volume: RegressionResult
    count: RegressionResult
    total: RegressionResult
    optima: tuple = ()


def scaling_exponents(
    consts: ArchitectureConstants,
    M_values: Sequence[float],
    tissue_constant: float = 1.0,
) -> ScalingExponents:
    """Log-log slopes of ``V*``, ``N*`` and ``t_total(V*)`` against ``M``."""
    M_values = [float(m) for m in M_values]
    if len(set(M_values)) < 3:
        raise ConfigurationError("need at least 3 distinct M values")
    optima = [optimize_architecture(consts, M, tissue_constant) for M in M_values]
    return ScalingExponents(
        volume=loglog_fit(M_values, [o.V_star for o in optima]),
        count=loglog_fit(M_values, [o.N_star for o in optima]),
        total=loglog_fit(M_values, [o.times.t_total for o in optima]),
        optima=tuple(optima),
    )


# ---------------------------------------------------------------------------
# Discrete-event simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImmuneSimConfig:
    """One infection in one draining region.

    ``rho`` is resident responders per unit node volume, ``kappa`` the
    responders required per unit ``M`` and ``eta`` the per-volume rate at
    which remote nodes are contacted. ``inoculum`` and ``doubling_rate`` are
    carried for reporting only.
    """

    M: float
    V: float
    crawl_speed: float = 1.0
    rho: float = 1.0
    kappa: float = 1.0
    eta: float = 1.0
    inoculum: float = 1e5
    doubling_rate: float = 2.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("M", "V", "crawl_speed", "rho", "kappa", "eta", "inoculum", "doubling_rate"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.demand < 1:
            raise ConfigurationError(f"responder demand kappa*M={self.demand} is below 1")

    @property
    def demand(self) -> float:
        return self.kappa * self.M

    @property
    def resident(self) -> float:
        return self.rho * self.V

    @property
    def radius(self) -> float:
        return (3.0 * self.V / (4.0 * math.pi)) ** (1.0 / 3.0)

    def replace(self, **changes) -> "ImmuneSimConfig":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class SimOutcome:
    detection_time: float
    recruitment_time: float
    remote_modules_contacted: int
    responders_activated: float
    events: tuple = field(default=(), repr=False)

    @property
    def total_time(self) -> float:
        return self.detection_time + self.recruitment_time


def consts_from_config(config: ImmuneSimConfig) -> ArchitectureConstants:
    """Closed-form constants that the simulation reproduces on average.

    Mean crawl distance from a uniform point in a ball of radius ``R`` is
    ``3R/4``; serial recruitment costs ``kappa M / (rho V)`` contacts of
    ``1/(eta V)`` each.
    """
    A = 0.75 * (3.0 / (4.0 * math.pi)) ** (1.0 / 3.0) / config.crawl_speed
    B = config.kappa / (config.rho * config.eta)
    return ArchitectureConstants(A, B)


def sample_carrier(config: ImmuneSimConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform point in the draining ball, centred on the node."""
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    return config.radius * rng.random() ** (1.0 / 3.0) * direction


def crawl_time(position, crawl_speed: float) -> float:
    """Straight-line crawl from ``position`` to the node at the origin."""
    return float(np.linalg.norm(position)) / crawl_speed


def des_run(
    config: ImmuneSimConfig,
    carrier: Optional[Sequence[float]] = None,
    record_events: bool = False,
) -> SimOutcome:
    """Simulate detection then serial recruitment for one infection.

    Events are processed from a time-ordered queue. The carrier's arrival at
    the node activates the ``rho V`` resident responders; each remote contact
    then takes ``1/(eta V)`` and adds another ``rho V`` until the demand
    ``kappa M`` is met. ``carrier`` fixes the start position instead of
    drawing it from the seeded generator.
    """
    rng = np.random.default_rng(config.rng_seed)
    pos = sample_carrier(config, rng) if carrier is None else np.asarray(carrier, dtype=float)
    if np.linalg.norm(pos) > config.radius * (1 + 1e-12):
        raise ConfigurationError("carrier lies outside the draining region")

    resident = config.resident
    demand = config.demand
    contact_time = 1.0 / (config.eta * config.V)
    queue: list = []
    seq = 0
    log = []

    def schedule(t, kind):
        nonlocal seq
        heapq.heappush(queue, (t, seq, kind))
        seq += 1

    schedule(crawl_time(pos, config.crawl_speed), "antigen_arrival")
    detected = None
    activated = 0.0
    contacts = 0
    done_at = None
    while queue:
        t, _, kind = heapq.heappop(queue)
        if record_events:
            log.append((t, kind))
        if kind == "antigen_arrival":
            detected = t
            activated = resident
        elif kind == "contact_complete":
            contacts += 1
            activated = resident * (contacts + 1)
        if activated >= demand * (1.0 - 1e-12):
            done_at = t
            break
        schedule(t + contact_time, "contact_complete")

    return SimOutcome(
        detection_time=detected,
        recruitment_time=done_at - detected,
        remote_modules_contacted=contacts,
        responders_activated=activated,
        events=tuple(log),
    )


def run_replicates(config: ImmuneSimConfig, replicates: int, seed_base: int = 0) -> list:
    """Independent runs with seeds ``seed_base + i``."""
    return [des_run(config.replace(rng_seed=seed_base + i)) for i in range(replicates)]


@dataclass
class DesScaling:
    """Mean simulated times per swept value and their log-log fits."""

    x: np.ndarray
    mean_detection: np.ndarray
    mean_recruitment: np.ndarray
    mean_total: np.ndarray
    detection: RegressionResult
    recruitment: RegressionResult
    total: RegressionResult
    rows: list = field(default_factory=list, repr=False)


def _summarize(x, runs_per_x, rows):
    det = np.array([np.mean([r.detection_time for r in runs]) for runs in runs_per_x])
    rec = np.array([np.mean([r.recruitment_time for r in runs]) for runs in runs_per_x])
    tot = det + rec
    x = np.asarray(x, dtype=float)
    return DesScaling(
        x=x,
        mean_detection=det,
        mean_recruitment=rec,
        mean_total=tot,
        detection=loglog_fit(x, det),
        recruitment=loglog_fit(x, rec),
        total=loglog_fit(x, tot),
        rows=rows,
    )


def run_rows(config, runs, seed_base, tissue_constant):
    N = tissue_constant * config.M / config.V
    return [
        (config.M, config.V, N, r.detection_time, r.recruitment_time, r.total_time, seed_base + i)
        for i, r in enumerate(runs)
    ]


def des_scaling(
    consts: ArchitectureConstants,
    config_template: ImmuneSimConfig,
    M_values: Sequence[float],
    replicates: int = 30,
    seed_base: int = 0,
    tissue_constant: float = 1.0,
) -> DesScaling:
    """Simulated times against ``M`` with ``V`` optimized per ``M`` under ``consts``.

    The same seeds are reused at every ``M`` so the sweep compares like with like.
    """
    if replicates < 30:
        raise ConfigurationError("des_scaling needs at least 30 replicates")
    runs_per_M, rows = [], []
    for M in M_values:
        V = optimize_architecture(consts, M, tissue_constant).V_star
        cfg = config_template.replace(M=float(M), V=V)
        runs = run_replicates(cfg, replicates, seed_base)
        runs_per_M.append(runs)
        rows.extend(run_rows(cfg, runs, seed_base, tissue_constant))
    return _summarize(M_values, runs_per_M, rows)


def des_volume_sweep(
    config_template: ImmuneSimConfig,
    V_values: Sequence[float],
    replicates: int = 30,
    seed_base: int = 0,
    tissue_constant: float = 1.0,
) -> DesScaling:
    """Simulated times against node volume at the template's fixed ``M``."""
    runs_per_V, rows = [], []
    for V in V_values:
        cfg = config_template.replace(V=float(V))
        runs = run_replicates(cfg, replicates, seed_base)
        runs_per_V.append(runs)
        rows.extend(run_rows(cfg, runs, seed_base, tissue_constant))
    return _summarize(V_values, runs_per_V, rows)


RUN_HEADER = ("M", "V", "N", "t_detect", "t_comm", "t_total", "seed")
REPORT_HEADER = ("quantity", "slope", "stderr", "r2", "p_value")


def write_runs_csv(rows: Iterable[tuple], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_HEADER)
        for row in rows:
            w.writerow([repr(float(v)) if i < 6 else int(v) for i, v in enumerate(row)])
    return path


def write_scaling_report(fits: dict, path) -> Path:
    """``fits`` maps a quantity name to its :class:`RegressionResult`."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(REPORT_HEADER)
        for name, fit in fits.items():
            p = "" if fit.p_value is None else repr(fit.p_value)
            w.writerow([name, repr(fit.slope), repr(fit.slope_stderr), repr(fit.r_squared), p])
    return path
