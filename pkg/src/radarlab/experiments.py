"""Named, seeded experiments that write CSV data, SVG plots and a pass/fail report.

Each experiment lives in :data:`REGISTRY`. Its parameters form a nested
dict that callers may override by dotted path (``des.replicates=50``).
Expectation failures are recorded in the report rather than raised.

Output layout::

    <output_dir>/<experiment>/<data>.csv
    <output_dir>/<experiment>/<plot>.svg
    <output_dir>/<experiment>/report         one line per expectation
    <output_dir>/<experiment>/report.json   full report, timestamps included
"""

from __future__ import annotations

import copy
import csv
import datetime as _dt
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from radarlab import ants, immune, scaling, smallworld
from radarlab.errors import ConfigurationError
from radarlab.plotting import Axes, Series, emit_plot

PROVENANCE = ("paper", "derived", "property")


@dataclass(frozen=True)
class Expectation:
    """A target for one measured quantity.

    ``op`` is ``"approx"`` (``|measured - target| <= tolerance``), or one of
    ``">="``, ``"<="``, ``">"``, ``"<"`` against ``target`` shifted by ``tolerance``.
    """

    quantity: str
    target: float
    tolerance: float
    provenance: str
    op: str = "approx"

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ConfigurationError(f"untagged or unknown provenance {self.provenance!r}")
        if self.op not in ("approx", ">=", "<=", ">", "<"):
            raise ConfigurationError(f"unknown comparison {self.op!r}")

    def check(self, measured: float) -> bool:
        if measured is None or (isinstance(measured, float) and math.isnan(measured)):
            return False
        if self.op == ">=":
            return measured >= self.target - self.tolerance
        if self.op == "<=":
            return measured <= self.target + self.tolerance
        if self.op == ">":
            return measured > self.target - self.tolerance
        if self.op == "<":
            return measured < self.target + self.tolerance
        return abs(measured - self.target) <= self.tolerance


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    description: str
    parameters: dict
    expected: tuple
    seed_base: int
    runner: Callable = field(repr=False, compare=False)


@dataclass
class Outcome:
    quantity: str
    measured: float
    target: float
    tolerance: float
    op: str
    provenance: str
    passed: bool

    def line(self) -> str:
        return f"{self.quantity} {self.measured!r} {self.target!r} {self.tolerance!r} {'pass' if self.passed else 'FAIL'}"


@dataclass
class ExperimentReport:
    name: str
    started: str
    finished: str
    seed: int
    parameters: dict
    outcomes: List[Outcome]
    files: List[str]

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        d = json.loads(text)
        d["outcomes"] = [Outcome(**o) for o in d["outcomes"]]
        return cls(**d)

    def text(self) -> str:
        return "".join(o.line() + "\n" for o in self.outcomes)


# ---------------------------------------------------------------------------
# parameter overrides
# ---------------------------------------------------------------------------


def _coerce(raw, current, key: str):
    if not isinstance(raw, str):
        value = raw
    elif isinstance(current, bool):
        low = raw.strip().lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigurationError(f"{key} expects a boolean, got {raw!r}")
        return low in ("true", "1", "yes")
    elif isinstance(current, int):
        try:
            value = int(raw)
        except ValueError:
            try:
                f = float(raw)
            except ValueError:
                raise ConfigurationError(f"{key} expects an integer, got {raw!r}") from None
            if not f.is_integer():
                raise ConfigurationError(f"{key} expects an integer, got {raw!r}")
            value = int(f)
    elif isinstance(current, float):
        try:
            value = float(raw)
        except ValueError:
            raise ConfigurationError(f"{key} expects a number, got {raw!r}") from None
    elif isinstance(current, list):
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            raise ConfigurationError(f"{key} expects a JSON list, got {raw!r}") from None
    else:
        value = raw
    if isinstance(current, bool) != isinstance(value, bool):
        raise ConfigurationError(f"{key}: type mismatch")
    if isinstance(current, (int, float)) and not isinstance(current, bool):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigurationError(f"{key} expects a number")
        if isinstance(current, float):
            value = float(value)
        elif not float(value).is_integer():
            raise ConfigurationError(f"{key} expects an integer")
        else:
            value = int(value)
    if isinstance(current, list) and not isinstance(value, list):
        raise ConfigurationError(f"{key} expects a list")
    if isinstance(current, dict):
        raise ConfigurationError(f"{key} names a group, not a value")
    return value


def apply_overrides(params: dict, overrides: Optional[Mapping[str, object]]) -> dict:
    """Copy ``params`` with dotted-path overrides applied; unknown keys are errors."""
    out = copy.deepcopy(params)
    for key, raw in (overrides or {}).items():
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            if not isinstance(node.get(p), dict):
                raise ConfigurationError(f"unknown parameter {key!r}")
            node = node[p]
        leaf = parts[-1]
        if leaf not in node:
            raise ConfigurationError(f"unknown parameter {key!r}")
        node[leaf] = _coerce(raw, node[leaf], key)
    return out


def flatten(params: dict, prefix: str = "") -> Dict[str, object]:
    flat = {}
    for k, v in params.items():
        path = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(flatten(v, path + "."))
        else:
            flat[path] = v
    return flat


# ---------------------------------------------------------------------------
# runners: (params, seed, outdir) -> (measured values, written files)
# ---------------------------------------------------------------------------


def _write_rows(path: Path, header, rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return path


def _geomspace(lo, hi, points):
    return [float(v) for v in np.geomspace(lo, hi, int(points))]


def run_growth(p: dict, seed: int, out: Path):
    g = scaling.GrowthParams(p["a"], p["b"], p["p"], p["m0"])
    M = scaling.asymptotic_mass(g)
    traj = scaling.integrate_growth(g, p["t_end"], p["dt"])
    files = [traj.to_csv(out / "growth.csv")]
    measured = {"final_mass": float(traj.value[-1])}
    if g.p == 0.75:
        ts = scaling.growth_time_scale(g)
        check = scaling.integrate_growth(g, p["t_end"], p["oracle_dt_fraction"] * ts)
        idx = np.linspace(0, len(check.t) - 1, 100).astype(int)
        exact = scaling.growth_analytic(g, check.t[idx])
        measured["max_rel_error_vs_closed_form"] = float(np.max(np.abs(check.value[idx] - exact) / exact))
    emit_plot(
        [Series("m(t)", traj.t[1:], traj.value[1:], fit=False)],
        Axes("t", "mass", f"growth toward M = {M:.6g}"),
        out / "growth.svg",
    )
    files.append(out / "growth.svg")
    return measured, files, {"asymptote": M}


def _growth_expected(p):
    M = (p["a"] / p["b"]) ** (1.0 / (1.0 - p["p"]))
    return [
        Expectation("final_mass", M, 1e-3 * M, "paper"),
        Expectation("max_rel_error_vs_closed_form", 0.0, 1e-6, "derived", "<="),
    ]


def run_city(p: dict, seed: int, out: Path):
    c = scaling.CityGrowthParams(p["a"], p["b"], p["gamma"], p["n0"])
    coarse = scaling.city_growth(c, p["t_end"], p["dt"])
    fine = scaling.city_growth(c, p["t_end"], p["dt"] / p["refinement"])
    files = [coarse.to_csv(out / "city.csv")]
    measured = {}
    if coarse.blow_up is not None and fine.blow_up is not None:
        measured["blow_up_time"] = coarse.blow_up
        measured["blow_up_refinement_rel_change"] = abs(coarse.blow_up - fine.blow_up) / fine.blow_up
    else:
        measured["blow_up_time"] = float("nan")
        measured["blow_up_refinement_rel_change"] = float("nan")
    finite = np.isfinite(coarse.value)
    emit_plot(
        [Series("n(t)", coarse.t[finite][1:], coarse.value[finite][1:], fit=False)],
        Axes("t", "size", "superlinear city growth"),
        out / "city.svg",
    )
    files.append(out / "city.svg")
    return measured, files, {}


def _city_expected(p):
    return [Expectation("blow_up_refinement_rel_change", 0.0, 0.01, "derived", "<=")]


def run_immune_exponents(p: dict, seed: int, out: Path):
    consts = immune.ArchitectureConstants(p["A"], p["B"])
    Ms = _geomspace(p["M_min"], p["M_max"], p["points"])
    s = immune.scaling_exponents(consts, Ms, p["tissue_constant"])
    rows = [
        (o.architecture.M, o.V_star, o.N_star, o.times.t_detect, o.times.t_comm, o.times.t_total, seed)
        for o in s.optima
    ]
    files = [
        immune.write_runs_csv(rows, out / "architecture.csv"),
        immune.write_scaling_report({"V_star": s.volume, "N_star": s.count, "t_total": s.total}, out / "scaling.csv"),
    ]
    emit_plot(
        [
            Series("V*", Ms, [o.V_star for o in s.optima]),
            Series("N*", Ms, [o.N_star for o in s.optima]),
            Series("t_total", Ms, [o.times.t_total for o in s.optima]),
        ],
        Axes("M", "optimum", "optimal semi-modular architecture"),
        out / "exponents.svg",
    )
    files.append(out / "exponents.svg")
    ratios = [o.times.t_detect / o.times.t_comm for o in s.optima]
    root_err = max(abs(o.V_star - o.stationarity_root) / o.stationarity_root for o in s.optima)
    measured = {
        "slope_T": s.total.slope,
        "slope_V": s.volume.slope,
        "slope_N": s.count.slope,
        "slope_V_plus_slope_N": s.volume.slope + s.count.slope,
        "detect_comm_ratio_spread": max(ratios) - min(ratios),
        "max_rel_gap_to_stationarity_root": root_err,
    }
    return measured, files, {"detect_comm_ratio": ratios[0]}


def _immune_exponents_expected(p):
    return [
        Expectation("slope_T", 1 / 7, 1e-6, "paper"),
        Expectation("slope_V_plus_slope_N", 1.0, 1e-9, "property"),
        Expectation("slope_V", immune.VOLUME_EXPONENT, 1e-6, "derived"),
        Expectation("slope_N", immune.COUNT_EXPONENT, 1e-6, "derived"),
        Expectation("max_rel_gap_to_stationarity_root", 0.0, 1e-9, "derived", "<="),
        Expectation("detect_comm_ratio_spread", 0.0, 1e-9, "property", "<="),
    ]


def _sim_config(p: dict, **kw) -> immune.ImmuneSimConfig:
    return immune.ImmuneSimConfig(
        M=kw.get("M", 1.0),
        V=kw.get("V", 1.0),
        crawl_speed=p["crawl_speed"],
        rho=p["rho"],
        kappa=kw.get("kappa", p["kappa"]),
        eta=p["eta"],
        inoculum=p["inoculum"],
        doubling_rate=p["doubling_rate"],
        rng_seed=kw.get("rng_seed", 0),
    )


def run_immune_des(p: dict, seed: int, out: Path):
    tmpl = _sim_config(p)
    consts = immune.consts_from_config(tmpl)
    Ms = _geomspace(p["M_min"], p["M_max"], p["points"])
    by_M = immune.des_scaling(consts, tmpl, Ms, p["replicates"], seed_base=seed)
    vs = p["volume_sweep"]
    vtmpl = _sim_config(p, M=vs["M"], kappa=vs["kappa"])
    by_V = immune.des_volume_sweep(vtmpl, _geomspace(vs["V_min"], vs["V_max"], vs["points"]), p["replicates"], seed)
    det = p["detection_check"]
    dcfg = _sim_config(p, M=1.0, V=det["V"], kappa=1.0)
    draws = np.array([immune.des_run(dcfg.replace(rng_seed=seed + i)).detection_time for i in range(det["draws"])])
    mean_ratio = float(draws.mean() / (0.75 * dcfg.radius / dcfg.crawl_speed))

    files = [
        immune.write_runs_csv(by_M.rows, out / "runs_by_M.csv"),
        immune.write_runs_csv(by_V.rows, out / "runs_by_V.csv"),
        immune.write_scaling_report(
            {
                "t_detect_vs_M": by_M.detection,
                "t_comm_vs_M": by_M.recruitment,
                "t_total_vs_M": by_M.total,
                "t_detect_vs_V": by_V.detection,
                "t_comm_vs_V": by_V.recruitment,
            },
            out / "scaling.csv",
        ),
    ]
    emit_plot(
        [
            Series("mean t_detect", Ms, by_M.mean_detection),
            Series("mean t_comm", Ms, by_M.mean_recruitment),
            Series("mean t_total", Ms, by_M.mean_total),
        ],
        Axes("M", "simulated time", "simulated response time at optimal V"),
        out / "des_by_M.svg",
    )
    emit_plot(
        [Series("mean t_detect", by_V.x, by_V.mean_detection), Series("mean t_comm", by_V.x, by_V.mean_recruitment)],
        Axes("V", "simulated time", f"simulated times at M = {vs['M']:g}"),
        out / "des_by_V.svg",
    )
    files += [out / "des_by_M.svg", out / "des_by_V.svg"]
    measured = {
        "detection_slope_vs_V": by_V.detection.slope,
        "recruitment_slope_vs_V": by_V.recruitment.slope,
        "total_slope_vs_M": by_M.total.slope,
        "mean_detection_over_three_quarter_radius": mean_ratio,
    }
    return measured, files, {}


def _immune_des_expected(p):
    return [
        Expectation("detection_slope_vs_V", 1 / 3, 0.05, "derived"),
        Expectation("recruitment_slope_vs_V", -2.0, 0.1, "derived"),
        Expectation("total_slope_vs_M", 1 / 7, 0.05, "paper"),
        Expectation("mean_detection_over_three_quarter_radius", 1.0, 0.01, "derived"),
    ]


def world_family(p: dict):
    if p["layout"] == "clustered":
        return lambda n: ants.clustered_world(n, p["size"], p["n_piles"], p["radius"], p["seeds_per_ant"])
    if p["layout"] == "dispersed":
        return lambda n: ants.dispersed_world(n, p["size"], p["n_sites"], p["seeds_per_ant"])
    raise ConfigurationError(f"unknown layout {p['layout']!r}")


def run_ant_percapita(p: dict, seed: int, out: Path):
    def config_family(n, rep):
        return ants.ColonyConfig(
            n,
            alpha=p["alpha"],
            activation_threshold=p["theta"],
            rng_seed=seed + 1000 * n + rep,
            max_ticks=p["max_ticks"],
            epsilon=p["epsilon"],
        )

    res = ants.per_capita_scaling(
        world_family(p), config_family, p["sizes"], p["replicates"], p["decay_lambda"], p["deposit_q"]
    )
    files = [ants.write_stats_csv(res.rows, out / "stats.csv")]
    means = [float(np.mean(r)) for r in res.rates]
    emit_plot(
        [Series("mean per-capita rate", res.sizes, means)],
        Axes("colony size", "seeds / (ant tick)", "per-capita foraging rate"),
        out / "percapita.svg",
    )
    files.append(out / "percapita.svg")
    return {"percapita_slope": res.fit.slope}, files, {"slope_stderr": res.fit.slope_stderr}


def _ant_percapita_expected(p):
    return [Expectation("percapita_slope", 0.0, p["slope_tolerance"], "property")]


def run_ant_symmetry(p: dict, seed: int, out: Path):
    world = ants.two_pile_world(p["size"], p["distance"], p["seeds_per_pile"])
    rows, shares = [], []
    for i in range(p["runs"]):
        cfg = ants.ColonyConfig(
            p["n_ants"], alpha=p["alpha"], rng_seed=seed + i, max_ticks=p["max_ticks"], epsilon=p["epsilon"]
        )
        st = ants.run_colony(world, cfg, p["decay_lambda"], p["deposit_q"])
        shares.append(st.dominant_share)
        rows.append((i, st.trips_by_pile[0], st.trips_by_pile[1], st.dominant_share, seed + i))
    files = [_write_rows(out / "runs.csv", ("run", "trips_pile0", "trips_pile1", "dominant_share", "seed"), rows)]
    hist, edges = np.histogram(shares, bins=10, range=(0.5, 1.0))
    centers = 0.5 * (edges[1:] + edges[:-1])
    emit_plot(
        [Series("runs", centers, hist + 0.0, fit=False)],
        Axes("dominant pile share", "runs", "trail concentration", loglog=False),
        out / "shares.svg",
    )
    files.append(out / "shares.svg")
    frac = float(np.mean(np.array(shares) >= p["concentration"]))
    return {"fraction_concentrated": frac}, files, {}


def _ant_symmetry_expected(p):
    return [Expectation("fraction_concentrated", p["min_fraction"], 0.0, "derived", ">=")]


def run_smallworld(p: dict, seed: int, out: Path):
    sizes = [int(2**e) for e in p["size_exponents"]]
    dense_pol = smallworld.parse_policy(p["dense_policy"])
    sparse_pol = smallworld.parse_policy(p["sparse_policy"])
    r = p["r_exponent"]
    dense = smallworld.delivery_scaling(p["topology"], sizes, dense_pol, r, p["trials"], seed)
    sparse = smallworld.delivery_scaling(p["topology"], sizes, sparse_pol, r, p["trials"], seed)
    files = [
        smallworld.write_results_csv([dense, sparse], [str(dense_pol), str(sparse_pol)], seed, out / "results.csv")
    ]
    emit_plot(
        [Series(str(dense_pol), sizes, dense.mean_hops, fit=False), Series(str(sparse_pol), sizes, sparse.mean_hops, fit=False)],
        Axes("n", "mean greedy hops", "greedy delivery"),
        out / "hops.svg",
    )
    files.append(out / "hops.svg")
    pn = int(2 ** p["paired_exponent"])
    dg = smallworld.build_graph(p["topology"], pn, dense_pol, r, rng_seed=seed)
    sg = smallworld.build_graph(p["topology"], pn, sparse_pol, r, rng_seed=seed)
    dh = smallworld.route_pairs(dg, p["paired_trials"], np.random.default_rng([seed, 99]))
    sh = smallworld.route_pairs(sg, p["paired_trials"], np.random.default_rng([seed, 99]))
    measured = {
        "dense_r2_log_minus_log2": dense.fit_log.r_squared - dense.fit_log2.r_squared,
        "dense_r2_log": dense.fit_log.r_squared,
        "sparse_r2_log2_minus_log": sparse.fit_log2.r_squared - sparse.fit_log.r_squared,
        "sparse_r2_log2": sparse.fit_log2.r_squared,
        "paired_mean_hops_gap": float(sh.mean() - dh.mean()),
    }
    return measured, files, {}


def _smallworld_expected(p):
    return [
        Expectation("dense_r2_log_minus_log2", 0.0, 0.0, "derived", ">"),
        Expectation("dense_r2_log", 0.95, 0.0, "derived", ">="),
        Expectation("sparse_r2_log2_minus_log", 0.0, 0.0, "derived", ">"),
        Expectation("sparse_r2_log2", 0.95, 0.0, "derived", ">="),
        Expectation("paired_mean_hops_gap", 0.0, 0.0, "property", ">"),
    ]


_IMMUNE_SIM = {
    "crawl_speed": 1.0,
    "rho": 1.0,
    "kappa": 1000.0,
    "eta": 1.0,
    "inoculum": 1e5,
    "doubling_rate": 2.0,
}


@dataclass(frozen=True)
class _Entry:
    description: str
    parameters: dict
    expected: Callable
    runner: Callable
    seed_base: int = 0


_ENTRIES: Dict[str, _Entry] = {
    "growth-asymptote": _Entry(
        "RK4 growth toward (a/b)^(1/(1-p)) checked against the closed form",
        {"a": 1.0, "b": 0.5, "p": 0.75, "m0": 1.0, "t_end": 200.0, "dt": 0.01, "oracle_dt_fraction": 1e-3},
        _growth_expected,
        run_growth,
    ),
    "city-blowup": _Entry(
        "finite-time blow-up of superlinear city growth, stable under step refinement",
        {"a": 1.0, "b": 0.1, "gamma": 1.2, "n0": 10.0, "t_end": 10.0, "dt": 1e-3, "refinement": 10},
        _city_expected,
        run_city,
    ),
    "immune-exponents": _Entry(
        "optimal lymph-node volume, count and response time against system size",
        {"A": 1.0, "B": 1.0, "M_min": 1.0, "M_max": 1e6, "points": 7, "tissue_constant": 1.0},
        _immune_exponents_expected,
        run_immune_exponents,
    ),
    "immune-des": _Entry(
        "event simulation of detect-then-recruit reproducing the closed-form slopes",
        {
            **_IMMUNE_SIM,
            "M_min": 1.0,
            "M_max": 1e6,
            "points": 7,
            "replicates": 30,
            "volume_sweep": {"M": 1e4, "kappa": 1.0, "V_min": 1.0, "V_max": 64.0, "points": 7},
            "detection_check": {"V": 8.0, "draws": 100_000},
        },
        _immune_des_expected,
        run_immune_des,
    ),
    "ant-percapita": _Entry(
        "per-capita foraging rate against colony size with pheromone recruitment",
        {
            "layout": "clustered",
            "size": 41,
            "n_piles": 4,
            "radius": 10,
            "n_sites": 100,
            "seeds_per_ant": 4,
            "sizes": [8, 32, 128, 512],
            "replicates": 20,
            "max_ticks": 1000,
            "alpha": 2.0,
            "theta": 0.0,
            "epsilon": 0.1,
            "decay_lambda": 0.01,
            "deposit_q": 1.0,
            "slope_tolerance": 0.15,
        },
        _ant_percapita_expected,
        run_ant_percapita,
    ),
    "ant-symmetry": _Entry(
        "two equidistant piles: recruitment concentrates traffic on one",
        {
            "size": 21,
            "distance": 5,
            "seeds_per_pile": 1000,
            "n_ants": 20,
            "runs": 200,
            "max_ticks": 500,
            "alpha": 2.0,
            "epsilon": 0.1,
            "decay_lambda": 0.01,
            "deposit_q": 1.0,
            "concentration": 0.8,
            "min_fraction": 0.7,
        },
        _ant_symmetry_expected,
        run_ant_symmetry,
    ),
    "smallworld-densify": _Entry(
        "greedy routing hops: (ln n)^2 contacts per node against a single contact",
        {
            "topology": "torus",
            "r_exponent": 2.0,
            "size_exponents": [10, 12, 14, 16],
            "dense_policy": "logsquared(1)",
            "sparse_policy": "constant(1)",
            "trials": 1000,
            "paired_exponent": 14,
            "paired_trials": 1000,
        },
        _smallworld_expected,
        run_smallworld,
    ),
}


def _spec(name: str, entry: _Entry) -> ExperimentSpec:
    return ExperimentSpec(
        name=name,
        description=entry.description,
        parameters=copy.deepcopy(entry.parameters),
        expected=tuple(entry.expected(entry.parameters)),
        seed_base=entry.seed_base,
        runner=entry.runner,
    )


REGISTRY: Dict[str, ExperimentSpec] = {name: _spec(name, e) for name, e in sorted(_ENTRIES.items())}


def list_experiments() -> List[tuple]:
    """``(name, description)`` pairs in alphabetical order."""
    return [(name, REGISTRY[name].description) for name in sorted(REGISTRY)]


def get_experiment(name: str) -> ExperimentSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown experiment {name!r}") from None


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def run_experiment(
    name: str,
    overrides: Optional[Mapping[str, object]] = None,
    output_dir="out",
    seed: Optional[int] = None,
    parameters: Optional[dict] = None,
) -> ExperimentReport:
    """Run one experiment and write its data, plots and report.

    ``parameters`` replaces the registered parameter tree wholesale (after
    validation against it); ``overrides`` are applied on top.
    """
    spec = get_experiment(name)
    params = spec.parameters
    if parameters is not None:
        params = apply_overrides(params, flatten(parameters))
    params = apply_overrides(params, overrides)
    seed = spec.seed_base if seed is None else int(seed)
    expected = _ENTRIES[name].expected(params)

    out = Path(output_dir) / name
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    measured, files, _extra = spec.runner(params, seed, out)
    outcomes = []
    for e in expected:
        m = measured.get(e.quantity, float("nan"))
        outcomes.append(Outcome(e.quantity, float(m), e.target, e.tolerance, e.op, e.provenance, e.check(m)))
    report = ExperimentReport(
        name=name,
        started=started,
        finished=_now(),
        seed=seed,
        parameters=params,
        outcomes=outcomes,
        files=[str(Path(f)) for f in files],
    )
    (out / "report").write_text(report.text())
    (out / "report.json").write_text(report.to_json())
    return report
