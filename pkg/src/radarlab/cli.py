"""Command-line frontend: ``radarlab <subcommand> [options]``.

Exit codes: 0 success (every expectation passed), 1 an expectation failed,
2 usage or configuration error, 3 I/O, numerical or insufficient-data failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from radarlab import ants, experiments, immune, scaling, smallworld
from radarlab.errors import (
    ConfigurationError,
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    NumericalError,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse prints usage and calls sys.exit(2); raise instead so main() owns the exit
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# default parameter trees for the direct simulation subcommands
SIM_DEFAULTS = {
    "immune-optimize": {"A": 1.0, "B": 1.0, "M": 1e4, "tissue_constant": 1.0},
    "immune-des": {
        "M": 1e4,
        "V": 8.0,
        "crawl_speed": 1.0,
        "rho": 1.0,
        "kappa": 1.0,
        "eta": 1.0,
        "inoculum": 1e5,
        "doubling_rate": 2.0,
        "replicates": 30,
    },
    "ants-run": {
        "layout": "clustered",
        "n_ants": 32,
        "size": 41,
        "n_piles": 4,
        "radius": 10,
        "n_sites": 100,
        "seeds_per_ant": 4,
        "distance": 5,
        "seeds_per_pile": 1000,
        "max_ticks": 1000,
        "alpha": 2.0,
        "theta": 0.0,
        "epsilon": 0.1,
        "decay_lambda": 0.01,
        "deposit_q": 1.0,
    },
    "smallworld-run": {
        "topology": "torus",
        "sizes": [1024, 4096, 16384],
        "policy": "logsquared(1)",
        "r_exponent": "auto",
        "trials": 200,
    },
    "growth-run": {
        "model": "metabolic",
        "a": 1.0,
        "b": 0.5,
        "p": 0.75,
        "m0": 1.0,
        "gamma": 1.2,
        "n0": 10.0,
        "t_end": 200.0,
        "dt": 0.01,
    },
}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None, help="seed base (overrides the config)")
    p.add_argument("--out", default=None, help="output directory (default $RADAR_OUT or ./out)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--config", default=None, help="JSON file with a parameter tree")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radarlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("list", help="list registered experiments")
    _common(p)
    p = sub.add_parser("run", help="run a registered experiment")
    p.add_argument("experiment")
    _common(p)

    p = sub.add_parser("immune", help="immune architecture tools")
    isub = p.add_subparsers(dest="action", parser_class=_Parser)
    isub.required = True
    _common(isub.add_parser("optimize", help="optimal node volume and count for one M"))
    _common(isub.add_parser("des", help="replicated event simulation at fixed M and V"))

    for name, helptext in (("ants", "one colony run"), ("smallworld", "greedy delivery sweep"), ("growth", "integrate a growth law")):
        p = sub.add_parser(name, help=helptext)
        s = p.add_subparsers(dest="action", parser_class=_Parser)
        s.required = True
        _common(s.add_parser("run"))

    p = sub.add_parser("fit", help="log-log least squares on two CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", default=None, help="x column (default: first)")
    p.add_argument("--y", default=None, help="y column (default: second)")
    p.add_argument("--linear", action="store_true", help="fit y against x without logs")
    _common(p)
    return parser


def parse_overrides(items: List[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = value
    return out


def load_config(path: Optional[str]) -> Optional[dict]:
    if path is None:
        return None
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a JSON object")
    return data


def output_root(args) -> Path:
    return Path(args.out or os.environ.get("RADAR_OUT") or "out")


def _effective(defaults: dict, args) -> dict:
    params = defaults
    cfg = load_config(args.config)
    if cfg is not None:
        params = experiments.apply_overrides(params, experiments.flatten(cfg))
    return experiments.apply_overrides(params, parse_overrides(args.overrides))


def _echo(params: dict, args, seed: int):
    if args.verbose:
        print(json.dumps({"seed": seed, "parameters": params}, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_list(args) -> int:
    for name, desc in experiments.list_experiments():
        print(f"{name}\t{desc}")
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        spec = experiments.get_experiment(args.experiment)
    except KeyError as exc:
        raise ConfigurationError(str(exc.args[0])) from None
    params = _effective(spec.parameters, args)
    seed = spec.seed_base if args.seed is None else args.seed
    _echo(params, args, seed)
    report = experiments.run_experiment(spec.name, output_dir=output_root(args), seed=seed, parameters=params)
    sys.stdout.write(report.text())
    print(f"{spec.name}: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAILED


def _outdir(args, name: str) -> Path:
    out = output_root(args) / name
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_immune_optimize(args) -> int:
    p = _effective(SIM_DEFAULTS["immune-optimize"], args)
    seed = args.seed or 0
    _echo(p, args, seed)
    opt = immune.optimize_architecture(immune.ArchitectureConstants(p["A"], p["B"]), p["M"], p["tissue_constant"])
    t = opt.times
    out = _outdir(args, "immune-optimize")
    immune.write_runs_csv([(p["M"], opt.V_star, opt.N_star, t.t_detect, t.t_comm, t.t_total, seed)], out / "architecture.csv")
    print(f"V_star {opt.V_star!r}\nN_star {opt.N_star!r}")
    print(f"t_detect {t.t_detect!r}\nt_comm {t.t_comm!r}\nt_total {t.t_total!r}")
    return EXIT_OK


def cmd_immune_des(args) -> int:
    p = _effective(SIM_DEFAULTS["immune-des"], args)
    seed = args.seed or 0
    _echo(p, args, seed)
    cfg = immune.ImmuneSimConfig(
        M=p["M"],
        V=p["V"],
        crawl_speed=p["crawl_speed"],
        rho=p["rho"],
        kappa=p["kappa"],
        eta=p["eta"],
        inoculum=p["inoculum"],
        doubling_rate=p["doubling_rate"],
    )
    if p["replicates"] < 1:
        raise ConfigurationError("replicates must be at least 1")
    runs = immune.run_replicates(cfg, p["replicates"], seed)
    out = _outdir(args, "immune-des")
    immune.write_runs_csv(immune.run_rows(cfg, runs, seed, 1.0), out / "runs.csv")
    print(f"mean_detection {float(np.mean([r.detection_time for r in runs]))!r}")
    print(f"mean_recruitment {float(np.mean([r.recruitment_time for r in runs]))!r}")
    print(f"mean_total {float(np.mean([r.total_time for r in runs]))!r}")
    return EXIT_OK


def cmd_ants_run(args) -> int:
    p = _effective(SIM_DEFAULTS["ants-run"], args)
    seed = args.seed or 0
    _echo(p, args, seed)
    n = p["n_ants"]
    if p["layout"] == "two-pile":
        world = ants.two_pile_world(p["size"], p["distance"], p["seeds_per_pile"])
    else:
        world = experiments.world_family(p)(n)
    cfg = ants.ColonyConfig(
        n,
        alpha=p["alpha"],
        activation_threshold=p["theta"],
        rng_seed=seed,
        max_ticks=p["max_ticks"],
        epsilon=p["epsilon"],
    )
    st = ants.run_colony(world, cfg, p["decay_lambda"], p["deposit_q"], trace=True)
    out = _outdir(args, "ants-run")
    ants.write_trace_csv(st.trace, out / "trace.csv")
    ants.write_stats_csv(
        [(n, 0, st.seeds_collected, st.per_capita_rate, st.ticks_transporting, st.ticks_searching, seed)],
        out / "stats.csv",
    )
    print(f"seeds_collected {st.seeds_collected}\nper_capita_rate {st.per_capita_rate!r}")
    print(f"dominant_share {st.dominant_share!r}")
    return EXIT_OK


def cmd_smallworld_run(args) -> int:
    p = _effective(SIM_DEFAULTS["smallworld-run"], args)
    seed = args.seed or 0
    _echo(p, args, seed)
    r = p["r_exponent"]
    if r == "auto":
        r = None
    else:
        try:
            r = float(r)
        except (TypeError, ValueError):
            raise ConfigurationError(f"r_exponent must be a number or 'auto', got {r!r}") from None
    policy = smallworld.parse_policy(p["policy"])
    res = smallworld.delivery_scaling(p["topology"], [int(n) for n in p["sizes"]], policy, r, p["trials"], seed)
    out = _outdir(args, "smallworld-run")
    smallworld.write_results_csv([res], [str(policy)], seed, out / "results.csv")
    for n, k, m in zip(res.sizes, res.degrees, res.mean_hops):
        print(f"n {n} k {k} mean_hops {float(m)!r}")
    print(f"r2_vs_ln_n {res.fit_log.r_squared!r}\nr2_vs_ln_n_squared {res.fit_log2.r_squared!r}")
    return EXIT_OK


def cmd_growth_run(args) -> int:
    p = _effective(SIM_DEFAULTS["growth-run"], args)
    seed = args.seed or 0
    _echo(p, args, seed)
    out = _outdir(args, "growth-run")
    if p["model"] == "metabolic":
        g = scaling.GrowthParams(p["a"], p["b"], p["p"], p["m0"])
        traj = scaling.integrate_growth(g, p["t_end"], p["dt"])
        print(f"asymptote {scaling.asymptotic_mass(g)!r}")
    elif p["model"] == "city":
        traj = scaling.city_growth(scaling.CityGrowthParams(p["a"], p["b"], p["gamma"], p["n0"]), p["t_end"], p["dt"])
        print(f"blow_up {traj.blow_up!r}")
    else:
        raise ConfigurationError(f"unknown growth model {p['model']!r}")
    traj.to_csv(out / "trajectory.csv")
    print(f"final {float(traj.value[-1])!r}")
    return EXIT_OK


def _column(header, name, default_index):
    if name is None:
        if len(header) <= default_index:
            raise InsufficientDataError("CSV needs at least two columns")
        return default_index
    if name in header:
        return header.index(name)
    raise ConfigurationError(f"no column {name!r} in {header}")


def cmd_fit(args) -> int:
    with open(args.csv, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InsufficientDataError(f"{args.csv} is empty")
    header, body = rows[0], [r for r in rows[1:] if r]
    ix, iy = _column(header, args.x, 0), _column(header, args.y, 1)
    try:
        x = np.array([float(r[ix]) for r in body])
        y = np.array([float(r[iy]) for r in body])
    except (ValueError, IndexError):
        raise InsufficientDataError(f"{args.csv} has non-numeric or missing cells") from None
    if x.size < 3:
        raise InsufficientDataError(f"{args.csv} has {x.size} data row(s); a fit needs at least 3")
    fit = scaling.linear_fit(x, y) if args.linear else scaling.loglog_fit(x, y)
    print(f"slope {fit.slope!r}\nintercept {fit.intercept!r}\nr_squared {fit.r_squared!r}")
    print(f"slope_stderr {fit.slope_stderr!r}\np_value {fit.p_value!r}\nn_points {fit.n_points}")
    return EXIT_OK


COMMANDS = {
    ("list", None): cmd_list,
    ("run", None): cmd_run,
    ("immune", "optimize"): cmd_immune_optimize,
    ("immune", "des"): cmd_immune_des,
    ("ants", "run"): cmd_ants_run,
    ("smallworld", "run"): cmd_smallworld_run,
    ("growth", "run"): cmd_growth_run,
    ("fit", None): cmd_fit,
}


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    handler = COMMANDS[(args.command, getattr(args, "action", None))]
    try:
        return handler(args)
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InsufficientDataError, DegenerateFitError) as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, NumericalError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # contract: never uncaught
        print(f"unexpected error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
