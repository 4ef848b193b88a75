"""Lattices with long-range contacts and greedy message routing.

Every node keeps its lattice neighbours and ``k(n)`` long-range contacts
drawn with probability proportional to ``d ** -r``, where ``d`` is lattice
distance. Greedy routing forwards to whichever neighbour is closest to the
target. With a constant number of contacts and ``r`` equal to the lattice
dimension, delivery takes on the order of ``(ln n)^2`` hops; growing the
out-degree as ``c (ln n)^2`` brings it down to order ``ln n``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from radarlab.errors import ConfigurationError, DegenerateFitError, DomainError
from radarlab.scaling import RegressionResult, linear_fit

TOPOLOGIES = ("ring", "torus")


@dataclass(frozen=True)
class Constant:
    k: int

    def resolve(self, n: int) -> int:
        return int(self.k)

    def __str__(self):
        return f"constant({self.k})"


@dataclass(frozen=True)
class LogN:
    c: float

    def resolve(self, n: int) -> int:
        return max(1, math.ceil(self.c * math.log(n)))

    def __str__(self):
        return f"logn({self.c:g})"


@dataclass(frozen=True)
class LogSquared:
    c: float

    def resolve(self, n: int) -> int:
        return max(1, math.ceil(self.c * math.log(n) ** 2))

    def __str__(self):
        return f"logsquared({self.c:g})"


def parse_policy(text: str):
    """``constant(1)``, ``logn(2)``, ``logsquared(1)`` to a policy object."""
    name, _, rest = text.strip().lower().partition("(")
    try:
        value = float(rest.rstrip(")")) if rest else 1.0
    except ValueError:
        raise ConfigurationError(f"bad degree policy {text!r}") from None
    if name == "constant":
        return Constant(int(value))
    if name == "logn":
        return LogN(value)
    if name in ("logsquared", "log2", "logsq"):
        return LogSquared(value)
    raise ConfigurationError(f"unknown degree policy {text!r}")


def _side(topology: str, n: int) -> int:
    if topology == "ring":
        return n
    side = math.isqrt(n)
    if side * side != n:
        raise ConfigurationError(f"torus needs a perfect-square n, got {n}")
    return side


def lattice_distance(topology: str, n: int, u, v):
    """Ring or torus Manhattan distance; broadcasts over arrays."""
    u = np.asarray(u)
    v = np.asarray(v)
    if topology == "ring":
        d = np.abs(u - v)
        return np.minimum(d, n - d)
    side = _side(topology, n)
    dx = np.abs(u % side - v % side)
    dy = np.abs(u // side - v // side)
    return np.minimum(dx, side - dx) + np.minimum(dy, side - dy)


def offset_distribution(topology: str, n: int, r_exponent: float):
    """Non-zero node offsets and their sampling probabilities ``∝ d^-r``.

    Both lattices are vertex-transitive, so one offset table serves every node.
    """
    offsets = np.arange(1, n)
    d = lattice_distance(topology, n, 0, offsets).astype(float)
    w = d ** (-float(r_exponent))
    return offsets, w / w.sum()


def _apply_offset(topology: str, n: int, nodes, offsets):
    if topology == "ring":
        return (nodes + offsets) % n
    side = _side(topology, n)
    x = (nodes % side + offsets % side) % side
    y = (nodes // side + offsets // side) % side
    return y * side + x


def sample_long_targets(topology: str, n: int, node: int, size: int, r_exponent: float, rng) -> np.ndarray:
    """Independent long-range targets for ``node`` (with replacement)."""
    offsets, p = offset_distribution(topology, n, r_exponent)
    picks = offsets[rng.choice(offsets.size, size=size, p=p)]
    return _apply_offset(topology, n, np.full(size, node), picks)


@dataclass
class LatticeGraph:
    topology: str
    n: int
    long_links: np.ndarray  # shape (n, k)
    r_exponent: float
    policy: object = None

    @property
    def k(self) -> int:
        return self.long_links.shape[1]

    @property
    def side(self) -> int:
        return _side(self.topology, self.n)

    @property
    def diameter(self) -> int:
        if self.topology == "ring":
            return self.n // 2
        return 2 * (self.side // 2)

    def local_neighbors(self, u: int) -> np.ndarray:
        if self.topology == "ring":
            return np.array([(u - 1) % self.n, (u + 1) % self.n])
        s = self.side
        x, y = u % s, u // s
        return np.array([y * s + (x + 1) % s, y * s + (x - 1) % s, ((y + 1) % s) * s + x, ((y - 1) % s) * s + x])

    def distance(self, u, v):
        return lattice_distance(self.topology, self.n, u, v)


def build_graph(
    topology: str,
    n: int,
    policy,
    r_exponent: Optional[float] = None,
    rng_seed: int = 0,
) -> LatticeGraph:
    """Lattice plus exactly ``policy.resolve(n)`` distinct long-range contacts per node.

    ``r_exponent`` defaults to the lattice dimension. Duplicate draws within a
    node's contact list are redrawn until all are distinct.
    """
    if topology not in TOPOLOGIES:
        raise ConfigurationError(f"unknown topology {topology!r}")
    if n < 9:
        raise ConfigurationError("n must be at least 9")
    _side(topology, n)
    if r_exponent is None:
        r_exponent = 1.0 if topology == "ring" else 2.0
    k = policy.resolve(n)
    if not 1 <= k <= n - 1:
        raise ConfigurationError(f"out-degree {k} impossible for n={n}")
    rng = np.random.default_rng(rng_seed)
    offsets, p = offset_distribution(topology, n, r_exponent)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0

    def draw(size):
        return offsets[np.searchsorted(cdf, rng.random(size), side="right")]

    off = draw(n * k).reshape(n, k)
    while True:
        off.sort(axis=1)
        dup = np.zeros_like(off, dtype=bool)
        dup[:, 1:] = off[:, 1:] == off[:, :-1]
        count = int(dup.sum())
        if count == 0:
            break
        off[dup] = draw(count)
    nodes = np.arange(n)[:, None]
    links = _apply_offset(topology, n, nodes, off)
    return LatticeGraph(topology, n, links.astype(np.int64), float(r_exponent), policy)


@dataclass(frozen=True)
class RouteResult:
    hops: int
    delivered: bool
    path_length_bound_hit: bool
    path: tuple = ()


def greedy_route(
    graph: LatticeGraph,
    source: int,
    target: int,
    hop_cap: Optional[int] = None,
    record_path: bool = False,
) -> RouteResult:
    """Forward to the neighbour nearest the target; ties go to the smallest id.

    ``hop_cap`` defaults to the lattice diameter, which always suffices.
    """
    if hop_cap is None:
        hop_cap = graph.diameter
    if hop_cap < 0:
        raise DomainError("hop_cap must be non-negative")
    n = graph.n
    if not (0 <= source < n and 0 <= target < n):
        raise DomainError("source and target must be nodes of the graph")
    cur, hops = int(source), 0
    path = [cur] if record_path else None
    while cur != target:
        if hops >= hop_cap:
            return RouteResult(hops, False, True, tuple(path or ()))
        cand = np.concatenate([graph.local_neighbors(cur), graph.long_links[cur]])
        d = graph.distance(cand, target)
        best = d.min()
        cur = int(cand[d == best].min())
        hops += 1
        if record_path:
            path.append(cur)
    return RouteResult(hops, True, False, tuple(path or ()))


@dataclass
class DeliveryScaling:
    sizes: List[int]
    degrees: List[int]
    mean_hops: np.ndarray
    stderr: np.ndarray
    trials: int
    fit_log: RegressionResult  # hops against ln n
    fit_log2: RegressionResult  # hops against (ln n)^2
    hops: List[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def prefers_log(self) -> bool:
        return self.fit_log.r_squared > self.fit_log2.r_squared


def route_pairs(graph: LatticeGraph, trials: int, rng) -> np.ndarray:
    """Hop counts for ``trials`` random distinct source/target pairs."""
    out = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        s, t = rng.choice(graph.n, size=2, replace=False)
        res = greedy_route(graph, int(s), int(t), hop_cap=graph.diameter)
        if not res.delivered:
            raise AssertionError("greedy routing failed on a connected lattice")
        out[i] = res.hops
    return out


def delivery_scaling(
    topology: str,
    sizes: Sequence[int],
    policy,
    r_exponent: Optional[float] = None,
    trials: int = 200,
    rng_seed: int = 0,
) -> DeliveryScaling:
    """Mean greedy hops per size, fitted against ``ln n`` and ``(ln n)^2``.

    Graph and pair streams depend only on ``rng_seed`` and the size index,
    so two policies run with one seed route the same pairs.
    """
    if len(sizes) < 3:
        raise DegenerateFitError("need at least 3 sizes to compare fits")
    if trials < 200:
        raise ConfigurationError("need at least 200 trials per size")
    means, errs, degrees, all_hops = [], [], [], []
    for i, n in enumerate(sizes):
        g = build_graph(topology, n, policy, r_exponent, rng_seed=rng_seed + i)
        hops = route_pairs(g, trials, np.random.default_rng([rng_seed, i, 1]))
        all_hops.append(hops)
        degrees.append(g.k)
        means.append(hops.mean())
        errs.append(hops.std(ddof=1) / math.sqrt(trials))
    ln = np.log(np.asarray(sizes, dtype=float))
    means = np.asarray(means)
    return DeliveryScaling(
        sizes=list(sizes),
        degrees=degrees,
        mean_hops=means,
        stderr=np.asarray(errs),
        trials=trials,
        fit_log=linear_fit(ln, means),
        fit_log2=linear_fit(ln**2, means),
        hops=all_hops,
    )


RESULTS_HEADER = ("n", "policy", "k", "mean_hops", "stderr", "trials", "seed")


def write_results_csv(results: Sequence[DeliveryScaling], policies: Sequence[str], seed: int, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULTS_HEADER)
        for res, pol in zip(results, policies):
            for n, k, m, e in zip(res.sizes, res.degrees, res.mean_hops, res.stderr):
                w.writerow([n, pol, k, repr(float(m)), repr(float(e)), res.trials, seed])
    return path
