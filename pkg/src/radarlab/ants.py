"""Central-place foraging with pheromone recruitment.

Ants leave the nest when recent returns reach an activation threshold (or,
rarely, on their own), wander over a 4-neighbour grid choosing cells with
probability proportional to ``tau ** alpha``, pick up one seed on entering a
pile and walk straight home, marking every cell they leave. Pheromone decays
once per tick after all ants have moved.

Random draws per ant and tick, in iteration order, come from one
``random.Random`` stream:

* an ant at the nest whose gate is closed draws once for the base leave
  probability;
* every move over the neighbourhood draws once to pick a neighbour.
"""

from __future__ import annotations

import csv
import enum
import math
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from radarlab.errors import ConfigurationError, DegenerateFitError, DomainError
from radarlab.scaling import RegressionResult, loglog_fit

Cell = Tuple[int, int]


def transition_probs(tau: Sequence[float], alpha: float) -> List[float]:
    """Probability of stepping to each neighbour, ``tau_j^alpha / sum_k tau_k^alpha``.

    Uses ``0**0 == 1``; when every weight is zero the result is uniform.
    Weights are normalized by the largest ``tau`` first so large ``alpha``
    cannot overflow.
    """
    k = len(tau)
    if k == 0:
        raise DomainError("no neighbours to choose from")
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    top = 0.0
    for t in tau:
        if not t >= 0:
            raise DomainError(f"pheromone must be non-negative, got {t}")
        if t > top:
            top = t
    if alpha == 0 or top == 0:
        return [1.0 / k] * k
    w = [(t / top) ** alpha for t in tau]
    s = math.fsum(w)
    return [x / s for x in w]


def activation_gate(recent_return_rate: float, theta: float) -> bool:
    """Foragers are activated when returns arrive at least as fast as ``theta``."""
    if recent_return_rate < 0:
        raise DomainError("return rate must be non-negative")
    return recent_return_rate >= theta


@dataclass
class World:
    """Rectangular grid with a nest and seed piles.

    ``seed_piles`` pairs a cell with its initial seed count. On a torus the
    edges wrap; otherwise moves off the grid are unavailable.
    """

    width: int
    height: int
    nest: Cell
    seed_piles: List[Tuple[Cell, int]] = field(default_factory=list)
    torus: bool = True

    def __post_init__(self):
        if self.width < 3 or self.height < 3:
            raise ConfigurationError("grid must be at least 3x3")
        self.nest = tuple(self.nest)
        if not self.in_bounds(self.nest):
            raise ConfigurationError(f"nest {self.nest} outside the grid")
        piles = []
        for cell, count in self.seed_piles:
            cell = tuple(cell)
            if not self.in_bounds(cell):
                raise ConfigurationError(f"pile {cell} outside the grid")
            if count < 0:
                raise ConfigurationError("pile counts must be non-negative")
            if cell == self.nest:
                raise ConfigurationError("a pile cannot sit on the nest")
            piles.append((cell, int(count)))
        self.seed_piles = piles

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    @property
    def total_seeds(self) -> int:
        return sum(c for _, c in self.seed_piles)

    def neighbors(self, cell: Cell) -> List[Cell]:
        """East, west, north, south, in that order."""
        x, y = cell
        if self.torus:
            w, h = self.width, self.height
            return [((x + 1) % w, y), ((x - 1) % w, y), (x, (y + 1) % h), (x, (y - 1) % h)]
        out = []
        for c in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if 0 <= c[0] < self.width and 0 <= c[1] < self.height:
                out.append(c)
        return out

    def _offset(self, a: int, b: int, size: int) -> int:
        d = b - a
        if self.torus:
            d %= size
            if d > size // 2:
                d -= size
        return d

    def distance_to_nest(self, cell: Cell) -> int:
        return abs(self._offset(cell[0], self.nest[0], self.width)) + abs(
            self._offset(cell[1], self.nest[1], self.height)
        )

    def step_toward_nest(self, cell: Cell) -> Cell:
        """One move along the shortest path home, closing the x gap first."""
        x, y = cell
        dx = self._offset(x, self.nest[0], self.width)
        if dx:
            x += 1 if dx > 0 else -1
            return (x % self.width, y) if self.torus else (x, y)
        dy = self._offset(y, self.nest[1], self.height)
        if dy:
            y += 1 if dy > 0 else -1
            return (x, y % self.height) if self.torus else (x, y)
        return cell


@dataclass
class PheromoneField:
    """Pheromone level per cell, indexed ``tau[x, y]``."""

    tau: np.ndarray
    decay_lambda: float = 0.01
    deposit_q: float = 1.0

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=float)
        if not 0 <= self.decay_lambda <= 1:
            raise ConfigurationError("decay_lambda must lie in [0, 1]")
        if not self.deposit_q > 0:
            raise ConfigurationError("deposit_q must be positive")
        if np.any(self.tau < 0):
            raise ConfigurationError("pheromone must be non-negative")

    @classmethod
    def empty(cls, world: World, decay_lambda: float = 0.01, deposit_q: float = 1.0) -> "PheromoneField":
        return cls(np.zeros((world.width, world.height)), decay_lambda, deposit_q)


def decay_field(pher: PheromoneField) -> PheromoneField:
    """Evaporate a fixed fraction of every cell, in place."""
    if pher.decay_lambda:
        pher.tau *= 1.0 - pher.decay_lambda
    return pher


def deposit(pher: PheromoneField, path: Sequence[Cell]) -> PheromoneField:
    """Add ``deposit_q`` to each cell of ``path`` (repeats add again), in place."""
    w, h = pher.tau.shape
    for x, y in path:
        if not (0 <= x < w and 0 <= y < h):
            raise DomainError(f"cell {(x, y)} outside the field")
    for x, y in path:
        pher.tau[x, y] += pher.deposit_q
    return pher


class AntState(enum.Enum):
    AT_NEST = "AtNest"
    EXPLORING = "Exploring"
    FOLLOWING_TRAIL = "FollowingTrail"
    RETURNING = "ReturningWithFood"


@dataclass
class Ant:
    state: AntState
    position: Cell
    alpha: float
    source: Optional[int] = None  # pile index of the seed being carried

    @property
    def carrying(self) -> bool:
        return self.state is AntState.RETURNING


# alpha distributions expose sample(n, rng) -> list of per-ant exponents


@dataclass(frozen=True)
class ConstantAlpha:
    value: float

    def sample(self, n: int, rng: random.Random) -> List[float]:
        return [self.value] * n


@dataclass(frozen=True)
class UniformAlpha:
    lo: float
    hi: float

    def sample(self, n: int, rng: random.Random) -> List[float]:
        return [rng.uniform(self.lo, self.hi) for _ in range(n)]


@dataclass(frozen=True)
class TwoPointAlpha:
    """``fraction`` of the ants get ``alpha1``, the rest ``alpha2``."""

    alpha1: float
    alpha2: float
    fraction: float

    def sample(self, n: int, rng: random.Random) -> List[float]:
        k = round(self.fraction * n)
        return [self.alpha1] * k + [self.alpha2] * (n - k)


@dataclass(frozen=True)
class ColonyConfig:
    """Colony parameters.

    ``epsilon`` mixes a uniform choice into every move, ``base_leave_prob``
    lets ants leave a closed nest, and the activation rate is the number of
    returns over the last ``return_window`` ticks divided by the window.
    """

    n_ants: int
    alpha: object = ConstantAlpha(1.0)
    activation_threshold: float = 0.0
    rng_seed: int = 0
    max_ticks: int = 1000
    epsilon: float = 0.1
    base_leave_prob: float = 0.01
    return_window: int = 50

    def __post_init__(self):
        if self.n_ants < 1:
            raise ConfigurationError("n_ants must be at least 1")
        if self.activation_threshold < 0:
            raise ConfigurationError("activation threshold must be non-negative")
        if not 0 <= self.epsilon <= 1 or not 0 <= self.base_leave_prob <= 1:
            raise ConfigurationError("epsilon and base_leave_prob are probabilities")
        if self.max_ticks < 0 or self.return_window < 1:
            raise ConfigurationError("bad tick counts")
        if isinstance(self.alpha, (int, float)):
            object.__setattr__(self, "alpha", ConstantAlpha(float(self.alpha)))


@dataclass
class ForagingStats:
    n_ants: int
    ticks: int
    seeds_collected: int
    ticks_transporting: int
    ticks_searching: int
    trips_by_pile: List[int]
    first_delivery_tick: Optional[int] = None
    trace: List[tuple] = field(default_factory=list, repr=False)

    @property
    def per_capita_rate(self) -> float:
        if self.ticks == 0:
            return 0.0
        return self.seeds_collected / (self.n_ants * self.ticks)

    @property
    def dominant_share(self) -> float:
        """Fraction of delivered seeds that came from the busiest pile."""
        total = sum(self.trips_by_pile)
        return max(self.trips_by_pile) / total if total else 0.0


class Colony:
    """Mutable simulation state; :func:`run_colony` drives it."""

    def __init__(self, world: World, pher: PheromoneField, config: ColonyConfig):
        if pher.tau.shape != (world.width, world.height):
            raise ConfigurationError("pheromone grid does not match the world")
        self.world = world
        self.pher = pher
        self.config = config
        self.rng = random.Random(config.rng_seed)
        alphas = config.alpha.sample(config.n_ants, self.rng)
        self.ants = [Ant(AntState.AT_NEST, world.nest, a) for a in alphas]
        self._nbrs = {
            (x, y): world.neighbors((x, y)) for x in range(world.width) for y in range(world.height)
        }
        self.pile_at = {cell: i for i, (cell, _) in enumerate(world.seed_piles)}
        self.remaining = [c for _, c in world.seed_piles]
        self.placed = world.total_seeds
        self.tick_count = 0
        self.window = deque([0] * config.return_window, maxlen=config.return_window)
        self.window_sum = 0
        self.collected = 0
        self.trips_by_pile = [0] * len(world.seed_piles)
        self.ticks_transporting = 0
        self.ticks_searching = 0
        self.first_delivery_tick = None
        self._returns_this_tick = 0

    @property
    def return_rate(self) -> float:
        return self.window_sum / self.config.return_window

    @property
    def in_transit(self) -> int:
        return sum(1 for a in self.ants if a.state is AntState.RETURNING)

    @property
    def ants_out(self) -> int:
        return sum(1 for a in self.ants if a.state is not AntState.AT_NEST)

    def step_ant(self, ant: Ant, gate_open: bool) -> None:
        """Advance one ant by one tick."""
        st = ant.state
        if st is AntState.RETURNING:
            self.ticks_transporting += 1
            x, y = ant.position
            self.pher.tau[x, y] += self.pher.deposit_q
            ant.position = self.world.step_toward_nest(ant.position)
            if ant.position == self.world.nest:
                self._deliver(ant)
            return
        if st is AntState.AT_NEST:
            if not gate_open and not self.rng.random() < self.config.base_leave_prob:
                return
            ant.state = AntState.EXPLORING
        elif st not in (AntState.EXPLORING, AntState.FOLLOWING_TRAIL):
            raise AssertionError(f"inconsistent ant state {st}")
        self.ticks_searching += 1
        self._move(ant)

    def _move(self, ant: Ant) -> None:
        nbrs = self._nbrs[ant.position]
        item = self.pher.tau.item
        levels = [item(c) for c in nbrs]
        top = max(levels)
        k = len(nbrs)
        alpha = ant.alpha
        # inline of transition_probs: levels are already known to be >= 0
        if alpha == 0 or top == 0:
            weights = [1.0] * k
        else:
            weights = [(t / top) ** alpha for t in levels]
        total = sum(weights)
        eps = self.config.epsilon
        # sample from (1 - eps) * w / total + eps / k with a single draw
        scale = (1.0 - eps) / total
        u = eps / k
        r = self.rng.random()
        acc = 0.0
        choice = nbrs[-1]
        for cell, w in zip(nbrs, weights):
            acc += w * scale + u
            if r < acc:
                choice = cell
                break
        ant.position = choice
        ant.state = AntState.FOLLOWING_TRAIL if top > 0 else AntState.EXPLORING
        pile = self.pile_at.get(choice)
        if pile is not None and self.remaining[pile] > 0:
            self.remaining[pile] -= 1
            ant.source = pile
            ant.state = AntState.RETURNING

    def _deliver(self, ant: Ant) -> None:
        self.collected += 1
        self._returns_this_tick += 1
        self.trips_by_pile[ant.source] += 1
        if self.first_delivery_tick is None:
            self.first_delivery_tick = self.tick_count + 1
        ant.source = None
        ant.state = AntState.AT_NEST

    def tick(self) -> tuple:
        """All ants step in fixed order, then the field decays once."""
        gate = activation_gate(self.return_rate, self.config.activation_threshold)
        self._returns_this_tick = 0
        for ant in self.ants:
            self.step_ant(ant, gate)
        decay_field(self.pher)
        self.window_sum += self._returns_this_tick - self.window[0]
        self.window.append(self._returns_this_tick)
        self.tick_count += 1
        return (self.tick_count, self.ants_out, self._returns_this_tick, float(self.pher.tau.sum()))

    def stats(self, trace=()) -> ForagingStats:
        return ForagingStats(
            n_ants=self.config.n_ants,
            ticks=self.tick_count,
            seeds_collected=self.collected,
            ticks_transporting=self.ticks_transporting,
            ticks_searching=self.ticks_searching,
            trips_by_pile=list(self.trips_by_pile),
            first_delivery_tick=self.first_delivery_tick,
            trace=list(trace),
        )


def run_colony(
    world: World,
    config: ColonyConfig,
    decay_lambda: float = 0.01,
    deposit_q: float = 1.0,
    trace: bool = False,
) -> ForagingStats:
    """Run ``config.max_ticks`` synchronous ticks on a fresh, empty field."""
    colony = Colony(world, PheromoneField.empty(world, decay_lambda, deposit_q), config)
    rows = []
    for _ in range(config.max_ticks):
        row = colony.tick()
        if trace:
            rows.append(row)
    return colony.stats(rows)


# ---------------------------------------------------------------------------
# World families and per-capita scaling
# ---------------------------------------------------------------------------


def clustered_world(
    n_ants: int,
    size: int = 41,
    n_piles: int = 4,
    radius: int = 10,
    seeds_per_ant: int = 4,
) -> World:
    """Torus with ``n_piles`` piles evenly around the nest.

    Total seeds scale with colony size so every colony gets the same ration
    per ant.
    """
    c = size // 2
    total = seeds_per_ant * n_ants
    piles = []
    for i in range(n_piles):
        ang = 2 * math.pi * (i + 0.5) / n_piles
        cell = (c + round(radius * math.cos(ang)), c + round(radius * math.sin(ang)))
        piles.append((cell, total // n_piles + (1 if i < total % n_piles else 0)))
    return World(size, size, (c, c), piles, torus=True)


def dispersed_world(
    n_ants: int,
    size: int = 41,
    n_sites: int = 100,
    seeds_per_ant: int = 4,
    layout_seed: int = 12345,
) -> World:
    """Torus with seeds scattered over ``n_sites`` random cells.

    The site layout depends only on ``layout_seed`` and ``size``, so colonies
    of different sizes search the same landscape; only the seeds per site
    grow with the colony.
    """
    rng = random.Random(layout_seed)
    c = size // 2
    cells = [(x, y) for x in range(size) for y in range(size) if (x, y) != (c, c)]
    chosen = rng.sample(cells, min(n_sites, len(cells)))
    total = seeds_per_ant * n_ants
    k = len(chosen)
    piles = [(cell, total // k + (1 if i < total % k else 0)) for i, cell in enumerate(chosen)]
    return World(size, size, (c, c), piles, torus=True)


def two_pile_world(size: int = 21, distance: int = 5, seeds_per_pile: int = 1000) -> World:
    """Bounded grid with two identical piles on opposite sides of the nest."""
    c = size // 2
    piles = [((c - distance, c), seeds_per_pile), ((c + distance, c), seeds_per_pile)]
    return World(size, size, (c, c), piles, torus=False)


@dataclass
class PerCapitaScaling:
    sizes: List[int]
    rates: List[List[float]]  # per size, one rate per replicate
    fit: RegressionResult
    rows: List[tuple] = field(default_factory=list, repr=False)


def per_capita_scaling(
    world_family: Callable[[int], World],
    config_family: Callable[[int, int], ColonyConfig],
    sizes: Sequence[int],
    replicates: int = 20,
    decay_lambda: float = 0.01,
    deposit_q: float = 1.0,
) -> PerCapitaScaling:
    """Slope of ln(per-capita rate) against ln(colony size).

    ``config_family(n, replicate)`` builds the config, including its seed.
    Every replicate enters the regression as its own point.
    """
    if len(sizes) < 3:
        raise ConfigurationError("need at least 3 colony sizes")
    if replicates < 20:
        raise ConfigurationError("need at least 20 replicates per size")
    if len(set(sizes)) < 2:
        raise DegenerateFitError("all colony sizes are equal; slope undefined")
    xs, ys, rates, rows = [], [], [], []
    for n in sizes:
        per_size = []
        for rep in range(replicates):
            cfg = config_family(n, rep)
            st = run_colony(world_family(n), cfg, decay_lambda, deposit_q)
            per_size.append(st.per_capita_rate)
            rows.append(
                (n, rep, st.seeds_collected, st.per_capita_rate, st.ticks_transporting, st.ticks_searching, cfg.rng_seed)
            )
            xs.append(n)
            ys.append(st.per_capita_rate)
        rates.append(per_size)
    if min(ys) <= 0:
        raise ConfigurationError("a colony collected nothing; per-capita rate is zero")
    return PerCapitaScaling(list(sizes), rates, loglog_fit(xs, ys), rows)


STATS_HEADER = ("n_ants", "replicate", "seeds_collected", "per_capita_rate", "ticks_transporting", "ticks_searching", "seed")
TRACE_HEADER = ("tick", "ants_out", "returns", "total_pheromone")


def write_stats_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(STATS_HEADER)
        for n, rep, seeds, rate, tt, ts, seed in rows:
            w.writerow([n, rep, seeds, repr(float(rate)), tt, ts, seed])
    return path


def write_trace_csv(trace, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for tick, out, ret, total in trace:
            w.writerow([tick, out, ret, repr(float(total))])
    return path
