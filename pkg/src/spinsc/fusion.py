"""Target locating by fusing three range/bearing sensors on a 2-D grid.

Each sensor reports a distance and a bearing; the per-cell likelihoods are
Gaussian in the residuals, the exact posterior is their normalized product
(uniform prior), and the stochastic-computing estimate runs the same product
through quantized bitstream generators, a shared-generator switch matrix and
per-cell AND chains.  Accuracy is scored as KL(exact || estimate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .allocator import SwitchMatrix, allocate, size_array
from .logic import ScNetlist, GateKind, cluster_terminals, clusters_of, extract_conflict_sets
from .sbg import (
    DEFAULT_READ_ENERGY_NJ,
    DEFAULT_WRITE_DURATION_NS,
    CalibrationCache,
    SbgArraySpec,
    SbgMode,
    build_array,
    generate,
)
from .device import MtjParams
from .seeding import DOMAIN_READINGS, rng_for

CHANNELS = ("d1", "b1", "d2", "b2", "d3", "b3")

DEFAULT_PLANE = 64.0
DEFAULT_SENSORS = ((0.0, 0.0), (0.0, 32.0), (32.0, 0.0))
DEFAULT_SIGMA_B = 14.0626  # degrees


class ShapeMismatch(ValueError):
    """Posterior grids of different shapes were compared."""


@dataclass(frozen=True)
class SensorReading:
    mu_d: float  # distance, plane units
    mu_b: float  # bearing, degrees in [0, 360)

    def __post_init__(self) -> None:
        if self.mu_d < 0:
            raise ValueError("distance reading must be non-negative")
        if not 0.0 <= self.mu_b < 360.0:
            raise ValueError("bearing reading must lie in [0, 360)")


@dataclass(frozen=True)
class FusionProblem:
    grid_w: int = 32
    grid_h: int = 32
    plane: float = DEFAULT_PLANE
    sensors: tuple[tuple[float, float], ...] = DEFAULT_SENSORS
    readings: tuple[SensorReading, ...] = ()
    sigma_b: float = DEFAULT_SIGMA_B
    sigma_d_base: float = 5.0
    sigma_d_slope: float = 0.1   # sigma_d = base + slope * mu_d

    def __post_init__(self) -> None:
        if self.grid_w < 1 or self.grid_h < 1:
            raise ValueError("grid must be at least 1x1")
        if len(self.readings) != len(self.sensors):
            raise ValueError("one reading per sensor is required")

    @property
    def cell_scale(self) -> tuple[float, float]:
        return self.plane / self.grid_w, self.plane / self.grid_h

    def cell_position(self, x: int, y: int) -> tuple[float, float]:
        sx, sy = self.cell_scale
        return x * sx, y * sy

    def sigma_d(self, sensor_index: int) -> float:
        return self.sigma_d_base + self.sigma_d_slope * self.readings[sensor_index].mu_d


@dataclass
class PosteriorGrid:
    """Non-negative per-cell weights over the (W, H) grid."""

    weights: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2:
            raise ValueError("posterior weights must be a 2-D grid")
        if np.any(self.weights < 0):
            raise ValueError("posterior weights must be non-negative")

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape  # type: ignore[return-value]

    def total(self) -> float:
        return float(self.weights.sum())

    def normalize(self) -> "PosteriorGrid":
        total = self.total()
        if total <= 0.0:
            uniform = np.full_like(self.weights, 1.0 / self.weights.size)
            return PosteriorGrid(uniform, normalized=True)
        return PosteriorGrid(self.weights / total, normalized=True)

    def argmax(self) -> tuple[int, int]:
        """Peak cell; ties resolve to the lowest (x, y) lexicographically."""
        flat = int(np.argmax(np.ascontiguousarray(self.weights)))
        x, y = divmod(flat, self.weights.shape[1])
        return x, y


def bearing_deg(from_xy: tuple[float, float], to_xy: tuple[float, float]) -> float:
    """Viewing angle in degrees within [0, 360)."""
    angle = math.degrees(math.atan2(to_xy[1] - from_xy[1], to_xy[0] - from_xy[0]))
    return angle % 360.0


def angular_residual(a_deg: float, b_deg: float) -> float:
    """Minimal angular difference on [0, 180]; 359 vs 1 is 2, not 358."""
    diff = abs(a_deg - b_deg) % 360.0
    return min(diff, 360.0 - diff)


def gaussian_density(residual: float, sigma: float) -> float:
    return math.exp(-0.5 * (residual / sigma) ** 2) / (math.sqrt(2.0 * math.pi) * sigma)


def synthesize_readings(sensors: tuple[tuple[float, float], ...],
                        target_xy: tuple[float, float],
                        noise_d: float = 0.0, noise_b: float = 0.0,
                        master_seed: int = 0) -> tuple[SensorReading, ...]:
    """Readings a target at target_xy would produce, plus optional Gaussian
    measurement noise per channel (deterministic in master_seed)."""
    rng = rng_for(master_seed, DOMAIN_READINGS, 0)
    readings = []
    for sx, sy in sensors:
        d = math.hypot(target_xy[0] - sx, target_xy[1] - sy)
        b = bearing_deg((sx, sy), target_xy)
        if noise_d > 0.0:
            d = max(0.0, d + noise_d * rng.standard_normal())
        if noise_b > 0.0:
            b = (b + noise_b * rng.standard_normal()) % 360.0
        readings.append(SensorReading(mu_d=d, mu_b=b))
    return tuple(readings)


def make_problem(grid_w: int = 32, grid_h: int = 32,
                 target_xy: tuple[float, float] = (40.0, 22.0),
                 noise_d: float = 0.0, noise_b: float = 0.0,
                 master_seed: int = 0, plane: float = DEFAULT_PLANE,
                 sensors: tuple[tuple[float, float], ...] = DEFAULT_SENSORS,
                 sigma_b: float = DEFAULT_SIGMA_B) -> FusionProblem:
    readings = synthesize_readings(sensors, target_xy, noise_d, noise_b, master_seed)
    return FusionProblem(grid_w=grid_w, grid_h=grid_h, plane=plane,
                         sensors=sensors, readings=readings, sigma_b=sigma_b)


def likelihoods(problem: FusionProblem, cell: tuple[int, int]) -> tuple[float, ...]:
    """The six per-cell conditional densities (d1, b1, d2, b2, d3, b3)."""
    px, py = problem.cell_position(*cell)
    values = []
    for i, (sx, sy) in enumerate(problem.sensors):
        reading = problem.readings[i]
        d = math.hypot(px - sx, py - sy)
        sd = problem.sigma_d(i)
        values.append(gaussian_density(d - reading.mu_d, sd))
        b = bearing_deg((sx, sy), (px, py))
        values.append(gaussian_density(angular_residual(b, reading.mu_b), problem.sigma_b))
    return tuple(values)


def likelihood_channels(problem: FusionProblem) -> np.ndarray:
    """All six likelihood grids, shape (6, W, H)."""
    w, h = problem.grid_w, problem.grid_h
    sx, sy = problem.cell_scale
    xs = np.arange(w)[:, None] * sx
    ys = np.arange(h)[None, :] * sy
    channels = np.empty((6, w, h), dtype=np.float64)
    for i, (cx, cy) in enumerate(problem.sensors):
        reading = problem.readings[i]
        dist = np.hypot(xs - cx, ys - cy)
        sd = problem.sigma_d(i)
        channels[2 * i] = np.exp(-0.5 * ((dist - reading.mu_d) / sd) ** 2) \
            / (math.sqrt(2.0 * math.pi) * sd)
        bearing = np.degrees(np.arctan2(ys - cy, xs - cx)) % 360.0
        diff = np.abs(bearing - reading.mu_b) % 360.0
        residual = np.minimum(diff, 360.0 - diff)
        channels[2 * i + 1] = np.exp(-0.5 * (residual / problem.sigma_b) ** 2) \
            / (math.sqrt(2.0 * math.pi) * problem.sigma_b)
    return channels


def exact_posterior(problem: FusionProblem) -> PosteriorGrid:
    """Normalized product of the six likelihood grids (uniform prior)."""
    channels = likelihood_channels(problem)
    return PosteriorGrid(np.prod(channels, axis=0)).normalize()


def condition_channels(channels: np.ndarray) -> np.ndarray:
    """Rescale each channel so its grid maximum is 1.0.

    Per-channel constants cancel in posterior normalization, so this keeps
    the exact posterior intact while spreading values over the quantizer's
    dynamic range.
    """
    maxima = channels.reshape(channels.shape[0], -1).max(axis=1)
    if np.any(maxima <= 0):
        raise ValueError("each likelihood channel needs a positive maximum")
    return channels / maxima[:, None, None]


def quantize_unit_interval(values: np.ndarray, level_count: int) -> np.ndarray:
    """Map (0, 1] values onto the uniform grid {1/L, ..., 1}; nearest level,
    exact midpoints toward the lower level, level 0 excluded."""
    scaled = values * level_count
    k = np.floor(scaled)
    frac = scaled - k
    k = np.where(frac > 0.5, k + 1, k)
    k = np.clip(k, 1, level_count)
    return k / level_count


def terminal_name(x: int, y: int, channel: str) -> str:
    return f"x{x}y{y}_{channel}"


def cell_output_name(x: int, y: int) -> str:
    return f"x{x}y{y}"


def build_sc_network(problem: FusionProblem,
                     level_count: int = 64) -> tuple[ScNetlist, dict[str, float]]:
    """Per-cell 6-input AND chains plus the quantized input assignment.

    Returns one netlist holding W*H independent sub-circuits (6*W*H
    terminals) and the terminal -> level map derived from the conditioned,
    quantized likelihood channels.
    """
    channels = quantize_unit_interval(condition_channels(likelihood_channels(problem)),
                                      level_count)
    net = ScNetlist()
    assignment: dict[str, float] = {}
    for x in range(problem.grid_w):
        for y in range(problem.grid_h):
            names = [terminal_name(x, y, ch) for ch in CHANNELS]
            for i, name in enumerate(names):
                net.add_terminal(name)
                assignment[name] = float(channels[i, x, y])
            prev = names[0]
            for k in range(1, 6):
                gid = f"x{x}y{y}_m{k}"
                net.add_gate(gid, GateKind.AND, (prev, names[k]))
                prev = gid
            net.add_output(prev)
    return net, assignment


@dataclass
class FusionRunStats:
    """Accounting from one stochastic inference run."""

    n_cycles: int
    num_units: int
    total_energy_nj: float
    writes: int
    reads: int

    @property
    def energy_per_cycle_nj(self) -> float:
        return self.total_energy_nj / self.n_cycles


class FusionPipeline:
    """Prepared network, clustering and allocation for one fusion problem.

    Preparation is seed-independent; run() draws fresh generator streams for
    a given seed.  Cells re-use shared rows exactly as the switch matrix
    prescribes, so results are deterministic in (problem, seed, n).
    """

    def __init__(self, problem: FusionProblem, level_count: int = 64,
                 params: MtjParams | None = None,
                 mode: SbgMode = SbgMode.SELF_CONTROL,
                 write_duration_ns: float = DEFAULT_WRITE_DURATION_NS,
                 read_energy_nj: float = DEFAULT_READ_ENERGY_NJ) -> None:
        self.problem = problem
        self.level_count = level_count
        self.params = params or MtjParams()
        self.mode = mode
        self.write_duration_ns = write_duration_ns
        self.read_energy_nj = read_energy_nj
        self.calibration = CalibrationCache()

        self.netlist, self.assignment = build_sc_network(problem, level_count)
        self.conflict_sets = extract_conflict_sets(self.netlist)

        by_level: dict[float, list[str]] = {}
        for t in self.netlist.terminals:
            by_level.setdefault(self.assignment[t], []).append(t)
        classes = [members for _, members in sorted(by_level.items())]
        self.cluster_map = cluster_terminals(self.netlist, self.conflict_sets, classes)
        self.clusters = clusters_of(self.cluster_map)
        self.cluster_order = list(self.clusters)
        self.cluster_assignment = {cid: self.assignment[members[0]]
                                   for cid, members in self.clusters.items()}
        self.cluster_sets = [frozenset(self.cluster_map[t] for t in group)
                             for group in self.conflict_sets]

        levels = sorted(set(self.cluster_assignment.values()))
        self.spec: SbgArraySpec = size_array(
            self.cluster_sets, levels, policy="trace",
            trace=[self.cluster_assignment], terminal_order=self.cluster_order,
            mode=mode)
        self.matrix: SwitchMatrix = allocate(
            self.cluster_assignment, self.spec, self.cluster_sets, self.cluster_order)

        # Row index of each cell terminal, cells in (x, y) order.
        col_of = {cid: j for j, cid in enumerate(self.matrix.col_terminals)}
        row_of_col = np.argmax(self.matrix.control, axis=0)
        w, h = problem.grid_w, problem.grid_h
        self.cell_rows = np.empty((w * h, 6), dtype=np.int64)
        for x in range(w):
            for y in range(h):
                for i, ch in enumerate(CHANNELS):
                    cid = self.cluster_map[terminal_name(x, y, ch)]
                    self.cell_rows[x * h + y, i] = row_of_col[col_of[cid]]

    @property
    def num_terminals(self) -> int:
        return len(self.netlist.terminals)

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    @property
    def num_units(self) -> int:
        return self.spec.total_units

    def run(self, n: int, master_seed: int,
            pv_sigmas: tuple[float, float] | None = None
            ) -> tuple[PosteriorGrid, FusionRunStats]:
        """One stochastic inference pass with n-bit streams."""
        units = build_array(self.spec, master_seed, params=self.params,
                            write_duration_ns=self.write_duration_ns,
                            read_energy_nj=self.read_energy_nj,
                            pv_sigmas=pv_sigmas, calibration=self.calibration)
        row_streams = [generate(unit, n) for unit in units]
        row_bits = np.stack([s.bits for s in row_streams])
        gathered = row_bits[self.cell_rows]          # (cells, 6, n)
        products = np.bitwise_and.reduce(gathered, axis=1)
        counts = products.sum(axis=1).astype(np.float64)
        w, h = self.problem.grid_w, self.problem.grid_h
        grid = PosteriorGrid((counts / n).reshape(w, h)).normalize()
        stats = FusionRunStats(
            n_cycles=n, num_units=len(units),
            total_energy_nj=sum(u.energy_nj for u in units),
            writes=sum(u.writes for u in units),
            reads=sum(u.reads for u in units))
        return grid, stats

    def analytic_estimate(self) -> PosteriorGrid:
        """Infinite-length limit: exact per-cell products of quantized levels."""
        w, h = self.problem.grid_w, self.problem.grid_h
        levels = np.array(self.matrix.row_levels)
        prods = np.prod(levels[self.cell_rows], axis=1)
        return PosteriorGrid(prods.reshape(w, h)).normalize()


def sc_posterior(problem: FusionProblem, n: int, master_seed: int, *,
                 level_count: int = 64,
                 pv_sigmas: tuple[float, float] | None = None,
                 params: MtjParams | None = None) -> PosteriorGrid:
    """Full pipeline convenience wrapper; deterministic given the seed."""
    pipeline = FusionPipeline(problem, level_count=level_count, params=params)
    grid, _ = pipeline.run(n, master_seed, pv_sigmas=pv_sigmas)
    return grid


def kl_divergence(exact: PosteriorGrid, estimate: PosteriorGrid,
                  zero_floor: float = 1e-300) -> float:
    """KL(exact || estimate) in nats.

    Estimated cells with zero mass are floored at zero_floor (callers use
    1/(10*n*W*H) for n-bit runs) and the estimate is renormalized, which
    keeps the divergence finite and non-negative.
    """
    if exact.shape != estimate.shape:
        raise ShapeMismatch(f"grid shapes differ: {exact.shape} vs {estimate.shape}")
    for grid, name in ((exact, "exact"), (estimate, "estimate")):
        if not grid.normalized or abs(grid.total() - 1.0) > 1e-9:
            raise ValueError(f"{name} grid must be normalized")
    p = exact.weights
    q = np.where(estimate.weights > 0.0, estimate.weights, zero_floor)
    q = q / q.sum()
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def default_zero_floor(n: int, grid_w: int, grid_h: int) -> float:
    """Floor for zero ones-counts: one tenth of a single-count weight."""
    return 1.0 / (10.0 * n * grid_w * grid_h)
