"""Measurement protocols: density-error sweeps, SCC tables, KL-vs-length.

Shared by the CLI reports, the experiment scripts and the acceptance tests
so that a threshold always refers to one well-defined procedure.

Density error is scored ensemble-style: for each requested probability the
sweep runs `repeats` independent generators, measures each stream's density
at nested prefix lengths (the 64-bit measurement is the first 64 bits of the
longest run), and reports |mean density - p| per length.  Re-using the same
devices and stream prefixes across lengths keeps the length comparison free
of between-run noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import MtjParams
from .fusion import FusionPipeline, FusionProblem, default_zero_floor, exact_posterior, kl_divergence
from .sbg import (
    DEFAULT_READ_ENERGY_NJ,
    DEFAULT_WRITE_DURATION_NS,
    CalibrationCache,
    SbgMode,
    generate,
    make_unit,
)
from .stochastic import Bitstream, scc


def prefix(stream: Bitstream, n: int) -> Bitstream:
    if n > len(stream):
        raise ValueError("prefix longer than the stream")
    return Bitstream(stream.bits[:n])


@dataclass(frozen=True)
class SweepResult:
    length: int
    avg_error: float
    max_error: float


def density_sweep(probs: tuple[float, ...], lengths: tuple[int, ...],
                  repeats: int, master_seed: int, *,
                  mode: SbgMode = SbgMode.SIMPLE,
                  params: MtjParams | None = None,
                  pv_sigmas: tuple[float, float] | None = None,
                  write_duration_ns: float = DEFAULT_WRITE_DURATION_NS,
                  read_energy_nj: float = DEFAULT_READ_ENERGY_NJ) -> list[SweepResult]:
    """Ensemble density error per stream length over a probability sweep."""
    params = params or MtjParams()
    lengths = tuple(sorted(lengths))
    n_max = lengths[-1]
    calibration = CalibrationCache()
    errors: dict[int, list[float]] = {n: [] for n in lengths}
    unit_id = 0
    for p in probs:
        densities = {n: [] for n in lengths}
        for _ in range(repeats):
            unit = make_unit(params, mode, p, master_seed, unit_id,
                             write_duration_ns=write_duration_ns,
                             read_energy_nj=read_energy_nj,
                             pv_sigmas=pv_sigmas, calibration=calibration)
            unit_id += 1
            stream = generate(unit, n_max)
            cumulative = np.cumsum(stream.bits)
            for n in lengths:
                densities[n].append(cumulative[n - 1] / n)
        for n in lengths:
            errors[n].append(abs(float(np.mean(densities[n])) - p))
    return [SweepResult(n, float(np.mean(errors[n])), float(np.max(errors[n])))
            for n in lengths]


def self_scc_table(probs: tuple[float, ...], lengths: tuple[int, ...],
                   pairs: int, master_seed: int, *,
                   mode: SbgMode = SbgMode.SELF_CONTROL,
                   params: MtjParams | None = None) -> list[tuple[float, int, float]]:
    """Mean |SCC| between independent generators at one probability.

    Rows are (p, n, mean |SCC| over `pairs` stream pairs); SCC at shorter
    lengths is measured on prefixes of the same streams.
    """
    params = params or MtjParams()
    lengths = tuple(sorted(lengths))
    n_max = lengths[-1]
    calibration = CalibrationCache()
    rows = []
    unit_id = 10_000
    for p in probs:
        streams_a, streams_b = [], []
        for _ in range(pairs):
            for bucket in (streams_a, streams_b):
                unit = make_unit(params, mode, p, master_seed, unit_id,
                                 calibration=calibration)
                unit_id += 1
                bucket.append(generate(unit, n_max))
        for n in lengths:
            vals = [abs(scc(prefix(a, n), prefix(b, n)))
                    for a, b in zip(streams_a, streams_b)]
            rows.append((p, n, float(np.mean(vals))))
    return rows


def cross_scc_table(prob_pairs: tuple[tuple[float, float], ...],
                    lengths: tuple[int, ...], pairs: int, master_seed: int, *,
                    mode: SbgMode = SbgMode.SELF_CONTROL,
                    params: MtjParams | None = None
                    ) -> list[tuple[float, float, int, float]]:
    """Mean |SCC| between generators targeting two different probabilities."""
    params = params or MtjParams()
    lengths = tuple(sorted(lengths))
    n_max = lengths[-1]
    calibration = CalibrationCache()
    rows = []
    unit_id = 50_000
    for p1, p2 in prob_pairs:
        streams_a, streams_b = [], []
        for _ in range(pairs):
            unit1 = make_unit(params, mode, p1, master_seed, unit_id, calibration=calibration)
            unit2 = make_unit(params, mode, p2, master_seed, unit_id + 1, calibration=calibration)
            unit_id += 2
            streams_a.append(generate(unit1, n_max))
            streams_b.append(generate(unit2, n_max))
        for n in lengths:
            vals = [abs(scc(prefix(a, n), prefix(b, n)))
                    for a, b in zip(streams_a, streams_b)]
            rows.append((p1, p2, n, float(np.mean(vals))))
    return rows


def mean_abs_scc_by_length(rows: list[tuple], lengths: tuple[int, ...]) -> dict[int, float]:
    """Aggregate a (*, n, value) table into mean |SCC| per length."""
    out: dict[int, float] = {}
    for n in lengths:
        vals = [r[-1] for r in rows if r[-2] == n]
        out[n] = float(np.mean(vals))
    return out


def kl_by_length(problem: FusionProblem, lengths: tuple[int, ...],
                 seeds: tuple[int, ...], *, level_count: int = 64,
                 params: MtjParams | None = None,
                 pv_sigmas: tuple[float, float] | None = None
                 ) -> dict[int, list[float]]:
    """Per-seed KL(exact || stochastic estimate) for each stream length."""
    pipeline = FusionPipeline(problem, level_count=level_count, params=params)
    exact = exact_posterior(problem)
    out: dict[int, list[float]] = {n: [] for n in lengths}
    for n in lengths:
        floor = default_zero_floor(n, problem.grid_w, problem.grid_h)
        for seed in seeds:
            estimate, _ = pipeline.run(n, seed, pv_sigmas=pv_sigmas)
            out[n].append(kl_divergence(exact, estimate, zero_floor=floor))
    return out
