"""Stochastic bitstream generators built on the MTJ write/read primitives.

Two state machines are modeled.  The simple generator runs
reset -> write -> read per bit (2n writes, n reads for n bits).  The
self-control generator re-uses every write as a bit attempt: after one
initialization cycle it writes toward the opposite of the latched state,
reads, and emits XOR(current, last), costing n+1 writes and n+1 reads.

Energy bookkeeping: each pulse contributes V^2 * t / R(state before the
pulse) in nJ; each read costs a fixed configurable amount.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .device import (
    InstanceFactors,
    MtjInstance,
    MtjParams,
    MtjState,
    PulseSpec,
    TargetUnreachable,
    WriteDirection,
    apply_write,
    calibrate_voltage,
    make_instance,
    read_state,
    sample_process_variation,
)
from .stochastic import Bitstream

# Reset pulse: strong enough that AP->P switching is essentially certain.
RESET_PULSE = PulseSpec(1.8, 7.0, WriteDirection.AP_TO_P)

DEFAULT_WRITE_DURATION_NS = 5.4
DEFAULT_READ_ENERGY_NJ = 0.002

# Fallback bias for targets below the calibratable range: deep sub-critical,
# so the attempt probability collapses to the model floor (~3e-7).
_SUBCRITICAL_FRACTION = 0.5


class SbgMode(Enum):
    SIMPLE = "simple"
    SELF_CONTROL = "self_control"


def pulse_energy_nj(pulse: PulseSpec, resistance: float) -> float:
    """Joule heating of one pulse: V^2 * t_ns / R comes out directly in nJ."""
    return pulse.voltage ** 2 * pulse.duration / resistance


@dataclass
class SbgUnit:
    """One generator: an MTJ plus its calibrated pulses and counters."""

    mtj: MtjInstance
    mode: SbgMode
    target_p: float
    write_pulse_p2ap: PulseSpec
    write_pulse_ap2p: PulseSpec | None = None
    reset_pulse: PulseSpec = RESET_PULSE
    read_energy_nj: float = DEFAULT_READ_ENERGY_NJ
    last_state: int | None = None
    writes: int = 0
    reads: int = 0
    energy_nj: float = 0.0

    def _pulse(self, pulse: PulseSpec) -> bool:
        # Energy uses the resistance of the state the pulse sees.
        self.energy_nj += pulse_energy_nj(pulse, self.mtj.resistance)
        self.writes += 1
        return apply_write(self.mtj, pulse)

    def _read(self) -> int:
        self.reads += 1
        self.energy_nj += self.read_energy_nj
        return read_state(self.mtj)


class CalibrationCache:
    """Memoizes bisection results; units at one probability level share them."""

    def __init__(self) -> None:
        self._cache: dict[tuple, float] = {}

    def voltage(self, params: MtjParams, target_p: float, duration: float,
                direction: WriteDirection) -> float:
        key = (params, round(target_p, 12), duration, direction)
        if key not in self._cache:
            self._cache[key] = calibrate_voltage(params, target_p, duration, direction)
        return self._cache[key]


def _write_pulse(params: MtjParams, target_p: float, duration: float,
                 direction: WriteDirection, cache: CalibrationCache | None) -> PulseSpec:
    try:
        if cache is not None:
            v = cache.voltage(params, target_p, duration, direction)
        else:
            v = calibrate_voltage(params, target_p, duration, direction)
    except TargetUnreachable:
        if target_p > 0.5:
            raise
        vc0, _ = params.direction_constants(direction)
        v = vc0 * _SUBCRITICAL_FRACTION
    return PulseSpec(v, duration, direction)


def make_unit(params: MtjParams, mode: SbgMode, target_p: float,
              master_seed: int, unit_id: int, *,
              write_duration_ns: float = DEFAULT_WRITE_DURATION_NS,
              read_energy_nj: float = DEFAULT_READ_ENERGY_NJ,
              pv_sigmas: tuple[float, float] | None = None,
              calibration: CalibrationCache | None = None) -> SbgUnit:
    """Build and calibrate one generator.

    Write voltages are calibrated against the nominal device; process
    variation (pv_sigmas = (sigma_area, sigma_tox)) perturbs only the
    instance, as it would on silicon.
    """
    if not 0.0 <= target_p <= 1.0:
        raise ValueError("target_p must lie in [0, 1]")
    factors: InstanceFactors | None = None
    if pv_sigmas is not None:
        factors = sample_process_variation(params, master_seed, unit_id,
                                           sigma_area=pv_sigmas[0],
                                           sigma_tox=pv_sigmas[1])
    mtj = make_instance(params, master_seed, unit_id, factors)
    p2ap = _write_pulse(params, target_p, write_duration_ns,
                        WriteDirection.P_TO_AP, calibration)
    ap2p = None
    if mode is SbgMode.SELF_CONTROL:
        ap2p = _write_pulse(params, target_p, write_duration_ns,
                            WriteDirection.AP_TO_P, calibration)
    return SbgUnit(mtj=mtj, mode=mode, target_p=target_p,
                   write_pulse_p2ap=p2ap, write_pulse_ap2p=ap2p,
                   read_energy_nj=read_energy_nj)


def generate_simple(unit: SbgUnit, n: int) -> Bitstream:
    """reset -> write -> read per bit; exactly 2n writes and n reads."""
    if unit.mode is not SbgMode.SIMPLE:
        raise ValueError("unit is not configured as a simple generator")
    if n < 1:
        raise ValueError("n must be at least 1")
    bits = []
    for _ in range(n):
        unit._pulse(unit.reset_pulse)
        unit._pulse(unit.write_pulse_p2ap)
        bits.append(unit._read())
    return Bitstream(bits)


def generate_self_control(unit: SbgUnit, n: int) -> Bitstream:
    """Initialization cycle plus n write/read cycles emitting XOR(cur, last)."""
    if unit.mode is not SbgMode.SELF_CONTROL:
        raise ValueError("unit is not configured as a self-control generator")
    if n < 1:
        raise ValueError("n must be at least 1")
    assert unit.write_pulse_ap2p is not None
    # Initialization: force a known state; the first comparison is discarded.
    unit._pulse(unit.reset_pulse)
    unit.last_state = unit._read()
    bits = []
    for _ in range(n):
        pulse = (unit.write_pulse_p2ap if unit.last_state == int(MtjState.P)
                 else unit.write_pulse_ap2p)
        unit._pulse(pulse)
        current = unit._read()
        bits.append(current ^ unit.last_state)
        unit.last_state = current
    return Bitstream(bits)


def generate(unit: SbgUnit, n: int) -> Bitstream:
    if unit.mode is SbgMode.SIMPLE:
        return generate_simple(unit, n)
    return generate_self_control(unit, n)


def energy_of(unit: SbgUnit) -> float:
    """Accumulated energy in nJ over all operations so far."""
    return unit.energy_nj


@dataclass(frozen=True)
class SbgArraySpec:
    """Pre-built array layout: probability levels and their multiplicities."""

    levels: tuple[float, ...]
    multiplicity: tuple[int, ...]
    mode: SbgMode = SbgMode.SELF_CONTROL

    def __post_init__(self) -> None:
        if len(self.levels) != len(self.multiplicity):
            raise ValueError("levels and multiplicity must have equal length")
        for p in self.levels:
            if not 0.0 < p <= 1.0:
                raise ValueError("levels must lie in (0, 1]")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("levels must be strictly increasing")
        if any(m < 1 for m in self.multiplicity):
            raise ValueError("multiplicities must be at least 1")

    @property
    def total_units(self) -> int:
        return sum(self.multiplicity)

    def row_levels(self) -> list[float]:
        """Level of each array row, level-major order."""
        out: list[float] = []
        for p, m in zip(self.levels, self.multiplicity):
            out.extend([p] * m)
        return out

    def rows_by_level(self) -> dict[float, list[int]]:
        rows: dict[float, list[int]] = {}
        idx = 0
        for p, m in zip(self.levels, self.multiplicity):
            rows[p] = list(range(idx, idx + m))
            idx += m
        return rows


def build_array(spec: SbgArraySpec, master_seed: int, *,
                params: MtjParams | None = None,
                write_duration_ns: float = DEFAULT_WRITE_DURATION_NS,
                read_energy_nj: float = DEFAULT_READ_ENERGY_NJ,
                pv_sigmas: tuple[float, float] | None = None,
                base_unit_id: int = 0,
                calibration: CalibrationCache | None = None) -> list[SbgUnit]:
    """Instantiate the array: units within a level share the target
    probability but never a random stream."""
    params = params or MtjParams()
    calibration = calibration or CalibrationCache()
    units: list[SbgUnit] = []
    unit_id = base_unit_id
    for p, m in zip(spec.levels, spec.multiplicity):
        for _ in range(m):
            units.append(make_unit(params, spec.mode, p, master_seed, unit_id,
                                   write_duration_ns=write_duration_ns,
                                   read_energy_nj=read_energy_nj,
                                   pv_sigmas=pv_sigmas,
                                   calibration=calibration))
            unit_id += 1
    return units
