"""Behavioral model of a single perpendicular MTJ used as a stochastic bit cell.

The junction is a two-state resistive element (P low / AP high).  A write
pulse switches it with a probability set by the bias voltage and pulse
duration: the characteristic switching time dt(V) follows a precessional law
above the critical voltage and a thermally activated law below it, and the
realized switching time of each pulse is drawn from N(dt, sigma_rel * dt).
Reads are ideal and non-destructive.

Voltages are volts, durations nanoseconds, resistances ohms; energies (in the
generator layer) come out in nanojoules via V^2 * t_ns / R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .seeding import DOMAIN_DEVICE, DOMAIN_PROCESS_VARIATION, rng_for


class TargetUnreachable(ValueError):
    """Requested switching probability lies outside the calibratable range."""


class MtjState(IntEnum):
    P = 0   # parallel, low resistance, logic 0
    AP = 1  # anti-parallel, high resistance, logic 1


class WriteDirection(Enum):
    P_TO_AP = "p2ap"
    AP_TO_P = "ap2p"

    @property
    def target(self) -> MtjState:
        return MtjState.AP if self is WriteDirection.P_TO_AP else MtjState.P


# Pulse-shape constants fitted so that a 1.8 V / 7 ns pulse switches AP->P
# essentially always while 1.166 V / 5.4 ns switches P->AP at p = 0.5.
_C_P2AP_DEFAULT = 5.4 * (1.166 / 0.70 - 1.0)  # ns
_C_AP2P_DEFAULT = 5.6                          # ns, gives dt(1.8 V) = 4.0 ns


@dataclass(frozen=True)
class MtjParams:
    """Physical and calibration parameters of the junction.

    The first block carries the standard device constants; the second block
    parameterizes the stochastic switching model (per-direction critical
    voltages and pulse-shape constants, attempt time and thermal stability
    for the sub-critical regime, and the relative spread of the switching
    time distribution).
    """

    alpha: float = 0.027          # Gilbert damping
    gamma: float = 1.76e7         # gyro-magnetic constant, Hz/Oe
    pol: float = 0.52             # electron polarization
    hk0: float = 1433.0           # out-of-plane anisotropy, Oe
    t_sl: float = 1.3             # free-layer height, nm
    t_ox: float = 0.85            # oxide thickness, nm
    length: float = 45.0          # junction length, nm
    width: float = 45.0           # junction width, nm
    tmr: float = 1.5              # zero-bias TMR ratio
    ra: float = 5.0               # resistance-area product, ohm * um^2

    tau0: float = 1.0e-9          # attempt time, s
    delta: float = 45.0           # thermal stability factor
    sigma_rel: float = 0.2        # relative std-dev of switching time
    vc0_p2ap: float = 0.70        # critical voltage P->AP, V
    vc0_ap2p: float = 0.75        # critical voltage AP->P, V
    c_p2ap: float = _C_P2AP_DEFAULT  # precessional pulse-shape constant, ns
    c_ap2p: float = _C_AP2P_DEFAULT  # precessional pulse-shape constant, ns

    def __post_init__(self) -> None:
        for name in ("alpha", "gamma", "pol", "hk0", "t_sl", "t_ox", "length",
                     "width", "tmr", "ra", "tau0", "delta", "vc0_p2ap",
                     "vc0_ap2p", "c_p2ap", "c_ap2p"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.sigma_rel < 1.0:
            raise ValueError("sigma_rel must lie in (0, 1)")

    @property
    def area_um2(self) -> float:
        return self.length * self.width * 1e-6

    @property
    def r_p(self) -> float:
        return self.ra / self.area_um2

    @property
    def r_ap(self) -> float:
        return self.r_p * (1.0 + self.tmr)

    def direction_constants(self, direction: WriteDirection) -> tuple[float, float]:
        """(critical voltage, precessional constant) for one write direction."""
        if direction is WriteDirection.P_TO_AP:
            return self.vc0_p2ap, self.c_p2ap
        return self.vc0_ap2p, self.c_ap2p


@dataclass(frozen=True)
class PulseSpec:
    voltage: float    # V
    duration: float   # ns
    direction: WriteDirection

    def __post_init__(self) -> None:
        if self.voltage < 0:
            raise ValueError("voltage must be non-negative")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")


@dataclass(frozen=True)
class InstanceFactors:
    """Per-device process-variation multipliers (1.0, 1.0) when disabled."""

    area: float = 1.0
    tox: float = 1.0

    def __post_init__(self) -> None:
        if self.area <= 0 or self.tox <= 0:
            raise ValueError("variation factors must be positive")

    def resistance_scale(self, params: MtjParams) -> float:
        # R ~ (1/A) * exp(t_ox); the exponent uses the nominal thickness in nm
        # so a 2% thickness shift moves R by ~1.7%.
        return math.exp(params.t_ox * (self.tox - 1.0)) / self.area


NOMINAL_FACTORS = InstanceFactors()


def base_switching_time(params: MtjParams, pulse: PulseSpec,
                        factors: InstanceFactors = NOMINAL_FACTORS) -> float:
    """Characteristic switching time dt in ns for the pulse's direction.

    Precessional regime above the critical voltage, thermally activated
    (attempt-time) regime at or below it.  Process variation rescales dt by
    the resistance ratio, i.e. by the drop in effective write current.
    """
    if pulse.voltage <= 0:
        raise ValueError("switching time requires a positive bias voltage")
    vc0, c = params.direction_constants(pulse.direction)
    if pulse.voltage > vc0:
        dt = c / (pulse.voltage / vc0 - 1.0)
    else:
        dt = (params.tau0 * 1e9) * math.exp(params.delta * (1.0 - pulse.voltage / vc0))
    return dt * factors.resistance_scale(params)


def switch_probability(params: MtjParams, pulse: PulseSpec,
                       factors: InstanceFactors = NOMINAL_FACTORS) -> float:
    """Probability that the pulse switches the junction, Phi((t - dt)/(sigma_rel*dt))."""
    dt = base_switching_time(params, pulse, factors)
    z = (pulse.duration - dt) / (params.sigma_rel * dt)
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


class MtjInstance:
    """One junction with mutable state and its own random stream.

    Instances are single-owner: nothing here is shared, so independently
    seeded instances may be simulated concurrently without coordination.
    """

    __slots__ = ("params", "state", "factors", "rng", "_r_scale")

    def __init__(self, params: MtjParams, rng: np.random.Generator,
                 factors: InstanceFactors = NOMINAL_FACTORS,
                 state: MtjState = MtjState.P) -> None:
        self.params = params
        self.state = state
        self.factors = factors
        self.rng = rng
        self._r_scale = factors.resistance_scale(params)

    @property
    def r_p(self) -> float:
        return self.params.r_p * self._r_scale

    @property
    def r_ap(self) -> float:
        return self.params.r_ap * self._r_scale

    @property
    def resistance(self) -> float:
        return self.r_ap if self.state is MtjState.AP else self.r_p


def make_instance(params: MtjParams, master_seed: int, instance_id: int,
                  factors: InstanceFactors | None = None) -> MtjInstance:
    """Deterministically seeded instance; distinct ids give distinct streams."""
    rng = rng_for(master_seed, DOMAIN_DEVICE, instance_id)
    return MtjInstance(params, rng, factors or NOMINAL_FACTORS)


def apply_write(instance: MtjInstance, pulse: PulseSpec) -> bool:
    """Attempt one stochastic write; returns True iff the state flipped.

    Writing toward the current state is a no-op (no switching attempt, no
    random draw).  Otherwise the realized switching time is drawn from
    N(dt, sigma_rel * dt), clamped at zero, and the junction flips iff it
    fits inside the pulse duration.
    """
    target = pulse.direction.target
    if instance.state is target:
        return False
    dt = base_switching_time(instance.params, pulse, instance.factors)
    t_sw = dt * (1.0 + instance.params.sigma_rel * instance.rng.standard_normal())
    if t_sw < 0.0:
        t_sw = 0.0
    if t_sw <= pulse.duration:
        instance.state = target
        return True
    return False


def read_state(instance: MtjInstance) -> int:
    """Ideal non-destructive read: 1 for AP, 0 for P."""
    return int(instance.state)


def calibrate_voltage(params: MtjParams, target_p: float, duration: float,
                      direction: WriteDirection, *, tol: float = 1e-4,
                      v_margin: float = 0.02, v_max: float = 3.0,
                      max_iter: int = 200) -> float:
    """Bias voltage whose switching probability matches target_p within tol.

    Bisection over the supercritical interval [vc0*(1+v_margin), v_max],
    where the probability is monotone increasing in voltage.  Raises
    TargetUnreachable when target_p falls outside the achievable range.
    """
    vc0, _ = params.direction_constants(direction)
    v_lo = vc0 * (1.0 + v_margin)
    v_hi = v_max
    if v_lo >= v_hi:
        raise ValueError("empty voltage search interval")

    def prob(v: float) -> float:
        return switch_probability(params, PulseSpec(v, duration, direction))

    p_lo = prob(v_lo)
    p_hi = prob(v_hi)
    if not p_lo <= target_p <= p_hi:
        raise TargetUnreachable(
            f"target probability {target_p} outside achievable range "
            f"[{p_lo:.3e}, {p_hi:.6f}] for {direction.value} at {duration} ns")
    if target_p == p_lo:
        return v_lo
    if target_p == p_hi:
        return v_hi

    for _ in range(max_iter):
        v_mid = 0.5 * (v_lo + v_hi)
        p_mid = prob(v_mid)
        if abs(p_mid - target_p) <= tol:
            return v_mid
        if p_mid < target_p:
            v_lo = v_mid
        else:
            v_hi = v_mid
    # Interval collapsed without meeting tol; monotonicity makes this
    # unreachable for any realistic tolerance.
    raise TargetUnreachable(f"bisection did not converge to {target_p}")


def sample_process_variation(params: MtjParams, master_seed: int, instance_id: int,
                             sigma_area: float = 0.05,
                             sigma_tox: float = 0.02) -> InstanceFactors:
    """Draw per-device area/thickness multipliers ~ N(1, sigma), resampling
    non-positive draws.  Deterministic in (master_seed, instance_id)."""
    if sigma_area == 0.0 and sigma_tox == 0.0:
        return NOMINAL_FACTORS
    rng = rng_for(master_seed, DOMAIN_PROCESS_VARIATION, instance_id)

    def draw(sigma: float) -> float:
        value = 1.0 + sigma * rng.standard_normal()
        while value <= 0.0:
            value = 1.0 + sigma * rng.standard_normal()
        return value

    return InstanceFactors(area=draw(sigma_area), tox=draw(sigma_tox))


def characterization_rows(params: MtjParams, voltages: list[float],
                          durations: list[float],
                          direction: WriteDirection) -> list[tuple[float, float, float]]:
    """(voltage, duration, probability) grid for the characterization report."""
    rows = []
    for v in voltages:
        for t in durations:
            p = switch_probability(params, PulseSpec(v, t, direction))
            rows.append((v, t, p))
    return rows
