import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinsc.device import (
    InstanceFactors,
    MtjParams,
    MtjState,
    PulseSpec,
    TargetUnreachable,
    WriteDirection,
    apply_write,
    base_switching_time,
    calibrate_voltage,
    make_instance,
    read_state,
    sample_process_variation,
    switch_probability,
)
from spinsc.sbg import SbgMode, generate_self_control, make_unit
from spinsc.stochastic import scc

PARAMS = MtjParams()
RESET = PulseSpec(1.8, 7.0, WriteDirection.AP_TO_P)
HALF = PulseSpec(1.166, 5.4, WriteDirection.P_TO_AP)


def test_default_resistances():
    # RA / (l * w), with the area converted from nm^2 to um^2
    area_um2 = 45.0 * 45.0 * 1e-6
    assert PARAMS.r_p == pytest.approx(5.0 / area_um2)
    assert PARAMS.r_ap == pytest.approx(PARAMS.r_p * 2.5)
    assert PARAMS.r_ap > PARAMS.r_p


def test_params_validation():
    with pytest.raises(ValueError):
        MtjParams(tmr=-1.0)
    with pytest.raises(ValueError):
        MtjParams(sigma_rel=1.5)
    with pytest.raises(ValueError):
        PulseSpec(-0.1, 1.0, WriteDirection.P_TO_AP)


def test_reset_anchor_near_certain():
    assert switch_probability(PARAMS, RESET) >= 0.999


def test_half_probability_anchor():
    assert switch_probability(PARAMS, HALF) == pytest.approx(0.5, abs=0.02)
    assert base_switching_time(PARAMS, HALF) == pytest.approx(5.4, abs=1e-6)


def test_zero_duration_probability_negligible():
    pulse = PulseSpec(1.166, 0.0, WriteDirection.P_TO_AP)
    assert switch_probability(PARAMS, pulse) < 1e-6


def test_duration_equal_dt_gives_half():
    dt = base_switching_time(PARAMS, PulseSpec(1.4, 1.0, WriteDirection.P_TO_AP))
    pulse = PulseSpec(1.4, dt, WriteDirection.P_TO_AP)
    assert switch_probability(PARAMS, pulse) == pytest.approx(0.5, abs=1e-12)


def test_switching_time_decreasing_in_voltage():
    for direction in WriteDirection:
        vc0, _ = PARAMS.direction_constants(direction)
        voltages = np.linspace(vc0 * 1.05, 3.0, 25)
        dts = [base_switching_time(PARAMS, PulseSpec(v, 5.0, direction))
               for v in voltages]
        assert all(a > b for a, b in zip(dts, dts[1:]))


def test_probability_monotone_on_lattice():
    # non-decreasing in duration at fixed voltage, and in voltage above vc0
    durations = np.linspace(0.0, 12.0, 13)
    voltages = np.linspace(0.8, 2.4, 9)
    for v in voltages:
        probs = [switch_probability(PARAMS, PulseSpec(v, t, WriteDirection.P_TO_AP))
                 for t in durations]
        assert all(b >= a for a, b in zip(probs, probs[1:]))
    for t in durations[1:]:
        probs = [switch_probability(PARAMS, PulseSpec(v, t, WriteDirection.P_TO_AP))
                 for v in voltages]
        assert all(b >= a for a, b in zip(probs, probs[1:]))


@given(st.floats(min_value=0.75, max_value=3.0),
       st.lists(st.floats(min_value=0.0, max_value=20.0), min_size=2, max_size=8))
def test_probability_monotone_in_duration_property(voltage, durations):
    durations = sorted(durations)
    probs = [switch_probability(PARAMS, PulseSpec(voltage, t, WriteDirection.P_TO_AP))
             for t in durations]
    assert all(b >= a - 1e-15 for a, b in zip(probs, probs[1:]))


def test_write_toward_current_state_is_noop():
    inst = make_instance(PARAMS, 1, 0)
    assert inst.state is MtjState.P
    assert apply_write(inst, PulseSpec(1.8, 7.0, WriteDirection.AP_TO_P)) is False
    assert inst.state is MtjState.P


def test_read_is_ideal_and_nondestructive():
    inst = make_instance(PARAMS, 1, 0)
    inst.state = MtjState.AP
    assert read_state(inst) == 1
    assert read_state(inst) == 1
    inst.state = MtjState.P
    assert read_state(inst) == 0


def test_monte_carlo_matches_analytic_probability():
    inst = make_instance(PARAMS, 99, 0)
    target = switch_probability(PARAMS, HALF)
    n = 100_000
    flips = 0
    for _ in range(n):
        apply_write(inst, RESET)
        if apply_write(inst, HALF):
            flips += 1
    bound = 4.0 * math.sqrt(target * (1.0 - target) / n)
    assert abs(flips / n - target) <= bound


def test_reset_pulse_flips_nearly_always():
    inst = make_instance(PARAMS, 99, 1)
    n = 100_000
    flips = 0
    for _ in range(n):
        inst.state = MtjState.AP
        if apply_write(inst, RESET):
            flips += 1
    assert flips / n >= 0.999


def test_calibrate_half_probability_voltage():
    v = calibrate_voltage(PARAMS, 0.5, 5.4, WriteDirection.P_TO_AP)
    assert v == pytest.approx(1.166, abs=1e-3)


def test_calibrate_round_trip():
    rng = np.random.default_rng(5)
    for direction in WriteDirection:
        for target in rng.uniform(0.02, 0.98, size=10):
            v = calibrate_voltage(PARAMS, float(target), 5.4, direction)
            p = switch_probability(PARAMS, PulseSpec(v, 5.4, direction))
            assert abs(p - target) <= 1e-4


def test_calibrate_unreachable_target():
    with pytest.raises(TargetUnreachable):
        calibrate_voltage(PARAMS, 1e-9, 5.4, WriteDirection.P_TO_AP)


def test_process_variation_disabled_is_nominal():
    factors = sample_process_variation(PARAMS, 3, 0, sigma_area=0.0, sigma_tox=0.0)
    assert factors == InstanceFactors(1.0, 1.0)
    inst = make_instance(PARAMS, 3, 0, factors)
    assert inst.r_p == pytest.approx(PARAMS.r_p)


def test_process_variation_sample_statistics():
    areas, toxes = [], []
    for i in range(10_000):
        f = sample_process_variation(PARAMS, 11, i)
        areas.append(f.area)
        toxes.append(f.tox)
    assert np.std(areas) == pytest.approx(0.05, abs=0.005)
    assert np.std(toxes) == pytest.approx(0.02, abs=0.002)
    assert np.mean(areas) == pytest.approx(1.0, abs=0.005)
    assert min(areas) > 0 and min(toxes) > 0


def test_process_variation_deterministic():
    a = sample_process_variation(PARAMS, 42, 7)
    b = sample_process_variation(PARAMS, 42, 7)
    assert a == b
    c = sample_process_variation(PARAMS, 42, 8)
    assert c != a


def test_variation_rescales_resistance_and_dt():
    factors = InstanceFactors(area=0.9, tox=1.1)
    scale = math.exp(PARAMS.t_ox * 0.1) / 0.9
    inst = make_instance(PARAMS, 0, 0, factors)
    assert inst.r_p == pytest.approx(PARAMS.r_p * scale)
    dt_nom = base_switching_time(PARAMS, HALF)
    dt_var = base_switching_time(PARAMS, HALF, factors)
    assert dt_var == pytest.approx(dt_nom * scale)


def test_distinct_instances_produce_distinct_streams():
    def stream(instance_id):
        unit = make_unit(PARAMS, SbgMode.SELF_CONTROL, 0.5, 1234, instance_id)
        return generate_self_control(unit, 512)

    s0, s1 = stream(0), stream(1)
    assert s0 != s1
    assert abs(scc(s0, s1)) < 0.2


def test_instance_stream_determinism():
    def bits(seed):
        inst = make_instance(PARAMS, seed, 5)
        out = []
        for _ in range(200):
            apply_write(inst, RESET)
            apply_write(inst, HALF)
            out.append(read_state(inst))
        return out

    assert bits(77) == bits(77)
    assert bits(77) != bits(78)
