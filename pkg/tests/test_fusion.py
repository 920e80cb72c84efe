import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinsc.fusion import (
    CHANNELS,
    FusionPipeline,
    FusionProblem,
    PosteriorGrid,
    SensorReading,
    ShapeMismatch,
    angular_residual,
    bearing_deg,
    build_sc_network,
    condition_channels,
    default_zero_floor,
    exact_posterior,
    kl_divergence,
    likelihood_channels,
    likelihoods,
    make_problem,
    quantize_unit_interval,
    sc_posterior,
    synthesize_readings,
)
from spinsc.logic import extract_conflict_sets


def problem_64(target=(40.0, 22.0), **kw):
    return make_problem(grid_w=64, grid_h=64, target_xy=target, **kw)


def test_likelihood_hand_example():
    # Sensor at the origin, cell (3, 4): the distance is exactly 5, so the
    # density sits at the Gaussian peak 1 / (sqrt(2*pi) * (5 + 5/10)).
    readings = (SensorReading(5.0, bearing_deg((0, 0), (3, 4))),
                SensorReading(1.0, 0.0), SensorReading(1.0, 0.0))
    problem = FusionProblem(grid_w=64, grid_h=64, readings=readings)
    values = likelihoods(problem, (3, 4))
    expected = 1.0 / (math.sqrt(2.0 * math.pi) * 5.5)
    assert values[0] == pytest.approx(expected, rel=1e-12)


def test_likelihood_peaks_at_measured_cell():
    problem = problem_64()
    peak = likelihoods(problem, (40, 22))
    for other in ((39, 22), (41, 22), (40, 21), (0, 0)):
        vals = likelihoods(problem, other)
        assert all(p >= v for p, v in zip(peak, vals))


def test_bearing_wraparound_residual():
    assert angular_residual(359.0, 1.0) == pytest.approx(2.0)
    assert angular_residual(1.0, 359.0) == pytest.approx(2.0)
    assert angular_residual(10.0, 190.0) == pytest.approx(180.0)


def test_channel_grid_matches_pointwise():
    problem = make_problem(grid_w=16, grid_h=16)
    channels = likelihood_channels(problem)
    for cell in ((0, 0), (3, 7), (15, 15)):
        vals = likelihoods(problem, cell)
        for i in range(6):
            assert channels[i, cell[0], cell[1]] == pytest.approx(vals[i], rel=1e-12)
    # the sigma floors keep every density inside (0, 1)
    assert np.all(channels > 0.0)
    assert np.all(channels < 1.0)


def test_exact_posterior_normalized_with_argmax_at_target():
    problem = make_problem(grid_w=32, grid_h=32, target_xy=(40.0, 22.0))
    post = exact_posterior(problem)
    assert post.total() == pytest.approx(1.0, abs=1e-12)
    assert post.argmax() == (20, 11)  # cell (20, 11) sits at plane (40, 22)


def test_uniform_weights_normalize_to_uniform():
    grid = PosteriorGrid(np.ones((4, 4))).normalize()
    assert np.allclose(grid.weights, 1.0 / 16.0)
    assert grid.argmax() == (0, 0)  # ties resolve lexicographically


def test_synthesized_readings_noise_free_geometry():
    readings = synthesize_readings(((0.0, 0.0),), (3.0, 4.0))
    assert readings[0].mu_d == pytest.approx(5.0)
    assert readings[0].mu_b == pytest.approx(math.degrees(math.atan2(4, 3)))


def test_synthesized_readings_noise_deterministic():
    a = synthesize_readings(((0.0, 0.0),), (3.0, 4.0), noise_d=1.0, master_seed=3)
    b = synthesize_readings(((0.0, 0.0),), (3.0, 4.0), noise_d=1.0, master_seed=3)
    assert a == b
    c = synthesize_readings(((0.0, 0.0),), (3.0, 4.0), noise_d=1.0, master_seed=4)
    assert c != a


def test_conditioning_preserves_exact_posterior():
    problem = make_problem(grid_w=16, grid_h=16)
    channels = likelihood_channels(problem)
    raw = PosteriorGrid(np.prod(channels, axis=0)).normalize()
    conditioned = PosteriorGrid(np.prod(condition_channels(channels), axis=0)).normalize()
    assert np.allclose(raw.weights, conditioned.weights, atol=1e-12)
    assert raw.argmax() == conditioned.argmax()


def test_quantizer_grid_and_ties():
    levels = 4  # grid {0.25, 0.5, 0.75, 1.0}
    vals = np.array([1.0, 0.9, 0.26, 0.125, 1e-9])
    out = quantize_unit_interval(vals, levels)
    assert out.tolist() == [1.0, 1.0, 0.25, 0.25, 0.25]
    # 0.125 is the 0.25/0.5 midpoint scaled down: exactly between 0 and 0.25,
    # and the excluded zero level forces it up to 0.25; a true midpoint
    # between two positive levels resolves to the lower one:
    assert quantize_unit_interval(np.array([0.375]), levels).tolist() == [0.25]


def test_network_scale_and_conflict_structure():
    problem = make_problem(grid_w=32, grid_h=32)
    net, assignment = build_sc_network(problem)
    assert len(net.terminals) == 6 * 32 * 32 == 6144
    assert len(net.outputs) == 32 * 32
    sets = extract_conflict_sets(net)
    assert len(sets) == 1024
    assert all(len(s) == 6 for s in sets)
    cell = [t for t in net.terminals if t.startswith("x0y0_")]
    assert frozenset(cell) in sets
    assert set(assignment) == set(net.terminals)


def test_network_scale_64():
    problem = make_problem(grid_w=64, grid_h=64)
    net, _ = build_sc_network(problem)
    assert len(net.terminals) == 24576


def test_analytic_limit_equals_quantized_exact():
    problem = make_problem(grid_w=16, grid_h=16)
    pipeline = FusionPipeline(problem)
    limit = pipeline.analytic_estimate()
    channels = quantize_unit_interval(
        condition_channels(likelihood_channels(problem)), 64)
    oracle = PosteriorGrid(np.prod(channels, axis=0)).normalize()
    assert np.allclose(limit.weights, oracle.weights, atol=1e-12)


def test_sc_posterior_deterministic_and_normalized():
    problem = make_problem(grid_w=8, grid_h=8)
    a = sc_posterior(problem, 64, master_seed=5)
    b = sc_posterior(problem, 64, master_seed=5)
    assert np.array_equal(a.weights, b.weights)
    assert a.total() == pytest.approx(1.0, abs=1e-12)
    c = sc_posterior(problem, 64, master_seed=6)
    assert not np.array_equal(a.weights, c.weights)


def test_rescaling_before_quantization_preserves_sc_argmax():
    # An extra per-channel scale constant cancels inside the max-rescaling
    # conditioner, so the stochastic estimate is unchanged bit for bit.
    problem = make_problem(grid_w=8, grid_h=8)
    channels = likelihood_channels(problem)
    scaled = channels * np.array([0.5, 0.9, 0.3, 1.0, 0.7, 0.2])[:, None, None]
    q1 = quantize_unit_interval(condition_channels(channels), 64)
    q2 = quantize_unit_interval(condition_channels(scaled), 64)
    assert np.array_equal(q1, q2)


def test_kl_identical_grids_is_zero():
    problem = make_problem(grid_w=8, grid_h=8)
    post = exact_posterior(problem)
    assert kl_divergence(post, post) == pytest.approx(0.0, abs=1e-15)


def test_kl_hand_computed_two_by_two():
    # Uniform truth against a point mass floored at eps and renormalized.
    eps = default_zero_floor(64, 2, 2)
    exact = PosteriorGrid(np.full((2, 2), 0.25), normalized=True)
    est = PosteriorGrid(np.array([[1.0, 0.0], [0.0, 0.0]]), normalized=True)
    z = 1.0 + 3.0 * eps
    expected = 0.25 * (math.log(0.25 * z / 1.0) + 3.0 * math.log(0.25 * z / eps))
    assert kl_divergence(exact, est, zero_floor=eps) == pytest.approx(expected, rel=1e-12)


def test_kl_shape_mismatch():
    a = PosteriorGrid(np.ones((2, 2)) / 4, normalized=True)
    b = PosteriorGrid(np.ones((2, 3)) / 6, normalized=True)
    with pytest.raises(ShapeMismatch):
        kl_divergence(a, b)


def test_kl_requires_normalized_grids():
    a = PosteriorGrid(np.ones((2, 2)))
    b = PosteriorGrid(np.ones((2, 2)) / 4, normalized=True)
    with pytest.raises(ValueError):
        kl_divergence(a, b)


@settings(max_examples=100)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_kl_non_negative_random_grids(seed):
    rng = np.random.default_rng(seed)
    p = PosteriorGrid(rng.random((3, 3)) + 1e-9).normalize()
    q = PosteriorGrid(rng.random((3, 3)) + 1e-9).normalize()
    assert kl_divergence(p, q) >= 0.0
    assert kl_divergence(p, q, zero_floor=1e-6) >= -1e-12


def test_kl_decreases_with_length_small_grid():
    problem = make_problem(grid_w=16, grid_h=16)
    pipeline = FusionPipeline(problem)
    exact = exact_posterior(problem)
    means = []
    for n in (64, 256):
        vals = []
        for seed in range(5):
            est, _ = pipeline.run(n, seed)
            vals.append(kl_divergence(exact, est,
                                      zero_floor=default_zero_floor(n, 16, 16)))
        means.append(np.mean(vals))
    assert means[0] > means[1]


def test_process_variation_degrades_but_preserves_trend():
    problem = make_problem(grid_w=16, grid_h=16)
    pipeline = FusionPipeline(problem)
    exact = exact_posterior(problem)

    def mean_kl(n, pv):
        vals = []
        for seed in range(5):
            est, _ = pipeline.run(n, seed, pv_sigmas=pv)
            vals.append(kl_divergence(exact, est,
                                      zero_floor=default_zero_floor(n, 16, 16)))
        return float(np.mean(vals))

    lengths = (64, 128, 256)
    plain = [mean_kl(n, None) for n in lengths]
    varied = [mean_kl(n, (0.05, 0.02)) for n in lengths]
    for p, v in zip(plain, varied):
        assert v > p
    assert varied[0] > varied[1] > varied[2]


def test_run_stats_accounting():
    problem = make_problem(grid_w=8, grid_h=8)
    pipeline = FusionPipeline(problem)
    est, stats = pipeline.run(32, 1)
    assert stats.n_cycles == 32
    assert stats.num_units == pipeline.num_units
    # self-control units: n+1 writes and reads each
    assert stats.writes == stats.num_units * 33
    assert stats.reads == stats.num_units * 33
    assert stats.total_energy_nj > 0
    assert est.shape == (8, 8)


def test_cluster_count_bounded_by_levels_times_set_size():
    problem = make_problem(grid_w=32, grid_h=32)
    pipeline = FusionPipeline(problem)
    assert pipeline.num_terminals == 6144
    assert pipeline.num_clusters <= 64 * 6
    assert pipeline.num_units <= 64 * 6
    for group in pipeline.cluster_sets:
        assert len(group) == 6  # clustering never merges within a cell


def test_reading_validation():
    with pytest.raises(ValueError):
        SensorReading(-1.0, 0.0)
    with pytest.raises(ValueError):
        SensorReading(1.0, 360.0)
    with pytest.raises(ValueError):
        FusionProblem(readings=(SensorReading(1.0, 0.0),))
