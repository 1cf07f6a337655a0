"""Analytic trial-count series and the parallel rotation Monte Carlo."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starsched.injection import SHIPPED_CONFIGS
from starsched.rus import (
    _grid_neighbors,
    benchmark_layout,
    calibrate_p_pass,
    expected_trials,
    prob_finish_at,
    simulate_parallel_rus,
    update_injection_regions,
)

CFG = SHIPPED_CONFIGS[9]


def test_single_process_mean_is_two():
    assert expected_trials(1) == 2.0


def test_two_process_mean():
    assert expected_trials(2) == pytest.approx(8 / 3, abs=1e-9)


def test_known_group_means():
    assert expected_trials(12) == pytest.approx(4.9773, abs=5e-4)
    assert expected_trials(16) == pytest.approx(5.3770, abs=5e-4)
    assert expected_trials(32) == pytest.approx(6.3549, abs=5e-4)


@pytest.mark.parametrize("m", [1, 2, 7, 64, 512, 4096])
def test_finish_distribution_normalized(m):
    total = math.fsum(prob_finish_at(k, m) for k in range(1, 80))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_finish_distribution_is_max_of_geometrics():
    # oracle: P(max trial count of m coin-flip processes == k)
    for m in (1, 3, 8):
        for k in (1, 2, 5):
            cdf_k = (1 - 2.0**-k) ** m
            cdf_prev = (1 - 2.0 ** -(k - 1)) ** m
            assert prob_finish_at(k, m) == pytest.approx(cdf_k - cdf_prev)


@given(st.integers(1, 4096))
@settings(max_examples=60, deadline=None)
def test_mean_monotone_in_group_size(m):
    assert expected_trials(m + 1) > expected_trials(m)


def test_sampled_mean_matches_series():
    rng = np.random.default_rng(123)
    runs = 40_000
    for m in (1, 2, 12, 32):
        draws = rng.geometric(0.5, size=(runs, m)).max(axis=1)
        sigma = draws.std(ddof=1) / math.sqrt(runs)
        assert abs(draws.mean() - expected_trials(m)) < 3 * sigma


def test_region_growth_stays_disjoint_and_consumes_free():
    free = {(0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3)}
    regions = {0: {(0, 0)}, 1: {(0, 4)}}
    cells = free | {c for r in regions.values() for c in r} | {(1, 0), (1, 4)}
    neighbors = _grid_neighbors(cells)
    grown = update_injection_regions(free, regions, neighbors)
    assert not grown[0] & grown[1]
    assert grown[0] >= regions[0] and grown[1] >= regions[1]
    for pid, region in grown.items():
        assert not region & free  # claimed cells were removed from free


def test_region_tie_break_prefers_lower_id():
    # one free cell adjacent to both equally sized regions
    free = {(0, 1)}
    regions = {0: {(0, 0)}, 1: {(0, 2)}}
    neighbors = _grid_neighbors({(0, 0), (0, 1), (0, 2)})
    grown = update_injection_regions(free, regions, neighbors)
    assert (0, 1) in grown[0]
    assert grown[1] == {(0, 2)}


def test_layout_shapes():
    targets, regions, cells = benchmark_layout(8, "Z")
    assert len(targets) == 8
    assert len(regions) == 8
    all_target_cells = {c for t in targets.values() for c in t}
    all_region_cells = {c for r in regions.values() for c in r}
    assert not all_target_cells & all_region_cells
    assert all_target_cells | all_region_cells <= cells
    targets_zz, _, _ = benchmark_layout(4, "ZZ")
    assert all(len(t) == 2 for t in targets_zz.values())


def test_single_rotation_mean_clocks():
    # one Z rotation: inject (1 clock) + measure (1 clock) per trial, with
    # pre-injection overlapping later measurements → <trials> + 1 clocks
    stats = simulate_parallel_rus(1, "Z", 1e-8, CFG, "adaptive", runs=4000, seed=5)
    assert stats.mean == pytest.approx(3.0, abs=0.1)
    naive = simulate_parallel_rus(1, "Z", 1e-8, CFG, "naive", runs=4000, seed=5)
    assert naive.mean == pytest.approx(4.0, abs=0.1)


def test_two_patch_rotation_measurement_takes_two_clocks():
    stats = simulate_parallel_rus(1, "ZZ", 1e-8, CFG, "adaptive", runs=4000, seed=5)
    assert stats.mean == pytest.approx(2 * 2.0 + 1, abs=0.15)


def test_adaptive_beats_naive_at_scale():
    adaptive = simulate_parallel_rus(32, "Z", 1e-8, CFG, "adaptive", runs=500, seed=2)
    naive = simulate_parallel_rus(32, "Z", 1e-8, CFG, "naive", runs=500, seed=2)
    assert adaptive.mean < naive.mean


def test_stats_accessors():
    stats = simulate_parallel_rus(4, "Z", 1e-8, CFG, "adaptive", runs=200, seed=9)
    hist = stats.histogram()
    assert sum(hist.values()) == 200
    assert stats.percentile(50) <= stats.percentile(95) <= stats.max
    assert min(hist) >= 2


def test_determinism_and_thread_independence():
    a = simulate_parallel_rus(16, "ZZ", 1e-8, CFG, "adaptive", runs=300, seed=42)
    b = simulate_parallel_rus(16, "ZZ", 1e-8, CFG, "adaptive", runs=300, seed=42)
    c = simulate_parallel_rus(
        16, "ZZ", 1e-8, CFG, "adaptive", runs=300, seed=42, threads=4
    )
    assert a.completions == b.completions == c.completions
    d = simulate_parallel_rus(16, "ZZ", 1e-8, CFG, "adaptive", runs=300, seed=43)
    assert d.completions != a.completions


def test_invalid_mode_rejected():
    with pytest.raises(ValueError):
        simulate_parallel_rus(4, "Z", 1e-8, CFG, "greedy", runs=10, seed=0)


def test_pass_rate_calibration_hits_target():
    from dataclasses import replace

    rate = calibrate_p_pass(40.0, m=8, runs=200, seed=3)
    check = simulate_parallel_rus(
        8, "Z", 1e-8, replace(CFG, p_pass=rate), "naive", runs=200, seed=3
    )
    assert check.mean == pytest.approx(40.0, rel=0.1)
