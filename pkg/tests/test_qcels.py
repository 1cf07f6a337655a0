"""Synthetic Hadamard-test series and multi-level phase fitting."""

import cmath
import math
import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starsched.qcels import (
    SignalSeries,
    SyntheticSpectrum,
    multilevel_qcels,
    qcels_fit,
    synth_signal,
    wrap_phase,
)

FIVE_PHASE = SyntheticSpectrum(
    (-0.5, 0.9, 1.8, 2.6, -2.8), (0.8, 0.05, 0.05, 0.05, 0.05)
)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        SyntheticSpectrum((0.1,), (0.5,))
    with pytest.raises(ValueError):
        SyntheticSpectrum((0.1, 4.0), (0.5, 0.5))
    with pytest.raises(ValueError):
        SyntheticSpectrum((0.1, 0.2), (0.9, 0.2))


def test_dominant_phase():
    assert FIVE_PHASE.dominant == -0.5


def test_single_phase_signal_has_unit_modulus():
    spectrum = SyntheticSpectrum((0.7,), (1.0,))
    series = synth_signal(spectrum, 0.3, 6)
    for value in series.values:
        assert abs(value) == pytest.approx(1.0)


@given(st.floats(0.01, 3.0), st.integers(2, 10))
@settings(max_examples=100, deadline=None)
def test_noiseless_signal_bounded(tau, n_pairs):
    series = synth_signal(FIVE_PHASE, tau, n_pairs)
    assert all(abs(v) <= 1 + 1e-12 for v in series.values)


def test_signal_determinism():
    a = synth_signal(FIVE_PHASE, 0.3, 5, noise_scale=0.1, seed=4)
    b = synth_signal(FIVE_PHASE, 0.3, 5, noise_scale=0.1, seed=4)
    assert a == b
    c = synth_signal(FIVE_PHASE, 0.3, 5, noise_scale=0.1, seed=5)
    assert c != a


def test_noise_scale_is_total_std():
    import numpy as np

    spectrum = SyntheticSpectrum((0.0,), (1.0,))
    devs = []
    for seed in range(800):
        series = synth_signal(spectrum, 0.1, 5, noise_scale=0.2, seed=seed)
        devs.extend(v - 1.0 for v in series.values)
    total_std = math.sqrt(sum(abs(d) ** 2 for d in devs) / len(devs))
    assert total_std == pytest.approx(0.2, rel=0.05)


def test_fit_recovers_single_phase_exactly():
    spectrum = SyntheticSpectrum((0.7,), (1.0,))
    series = synth_signal(spectrum, 0.4, 5)
    r, theta = qcels_fit(series, -1.0, 2.0)
    assert theta == pytest.approx(0.7, abs=1e-9)
    assert abs(r) == pytest.approx(1.0, abs=1e-9)


@given(st.floats(-1.4, 1.4))
@settings(max_examples=100, deadline=None)
def test_fit_recovers_any_single_phase(phase):
    spectrum = SyntheticSpectrum((phase,), (1.0,))
    series = synth_signal(spectrum, 0.5, 5)
    _, theta = qcels_fit(series, -1.6, 1.6)
    assert theta == pytest.approx(phase, abs=1e-8)


def test_noiseless_pure_state_recovers_at_every_level():
    spectrum = SyntheticSpectrum((-0.5,), (1.0,))
    est = multilevel_qcels(spectrum, 0.01, n_samples=0, seed=0)
    assert est == pytest.approx(-0.5, abs=1e-9)


def test_noiseless_mixed_state_error_small():
    est = multilevel_qcels(FIVE_PHASE, 0.01, n_samples=0, seed=0)
    assert abs(est - (-0.5)) < 1e-3


def test_median_error_shrinks_with_level_noiseless():
    from starsched.estimator import QcelsParams

    params = QcelsParams(0.06, 5, 100, 0.01)
    errors = []
    theta, hw = 0.0, math.pi
    for tau in params.tau:
        series = synth_signal(FIVE_PHASE, tau, 5)
        _, theta = qcels_fit(series, theta - hw, theta + hw)
        hw = math.pi / (2 * tau)
        errors.append(abs(theta - (-0.5)))
    assert errors[-1] < errors[0]
    assert statistics.median(errors[-3:]) <= statistics.median(errors[:3])


def test_multilevel_determinism():
    a = multilevel_qcels(FIVE_PHASE, 0.01, seed=3)
    b = multilevel_qcels(FIVE_PHASE, 0.01, seed=3)
    assert a == b


def test_phase_wrapping():
    assert wrap_phase(math.pi) == pytest.approx(-math.pi)
    assert wrap_phase(-math.pi) == pytest.approx(-math.pi)
    assert wrap_phase(0.3) == pytest.approx(0.3)
    assert wrap_phase(2 * math.pi + 0.3) == pytest.approx(0.3)
