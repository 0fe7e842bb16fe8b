import math

import numpy as np
import pytest
from scipy.integrate import quad

from impulsivenoise.error import InvalidArgument, NumericalFailure, DegenerateVariance
from impulsivenoise.trace import Trace
from impulsivenoise.waveform import ArCoefficients, EnvelopeParams, ImpulseConfig, simulate_ar2, ar2_psd
from impulsivenoise.stats import ShotParams, cumulant, waveform_power_integral
from impulsivenoise.field import FieldConfig, simulate
from impulsivenoise.spectral import (
    ONE_SIDED,
    TWO_SIDED,
    Psd,
    welch_grid,
    dc_impulse_mass,
    gamma_psd,
    carson_psd,
    periodogram,
    burg_estimate,
    empirical_acf,
)

A, B = 0.17, 1.04


# ##############################################################
# Psd container
#
def test_psd_validation():
    with pytest.raises(InvalidArgument):
        Psd([0.0, 0.1], [1.0])
    with pytest.raises(InvalidArgument):
        Psd([0.1, 0.0], [1.0, 1.0])
    with pytest.raises(InvalidArgument):
        Psd([0.0, 0.1], [1.0, -1.0])
    with pytest.raises(InvalidArgument):
        Psd([0.0], [1.0], dc_impulse_mass=-1.0)
    with pytest.raises(InvalidArgument):
        Psd([0.0], [1.0], sides="both")


def test_one_sided_doubles_once():
    psd = Psd([0.0, 0.25, 0.5], [1.0, 2.0, 3.0], dc_impulse_mass=0.5, sides=TWO_SIDED)
    one = psd.one_sided()
    assert one.sides == ONE_SIDED
    assert np.array_equal(one.values, [2.0, 4.0, 6.0])
    assert one.dc_impulse_mass == 0.5
    assert one.one_sided() is one
    assert psd.peak_frequency() == 0.5


def test_psd_file(tmp_path):
    filename = str(tmp_path / "psd.csv")
    psd = Psd(welch_grid(16), np.linspace(1.0, 2.0, 9), dc_impulse_mass=0.25, sides=ONE_SIDED)
    psd.to_csv(filename)
    with open(filename) as fp:
        lines = fp.read().splitlines()
    assert lines[0] == "# dc_impulse_mass = 0.25"
    assert lines[2] == "frequency,power"
    loaded = Psd.from_csv(filename)
    assert np.array_equal(loaded.frequencies, psd.frequencies)
    assert np.array_equal(loaded.values, psd.values)
    assert loaded.dc_impulse_mass == 0.25 and loaded.sides == ONE_SIDED


def test_default_grid():
    f = welch_grid()
    assert len(f) == 2049
    assert f[0] == 0.0 and f[-1] == 0.5


# ##############################################################
# Closed forms
#
def test_waveform_spectrum_parseval():
    k2 = 2.5
    # one-sided density: the integral over f >= 0 is ⟨K²⟩ ∫ γ²
    total, _ = quad(lambda f: gamma_psd([f], k2, A, B).values[0], 0.0, np.inf, limit=200)
    assert total == pytest.approx(k2 * waveform_power_integral(2, A, B), rel=1e-7)
    assert gamma_psd([0.0], k2, A, B).sides == ONE_SIDED
    two = gamma_psd([0.0, 0.1], k2, A, B, sides=TWO_SIDED)
    assert two.sides == TWO_SIDED
    assert np.allclose(2.0 * two.values, gamma_psd([0.0, 0.1], k2, A, B).values)


def test_carson():
    p = ShotParams(lam=0.3, fall_a=A, rise_b=B, k_moments=[1.0, 2.0], sigma_n_sq=0.1)
    f = np.array([0.0, 0.01, 0.2])
    psd = carson_psd(f, p, sides=TWO_SIDED)
    assert np.allclose(psd.values, 0.3 * gamma_psd(f, 2.0, A, B, sides=TWO_SIDED).values + 0.1)
    one = carson_psd(f, p)
    assert one.sides == ONE_SIDED
    assert np.allclose(one.values, 0.3 * gamma_psd(f, 2.0, A, B).values + 0.2)
    # the DC line carries the squared mean
    assert psd.dc_impulse_mass == pytest.approx(cumulant(1, p) ** 2)
    assert one.dc_impulse_mass == psd.dc_impulse_mass
    assert dc_impulse_mass(ShotParams(lam=0.3, fall_a=A, rise_b=B, k_moments=[0.0, 2.0])) == 0.0


def test_gamma_psd_rates():
    with pytest.raises(InvalidArgument):
        gamma_psd([0.0], 1.0, 0.0, 1.0)
    with pytest.raises(InvalidArgument):
        gamma_psd([0.0], 1.0, A, B, sides="both")


# ##############################################################
# Estimators
#
def test_periodogram_power_matches_trace(rng):
    trace = Trace(rng.standard_normal(50_000) * 3.0 + 1.0)
    psd = periodogram(trace, segment=1024)
    assert psd.sides == ONE_SIDED
    assert psd.total_power() == pytest.approx(trace.mean_power(), rel=1e-12)


def test_white_noise_is_flat(rng):
    sigma_sq = 4.0
    trace = Trace(rng.normal(0.0, 2.0, size=2**18))
    psd = periodogram(trace, segment=256)
    interior = psd.values[1:-1]
    # one-sided level 2σ², about 2000 segments per bin
    assert np.mean(interior) == pytest.approx(2.0 * sigma_sq, rel=0.02)
    assert np.max(np.abs(interior / (2.0 * sigma_sq) - 1.0)) < 0.2


def test_periodogram_of_ar2(resonant, rng):
    trace = simulate_ar2(resonant, 2**18, rng)
    psd = periodogram(trace, segment=1024)
    expected = 2.0 * ar2_psd(resonant, 1.0, psd.frequencies)
    ratio = psd.values[1:-1] / expected[1:-1]
    assert np.median(np.abs(ratio - 1.0)) < 0.08


def test_periodogram_arguments(rng):
    trace = Trace(rng.standard_normal(100))
    with pytest.raises(InvalidArgument):
        periodogram(trace, segment=200)
    with pytest.raises(InvalidArgument):
        periodogram(trace, segment=64, overlap=1.0)


@pytest.mark.parametrize("method", ["burg", "yule-walker"])
def test_ar_estimate_recovers_coefficients(resonant, rng, method):
    trace = simulate_ar2(resonant, 50_000, rng)
    estimate = burg_estimate(trace, 2, method=method)
    assert estimate.method == method
    # standard error of each coefficient is about 0.004
    assert np.allclose(estimate.coefficients, [1.0, -0.5], atol=0.02)
    assert estimate.innovation_variance == pytest.approx(1.0, rel=0.03)
    assert estimate.is_minimum_phase()
    assert len(estimate.psd) == 2049


def test_ar_estimate_finds_the_peak(rng):
    ar = ArCoefficients(1.6, -0.9)
    trace = simulate_ar2(ar, 50_000, rng)
    grid = np.linspace(0.0, 0.5, 251)
    estimate = burg_estimate(trace, 2, frequencies=grid)
    # spectral peak where cos(2πf) = φ1(φ2 - 1)/(4φ2)
    peak = math.acos(1.6 * (-0.9 - 1.0) / (4.0 * -0.9)) / (2.0 * math.pi)
    assert estimate.psd.peak_frequency() == pytest.approx(peak, abs=0.004)


def test_ar_estimate_failures(rng):
    with pytest.raises(InvalidArgument):
        burg_estimate(Trace(rng.standard_normal(1000)), 0)
    with pytest.raises(InvalidArgument):
        burg_estimate(Trace(rng.standard_normal(15)), 2)
    with pytest.raises(NumericalFailure):
        burg_estimate(Trace(np.ones(1000)), 2)
    with pytest.raises(InvalidArgument):
        burg_estimate(Trace(rng.standard_normal(1000)), 2, method="maximum-entropy")


def test_acf_arguments():
    with pytest.raises(InvalidArgument):
        empirical_acf(Trace([1.0, 2.0, 3.0]), 3)
    with pytest.raises(DegenerateVariance):
        empirical_acf(Trace(np.ones(10)), 2)


@pytest.mark.slow
def test_carson_shape_of_simulated_field():
    impulse = ImpulseConfig(ArCoefficients(1.2, -0.3), EnvelopeParams(1.0, 7.0, 2.25), 65536)
    # about 3200 impulses over 2^20 samples
    cfg = FieldConfig(lambda_r=5.0, lambda_t=10.0, mean_energy=10.0, gamma_ratio=0.1, trace_length=2**20, impulse=impulse, seed=42, unit_length=2**14)
    trace = simulate(cfg)
    welch = periodogram(trace, segment=4096)
    carson = carson_psd(welch.frequencies, cfg.shot_params(order=2), sampled=True)
    positive = welch.frequencies > 0
    w = welch.values[positive] / np.sum(welch.values[positive])
    c = carson.values[positive] / np.sum(carson.values[positive])
    assert np.sum(np.abs(w - c)) < 0.15
    assert carson.dc_impulse_mass == 0.0


def test_carson_high_frequency_slope():
    p = ShotParams(lam=1.0, fall_a=A, rise_b=B, k_moments=[0.0, 1.0])
    values = carson_psd([1.0, 10.0], p).values
    assert math.log(values[1] / values[0]) / math.log(10.0) == pytest.approx(-4.0, abs=0.1)


def test_sampled_carson_integrates_to_sampled_energy():
    p = ShotParams(lam=0.3, fall_a=A, rise_b=B, k_moments=[0.0, 2.0], sigma_n_sq=0.1)
    g_slow, g_fast = math.exp(-A), math.exp(-B)
    energy = 1.0 / (1.0 - g_slow**2) - 2.0 / (1.0 - g_slow * g_fast) + 1.0 / (1.0 - g_fast**2)
    half, _ = quad(lambda f: carson_psd([f], p, sampled=True).values[0], 0.0, 0.5, limit=200)
    assert half == pytest.approx(0.3 * 2.0 * energy + 0.1, rel=1e-8)
    # periodic in f, and close to the continuous form at low frequency
    f = np.array([0.01, 0.2])
    assert np.allclose(carson_psd(f, p, sampled=True).values, carson_psd(f + 1.0, p, sampled=True).values)
    assert carson_psd([0.001], p, sampled=True).values[0] == pytest.approx(carson_psd([0.001], p).values[0], rel=0.1)


def test_gamma_psd_vanishes_when_rates_meet():
    f = np.linspace(0.0, 0.5, 101)
    assert np.all(gamma_psd(f, 1.0, A, A * (1.0 + 1e-6)).values <= 1e-10)
    assert np.all(np.diff(gamma_psd(f, 1.0, A, B).values) < 0)


@pytest.mark.slow
def test_burg_recovers_a_low_pass_process(low_pass, rng):
    trace = simulate_ar2(low_pass, 1_000_000, rng)
    estimate = burg_estimate(trace, 2)
    assert np.allclose(estimate.coefficients, [1.2, -0.3], atol=0.01)


def test_burg_peak_at_the_resonance(rng):
    ar = ArCoefficients(0.9, -0.81)
    trace = simulate_ar2(ar, 200_000, rng)
    grid = welch_grid(512)
    estimate = burg_estimate(trace, 2, frequencies=grid)
    assert abs(estimate.psd.peak_frequency() - 1.0 / 6.0) <= grid[1]


def test_burg_on_white_noise(rng):
    estimate = burg_estimate(Trace(rng.standard_normal(1_000_000)), 2)
    assert np.all(np.abs(estimate.coefficients) < 0.01)
