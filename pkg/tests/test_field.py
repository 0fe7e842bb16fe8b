import logging

import numpy as np
import pytest
from scipy.stats import kurtosis, kstest, expon

from impulsivenoise.constant import ARRIVAL_BLOCK, STREAM
from impulsivenoise.error import InvalidArgument, DegenerateVariance
from impulsivenoise.trace import Trace
from impulsivenoise.waveform import ArCoefficients, EnvelopeParams, ImpulseConfig, EquivalentWaveformParams
from impulsivenoise.stats import cumulant, cumulants, skewness_kurtosis, waveform_power_integral
from impulsivenoise.field import (
    FieldConfig,
    stream,
    sample_arrivals,
    block_arrivals,
    shape_moments,
    scaled_impulse,
    simulate_shot_noise,
    add_background,
    block_normal,
    simulate,
    ensemble_seed,
    simulate_ensemble,
)


def test_reference_density():
    impulse = ImpulseConfig(ArCoefficients(1.2, -0.3), EnvelopeParams(1.0, 7.0, 2.25), 65536)
    cfg = FieldConfig(lambda_r=5.0, lambda_t=5.0, mean_energy=10.0, gamma_ratio=0.1, trace_length=2**20, impulse=impulse, seed=42)
    # 25 impulses per trace
    assert cfg.density * cfg.trace_length == pytest.approx(25.0)
    assert FieldConfig(5.0, 5.0, 10.0, 0.1, 2**20, impulse, unit_length=1000).density == pytest.approx(0.025)
    # a longer trace observes the same field for longer
    longer = FieldConfig(5.0, 5.0, 10.0, 0.1, 2**21, impulse)
    assert longer.density == cfg.density
    assert longer.sigma_n_sq == cfg.sigma_n_sq == pytest.approx(0.1 * cfg.density * 10.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(lambda_r=0.0),
        dict(mean_energy=-1.0),
        dict(gamma_ratio=1.0),
        dict(gamma_ratio=0.0),
        dict(trace_length=5000),
        dict(seed=-1),
        dict(seed=2**64),
        dict(unit_length=0),
        dict(unit_length=10.5),
    ],
)
def test_invalid_field(short_impulse, kwargs):
    args = dict(lambda_r=5.0, lambda_t=40.0, mean_energy=10.0, gamma_ratio=0.1, trace_length=65536, impulse=short_impulse, seed=7)
    args.update(kwargs)
    with pytest.raises(InvalidArgument):
        FieldConfig(**args)


# ##############################################################
# Arrivals
#
def test_arrival_count(rng):
    arrivals = sample_arrivals(0.01, 1_000_000, rng)
    # Poisson(10000), standard deviation 100
    assert abs(len(arrivals) - 10_000) < 500
    assert np.all(np.diff(arrivals) >= 0)
    assert arrivals.min() >= 0 and arrivals.max() < 1_000_000


def test_arrival_prefix_does_not_depend_on_horizon():
    short = block_arrivals(1e-3, 100_000, seed=11)
    long = block_arrivals(1e-3, 5 * ARRIVAL_BLOCK, seed=11)
    assert np.array_equal(short, long[long < 100_000])
    assert len(long) > len(short)


def test_streams_are_independent():
    a = stream(1, STREAM.ARRIVALS, 0).standard_normal(4)
    b = stream(1, STREAM.IMPULSE, 0).standard_normal(4)
    c = stream(1, STREAM.ARRIVALS, 0).standard_normal(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, c)


# ##############################################################
# Shot noise
#
def test_impulse_energy(small_field):
    u, energy = scaled_impulse(small_field, 3)
    assert float(np.dot(u, u)) == pytest.approx(energy, rel=1e-12)
    v, again = scaled_impulse(small_field, 3)
    assert np.array_equal(u, v) and energy == again


def test_simulation_is_reproducible(small_field):
    a = simulate(small_field)
    b = simulate(small_field)
    c = simulate(small_field.with_seed(8))
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)
    assert len(a) == small_field.trace_length
    assert a.seed == 7


def test_workers_do_not_change_the_trace(small_field):
    assert np.array_equal(simulate_shot_noise(small_field).samples, simulate_shot_noise(small_field, workers=4).samples)


def test_explicit_arrivals(small_field):
    shot = simulate_shot_noise(small_field, arrivals=[100, 10], ordinals=[0, 1])
    # sorted by time, each impulse keeps its own stream
    assert list(shot.meta["arrivals"]) == [10, 100]
    u0, _ = scaled_impulse(small_field, 0)
    u1, _ = scaled_impulse(small_field, 1)
    expected = np.zeros(small_field.trace_length)
    expected[10 : 10 + len(u1)] += u1
    expected[100 : 100 + len(u0)] += u0
    assert np.allclose(shot.samples, expected)


def test_impulse_truncated_at_trace_end(small_field):
    shot = simulate_shot_noise(small_field, arrivals=[small_field.trace_length - 5], ordinals=[0])
    u, _ = scaled_impulse(small_field, 0)
    assert np.array_equal(shot.samples[-5:], u[:5])


def test_invalid_arrivals(small_field):
    with pytest.raises(InvalidArgument):
        simulate_shot_noise(small_field, arrivals=[small_field.trace_length])
    with pytest.raises(InvalidArgument):
        simulate_shot_noise(small_field, arrivals=[1, 2], ordinals=[0])


def test_background_level(small_field):
    shot = simulate_shot_noise(small_field)
    x = add_background(shot, 0.1, np.random.default_rng(1))
    expected = 0.1 * np.var(shot.samples)
    assert x.meta["sigma_n_sq"] == pytest.approx(expected)
    assert x.meta["shot_variance"] == pytest.approx(np.var(shot.samples))
    # relative standard deviation of the variance estimate is about 0.006
    assert np.var(x.samples - shot.samples) == pytest.approx(expected, rel=0.03)


def test_background_of_silent_field(low_pass, caplog):
    silent = ImpulseConfig(low_pass, EnvelopeParams(theta0=0.0, mu_t=3.0, sigma_t=0.75), 512)
    cfg = FieldConfig(lambda_r=5.0, lambda_t=2.0, mean_energy=1.0, gamma_ratio=0.5, trace_length=8192, impulse=silent, seed=1, unit_length=8192)
    with caplog.at_level(logging.WARNING, logger="impulsivenoise.field"):
        shot = simulate_shot_noise(cfg)
    assert np.all(shot.samples == 0.0)
    if len(shot.meta["arrivals"]) > 0:
        assert "silent" in caplog.text
    with pytest.raises(DegenerateVariance):
        add_background(shot, 0.5, np.random.default_rng(0))
    with pytest.raises(DegenerateVariance):
        simulate(cfg)


def test_background_arguments():
    with pytest.raises(InvalidArgument):
        add_background(Trace([]), 0.1, np.random.default_rng(0))
    with pytest.raises(InvalidArgument):
        add_background(Trace([1.0, 2.0]), 1.5, np.random.default_rng(0))


# ##############################################################
# Closed-form view
#
def test_shot_params_match_the_mean_energy(small_field):
    p = small_field.shot_params()
    eq = EquivalentWaveformParams.from_ar(small_field.impulse.ar, amplitude_k=1.0)
    assert p.fall_a == pytest.approx(eq.fall_a) and p.rise_b == pytest.approx(eq.rise_b)
    assert p.k_moments[0] == 0.0 and p.k_moments[2] == 0.0
    assert p.k_moment(2) * waveform_power_integral(2, p.fall_a, p.rise_b) == pytest.approx(small_field.mean_energy)
    r = shape_moments(small_field.impulse, 4)
    assert r[1] == pytest.approx(1.0)
    assert p.k_moment(4) * waveform_power_integral(4, p.fall_a, p.rise_b) == pytest.approx(2.0 * small_field.mean_energy**2 * r[3])
    # κ2 = λ⟨E⟩ (1 + Γ)
    assert cumulant(2, p) == pytest.approx(small_field.density * small_field.mean_energy * 1.1)
    assert small_field.shot_params(order=2).k_moments == p.k_moments[:2]


def test_fourth_cumulant_matches_the_impulses(small_field):
    p = small_field.shot_params()
    impulses = [scaled_impulse(small_field, i)[0] for i in range(4000)]
    # E[Σ u⁴] per impulse; energy squared has relative variance 5, so 3.5% standard error
    fourth = np.mean([np.sum(u**4) for u in impulses])
    assert cumulant(4, p) / p.lam == pytest.approx(fourth, rel=0.15)


def test_shape_moments_are_reproducible(short_impulse):
    a = shape_moments(short_impulse, 6, count=32)
    assert np.array_equal(a, shape_moments(short_impulse, 6, count=32))
    assert np.all(np.diff(a) < 0)


def test_shot_params_need_real_roots(resonant):
    impulse = ImpulseConfig(resonant, EnvelopeParams(1.0, 3.0, 0.75), 512)
    cfg = FieldConfig(5.0, 40.0, 10.0, 0.1, 65536, impulse)
    with pytest.raises(InvalidArgument):
        cfg.shot_params()


def test_ensemble_variance_matches_second_cumulant(small_field):
    traces = simulate_ensemble(small_field, 16)
    kappa2 = cumulant(2, small_field.shot_params())
    # about 200 impulses per trace: 12% spread per trace, 3% over the ensemble
    assert np.mean([np.var(t.samples) for t in traces]) == pytest.approx(kappa2, rel=0.15)
    assert abs(np.mean([np.mean(t.samples) for t in traces])) < 0.05 * np.sqrt(kappa2)
    pooled = np.concatenate([t.samples for t in traces])
    assert kurtosis(pooled, fisher=False) > 3.0


def test_ensemble_members(small_field):
    traces = simulate_ensemble(small_field, 3, workers=2)
    seeds = [t.seed for t in traces]
    assert seeds == [ensemble_seed(7, i) for i in range(3)]
    assert len(set(seeds)) == 3
    assert np.array_equal(traces[1].samples, simulate(small_field.with_seed(seeds[1])).samples)


# ##############################################################
# Prefix stability and background
#
def test_simulation_prefix_does_not_depend_on_length(small_field, short_impulse):
    longer = FieldConfig(lambda_r=5.0, lambda_t=40.0, mean_energy=10.0, gamma_ratio=0.1, trace_length=3 * 65536, impulse=short_impulse, seed=7, unit_length=65536)
    short = simulate(small_field)
    long = simulate(longer)
    assert np.array_equal(short.samples, long.samples[: len(short)])
    assert short.meta["sigma_n_sq"] == long.meta["sigma_n_sq"]


def test_simulated_background_is_closed_form(small_field):
    x = simulate(small_field)
    assert x.meta["sigma_n_sq"] == pytest.approx(0.1 * small_field.density * small_field.mean_energy)
    shot = simulate_shot_noise(small_field)
    residual = x.samples - shot.samples
    assert np.allclose(residual, np.sqrt(small_field.sigma_n_sq) * block_normal(small_field.trace_length, small_field.seed))


def test_block_normal_prefix():
    short = block_normal(1000, 3)
    long = block_normal(3 * ARRIVAL_BLOCK + 5, 3)
    assert len(long) == 3 * ARRIVAL_BLOCK + 5
    assert np.array_equal(short, long[:1000])
    assert len(block_normal(0, 3)) == 0


def test_background_with_given_samples():
    shot = Trace([1.0, -1.0, 2.0, 0.0])
    x = add_background(shot, 0.1, sigma_n_sq=4.0, noise=np.ones(4))
    assert np.array_equal(x.samples, np.array([3.0, 1.0, 4.0, 2.0]))
    assert x.meta["sigma_n_sq"] == 4.0
    with pytest.raises(InvalidArgument):
        add_background(shot, 0.1, sigma_n_sq=4.0, noise=np.ones(3))
    with pytest.raises(InvalidArgument):
        add_background(shot, 0.1)
    with pytest.raises(InvalidArgument):
        add_background(shot, 0.1, np.random.default_rng(0), sigma_n_sq=0.0)


# ##############################################################
# Impulse energies and superposition
#
def test_impulse_energies_are_exponential(small_field):
    energies = [scaled_impulse(small_field, i)[1] for i in range(2000)]
    assert kstest(energies, expon(scale=small_field.mean_energy).cdf).pvalue > 0.01


def test_superposition(small_field):
    both = simulate_shot_noise(small_field, arrivals=[10, 300, 2000], ordinals=[4, 5, 6])
    parts = sum(simulate_shot_noise(small_field, arrivals=[t], ordinals=[o]).samples for t, o in [(10, 4), (300, 5), (2000, 6)])
    assert np.allclose(both.samples, parts, rtol=0.0, atol=1e-12)


# ##############################################################
# Monte-Carlo moments
#
@pytest.fixture
def reference_impulse():
    return ImpulseConfig(ArCoefficients(1.2, -0.3), EnvelopeParams(1.0, 7.0, 2.25), 65536)


def block_statistics(traces, block: int = 65536):
    x = np.concatenate([t.samples for t in traces]).reshape(-1, block)
    return x, x.mean(axis=1), (x**2).mean(axis=1)


@pytest.mark.slow
def test_reference_field_moments(reference_impulse):
    cfg = FieldConfig(lambda_r=5.0, lambda_t=5.0, mean_energy=10.0, gamma_ratio=0.1, trace_length=2**20, impulse=reference_impulse, seed=42)
    c = cumulants(cfg.shot_params(), 4)
    x, means, powers = block_statistics(simulate_ensemble(cfg, 10, workers=4), block=2**18)
    assert x.size >= 10**7
    n = len(means)
    # κ1 = 0, so the mean square estimates κ2; impulses are short next to a block
    assert abs(means.mean() - c[1]) < 3.0 * means.std(ddof=1) / np.sqrt(n)
    assert abs(powers.mean() - c[2]) < 3.0 * powers.std(ddof=1) / np.sqrt(n)
    assert kurtosis(x.ravel()) > 0.0


@pytest.mark.slow
def test_excess_kurtosis_matches_closed_form(reference_impulse):
    # 1600 impulses per trace, 16000 in all: about 3% standard error on the kurtosis
    cfg = FieldConfig(lambda_r=5.0, lambda_t=5.0, mean_energy=10.0, gamma_ratio=0.1, trace_length=2**20, impulse=reference_impulse, seed=42, unit_length=2**14)
    _, excess = skewness_kurtosis(cumulants(cfg.shot_params(), 4))
    x, _, _ = block_statistics(simulate_ensemble(cfg, 10, workers=4))
    assert excess > 0.0
    assert kurtosis(x.ravel()) == pytest.approx(excess, rel=0.1)
