import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.stats import kstest, ks_2samp

from ppm_pointing.abep import Deterministic, GammaFade, PpmConfig, abep
from ppm_pointing.montecarlo import (
    SimResult,
    SimSpec,
    chunk_rng,
    sample_collected_fraction,
    sample_fade,
    sample_signal_slot,
    simulate_abep,
)
from ppm_pointing.numerics import DomainError
from ppm_pointing.pointing import PointingGeometry, cdf_t, equivalent_beam, fade_params

JITTER = PointingGeometry(w_z=15.0, mu_x=10.0, sigma_x=1.0, sigma_y=1.0)


def within(result: SimResult, exact: float, k: float = 4.0) -> bool:
    return abs(result.abep_estimate - exact) <= k * max(result.std_error, 1e-300)


def squared_gaussians(M, xi, rng, size):
    """Sum of 2M squared N(., 1/2) variables, one of them shifted by sqrt(xi)."""
    z = rng.normal(0.0, math.sqrt(0.5), (size, 2 * M))
    z[:, 0] += math.sqrt(xi)
    return (z * z).sum(axis=1)


class TestSpec:
    def test_zero_symbols(self):
        with pytest.raises(DomainError):
            SimSpec(PpmConfig(2, 1), 1.0, Deterministic(1.0), 0)

    def test_chunks_partition(self):
        spec = SimSpec(PpmConfig(2, 1), 1.0, Deterministic(1.0), 1003, n_chunks=10)
        sizes = spec.chunk_sizes()
        assert sum(sizes) == 1003 and max(sizes) - min(sizes) <= 1

    def test_result_mapping(self):
        r = SimResult.from_counts(16, 150, 1000, seed=5)
        assert r.abep_estimate == pytest.approx(16 / 30 * 0.15)
        assert r.std_error == pytest.approx(16 / 30 * math.sqrt(0.15 * 0.85 / 1000))


class TestSimulate:
    @pytest.mark.parametrize("Q, M", [(2, 1), (4, 2), (16, 1), (16, 200)])
    def test_zero_signal(self, Q, M):
        r = simulate_abep(SimSpec(PpmConfig(Q, M), 0.0, Deterministic(1.0), 200_000, seed=11))
        assert within(r, 0.5)

    @pytest.mark.slow
    def test_closed_form(self):
        r = simulate_abep(SimSpec(PpmConfig(2, 1), 2.0, Deterministic(1.0), 10 ** 7, seed=1))
        assert within(r, 0.5 * math.exp(-1.0))

    def test_reproducible(self):
        spec = SimSpec(PpmConfig(4, 2), 3.0, fade_params(JITTER), 300_000, seed=9, n_chunks=3)
        assert simulate_abep(spec) == simulate_abep(spec)

    def test_worker_count_irrelevant(self):
        spec = SimSpec(PpmConfig(4, 1), 3.0, Deterministic(0.5), 100_000, seed=2, n_chunks=4)
        assert simulate_abep(spec, workers=2) == simulate_abep(spec, workers=1)

    def test_chunk_invariance(self):
        base = dict(config=PpmConfig(4, 2), ebn0=4.0, source=Deterministic(1.0),
                    n_symbols=640_000, seed=21)
        one = simulate_abep(SimSpec(**base, n_chunks=1))
        many = simulate_abep(SimSpec(**base, n_chunks=64))
        assert abs(one.abep_estimate - many.abep_estimate) <= 4 * math.hypot(
            one.std_error, many.std_error)

    def test_gamma_fade_against_series(self):
        c = PpmConfig(16, 2)
        fade = fade_params(JITTER)
        ebn0 = 10 ** (29.68 / 10)
        r = simulate_abep(SimSpec(c, ebn0, fade, 10 ** 6, seed=3))
        assert within(r, abep(c, ebn0, fade))

    def test_geometry_against_series(self):
        # t drawn from the physical offsets rather than the fitted fade law
        c = PpmConfig(16, 2)
        fade = fade_params(JITTER)
        ebn0 = 10 ** (brentq(lambda d: math.log(abep(c, 10 ** (d / 10), fade) / 1e-2), 0, 60) / 10)
        r = simulate_abep(SimSpec(c, ebn0, JITTER, 10 ** 6, seed=3))
        assert within(r, abep(c, ebn0, fade)), (r, abep(c, ebn0, fade))


class TestSlots:
    def test_noise_mean_exponential(self):
        x = chunk_rng(0, 0).standard_exponential(10 ** 6)
        assert x.mean() == pytest.approx(1.0, rel=5e-3)

    @pytest.mark.parametrize("M, xi", [(1, 0.0), (1, 3.0), (2, 10.0), (200, 50.0)])
    def test_signal_mean(self, M, xi):
        x = sample_signal_slot(M, xi, chunk_rng(1, 0), 10 ** 6)
        assert x.mean() == pytest.approx(M + xi, rel=5e-3)

    @pytest.mark.parametrize("M", [1, 2])
    @pytest.mark.parametrize("xi", [0.0, 0.7, 5.0, 40.0])
    def test_mixture_matches_gaussian_construction(self, M, xi):
        mix = sample_signal_slot(M, xi, chunk_rng(2, M), 10 ** 5)
        direct = squared_gaussians(M, xi, chunk_rng(3, M), 10 ** 5)
        assert ks_2samp(mix, direct).statistic <= 0.01


class TestCollectedFraction:
    def test_static_is_constant(self):
        g = PointingGeometry(w_z=15.0, mu_x=10.0)
        t = sample_collected_fraction(g, chunk_rng(0, 0), 100)
        assert np.all(t == fade_params(g).t0)

    def test_mean_against_fade_moment(self):
        fade = fade_params(JITTER)
        t = sample_collected_fraction(JITTER, chunk_rng(4, 0), 10 ** 6)
        assert t.mean() == pytest.approx(fade.A * fade.phi2 / (fade.phi2 + 1), rel=0.03)

    def test_aligned_ks(self):
        g = PointingGeometry(w_z=15.0, sigma_x=1.0, sigma_y=1.0)
        fade = fade_params(g)
        t = sample_collected_fraction(g, chunk_rng(5, 0), 10 ** 5)
        assert kstest(t, lambda u: cdf_t(fade, u)).statistic <= 0.02

    def test_inverse_cdf_sampler(self):
        fade = GammaFade(7.0, 0.6)
        t = sample_fade(fade, chunk_rng(6, 0), 10 ** 5)
        assert t.max() <= 0.6
        assert kstest(t, lambda u: cdf_t(fade, u)).statistic <= 0.01

    def test_bounded(self):
        t = sample_collected_fraction(JITTER, chunk_rng(7, 0), 10 ** 4)
        assert np.all((t >= 0) & (t <= equivalent_beam(JITTER).A0))
