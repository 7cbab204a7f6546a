import math

import numpy as np
import pytest

from noma_sic.channel import (ChannelParams, ChannelRealization, conditional_gain_pdf,
                              conditional_weak_scale, order_probability,
                              order_statistic_cdf, pdf_ordered_gain_strong,
                              pdf_ordered_gain_weak, sample_channels,
                              sample_conditioned_real_part)
from noma_sic.errors import DomainError, FeasibilityError, SizeError
from noma_sic.numerics import integrate_semi_infinite

SIG1 = 10.0                 # sigma_1^2 = 100 (20 dB)
SIG2 = 10 ** (7.96 / 20)    # sigma_2^2 = 6.25 (7.96 dB)


def rayleigh_cdf(x, sigma):
    return 1.0 - np.exp(-(x / sigma) ** 2)


class TestSampling:
    def test_second_moment(self):
        rng = np.random.default_rng(5)
        params = ChannelParams((1.0, 1.0))
        h = np.array([sample_channels(params, rng).h for _ in range(0)])
        # vectorized draw through the same statistics
        n = 1_000_000
        hs = (1.0 / math.sqrt(2)) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        assert np.mean(np.abs(hs) ** 2) == pytest.approx(1.0, abs=0.005)
        assert np.var(np.real(hs)) == pytest.approx(0.5, rel=0.01)

    def test_order_field(self):
        rng = np.random.default_rng(6)
        params = ChannelParams((SIG1, SIG2))
        for _ in range(200):
            real = sample_channels(params, rng)
            gains = np.abs(real.h)
            assert gains[real.order[0]] >= gains[real.order[1]]

    def test_order_frequency_matches_formula(self):
        rng = np.random.default_rng(7)
        params = ChannelParams((SIG1, SIG2))
        n = 1_000_000
        h1 = (SIG1 / math.sqrt(2)) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        h2 = (SIG2 / math.sqrt(2)) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        frac = np.mean(np.abs(h1) >= np.abs(h2))
        assert frac == pytest.approx(0.9412, abs=0.002)

    def test_realization_validation(self):
        with pytest.raises(DomainError):
            ChannelRealization(h=np.array([1.0 + 0j, 2.0 + 0j]), order=(0, 1))
        with pytest.raises(DomainError):
            ChannelRealization(h=np.array([1.0 + 0j, 2.0 + 0j]), order=(0, 0))

    def test_params_validation(self):
        with pytest.raises(DomainError):
            ChannelParams((1.0, -2.0))
        with pytest.raises(DomainError):
            ChannelParams(()).n_users


class TestOrderedGainPdfs:
    def test_strong_zero_at_origin(self):
        assert pdf_ordered_gain_strong(0.0, SIG1, SIG2) == 0.0

    def test_strong_swap_symmetric(self):
        xs = np.linspace(0.01, 30, 50)
        a = pdf_ordered_gain_strong(xs, SIG1, SIG2)
        b = pdf_ordered_gain_strong(xs, SIG2, SIG1)
        assert np.allclose(a, b, rtol=1e-12)

    def test_strong_normalized(self):
        val = integrate_semi_infinite(lambda x: pdf_ordered_gain_strong(x, SIG1, SIG2))
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_strong_equal_scale_limit(self):
        x = 1.7
        lim = pdf_ordered_gain_strong(x, 2.0, 2.0 * (1 + 1e-12))
        want = 2 * x**3 / 16.0 * math.exp(-x**2 / 4.0)
        assert lim == pytest.approx(want, rel=1e-9)
        # approaching scales converge to the limit form
        near = pdf_ordered_gain_strong(x, 2.0, 2.0 * (1 + 1e-7))
        assert near == pytest.approx(want, rel=1e-6)

    def test_strong_negative_x(self):
        with pytest.raises(DomainError):
            pdf_ordered_gain_strong(-0.1, SIG1, SIG2)

    def test_weak_zero_at_origin(self):
        assert pdf_ordered_gain_weak(0.0, SIG1) == 0.0

    def test_weak_mode(self):
        xs = np.linspace(0.01, 40, 200_000)
        dens = pdf_ordered_gain_weak(xs, SIG1)
        assert xs[np.argmax(dens)] == pytest.approx(SIG1 / math.sqrt(2), abs=1e-3)

    def test_weak_normalized(self):
        val = integrate_semi_infinite(lambda x: pdf_ordered_gain_weak(x, SIG2))
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_mixture_recovers_unconditional(self):
        # law of total probability with the exact conditional scales
        w = order_probability(SIG1, SIG2)
        sc = conditional_weak_scale(SIG1, SIG2)
        xs = np.linspace(0.05, 40, 50)
        mix = (w * pdf_ordered_gain_strong(xs, SIG1, sc)
               + (1 - w) * pdf_ordered_gain_weak(xs, sc))
        want = (2 * xs / SIG1**2) * np.exp(-(xs / SIG1) ** 2)
        assert np.max(np.abs(mix - want)) < 1e-6


class TestOrderProbability:
    def test_symmetric_half(self):
        assert order_probability(3.0, 3.0) == pytest.approx(0.5)

    def test_reference_value(self):
        # sigma^2 = (100, 6.25): 100/106.25
        assert order_probability(10.0, 2.5) == pytest.approx(0.941176, abs=1e-6)

    def test_complementarity(self):
        for a, b in ((1.0, 2.0), (0.3, 5.0), (7.0, 7.0)):
            assert order_probability(a, b) + order_probability(b, a) == pytest.approx(1.0, abs=1e-15)


class TestOrderStatisticCdf:
    def test_iid_smallest(self):
        f = lambda x: rayleigh_cdf(x, 1.0)
        x = 0.8
        got = order_statistic_cdf(x, 1, [f, f, f])
        assert got == pytest.approx(1 - (1 - f(x)) ** 3, rel=1e-12)

    def test_two_user_largest(self):
        f1 = lambda x: rayleigh_cdf(x, 1.0)
        f2 = lambda x: rayleigh_cdf(x, 2.0)
        x = 1.3
        assert order_statistic_cdf(x, 2, [f1, f2]) == pytest.approx(f1(x) * f2(x), rel=1e-12)

    def test_middle_rank_against_monte_carlo(self):
        sigmas = (1.0, 2.0, 3.0)   # sigma^2 = 1, 4, 9
        cdfs = [lambda x, s=s: rayleigh_cdf(x, s) for s in sigmas]
        rng = np.random.default_rng(8)
        n = 1_000_000
        draws = np.abs((np.array(sigmas)[None, :] / math.sqrt(2))
                       * (rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))))
        middle = np.sort(draws, axis=1)[:, 1]
        got = order_statistic_cdf(1.5, 2, cdfs)
        want = np.mean(middle <= 1.5)
        assert got == pytest.approx(want, abs=2e-3)

    def test_monotone_in_x(self):
        cdfs = [lambda x, s=s: rayleigh_cdf(x, s) for s in (0.5, 1.0, 2.0, 4.0)]
        xs = np.linspace(0, 8, 40)
        for r in (1, 2, 3, 4):
            vals = [order_statistic_cdf(x, r, cdfs) for x in xs]
            assert all(0.0 <= v <= 1.0 for v in vals)
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_rank_and_size_errors(self):
        f = lambda x: rayleigh_cdf(x, 1.0)
        with pytest.raises(DomainError):
            order_statistic_cdf(1.0, 0, [f])
        with pytest.raises(DomainError):
            order_statistic_cdf(1.0, 3, [f, f])
        with pytest.raises(SizeError):
            order_statistic_cdf(1.0, 2, [f] * 13)


class TestConditionedRealPart:
    def test_mean_zero(self):
        params = ChannelParams((SIG1, SIG2))
        rng = np.random.default_rng(9)
        s = sample_conditioned_real_part(1, 2, params, rng, 50_000)
        assert abs(np.mean(s)) <= 3 * np.std(s) / math.sqrt(s.size)

    def test_weak_order_std_matches_conditional_scale(self):
        # sigma_1 = 10, sigma_2 = 2.5: weak-conditioned std = sigma_c/sqrt(2) = 1.713
        params = ChannelParams((10.0, 2.5))
        rng = np.random.default_rng(10)
        s = sample_conditioned_real_part(1, 2, params, rng, 400_000)
        assert np.std(s) == pytest.approx(2.422 / math.sqrt(2), abs=0.05)

    def test_unconditioned_variance_control(self):
        rng = np.random.default_rng(11)
        n = 500_000
        re = (SIG2 / math.sqrt(2)) * rng.standard_normal(n)
        assert np.var(re) == pytest.approx(SIG2**2 / 2, rel=0.01)

    def test_sample_count(self):
        params = ChannelParams((SIG1, SIG2))
        rng = np.random.default_rng(12)
        s = sample_conditioned_real_part(2, 1, params, rng, 12_345)
        assert s.size == 12_345

    def test_infeasible_event_refused(self):
        params = ChannelParams((1000.0, 1.0))
        rng = np.random.default_rng(13)
        with pytest.raises(FeasibilityError):
            sample_conditioned_real_part(2, 1, params, rng, 100)


class TestConditionalGainPdf:
    @pytest.mark.parametrize("ue,order", [(1, 1), (1, 2), (2, 1), (2, 2)])
    def test_ks_against_samples(self, ue, order):
        # sorted-channel histograms match the exact conditional densities;
        # each conditioning bucket gets a full million samples
        rng = np.random.default_rng(20 + ue * 2 + order)
        want = 1_000_000
        parts = []
        have = 0
        while have < want:
            n = 4_000_000
            h1 = (SIG1 / math.sqrt(2)) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
            h2 = (SIG2 / math.sqrt(2)) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
            mine, other = (h1, h2) if ue == 1 else (h2, h1)
            keep = np.abs(mine) >= np.abs(other) if order == 1 else np.abs(mine) <= np.abs(other)
            parts.append(np.abs(mine[keep]))
            have += parts[-1].size
        samples = np.sort(np.concatenate(parts)[:want])
        s_n = SIG1 if ue == 1 else SIG2
        s_m = SIG2 if ue == 1 else SIG1
        sc = conditional_weak_scale(s_n, s_m)
        if order == 1:
            num = (s_n**2 * (1 - np.exp(-(samples / s_n) ** 2))
                   - sc**2 * (1 - np.exp(-(samples / sc) ** 2)))
            cdf = num / (s_n**2 - sc**2)
        else:
            cdf = 1 - np.exp(-(samples / sc) ** 2)
        emp = np.arange(1, samples.size + 1) / samples.size
        ks = np.max(np.abs(cdf - emp))
        assert ks < 0.005

    def test_pdf_callable_normalized(self):
        params = ChannelParams((SIG1, SIG2))
        for ue in (1, 2):
            for order in (1, 2):
                f = conditional_gain_pdf(params, ue, order)
                assert integrate_semi_infinite(f) == pytest.approx(1.0, abs=1e-8)
