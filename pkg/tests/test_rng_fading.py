import math

import numpy as np
import pytest
from scipy.integrate import quad

from hoytmimo.fading import (
    envelope_pdf,
    params_from_q,
    params_from_sigmas,
    phase_pdf,
    sample_signal,
)
from hoytmimo.rng import GaussianStream, SplitMix64, derive_stream_seed, gaussian_block


class TestSplitMix64:
    def test_block_matches_scalar(self):
        s1 = SplitMix64(12345)
        s2 = SplitMix64(12345)
        block = s1.next_uint64_block(17)
        scalars = [s2.next_uint64() for _ in range(17)]
        assert [int(v) for v in block] == scalars

    def test_reference_sequence(self):
        # first outputs for seed 0; pinned so the documented algorithm
        # cannot drift silently
        s = SplitMix64(0)
        got = [s.next_uint64() for _ in range(3)]
        assert got == [
            0xE220A8397B1DCDAF,
            0x6E789E6AA1B965F4,
            0x06C45D188009454F,
        ]

    def test_substreams_differ(self):
        seeds = {derive_stream_seed(7, k) for k in range(100)}
        assert len(seeds) == 100

    def test_uniforms_in_unit_interval(self):
        u = SplitMix64(3).next_double_block(10000)
        assert np.all(u > 0.0) and np.all(u <= 1.0)

    def test_gaussian_stream_buffering_transparent(self):
        a = GaussianStream(99)
        b = GaussianStream(99)
        one_by_one = [a.next_gaussian() for _ in range(9)]
        batch = b.next_gaussians(9)
        np.testing.assert_array_equal(one_by_one, batch)

    def test_gaussian_moments(self):
        g = gaussian_block(SplitMix64(5), 200000)
        assert abs(np.mean(g)) < 4.0 / math.sqrt(200000)
        assert np.var(g) == pytest.approx(1.0, rel=0.02)


class TestParams:
    def test_one_sided_limit(self):
        p = params_from_q(0.0, 1.0)
        assert p.tau == 0.0 and p.sigma_x2 == 1.0 and p.sigma_y2 == 0.0

    def test_rayleigh_limit(self):
        p = params_from_q(1.0, 1.0)
        assert math.isinf(p.tau)
        assert p.sigma_x2 == pytest.approx(0.5) and p.sigma_y2 == pytest.approx(0.5)

    def test_mid_q(self):
        p = params_from_q(0.5, 1.0)
        assert math.exp(-p.tau) == pytest.approx(0.6, rel=1e-15)
        assert p.tau == pytest.approx(math.log(5.0 / 3.0), rel=1e-12)

    def test_from_sigmas(self):
        assert params_from_sigmas(1.0, 1.0).q == 1.0
        assert params_from_sigmas(1.0, 0.0).q == 0.0
        p = params_from_sigmas(2.0, 1.0)
        assert p.q == 0.5 and p.omega == 5.0

    def test_sigma_ordering_invariant(self):
        p = params_from_sigmas(1.0, 2.0)  # reordered internally
        assert p.sigma_x2 >= p.sigma_y2
        assert p.q == 0.5

    def test_round_trip(self):
        for q in np.linspace(0.0, 1.0, 11):
            p = params_from_q(float(q), 2.3)
            p2 = params_from_sigmas(math.sqrt(p.sigma_x2), math.sqrt(p.sigma_y2))
            assert p2.q == pytest.approx(p.q, abs=1e-14)
            assert p2.omega == pytest.approx(p.omega, rel=1e-14)

    def test_power_split_identity(self):
        for q in (0.2, 0.8):
            p = params_from_q(q, 1.7)
            assert p.sigma_x2 + p.sigma_y2 == pytest.approx(p.omega, rel=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            params_from_q(1.2, 1.0)
        with pytest.raises(ValueError):
            params_from_q(0.5, 0.0)
        with pytest.raises(ValueError):
            params_from_sigmas(0.0, 0.0)


class TestEnvelope:
    def test_rayleigh_reduction(self):
        p = params_from_q(1.0, 2.0)
        for r in (0.3, 1.0, 2.5):
            expect = (2.0 * r / 2.0) * math.exp(-r * r / 2.0)
            assert envelope_pdf(r, p) == pytest.approx(expect, rel=1e-12)

    @pytest.mark.parametrize("q,omega", [(0.3, 0.5), (0.3, 2.0), (0.7, 0.5), (0.7, 2.0)])
    def test_normalization(self, q, omega):
        p = params_from_q(q, omega)
        val, _ = quad(lambda r: envelope_pdf(r, p), 0.0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_second_moment_is_omega(self):
        p = params_from_q(0.6, 1.5)
        val, _ = quad(lambda r: r * r * envelope_pdf(r, p), 0.0, np.inf)
        assert val == pytest.approx(1.5, rel=1e-9)

    def test_one_sided_gaussian_branch(self):
        p = params_from_q(0.0, 1.0)
        val, _ = quad(lambda r: envelope_pdf(r, p), 0.0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-10)
        assert envelope_pdf(0.5, p) == pytest.approx(
            math.sqrt(2.0 / math.pi) * math.exp(-0.125), rel=1e-12
        )

    def test_continuity_at_rayleigh(self):
        p1 = params_from_q(1.0 - 1e-9, 1.0)
        p2 = params_from_q(1.0, 1.0)
        for r in np.linspace(0.01, 5.0, 40):
            assert envelope_pdf(float(r), p1) == pytest.approx(
                envelope_pdf(float(r), p2), abs=1e-6
            )

    def test_small_q_no_overflow(self):
        p = params_from_q(0.01, 1.0)
        assert math.isfinite(envelope_pdf(2.0, p))


class TestPhase:
    def test_rayleigh_uniform(self):
        p = params_from_q(1.0, 1.0)
        for th in (-3.0, 0.0, 1.2):
            assert phase_pdf(th, p) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)

    def test_normalization(self):
        p = params_from_q(0.4, 1.0)
        val, _ = quad(lambda t: phase_pdf(t, p), -math.pi, math.pi)
        assert val == pytest.approx(1.0, rel=1e-9)

    def test_closed_value(self):
        # theta = 0 lies along the large-variance axis, so the density
        # there exceeds uniform: sigma_x / (2 pi sigma_y)
        p = params_from_sigmas(2.0, 1.0)
        assert phase_pdf(0.0, p) == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_orientation_against_sampling(self):
        # Monte Carlo oracle pins the axis convention of the closed form
        p = params_from_sigmas(2.0, 1.0)
        rng = GaussianStream(444)
        n = 400000
        theta = np.angle([sample_signal(p, rng) for _ in range(n)])
        width = 0.2
        frac = np.mean(np.abs(theta) < width / 2.0)
        assert frac / width == pytest.approx(phase_pdf(0.0, p), rel=0.05)

    def test_symmetries(self):
        p = params_from_q(0.45, 1.0)
        for th in (0.3, 1.1, 2.0):
            assert phase_pdf(th, p) == pytest.approx(phase_pdf(-th, p), rel=1e-12)
            assert phase_pdf(th, p) == pytest.approx(phase_pdf(th - math.pi, p), rel=1e-12)

    def test_degenerate(self):
        with pytest.raises(ValueError):
            phase_pdf(0.1, params_from_q(0.0, 1.0))


class TestSampling:
    def test_zero_mean(self):
        p = params_from_q(0.5, 1.0)
        rng = GaussianStream(17)
        n = 200000
        z = np.array([sample_signal(p, rng) for _ in range(n)])
        assert abs(np.mean(z.real)) < 4.0 * math.sqrt(1.0 / n)
        assert abs(np.mean(z.imag)) < 4.0 * math.sqrt(1.0 / n)

    def test_power(self):
        p = params_from_q(0.5, 2.0)
        rng = GaussianStream(23)
        n = 200000
        pw = np.mean([abs(sample_signal(p, rng)) ** 2 for _ in range(n)])
        assert pw == pytest.approx(2.0, rel=0.02)

    def test_envelope_histogram_matches_density(self):
        p = params_from_q(0.5, 1.0)
        rng = GaussianStream(31)
        n = 1000000
        env = np.abs([sample_signal(p, rng) for _ in range(n)])
        edges = np.linspace(0.0, 3.5, 36)
        counts, _ = np.histogram(env, bins=edges)
        centers = 0.5 * (edges[:-1] + edges[1:])
        width = edges[1] - edges[0]
        frac = counts / n
        dens = frac / width
        se = np.sqrt(frac * (1.0 - frac) / n) / width
        expect = np.array([envelope_pdf(float(c), p) for c in centers])
        dev = np.abs(dens - expect) / np.maximum(se, 1e-300)
        assert np.max(dev) <= 3.0

    def test_determinism(self):
        p = params_from_q(0.3, 1.0)
        z1 = [sample_signal(p, GaussianStream(5)) for _ in range(4)]
        z2 = [sample_signal(p, GaussianStream(5)) for _ in range(4)]
        assert z1 == z2
