import numpy as np
import pytest

from milacbeam.channel import (FreqChannel, TapChannel, dump_channel,
                               generate_channel, generate_pdp, generate_taps,
                               load_channel, rms_delay_spread,
                               taps_to_frequency,
                               verify_time_frequency_equivalence)
from milacbeam.optimizer import project_spectral_ball

from conftest import crandn, small_config


class TestPdp:
    def test_single_tap(self):
        assert np.array_equal(generate_pdp(1, 3.0).p, [1.0])

    def test_two_taps_half_ratio(self):
        pdp = generate_pdp(2, 1.0 / np.log(2.0))
        assert pdp.p == pytest.approx([2.0 / 3.0, 1.0 / 3.0], rel=1e-12)

    def test_geometric_series_closed_form(self):
        # leading tap power for D=16, decay 4 from the geometric sum
        pdp = generate_pdp(16, 4.0)
        expected = (1 - np.exp(-0.25)) / (1 - np.exp(-4.0))
        assert pdp.p[0] == pytest.approx(expected, rel=1e-12)

    def test_normalized_and_decreasing(self):
        for decay in (0.1, 0.8, 4.0, 100.0):
            pdp = generate_pdp(16, decay)
            assert pdp.p.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(np.diff(pdp.p) < 0)
            ratios = pdp.p[:-1] / pdp.p[1:]
            assert ratios == pytest.approx(np.exp(1.0 / decay), rel=1e-9)

    def test_errors(self):
        with pytest.raises(ValueError):
            generate_pdp(0, 1.0)
        with pytest.raises(ValueError):
            generate_pdp(4, 0.0)


class TestRmsDelaySpread:
    def test_single_tap_is_zero(self):
        assert rms_delay_spread(generate_pdp(1, 1.0)) == 0.0

    def test_two_equal_taps(self):
        pdp = generate_pdp(2, 1e9)           # effectively [1/2, 1/2]
        assert rms_delay_spread(pdp, 1.0) == pytest.approx(0.5, rel=1e-6)

    def test_reference_delay_spreads(self):
        # the two benchmark profiles: decay 4 and decay 1 with 16 taps
        assert rms_delay_spread(generate_pdp(16, 4.0)) == pytest.approx(3.32, abs=0.01)
        assert rms_delay_spread(generate_pdp(16, 1.0)) == pytest.approx(0.96, abs=0.01)

    def test_direct_summation_oracle(self):
        for decay in (0.1, 0.5, 1.0, 2.0, 4.0):
            pdp = generate_pdp(16, decay)
            mean = sum(p * d for d, p in enumerate(pdp.p))
            var = sum(p * (d - mean) ** 2 for d, p in enumerate(pdp.p))
            assert rms_delay_spread(pdp, 1.0) == pytest.approx(np.sqrt(var), rel=1e-12)

    def test_scales_linearly_with_sample_period(self):
        pdp = generate_pdp(8, 1.3)
        base = rms_delay_spread(pdp, 1.0)
        assert rms_delay_spread(pdp, 3.5) == pytest.approx(3.5 * base, rel=1e-12)


class TestGenerateTaps:
    def test_deterministic(self):
        cfg = small_config(seed=42)
        a = generate_taps(cfg)
        b = generate_taps(cfg)
        assert np.array_equal(a.taps, b.taps)

    def test_order_independent_substreams(self):
        # the (k, d) block of a bigger system matches a smaller one's
        cfg_small = small_config(seed=9, n_users=1, n_taps=2, n_rf=1)
        cfg_big = small_config(seed=9, n_users=2, n_taps=4)
        small = generate_taps(cfg_small)
        big = generate_taps(cfg_big)
        assert np.allclose(small.taps[0, :2], big.taps[0, :2] *
                           np.sqrt(generate_pdp(2, 1.0).p / generate_pdp(4, 1.0).p[:2])[:, None])

    def test_uniform_limit_tap_power(self):
        # huge decay -> all tap powers ~ 1/D; check the mean within 5 sigma
        draws = 10 ** 4
        cfg = small_config(seed=3, n_subcarriers=16, n_tx=8, n_users=draws,
                           n_taps=16, pdp_decay=1e6)
        taps = generate_taps(cfg)
        per_tap = np.mean(np.abs(taps.taps) ** 2, axis=(0, 2))   # (D,)
        sigma = (1 / 16) / np.sqrt(8 * draws)
        assert np.all(np.abs(per_tap - 1 / 16) <= 5 * sigma)

    def test_moment_matches_pdp(self):
        draws = 10 ** 4
        cfg = small_config(seed=4, n_subcarriers=16, n_tx=8, n_users=draws,
                           n_taps=16, pdp_decay=0.8)
        taps = generate_taps(cfg)
        p0 = generate_pdp(16, 0.8).p[0]
        est = np.mean(np.abs(taps.taps[:, 0, :]) ** 2)
        sigma = p0 / np.sqrt(8 * draws)
        assert abs(est - p0) <= 5 * sigma

    def test_circular_symmetry(self):
        cfg = small_config(seed=5, n_users=500, n_taps=2)
        t = generate_taps(cfg).taps
        # real/imag parts uncorrelated and equal variance
        re, im = t.real.ravel(), t.imag.ravel()
        corr = np.corrcoef(re, im)[0, 1]
        assert abs(corr) < 0.05
        assert np.var(re) == pytest.approx(np.var(im), rel=0.1)


class TestTapsToFrequency:
    def test_single_tap_flat(self, rng):
        taps = TapChannel(taps=crandn(rng, 2, 1, 4))
        h = taps_to_frequency(taps, 8).h
        assert np.allclose(h, h[:, :1, :])

    def test_zero_second_tap_matches_single(self, rng):
        t1 = crandn(rng, 2, 1, 4)
        padded = np.concatenate([t1, np.zeros_like(t1)], axis=1)
        assert np.allclose(taps_to_frequency(TapChannel(t1), 8).h,
                           taps_to_frequency(TapChannel(padded), 8).h)

    def test_naive_dft_oracle(self, rng):
        taps = crandn(rng, 2, 3, 4)
        n = 8
        h = taps_to_frequency(TapChannel(taps), n).h
        for k in range(2):
            for ni in range(n):
                ref = sum(taps[k, d] * np.exp(-2j * np.pi * ni * d / n)
                          for d in range(3))
                assert np.allclose(h[k, ni], ref, atol=1e-12)

    def test_parseval(self, rng):
        for _ in range(5):
            taps = crandn(rng, 2, 5, 4)
            n = 16
            h = taps_to_frequency(TapChannel(taps), n).h
            lhs = np.sum(np.abs(h) ** 2)
            rhs = n * np.sum(np.abs(taps) ** 2)
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_rejects_too_many_taps(self, rng):
        with pytest.raises(ValueError):
            taps_to_frequency(TapChannel(crandn(rng, 1, 9, 2)), 8)


class TestTimeFrequencyEquivalence:
    def test_zero_analog_matrix(self, rng):
        cfg = small_config(n_tx=4, n_taps=3)
        taps = generate_taps(cfg)
        w = crandn(rng, cfg.n_subcarriers, cfg.n_rf, cfg.n_users)
        assert verify_time_frequency_equivalence(
            cfg, taps, np.zeros((4, 2)), w, rng) == 0.0

    def test_narrowband_degenerate(self, rng):
        cfg = small_config(n_subcarriers=1, n_tx=3, n_users=1, n_rf=1, n_taps=1)
        taps = generate_taps(cfg)
        resid = verify_time_frequency_equivalence(
            cfg, taps, 0.5 * np.ones((3, 1)), np.ones((1, 1, 1)), rng)
        assert resid <= 1e-12

    def test_random_instance(self, rng):
        cfg = small_config(n_subcarriers=8, n_tx=4, n_users=2, n_rf=2, n_taps=3)
        taps = generate_taps(cfg)
        p = project_spectral_ball(crandn(rng, 4, 2) * 2)
        w = crandn(rng, 8, 2, 2)
        assert verify_time_frequency_equivalence(cfg, taps, p, w, rng) <= 1e-9


class TestDumpLoad:
    def test_freq_roundtrip(self, rng, tmp_path):
        chan = generate_channel(small_config(seed=8))
        path = tmp_path / "freq.txt"
        dump_channel(chan, path)
        again = load_channel(path)
        assert isinstance(again, FreqChannel)
        assert np.array_equal(chan.h, again.h)

    def test_tap_roundtrip(self, tmp_path):
        taps = generate_taps(small_config(seed=9))
        path = tmp_path / "taps.txt"
        dump_channel(taps, path)
        again = load_channel(path)
        assert isinstance(again, TapChannel)
        assert np.array_equal(taps.taps, again.taps)

    def test_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("something-else 2 2\n1+0j 0+0j\n0+0j 1+0j\n")
        with pytest.raises(ValueError):
            load_channel(path)

    def test_rejects_wrong_count(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text("freq-channel 1 2 2\n1+0j 0+0j\n")
        with pytest.raises(ValueError):
            load_channel(path)
