import numpy as np
import pytest

from milacbeam.milac_net import spectral_norm
from milacbeam.realize import (aggregate_targets, dump_targets, load_targets,
                               min_rf_chains, realization_residual,
                               realize_fully_digital, split_aggregate)

from conftest import crandn


class TestMinRfChains:
    def test_fullscale_dimensions(self):
        assert min_rf_chains(64, 4, 64) == 64

    def test_narrowband_reduces_to_user_count(self):
        assert min_rf_chains(64, 4, 1) == 4

    def test_antenna_limited(self):
        assert min_rf_chains(2, 3, 5) == 2

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            min_rf_chains(0, 2, 4)


class TestAggregate:
    def test_roundtrip(self, rng):
        t = crandn(rng, 3, 4, 2)
        agg = aggregate_targets(t)
        assert agg.shape == (4, 6)
        assert np.array_equal(split_aggregate(agg, 3), t)

    def test_column_order(self, rng):
        t = crandn(rng, 2, 3, 2)
        agg = aggregate_targets(t)
        assert np.array_equal(agg[:, 0], t[0, :, 0])
        assert np.array_equal(agg[:, 1], t[0, :, 1])
        assert np.array_equal(agg[:, 2], t[1, :, 0])


class TestRealizeFullyDigital:
    def test_frequency_flat_needs_user_count(self, rng):
        w_flat = crandn(rng, 1, 6, 3)
        targets = np.repeat(w_flat, 4, axis=0)
        p, w, used = realize_fully_digital(targets)
        assert used == 3
        assert realization_residual(p, w, targets) <= 1e-10
        assert spectral_norm(p) == pytest.approx(1.0, abs=1e-12)

    def test_full_rank_needs_antenna_count(self, rng):
        targets = crandn(rng, 4, 3, 2)       # K*N = 8 >= N_T = 3
        p, w, used = realize_fully_digital(targets)
        assert used == 3
        assert realization_residual(p, w, targets) <= 1e-10

    def test_synthetic_rank_three(self, rng):
        left = crandn(rng, 6, 3)
        right = crandn(rng, 3, 8)
        targets = split_aggregate(left @ right, 4)
        p, w, used = realize_fully_digital(targets)
        assert used == 3
        assert realization_residual(p, w, targets) <= 1e-9

    def test_power_preserved(self, rng):
        targets = crandn(rng, 4, 5, 2)
        _, w, _ = realize_fully_digital(targets)
        assert np.sum(np.abs(w) ** 2) == pytest.approx(
            np.sum(np.abs(targets) ** 2), rel=1e-12)

    def test_padding_keeps_unit_norm(self, rng):
        left = crandn(rng, 6, 2)
        right = crandn(rng, 2, 8)
        targets = split_aggregate(left @ right, 4)
        p, w, used = realize_fully_digital(targets, n_rf=5)
        assert used == 2
        assert p.shape == (6, 5)
        assert w.shape == (4, 5, 2)
        assert spectral_norm(p) == pytest.approx(1.0, abs=1e-12)
        # padded columns stay orthonormal and silent
        assert np.allclose(np.conj(p).T @ p, np.eye(5), atol=1e-12)
        assert np.allclose(w[:, 2:, :], 0.0)
        assert realization_residual(p, w, targets) <= 1e-10

    def test_rejects_all_zero(self):
        with pytest.raises(ValueError):
            realize_fully_digital(np.zeros((2, 3, 1)))


class TestRealizationResidual:
    def test_construction_residual_tiny(self, rng):
        targets = crandn(rng, 3, 4, 2)
        p, w, _ = realize_fully_digital(targets)
        assert realization_residual(p, w, targets) <= 1e-10

    def test_eckart_young_lower_bound(self, rng):
        # with one chain less than the rank, no factorization beats the tail
        for _ in range(20):
            targets = crandn(rng, 4, 4, 2)     # aggregate 4 x 8, rank 4
            agg = aggregate_targets(targets)
            s = np.linalg.svd(agg, compute_uv=False)
            bound = s[3] / np.linalg.norm(agg)
            p, w, _ = realize_fully_digital(targets, n_rf=3)
            resid = realization_residual(p, w, targets)
            assert resid >= bound - 1e-12
            # the SVD truncation achieves the tail exactly
            assert resid == pytest.approx(
                np.sqrt(np.sum(s[3:] ** 2)) / np.linalg.norm(agg), rel=1e-9)

    def test_arbitrary_factorization_respects_bound(self, rng):
        targets = crandn(rng, 4, 4, 2)
        agg = aggregate_targets(targets)
        s = np.linalg.svd(agg, compute_uv=False)
        bound = s[3] / np.linalg.norm(agg)
        for _ in range(20):
            p = crandn(rng, 4, 3)
            w = crandn(rng, 4, 3, 2)
            assert realization_residual(p, w, targets) >= bound - 1e-12

    def test_zero_analog_matrix(self, rng):
        targets = crandn(rng, 2, 3, 2)
        assert realization_residual(np.zeros((3, 2)), np.zeros((2, 2, 2)),
                                    targets) == pytest.approx(1.0, rel=1e-12)

    def test_rejects_zero_targets(self, rng):
        with pytest.raises(ValueError):
            realization_residual(np.zeros((3, 2)), crandn(rng, 2, 2, 2),
                                 np.zeros((2, 3, 2)))


def test_targets_dump_roundtrip(rng, tmp_path):
    targets = crandn(rng, 3, 4, 2)
    path = tmp_path / "targets.txt"
    dump_targets(targets, path)
    assert np.array_equal(load_targets(path), targets)
