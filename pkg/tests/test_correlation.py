import io

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from conftest import make_dataset
from spurmaxt import correlation as corr
from spurmaxt.dataset import GroupedDataset
from spurmaxt.estimators import cov_tilde, t_statistics
from spurmaxt.exceptions import ValidationError


def _within_mask(m, p):
    mask = np.zeros((m * p, m * p), dtype=bool)
    for s in range(m):
        mask[s * p:(s + 1) * p, s * p:(s + 1) * p] = True
    np.fill_diagonal(mask, False)
    return mask


class TestConventional:
    def test_single_case_formula(self, small_ds):
        ds = GroupedDataset(small_ds.groups[:2])
        v = cov_tilde(ds, 1) / ds.n(1) + cov_tilde(ds, 0) / ds.n(0)
        sd = np.sqrt(np.diag(v))
        model = corr.build_conventional(ds)
        assert_allclose(model.psi, v / np.outer(sd, sd), rtol=1e-12)
        assert model.dim == ds.p

    def test_zero_sample_correlation(self):
        x = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        model = corr.build_conventional(GroupedDataset((x, 2 * x + 3)))
        assert model.psi[0, 1] == 0.0

    def test_cross_pair_entry(self, small_ds):
        ds = small_ds
        model = corr.build_conventional(ds)
        t0 = cov_tilde(ds, 0)
        var = [np.diag(cov_tilde(ds, s)) / ds.n(s) + np.diag(t0) / ds.n(0) for s in (1, 2)]
        j, k = 1, 3
        expected = (t0[j, k] / ds.n(0)) / np.sqrt(var[0][j] * var[1][k])
        assert_allclose(model.psi[model.flat_index(1, j), model.flat_index(2, k)], expected, rtol=1e-12)

    def test_shared_control_correlation_matches_simulation(self):
        # equal n and covariances: corr(T_j^(1), T_j^(2)) is about 1/2
        rng = np.random.default_rng(5)
        n = 40
        t1, t2, entries = [], [], []
        for _ in range(3000):
            ds = GroupedDataset(tuple(rng.standard_normal((n, 2)) for _ in range(3)))
            tm = t_statistics(ds).values
            t1.append(tm[0, 0])
            t2.append(tm[1, 0])
            entries.append(corr.build_conventional(ds).psi[0, 2])
        sim = np.corrcoef(t1, t2)[0, 1]
        se = (1 - sim**2) / np.sqrt(len(t1))
        assert abs(sim - np.mean(entries)) < 3 * se + 0.01

    def test_indexing(self):
        model = corr.CorrelationModel(np.eye(6), 2, 3)
        assert model.flat_index(2, 0) == 3
        assert model.hypothesis(4) == (2, 1)


class TestSpurious:
    def test_theta_minus_one_is_conventional(self, small_ds):
        with pytest.warns(UserWarning):
            spurious = corr.build_spurious(small_ds, -1.0)
        assert_allclose(spurious.psi, corr.build_conventional(small_ds).psi, rtol=1e-12, atol=1e-14)

    def test_shifted_pair_raises_correlation(self):
        hits = 0
        for seed in range(50):
            ds = make_dataset(n=(10, 10), p=2, shifts=[[1.5, 1.5]], seed=seed)
            hits += corr.build_spurious(ds).psi[0, 1] > corr.build_conventional(ds).psi[0, 1]
        assert hits >= 45

    def test_only_within_entries_differ(self, small_ds):
        a = corr.build_conventional(small_ds).psi
        b = corr.build_spurious(small_ds).psi
        mask = _within_mask(small_ds.m, small_ds.p)
        assert_array_equal(a[~mask], b[~mask])
        assert np.any(a[mask] != b[mask])

    def test_null_consistency(self):
        gaps = []
        for n in (20, 200, 2000):
            g = []
            for seed in range(5):
                ds = make_dataset(n=(n, n), p=3, rho=0.4, seed=seed)
                g.append(np.abs(corr.build_spurious(ds).psi - corr.build_conventional(ds).psi).max())
            gaps.append(np.mean(g))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.01

    def test_structure(self, small_ds):
        psi = corr.build_spurious(small_ds).psi
        assert_array_equal(psi, psi.T)
        assert_array_equal(np.diag(psi), 1.0)
        assert np.all(np.abs(psi) <= 1.0)

    def test_events_recorded(self, small_ds):
        ev = corr.build_spurious(small_ds).events()
        assert set(ev) >= {"clamped_entries", "repaired", "repair_updates", "diagonal_loading"}


class TestGlobalPooled:
    def test_single_case_equals_theta_zero(self, small_ds):
        ds = GroupedDataset(small_ds.groups[:2])
        assert_allclose(corr.build_global_pooled(ds).psi, corr.build_spurious(ds, 0.0).psi, rtol=1e-12)

    def test_huge_shift_drives_correlation_to_one(self):
        ds = make_dataset(n=(10, 10, 10), p=2, shifts=[[0, 0], [50, 50]], seed=0)
        model = corr.build_global_pooled(ds)
        assert model.psi[0, 1] > 0.95
        assert model.policy == corr.GLOBAL_POOLED

    def test_null_converges_to_conventional(self):
        ds = make_dataset(n=(2000, 2000, 2000), p=2, rho=0.3, seed=1)
        assert_allclose(corr.build_global_pooled(ds).psi, corr.build_conventional(ds).psi, atol=0.02)


class TestHelpers:
    def test_clamp(self):
        psi = np.array([[1.0, 1.2], [1.2, 1.0]])
        out, clamped = corr._clamp(psi)
        assert out[0, 1] == corr.CLAMP
        assert clamped == [(0, 1)]

    def test_loading(self):
        psi = np.full((3, 3), -0.6)
        np.fill_diagonal(psi, 1.0)
        out, lam = corr._with_loading(psi)
        assert lam > 0
        assert corr.is_pd(out)
        assert not corr.is_pd((1 - lam / 2) * psi + lam / 2 * np.eye(3))

    def test_rank_deficient_accepted(self):
        x = np.random.default_rng(0).standard_normal((3, 6))
        c = np.corrcoef(x, rowvar=False)
        assert corr.is_pd(c)

    def test_to_csv(self, small_ds):
        buf = io.StringIO()
        model = corr.build_conventional(small_ds)
        model.to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == model.dim + 1
        assert lines[1].split(",")[0] == "s1:v1"
        assert float(lines[1].split(",")[1]) == 1.0


def _bad_target(seed, d=20):
    """Random correlation matrix pushed outside the PD cone."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((3 * d, d))
    start = np.corrcoef(x, rowvar=False)
    noise = rng.uniform(-0.6, 0.6, (d, d))
    target = np.clip(start + np.triu(noise, 1) + np.triu(noise, 1).T, -0.999, 0.999)
    np.fill_diagonal(target, 1.0)
    return start, target


class TestPsdRepair:
    def test_pd_target_reached(self):
        start = np.eye(3)
        target = np.array([[1.0, 0.5, 0.2], [0.5, 1.0, 0.3], [0.2, 0.3, 1.0]])
        out = corr.psd_repair(start, target, seed=0)
        assert np.abs(out.psi - target).max() < 1e-5

    def test_fixed_point(self):
        c = np.array([[1.0, 0.3], [0.3, 1.0]])
        out = corr.psd_repair(c, c.copy(), seed=0)
        assert_array_equal(out.psi, c)
        assert out.repair_trace == []

    def test_negative_eigenvalue_case(self):
        target = np.full((3, 3), -0.525)
        np.fill_diagonal(target, 1.0)
        assert_allclose(np.linalg.eigvalsh(target).min(), -0.05)
        out = corr.psd_repair(np.eye(3), target, seed=1)
        assert np.linalg.eigvalsh(out.psi).min() > -1e-9
        off = out.psi[np.triu_indices(3, 1)]
        assert np.any((off < 0) & (off > -0.525))

    def test_update_rule(self):
        start, target = _bad_target(2, d=8)
        out = corr.psd_repair(start, target, seed=3)
        for i, j, old, new in out.repair_trace:
            assert_allclose(abs(new - target[i, j]), 0.8 * abs(old - target[i, j]), rtol=1e-9, atol=1e-15)

    def test_segment_and_pd(self):
        start, target = _bad_target(4, d=10)
        out = corr.psd_repair(start, target, seed=0)
        lo, hi = np.minimum(start, target), np.maximum(start, target)
        assert np.all(out.psi >= lo - 1e-15) and np.all(out.psi <= hi + 1e-15)
        assert corr.is_pd(out.psi)

    def test_deterministic(self):
        start, target = _bad_target(6, d=10)
        a = corr.psd_repair(start, target, seed=11)
        b = corr.psd_repair(start, target, seed=11)
        assert_array_equal(a.psi, b.psi)
        assert a.repair_trace == b.repair_trace

    def test_non_pd_start(self):
        bad = np.full((3, 3), -0.6)
        np.fill_diagonal(bad, 1.0)
        with pytest.raises(ValidationError):
            corr.psd_repair(bad, np.eye(3))

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            corr.psd_repair(np.eye(2), np.eye(3))
