import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

import oracles
from spurmaxt import mvn
from spurmaxt.estimators import ONE_SIDED, TWO_SIDED

N = 40_000


def _exchangeable(d, rho):
    a = np.full((d, d), rho)
    np.fill_diagonal(a, 1.0)
    return a


class TestTailProb:
    def test_independent_product(self):
        est, se = mvn.tail_prob(np.eye(5), 2.569, n_draws=N, seed=1)
        assert abs(est - oracles.SIDAK_D5_TAIL_AT_2569) < 3 * se

    def test_perfect_correlation_collapse(self):
        est, se = mvn.tail_prob(np.ones((4, 4)), 1.8, n_draws=N, seed=2)
        assert abs(est - oracles.collapse_tail(1.8)) < 3 * se

    def test_limits(self):
        assert mvn.tail_prob(np.eye(3), 50.0, n_draws=2000)[0] == 0.0
        assert mvn.tail_prob(np.eye(3), -np.inf, n_draws=2000, sidedness=ONE_SIDED)[0] == 1.0

    def test_nested_subsets_monotone(self):
        psi = _exchangeable(6, 0.4)
        pool = mvn.sample_max_distribution(psi, 5000, seed=3)
        small = pool.tail_prob(2.0, [0, 1])[0]
        mid = pool.tail_prob(2.0, [0, 1, 4])[0]
        full = pool.tail_prob(2.0)[0]
        assert small <= mid <= full
        assert pool.critical_value(0.05, [0, 1]) <= pool.critical_value(0.05)

    def test_module_level_subsets_share_pool(self):
        psi = _exchangeable(5, 0.2)
        a = mvn.tail_prob(psi, 2.2, subset=[0, 2], n_draws=3000, seed=9)[0]
        b = mvn.tail_prob(psi, 2.2, subset=[0, 2, 3], n_draws=3000, seed=9)[0]
        assert a <= b

    def test_se_scaling(self):
        ratios = []
        for rep in range(20):
            _, se1 = mvn.tail_prob(np.eye(3), 2.0, n_draws=5000, seed=100 + rep)
            _, se2 = mvn.tail_prob(np.eye(3), 2.0, n_draws=10000, seed=200 + rep)
            ratios.append(se1 / se2)
        assert_allclose(np.mean(ratios), math.sqrt(2), rtol=0.05)

    def test_min_draws(self):
        with pytest.raises(ValueError):
            mvn.tail_prob(np.eye(2), 1.0, n_draws=10)


class TestCriticalValue:
    @pytest.mark.parametrize("d", [1, 2, 5])
    def test_sidak(self, d):
        c = mvn.critical_value(np.eye(d), 0.05, n_draws=N, seed=4)
        target = oracles.sidak_critical(0.05, d)
        se = oracles.quantile_se(0.05, N, oracles.max_density_independent(target, d))
        assert abs(c - target) < 3 * se

    def test_sidak_two_frozen(self):
        assert_allclose(oracles.sidak_critical(0.05, 2), 2.2365, atol=5e-5)

    def test_collapse(self):
        c = mvn.critical_value(np.ones((5, 5)), 0.05, n_draws=N, seed=5)
        se = oracles.quantile_se(0.05, N, 2 * stats.norm.pdf(oracles.Z_975))
        assert abs(c - oracles.Z_975) < 3 * se

    def test_tail_at_critical_value(self):
        pool = mvn.sample_max_distribution(_exchangeable(4, 0.3), 20000, seed=6)
        c = pool.critical_value(0.05)
        assert abs(pool.tail_prob(c)[0] - 0.05) <= 1.0 / pool.n_draws

    def test_union_bound_cap(self):
        pool = mvn.sample_max_distribution(np.eye(3), 1000, seed=7)
        assert pool.critical_value(0.05, union_bound=True) <= mvn.bonferroni_limit(0.05, 3)

    def test_reproducible(self):
        psi = _exchangeable(4, 0.5)
        assert mvn.critical_value(psi, 0.05, n_draws=5000, seed=8) == mvn.critical_value(psi, 0.05, n_draws=5000, seed=8)

    def test_threads_do_not_change_pool(self):
        a = mvn.standard_normal_pool(3, 20000, seed=1, threads=1)
        b = mvn.standard_normal_pool(3, 20000, seed=1, threads=3)
        assert_array_equal(a, b)


class TestMaxDistSample:
    def test_marginals(self):
        pool = mvn.sample_max_distribution(_exchangeable(3, 0.7), N, seed=10, sidedness=ONE_SIDED)
        x = pool.draws
        assert np.all(np.abs(x.mean(axis=0)) < 3 / math.sqrt(N))
        assert_allclose(x.var(axis=0), 1.0, atol=0.03)
        assert_allclose(np.corrcoef(x, rowvar=False)[0, 1], 0.7, atol=0.02)

    def test_two_sided_stores_absolute(self):
        pool = mvn.sample_max_distribution(np.eye(2), 2000, seed=1, sidedness=TWO_SIDED)
        assert np.all(pool.draws >= 0)

    def test_suffix_maxima(self):
        pool = mvn.MaxDistSample(np.array([[1.0, 3.0, 2.0], [0.0, -1.0, 5.0]]), 0, ONE_SIDED)
        assert_array_equal(pool.suffix_maxima([1, 0, 2]), [[3.0, 2.0, 2.0], [5.0, 5.0, 5.0]])


class TestAdjustedPvalues:
    def test_all_zero_two_sided(self):
        p = mvn.adjusted_pvalues(np.zeros(4), np.eye(4), step_down=False, n_draws=5000)
        assert_array_equal(p, 1.0)

    def test_all_zero_one_sided(self):
        p = mvn.adjusted_pvalues(np.zeros(3), np.eye(3), step_down=False, n_draws=N, sidedness=ONE_SIDED)
        assert_allclose(p, 1 - 0.5**3, atol=0.01)
        assert np.all(p > 0.05)

    def test_single_dimension(self):
        p = mvn.adjusted_pvalues(np.array([1.7]), np.eye(1), n_draws=N, seed=3)
        target = 2 * stats.norm.sf(1.7)
        assert abs(p[0] - target) < 3 * math.sqrt(target * (1 - target) / N)

    def test_step_down_monotone(self):
        z = np.array([0.5, 3.1, 2.2, -1.0, 2.9])
        p = mvn.adjusted_pvalues(z, _exchangeable(5, 0.3), step_down=True, n_draws=5000, seed=2)
        order = np.argsort(-np.abs(z))
        assert np.all(np.diff(p[order]) >= 0)

    def test_step_down_below_single_step(self):
        z = np.array([0.5, 3.1, 2.2, -1.0, 2.9])
        psi = _exchangeable(5, 0.3)
        sd = mvn.adjusted_pvalues(z, psi, step_down=True, n_draws=5000, seed=2)
        ss = mvn.adjusted_pvalues(z, psi, step_down=False, n_draws=5000, seed=2)
        assert np.all(sd <= ss)
