"""Monte Carlo engine for the maximum of a correlated standard Gaussian vector.

One pool of draws ``X = Z L^T`` is shared by every query of an analysis, so
tail probabilities over nested subsets are monotone by construction. Draws
are generated in fixed-size blocks, each with its own stream derived from
``(seed, block index)``; the pool is therefore the same for any number of
worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .correlation import CorrelationModel, cholesky_factor
from scipy import stats

from .estimators import ONE_SIDED, TWO_SIDED, TMatrix, check_sidedness
from .seeding import rng_for

BLOCK_ROWS = 8192
DEFAULT_DRAWS = 100_000
SIMULATION_DRAWS = 20_000
MIN_DRAWS = 1000
THREADS_ENV = "SPURMAXT_THREADS"


def default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def standard_normal_pool(d, n_draws, seed, threads=None):
    """``n_draws x d`` iid standard normals, reproducible per ``seed``."""
    n_draws = int(n_draws)
    threads = threads or default_threads()
    starts = list(range(0, n_draws, BLOCK_ROWS))

    def block(b):
        rows = min(BLOCK_ROWS, n_draws - starts[b])
        return rng_for(seed, "mvn-block", b).standard_normal((rows, d))

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(block, range(len(starts))))
    else:
        parts = [block(b) for b in range(len(starts))]
    return np.concatenate(parts, axis=0) if parts else np.empty((0, d))


def _subset_mask(d, subset):
    if subset is None:
        return slice(None)
    idx = np.asarray(sorted(subset), dtype=int)
    if idx.size == 0:
        raise ValueError("empty subset")
    return idx


@dataclass
class MaxDistSample:
    """Draws of the correlated Gaussian vector, ready for max-type queries.

    For two-sided use the draws are stored as absolute values, so every
    query is one-sided on the stored array.
    """

    draws: np.ndarray
    seed: int
    sidedness: str = TWO_SIDED

    @classmethod
    def from_normals(cls, normals, chol, seed, sidedness=TWO_SIDED):
        x = normals @ chol.T
        if sidedness == TWO_SIDED:
            np.abs(x, out=x)
        return cls(x, seed, sidedness)

    @property
    def n_draws(self):
        return self.draws.shape[0]

    @property
    def dim(self):
        return self.draws.shape[1]

    def _stat(self, c):
        return abs(c) if self.sidedness == TWO_SIDED else c

    def max_values(self, subset=None):
        cols = _subset_mask(self.dim, subset)
        return self.draws[:, cols].max(axis=1)

    def tail_prob(self, c, subset=None):
        """Fraction of draws whose max over ``subset`` exceeds ``c``, with its SE."""
        mx = self.max_values(subset)
        est = float(np.count_nonzero(mx > self._stat(c))) / self.n_draws
        return est, math.sqrt(est * (1.0 - est) / self.n_draws)

    def marginal_tail(self, c):
        """Exact single-coordinate tail probability at ``c``."""
        c = np.asarray(c, dtype=float)
        if self.sidedness == TWO_SIDED:
            return 2.0 * stats.norm.sf(np.abs(c))
        return stats.norm.sf(c)

    def critical_value(self, alpha, subset=None, union_bound=False):
        """Order statistic ``ceil((1 - alpha) N)`` of the subset maxima.

        With ``union_bound`` the value is capped at the Bonferroni limit for
        the subset size, which the true quantile never exceeds.
        """
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        mx = self.max_values(subset)
        k = _quantile_rank(alpha, self.n_draws)
        c = float(np.partition(mx, k - 1)[k - 1])
        if union_bound:
            size = self.dim if subset is None else len(subset)
            c = min(c, bonferroni_limit(alpha, size, self.sidedness))
        return c

    def suffix_maxima(self, order):
        """Row-wise max over columns ``order[r:]`` for every rank ``r``."""
        x = self.draws[:, order]
        return np.maximum.accumulate(x[:, ::-1], axis=1)[:, ::-1]

    def adjusted_pvalues(self, z, step_down=True, union_bound=False):
        """Max-statistic adjusted p-values for statistics ``z`` (flat).

        Single-step: the tail probability of the overall max at each
        statistic. Step-down: hypotheses ordered by decreasing statistic; the
        one at rank ``r`` is referred to the max over ranks ``r..d-1``, and
        the running maximum enforces monotonicity.

        ``union_bound`` caps each tail estimate by the corresponding
        Bonferroni (single-step) or Holm (step-down) bound, removing Monte
        Carlo noise that would otherwise land above a known upper bound.
        """
        z = np.asarray(z, dtype=float)
        stat = np.abs(z) if self.sidedness == TWO_SIDED else z
        d = stat.size
        if not step_down:
            mx = np.sort(self.max_values())
            above = self.n_draws - np.searchsorted(mx, stat, side="right")
            p = above / self.n_draws
            if union_bound:
                p = np.minimum(p, d * self.marginal_tail(stat))
            return p
        order = np.argsort(-stat, kind="stable")
        suffix = self.suffix_maxima(order)
        raw = np.count_nonzero(suffix > stat[order], axis=0) / self.n_draws
        if union_bound:
            raw = np.minimum(raw, (d - np.arange(d)) * self.marginal_tail(stat[order]))
        adj = np.maximum.accumulate(raw)
        out = np.empty_like(adj)
        out[order] = adj
        return out


def bonferroni_limit(alpha, size, sidedness=TWO_SIDED):
    level = alpha / size
    if sidedness == TWO_SIDED:
        level /= 2.0
    return float(stats.norm.isf(level))


def _quantile_rank(alpha, n):
    k = math.ceil((1.0 - alpha) * n - 1e-9)
    return min(max(k, 1), n)


def _psi_array(psi):
    return psi.psi if isinstance(psi, CorrelationModel) else np.asarray(psi, dtype=float)


def sample_max_distribution(psi, n_draws=DEFAULT_DRAWS, seed=0, sidedness=TWO_SIDED, threads=None):
    sidedness = check_sidedness(sidedness)
    if n_draws < MIN_DRAWS:
        raise ValueError(f"n_draws must be >= {MIN_DRAWS}")
    a = _psi_array(psi)
    chol = cholesky_factor(a)
    normals = standard_normal_pool(a.shape[0], n_draws, seed, threads)
    return MaxDistSample.from_normals(normals, chol, seed, sidedness)


def tail_prob(psi, c, subset=None, n_draws=DEFAULT_DRAWS, seed=0, sidedness=TWO_SIDED):
    """P(max over ``subset`` of X_i (or |X_i|) > c) for X ~ N(0, psi).

    The pool always spans the full dimension, so calls with the same seed
    and nested subsets are monotone.
    """
    pool = sample_max_distribution(psi, n_draws, seed, sidedness)
    return pool.tail_prob(c, subset)


def critical_value(psi, alpha, subset=None, n_draws=DEFAULT_DRAWS, seed=0, sidedness=TWO_SIDED):
    pool = sample_max_distribution(psi, n_draws, seed, sidedness)
    return pool.critical_value(alpha, subset)


def adjusted_pvalues(t, psi, step_down=True, n_draws=DEFAULT_DRAWS, seed=0, sidedness=None,
                     reference="normal"):
    """Adjusted p-values of a TMatrix (or flat statistics) against ``psi``."""
    if isinstance(t, TMatrix):
        z = t.normal_scores(reference)
        sidedness = sidedness or t.sidedness
    else:
        z = np.asarray(t, dtype=float).reshape(-1)
        sidedness = sidedness or TWO_SIDED
    pool = sample_max_distribution(psi, n_draws, seed, sidedness)
    return pool.adjusted_pvalues(z, step_down=step_down)


__all__ = [
    "MaxDistSample",
    "ONE_SIDED",
    "TWO_SIDED",
    "adjusted_pvalues",
    "critical_value",
    "sample_max_distribution",
    "standard_normal_pool",
    "tail_prob",
]
