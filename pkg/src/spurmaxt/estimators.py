"""Covariance estimators and approximate t-statistics.

Three families of per-group covariance estimates are provided:

* ``cov_tilde``: the usual unbiased within-group estimate, consistent under
  any hypothesis.
* ``cov_hat_pair``: deviations taken about the mean pooled over the control
  and one case group, i.e. estimated as if the two groups shared a mean. It
  is unbiased when they do, and inflated by the mean difference otherwise.
* ``cov_global_pooled``: the same idea pooled over every group. Only used as
  a negative control.

The divisor ``n_u - d_u`` with ``d_u = n_u / N_pool`` makes each per-group
estimate unbiased when all pooled groups share their mean and covariance.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .dataset import summarize
from .exceptions import DegenerateVariableError

TWO_SIDED = "two-sided"
ONE_SIDED = "one-sided"
SIDEDNESS = (TWO_SIDED, ONE_SIDED)

# theta-combined diagonal below this multiple of (tilde_0 + tilde_s) falls back to tilde
VARIANCE_FLOOR = 1e-12


def check_sidedness(sidedness):
    aliases = {"two": TWO_SIDED, "two-sided": TWO_SIDED, "two_sided": TWO_SIDED,
               "one": ONE_SIDED, "one-sided": ONE_SIDED, "one_sided": ONE_SIDED,
               "upper": ONE_SIDED, "greater": ONE_SIDED}
    try:
        return aliases[str(sidedness).lower()]
    except KeyError:
        raise ValueError(f"unknown sidedness {sidedness!r}; use 'two-sided' or 'one-sided'") from None


def _symmetrize(a):
    # mirror the upper triangle so (j,k) and (k,j) are bit-identical
    upper = np.triu(a)
    return upper + np.triu(a, 1).T


def scatter(x, center):
    d = x - center
    return _symmetrize(d.T @ d)


def cov_tilde(ds, u):
    """Unbiased within-group covariance of group ``u``."""
    x = ds.groups[u]
    return scatter(x, x.mean(axis=0)) / (x.shape[0] - 1)


def _pooled_cov(ds, u, members):
    x = ds.groups[u]
    total = sum(ds.n(v) for v in members)
    center = sum(ds.groups[v].sum(axis=0) for v in members) / total
    dof = x.shape[0] - x.shape[0] / total
    return scatter(x, center) / dof


def cov_hat_pair(ds, s):
    """Estimates for groups 0 and ``s`` centred on their pooled mean.

    Returns ``(sigma_0, sigma_s)``.
    """
    if not 1 <= s <= ds.m:
        raise IndexError(f"case group index {s} out of range 1..{ds.m}")
    members = (0, s)
    return _pooled_cov(ds, 0, members), _pooled_cov(ds, s, members)


def cov_global_pooled(ds, u):
    """Estimate for group ``u`` centred on the mean pooled over all groups."""
    return _pooled_cov(ds, u, tuple(range(ds.m + 1)))


@dataclass
class CovariancePair:
    """Covariance estimates for the control and case group ``s``.

    ``kind`` is one of ``tilde``, ``hat``, ``theta`` or ``global``. For
    ``theta`` estimates, ``fallback`` lists the variables whose estimates were
    replaced by the tilde ones because the combined variance hit the floor.
    """

    sigma0: np.ndarray
    sigmas: np.ndarray
    kind: str
    s: int
    theta: float = None
    fallback: list = field(default_factory=list)


def tilde_pair(ds, s):
    return CovariancePair(cov_tilde(ds, 0), cov_tilde(ds, s), "tilde", s)


def hat_pair(ds, s):
    h0, hs = cov_hat_pair(ds, s)
    return CovariancePair(h0, hs, "hat", s)


def global_pair(ds, s):
    return CovariancePair(cov_global_pooled(ds, 0), cov_global_pooled(ds, s), "global", s)


def check_theta(theta):
    if not -1.0 < theta <= 1.0:
        warnings.warn(
            f"theta={theta} lies outside (-1, 1]; the combined estimator may have "
            "larger variance than the conventional one",
            stacklevel=3,
        )


def cov_theta_combined(ds, s, theta=1.0):
    """``(theta + 1) * hat - theta * tilde`` for groups 0 and ``s``.

    A variable whose combined variance in either group is at or below
    ``VARIANCE_FLOOR * (tilde_0 + tilde_s)`` falls back to the tilde estimates
    (its whole row and column), and is listed in ``fallback``.
    """
    t0, ts = cov_tilde(ds, 0), cov_tilde(ds, s)
    h0, hs = cov_hat_pair(ds, s)
    c0 = (theta + 1.0) * h0 - theta * t0
    cs = (theta + 1.0) * hs - theta * ts
    floor = VARIANCE_FLOOR * (np.diag(t0) + np.diag(ts))
    bad = np.flatnonzero((np.diag(c0) <= floor) | (np.diag(cs) <= floor))
    if bad.size:
        c0 = c0.copy()
        cs = cs.copy()
        c0[bad, :] = t0[bad, :]
        c0[:, bad] = t0[:, bad]
        cs[bad, :] = ts[bad, :]
        cs[:, bad] = ts[:, bad]
    return CovariancePair(c0, cs, "theta", s, float(theta), bad.tolist())


@dataclass
class TMatrix:
    """Approximate t-statistics, ``values[s-1, j]`` for case group ``s``.

    ``df`` holds the Welch-Satterthwaite degrees of freedom of each statistic.
    """

    values: np.ndarray
    df: np.ndarray
    sidedness: str = TWO_SIDED
    variable_names: tuple = ()

    @property
    def m(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def flat(self):
        return self.values.reshape(-1)

    def normal_scores(self, reference="normal"):
        """Statistics mapped onto the standard normal scale.

        ``reference="normal"`` returns the statistics unchanged (their
        large-sample null law is N(0, 1)). ``reference="t"`` maps each
        statistic through its Welch t distribution first, which keeps the
        marginal tail probabilities honest in small samples.
        """
        t = self.flat()
        if reference == "normal":
            return t.copy()
        if reference != "t":
            raise ValueError(f"unknown reference {reference!r}; use 'normal' or 't'")
        df = self.df.reshape(-1)
        return np.sign(t) * stats.norm.isf(stats.t.sf(np.abs(t), df))

    def raw_pvalues(self, reference="normal"):
        z = self.normal_scores(reference)
        if self.sidedness == TWO_SIDED:
            return 2.0 * stats.norm.sf(np.abs(z))
        return stats.norm.sf(z)


def t_statistics(ds, sidedness=TWO_SIDED):
    sidedness = check_sidedness(sidedness)
    summary = summarize(ds)
    n0 = ds.n(0)
    var0 = np.diag(cov_tilde(ds, 0)) / n0
    values = np.empty((ds.m, ds.p))
    df = np.empty((ds.m, ds.p))
    for s in range(1, ds.m + 1):
        ns = ds.n(s)
        vars_ = np.diag(cov_tilde(ds, s)) / ns
        denom = vars_ + var0
        bad = np.flatnonzero(~(denom > 0))
        if bad.size:
            j = int(bad[0])
            raise DegenerateVariableError(s, j, ds.variable_names[j])
        values[s - 1] = (summary.means[s] - summary.means[0]) / np.sqrt(denom)
        with np.errstate(divide="ignore", invalid="ignore"):
            df[s - 1] = denom**2 / (vars_**2 / (ns - 1) + var0**2 / (n0 - 1))
    return TMatrix(values, df, sidedness, ds.variable_names)


@dataclass
class VarianceRow:
    theta: float
    var_combined: float
    se_combined: float
    var_tilde: float
    se_tilde: float
    diff: float
    se_diff: float
    predicted_diff: float
    exact_diff: float


def _var_and_se(x):
    """Sample variance of ``x`` with a delta-method standard error."""
    c = x - x.mean()
    v = np.mean(c**2) * len(x) / (len(x) - 1)
    se = np.sqrt(np.var(c**2 - v, ddof=1) / len(x))
    return v, se, c**2


def empirical_variance_check(p=2, rho=0.0, n=20, theta_grid=(-0.5, 0.0, 0.5, 1.0), reps=20000, seed=0):
    """Monte Carlo variance of the pooled combined and tilde estimators.

    Two groups of ``n`` samples share mean 0 and the covariance with unit
    variances and common correlation ``rho``. For entry (0, 1) the pooled
    estimates are ``tilde = A / (N - 2)`` and ``hat = (A + B) / (N - 1)`` with
    ``N = 2n``, ``A`` the within-group scatter and ``B`` the between-group
    term. Each row compares ``var[(theta + 1) hat - theta tilde]`` with
    ``var[tilde]`` and also reports the large-sample prediction
    ``{2 (theta + 1) s_jk^2 + (1 - theta^2) s_jj s_kk} / N^2`` and the exact
    Gaussian value ``(1 - theta^2)(s_jk^2 + s_jj s_kk) / ((N - 1)(N - 2))``
    of the difference.
    """
    from .dataset import GroupedDataset

    if p < 2:
        raise ValueError("need p >= 2 to examine an off-diagonal entry")
    rng = np.random.default_rng(seed)
    cov = np.full((p, p), rho)
    np.fill_diagonal(cov, 1.0)
    chol = np.linalg.cholesky(cov)
    big_n = 2 * n
    tilde = np.empty(reps)
    hat = np.empty(reps)
    for r in range(reps):
        x = rng.standard_normal((big_n, p)) @ chol.T
        ds = GroupedDataset((x[:n], x[n:]))
        t0, t1 = cov_tilde(ds, 0), cov_tilde(ds, 1)
        h0, h1 = cov_hat_pair(ds, 1)
        d0 = n - n / big_n
        tilde[r] = ((n - 1) * (t0[0, 1] + t1[0, 1])) / (big_n - 2)
        hat[r] = (d0 * (h0[0, 1] + h1[0, 1])) / (big_n - 1)

    s_jk, s_jj, s_kk = cov[0, 1], cov[0, 0], cov[1, 1]
    var_t, se_t, sq_t = _var_and_se(tilde)
    rows = []
    for theta in theta_grid:
        comb = (theta + 1.0) * hat - theta * tilde
        var_c, se_c, sq_c = _var_and_se(comb)
        dsq = sq_t - sq_c
        diff = var_t - var_c
        se_diff = np.std(dsq, ddof=1) / np.sqrt(reps)
        predicted = (2 * (theta + 1) * s_jk**2 + (1 - theta**2) * s_jj * s_kk) / big_n**2
        exact = (1 - theta**2) * (s_jk**2 + s_jj * s_kk) / ((big_n - 1) * (big_n - 2))
        rows.append(VarianceRow(float(theta), var_c, se_c, var_t, se_t, diff, se_diff, predicted, exact))
    return rows
