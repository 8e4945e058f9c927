"""Independent reference computations used by the tests.

Everything here is written with explicit loops or closed forms so that it
shares no code with the package.
"""

import math

import numpy as np
from scipy import stats

# Frozen closed-form values (regenerated by TestOracleValues)
Z_975 = 1.9599639845400545  # one test, two-sided, alpha 0.05
SIDAK_D2_TWO_SIDED = 2.2364766445577895  # Phi^-1((1 + sqrt(0.95)) / 2)
SIDAK_D5_TAIL_AT_2569 = 0.04996653832644571  # 1 - (2 Phi(2.569) - 1)^5
BONF_50_RAW_001 = 3.2905267314918945  # |t| with two-sided raw p 0.001
T_HAND = 2.1213203435596424  # 3 / sqrt(2)


def brute_cov(rows, center=None, divisor=None):
    """Covariance by triple loop; ``center`` defaults to the row mean."""
    n = len(rows)
    p = len(rows[0])
    if center is None:
        center = [sum(r[j] for r in rows) / n for j in range(p)]
    if divisor is None:
        divisor = n - 1
    out = np.zeros((p, p))
    for j in range(p):
        for k in range(p):
            acc = 0.0
            for r in rows:
                acc += (r[j] - center[j]) * (r[k] - center[k])
            out[j, k] = acc / divisor
    return out


def pooled_center(groups):
    p = len(groups[0][0])
    total = sum(len(g) for g in groups)
    return [sum(r[j] for g in groups for r in g) / total for j in range(p)]


def unbiased_divisor(n_u, n_total):
    """Divisor making the pooled-center scatter of one group unbiased.

    E[sum_i (y_i - g)^2] for group u with g the pooled mean of N draws equals
    sigma^2 (n_u - 2 n_u / N + n_u / N) = sigma^2 (n_u - n_u / N).
    """
    return n_u - n_u / n_total


def welch_t(x0, xs):
    n0, ns = len(x0), len(xs)
    m0, ms = sum(x0) / n0, sum(xs) / ns
    v0 = sum((x - m0) ** 2 for x in x0) / (n0 - 1)
    vs = sum((x - ms) ** 2 for x in xs) / (ns - 1)
    return (ms - m0) / math.sqrt(vs / ns + v0 / n0)


def a_b_terms(x0, x1, j, k):
    """Within-group scatter A and between-group term B for entry (j, k)."""
    groups = [x0, x1]
    means = [g.mean(axis=0) for g in groups]
    grand = np.vstack(groups).mean(axis=0)
    a = 0.0
    b = 0.0
    for g, mu in zip(groups, means):
        for row in g:
            a += (row[j] - mu[j]) * (row[k] - mu[k])
        b += len(g) * (mu[j] - grand[j]) * (mu[k] - grand[k])
    return a, b


def sidak_tail(c, d, two_sided=True):
    one = 2.0 * stats.norm.sf(c) if two_sided else stats.norm.sf(c)
    return 1.0 - (1.0 - one) ** d


def sidak_critical(alpha, d, two_sided=True):
    level = 1.0 - (1.0 - alpha) ** (1.0 / d)
    return stats.norm.isf(level / 2.0 if two_sided else level)


def collapse_tail(c, two_sided=True):
    return 2.0 * stats.norm.sf(c) if two_sided else stats.norm.sf(c)


def collapse_critical(alpha, two_sided=True):
    return stats.norm.isf(alpha / 2.0 if two_sided else alpha)


def quantile_se(alpha, n_draws, density):
    """Asymptotic standard error of an empirical quantile."""
    return math.sqrt(alpha * (1.0 - alpha) / n_draws) / density


def max_density_independent(c, d, two_sided=True):
    """Density of the max of d iid |N(0,1)| (or N(0,1)) variables at c."""
    if two_sided:
        cdf = 2.0 * stats.norm.cdf(c) - 1.0
        pdf = 2.0 * stats.norm.pdf(c)
    else:
        cdf = stats.norm.cdf(c)
        pdf = stats.norm.pdf(c)
    return d * cdf ** (d - 1) * pdf


def uniform_block_eigs(b, rho):
    return sorted([1.0 + (b - 1) * rho] + [1.0 - rho] * (b - 1))
