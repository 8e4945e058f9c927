"""Correlation models for the vector of t-statistics, and PD repair.

Hypothesis ``(s, j)`` (case group ``s`` in ``1..m``, variable ``j`` in
``0..p-1``) sits at flat index ``(s - 1) * p + j``.

With per-group covariance estimates ``C_u`` the covariance of the mean
differences is approximated by

* same case group:  ``C_s[j, k] / n_s + C_0[j, k] / n_0``
* different groups: ``C_0[j, k] / n_0`` (the shared control),

and the correlation model is this matrix scaled to unit diagonal.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .estimators import (
    CovariancePair,
    check_theta,
    cov_tilde,
    cov_theta_combined,
    global_pair,
    tilde_pair,
)
from .exceptions import DegenerateVariableError, NotPositiveDefiniteError, ValidationError

CONVENTIONAL = "conventional"
SPURIOUS = "spurious"
GLOBAL_POOLED = "global-pooled"

CLAMP = 1.0 - 1e-6
REPAIR_STEP = 0.2
REPAIR_TOL = 1e-6
MAX_SWEEPS = 10_000


def chol_tolerance(d):
    return 1e-10 * d


def try_cholesky(psi, tol=None):
    """Lower Cholesky factor of ``psi + tol * I``, or ``None`` if it fails.

    This is the package-wide positive-definiteness test: a matrix passes when
    its smallest eigenvalue exceeds ``-tol`` (default ``1e-10 * d``), so
    rank-deficient correlation matrices estimated from fewer samples than
    variables are accepted.
    """
    d = psi.shape[0]
    if tol is None:
        tol = chol_tolerance(d)
    a = psi + tol * np.eye(d)
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return None


def is_pd(psi, tol=None):
    return try_cholesky(psi, tol) is not None


def cholesky_factor(psi, tol=None):
    chol = try_cholesky(psi, tol)
    if chol is None:
        raise NotPositiveDefiniteError(
            f"{psi.shape[0]}x{psi.shape[0]} correlation matrix is not positive definite"
        )
    return chol


@dataclass
class CorrelationModel:
    psi: np.ndarray
    m: int
    p: int
    policy: str = CONVENTIONAL
    theta: float = None
    pd: bool = True
    repair_trace: list = field(default_factory=list)
    clamped: list = field(default_factory=list)
    fallback: list = field(default_factory=list)
    loading: float = 0.0
    repaired: bool = False

    @property
    def dim(self):
        return self.psi.shape[0]

    def flat_index(self, s, j):
        return (s - 1) * self.p + j

    def hypothesis(self, i):
        s, j = divmod(int(i), self.p)
        return s + 1, j

    def events(self):
        return {
            "clamped_entries": len(self.clamped),
            "theta_fallback_variables": [list(x) for x in self.fallback],
            "diagonal_loading": self.loading,
            "repaired": self.repaired,
            "repair_updates": len(self.repair_trace),
        }

    def to_csv(self, target, names=None):
        """Write ``psi`` as a labelled square CSV matrix."""
        if names is None:
            names = [f"s{s}:v{j + 1}" for s in range(1, self.m + 1) for j in range(self.p)]
        owned = isinstance(target, (str, os.PathLike))
        stream = open(target, "w", newline="", encoding="utf-8") if owned else target
        try:
            w = csv.writer(stream, lineterminator="\n")
            w.writerow(["", *names])
            for name, row in zip(names, self.psi):
                w.writerow([name, *(repr(float(v)) for v in row)])
        finally:
            if owned:
                stream.close()


def _covariance_blocks(ds, within, cross0):
    """Unnormalised covariance of the statistics.

    ``within[s]`` is the CovariancePair used for the (s, s) block and
    ``cross0`` the control-group estimate used in every (s, t) block.
    """
    m, p = ds.m, ds.p
    n0 = ds.n(0)
    v = np.empty((m * p, m * p))
    for s in range(1, m + 1):
        a = slice((s - 1) * p, s * p)
        pair = within[s]
        v[a, a] = pair.sigmas / ds.n(s) + pair.sigma0 / n0
        for t in range(s + 1, m + 1):
            b = slice((t - 1) * p, t * p)
            v[a, b] = cross0 / n0
            v[b, a] = cross0.T / n0
    return v


def _stat_variances(ds, pairs):
    n0 = ds.n(0)
    return np.concatenate(
        [np.diag(pairs[s].sigmas) / ds.n(s) + np.diag(pairs[s].sigma0) / n0 for s in range(1, ds.m + 1)]
    )


def _check_variances(ds, var):
    bad = np.flatnonzero(~(var > 0))
    if bad.size:
        s, j = divmod(int(bad[0]), ds.p)
        raise DegenerateVariableError(s + 1, j, ds.variable_names[j])


def _normalise(ds, v, within_var, cross_var):
    """Scale ``v`` to correlations; within blocks use ``within_var``."""
    m, p = ds.m, ds.p
    rc = 1.0 / np.sqrt(cross_var)
    psi = v * np.outer(rc, rc)
    rw = 1.0 / np.sqrt(within_var)
    for s in range(m):
        a = slice(s * p, (s + 1) * p)
        psi[a, a] = v[a, a] * np.outer(rw[a], rw[a])
    psi = 0.5 * (psi + psi.T)
    np.fill_diagonal(psi, 1.0)
    return psi


def _clamp(psi):
    out = np.abs(psi) > 1.0
    np.fill_diagonal(out, False)
    idx = np.argwhere(np.triu(out))
    if idx.size:
        psi = psi.copy()
        psi[out] = np.sign(psi[out]) * CLAMP
    return psi, [tuple(int(x) for x in pair) for pair in idx]


def _with_loading(psi):
    """Shrink towards the identity just enough to pass the PD test."""
    if is_pd(psi):
        return psi, 0.0
    eye = np.eye(psi.shape[0])
    lam = 1e-6
    while lam < 1.0:
        loaded = (1.0 - lam) * psi + lam * eye
        if is_pd(loaded):
            return loaded, lam
        lam *= 2.0
    return eye.copy(), 1.0


def _conventional_psi(ds):
    pairs = {s: tilde_pair(ds, s) for s in range(1, ds.m + 1)}
    var = _stat_variances(ds, pairs)
    _check_variances(ds, var)
    v = _covariance_blocks(ds, pairs, cov_tilde(ds, 0))
    return _normalise(ds, v, var, var), var


def build_conventional(ds):
    """Correlations estimated with the unbiased within-group covariances."""
    psi, _ = _conventional_psi(ds)
    psi, clamped = _clamp(psi)
    psi, lam = _with_loading(psi)
    return CorrelationModel(psi, ds.m, ds.p, CONVENTIONAL, clamped=clamped, loading=lam)


def _finish(ds, psi_hat, clamped, base, policy, theta, fallback, seed):
    if is_pd(psi_hat):
        return CorrelationModel(psi_hat, ds.m, ds.p, policy, theta, clamped=clamped,
                                fallback=fallback, loading=base.loading)
    repaired = psd_repair(base, psi_hat, seed=seed)
    repaired.policy = policy
    repaired.theta = theta
    repaired.clamped = clamped
    repaired.fallback = fallback
    return repaired


def build_spurious(ds, theta=1.0, seed=0):
    """Within-group-pair correlations from the theta-combined estimator.

    Entries linking two different case groups are the conventional ones.
    Out-of-range correlations are clamped; a non-PD result is repaired
    towards it starting from the conventional model.
    """
    check_theta(theta)
    base = build_conventional(ds)
    pairs = {}
    fallback = []
    for s in range(1, ds.m + 1):
        pair = cov_theta_combined(ds, s, theta)
        pairs[s] = pair
        fallback.extend((s, j) for j in pair.fallback)
    conv_pairs = {s: tilde_pair(ds, s) for s in range(1, ds.m + 1)}
    cross_var = _stat_variances(ds, conv_pairs)
    within_var = _stat_variances(ds, pairs)
    _check_variances(ds, within_var)
    v = _covariance_blocks(ds, pairs, cov_tilde(ds, 0))
    psi = _normalise(ds, v, within_var, cross_var)
    psi, clamped = _clamp(psi)
    return _finish(ds, psi, clamped, base, SPURIOUS, float(theta), fallback, seed)


def build_global_pooled(ds, seed=0):
    """Negative control: every entry uses covariances pooled over all groups.

    This model does not control the family-wise error rate when some case
    groups differ from the control; it exists for simulation studies.
    """
    base = build_conventional(ds)
    pairs = {s: global_pair(ds, s) for s in range(1, ds.m + 1)}
    var = _stat_variances(ds, pairs)
    _check_variances(ds, var)
    v = _covariance_blocks(ds, pairs, pairs[1].sigma0)
    psi = _normalise(ds, v, var, var)
    psi, clamped = _clamp(psi)
    return _finish(ds, psi, clamped, base, GLOBAL_POOLED, None, [], seed)


def _as_array(x):
    return x.psi if isinstance(x, CorrelationModel) else np.asarray(x, dtype=float)


def psd_repair(psi_tilde, psi_hat, seed=0):
    """Move ``psi_tilde`` towards ``psi_hat`` entry by entry while staying PD.

    Off-diagonal entries are visited in a fresh random order each sweep and
    moved 20% of the way to their target; a move is kept only if the matrix
    still passes the PD test. Iteration stops after a sweep with no accepted
    move, or once every entry moved in the last sweep is within ``1e-6`` of
    its target.
    """
    tilde = _as_array(psi_tilde)
    hat = _as_array(psi_hat)
    if tilde.shape != hat.shape or tilde.shape[0] != tilde.shape[1]:
        raise ValidationError("psd_repair needs two square matrices of the same shape")
    if not is_pd(tilde):
        raise ValidationError("starting matrix is not positive definite; regularise it first")
    d = tilde.shape[0]
    if isinstance(psi_tilde, CorrelationModel):
        m, p, loading = psi_tilde.m, psi_tilde.p, psi_tilde.loading
    else:
        m, p, loading = 1, d, 0.0

    rng = np.random.default_rng(seed)
    psi = tilde.copy()
    iu, ju = np.triu_indices(d, 1)
    movable = hat[iu, ju] != tilde[iu, ju]
    iu, ju = iu[movable], ju[movable]
    trace = []
    tol = chol_tolerance(d)
    for _ in range(MAX_SWEEPS):
        accepted = 0
        worst = 0.0
        for idx in rng.permutation(iu.size):
            i, j = iu[idx], ju[idx]
            old = psi[i, j]
            goal = hat[i, j]
            # rounding must never carry an entry past its target
            new = min(max(old + REPAIR_STEP * (goal - old), min(old, goal)), max(old, goal))
            if new == old:
                continue
            psi[i, j] = psi[j, i] = new
            if try_cholesky(psi, tol) is None:
                psi[i, j] = psi[j, i] = old
                continue
            accepted += 1
            trace.append((int(i), int(j), float(old), float(new)))
            worst = max(worst, abs(hat[i, j] - new))
        if accepted == 0 or worst < REPAIR_TOL:
            break
    return CorrelationModel(psi, m, p, SPURIOUS, repair_trace=trace, loading=loading, repaired=True)
