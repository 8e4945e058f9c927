"""Multiple testing procedures: Bonferroni, maxT, step-down maxT and Proposal.

All max-type procedures refer the statistics to the maximum of a correlated
standard Gaussian vector. They differ only in the correlation model and in
whether the reference set shrinks as hypotheses are rejected.

``Proposal`` is the step-down maxT procedure run on the spurious-correlation
model, whose within-group-pair correlations come from the theta-combined
covariance estimator.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import correlation as corr
from .estimators import TWO_SIDED, check_sidedness, check_theta, t_statistics
from .exceptions import ValidationError
from .mvn import DEFAULT_DRAWS, MaxDistSample, bonferroni_limit, standard_normal_pool
from .seeding import SEED_SCHEME, derive_seed, fresh_seed

SCHEMA_VERSION = 1

BONFERRONI = "bonferroni"
MAXT = "maxt"
STEP_DOWN = "sdmaxt"
PROPOSAL = "proposal"
GLOBAL_POOLED_SD = "global-pooled"
METHODS = (BONFERRONI, MAXT, STEP_DOWN, PROPOSAL)
NEGATIVE_CONTROLS = (GLOBAL_POOLED_SD,)

_ALIASES = {
    "bon": BONFERRONI, "bonferroni": BONFERRONI,
    "maxt": MAXT, "max-t": MAXT, "single-step": MAXT,
    "sdmaxt": STEP_DOWN, "stepdown": STEP_DOWN, "step-down": STEP_DOWN, "sd-maxt": STEP_DOWN,
    "proposal": PROPOSAL, "spurious": PROPOSAL,
    "global-pooled": GLOBAL_POOLED_SD, "global_pooled": GLOBAL_POOLED_SD, "global": GLOBAL_POOLED_SD,
}

REFERENCES = ("normal", "t")


def canonical_method(name):
    try:
        return _ALIASES[str(name).lower()]
    except KeyError:
        raise ValidationError(
            f"unknown method {name!r}; choose from {', '.join(METHODS + NEGATIVE_CONTROLS)}"
        ) from None


@dataclass
class HypothesisResult:
    s: int
    j: int
    variable: str
    t: float
    df: float
    z: float
    raw_p: float
    adjusted_p: float
    rejected: bool


@dataclass
class TestOutcome:
    """Per-hypothesis results and the settings that produced them."""

    __test__ = False  # not a pytest class

    method: str
    alpha: float
    sidedness: str
    reference: str
    hypotheses: list
    critical_values: list = field(default_factory=list)
    correlation_policy: str = None
    theta: float = None
    seed: int = None
    n_draws: int = None
    events: dict = field(default_factory=dict)

    @property
    def adjusted_p(self):
        return np.array([h.adjusted_p for h in self.hypotheses])

    @property
    def rejected(self):
        return np.array([h.rejected for h in self.hypotheses], dtype=bool)

    @property
    def n_rejected(self):
        return int(self.rejected.sum())

    def to_dict(self):
        out = asdict(self)
        out["hypotheses"] = [asdict(h) for h in self.hypotheses]
        return _jsonable(out)

    def to_json(self, config=None, indent=2):
        payload = {"schema_version": SCHEMA_VERSION}
        if config is not None:
            payload["config"] = _jsonable(config)
        payload["outcome"] = self.to_dict()
        return json.dumps(payload, indent=indent, sort_keys=False)

    def to_text(self):
        lines = [
            f"method: {self.method}   alpha: {self.alpha}   sidedness: {self.sidedness}   "
            f"reference: {self.reference}",
        ]
        if self.correlation_policy:
            extra = f"   theta: {self.theta}" if self.theta is not None else ""
            lines.append(f"correlation: {self.correlation_policy}{extra}   draws: {self.n_draws}   seed: {self.seed}")
        if self.critical_values:
            shown = ", ".join(f"{c:.4f}" for c in self.critical_values[:8])
            more = " ..." if len(self.critical_values) > 8 else ""
            lines.append(f"critical values: {shown}{more}")
        width = max([8] + [len(h.variable) for h in self.hypotheses])
        header = f"{'group':>5}  {'variable':<{width}}  {'t':>9}  {'raw p':>10}  {'adj p':>10}  reject"
        lines.append(header)
        lines.append("-" * len(header))
        for h in self.hypotheses:
            lines.append(
                f"{h.s:>5}  {h.variable:<{width}}  {h.t:>9.4f}  {h.raw_p:>10.4g}  "
                f"{h.adjusted_p:>10.4g}  {'yes' if h.rejected else 'no'}"
            )
        lines.append(f"rejected {self.n_rejected} of {len(self.hypotheses)}")
        return "\n".join(lines) + "\n"

    def to_csv_rows(self):
        cols = ["s", "j", "variable", "t", "df", "z", "raw_p", "adjusted_p", "rejected"]
        rows = [cols]
        for h in self.hypotheses:
            rows.append([getattr(h, c) for c in cols])
        return rows


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")


def _outcome(tm, reference, adjusted, alpha, method, **meta):
    z = tm.normal_scores(reference)
    raw = tm.raw_pvalues(reference)
    df = tm.df.reshape(-1)
    names = tm.variable_names or tuple(f"v{j + 1}" for j in range(tm.p))
    hyps = []
    for i, (zi, ti, pi, ai) in enumerate(zip(z, tm.flat(), raw, adjusted)):
        s, j = divmod(i, tm.p)
        hyps.append(HypothesisResult(s + 1, j, names[j], float(ti), float(df[i]), float(zi),
                                     float(pi), float(ai), bool(ai <= alpha)))
    return TestOutcome(method, alpha, tm.sidedness, reference, hyps, **meta)


def bonferroni(t, alpha=0.05, reference="normal"):
    """Adjusted p = min(1, d * marginal p) with d = m * p hypotheses."""
    _check_alpha(alpha)
    raw = t.raw_pvalues(reference)
    d = raw.size
    adjusted = np.minimum(1.0, d * raw)
    return _outcome(t, reference, adjusted, alpha, BONFERRONI,
                    critical_values=[bonferroni_limit(alpha, d, t.sidedness)])


def _pool(psi, n_draws, seed, sidedness, normals=None):
    a = psi.psi if isinstance(psi, corr.CorrelationModel) else np.asarray(psi, dtype=float)
    chol = corr.cholesky_factor(a)
    if normals is None:
        normals = standard_normal_pool(a.shape[0], n_draws, seed)
    return MaxDistSample.from_normals(normals, chol, seed, sidedness)


def _step_down_criticals(pool, z, adjusted, alpha):
    stat = np.abs(z) if pool.sidedness == TWO_SIDED else z
    order = np.argsort(-stat, kind="stable")
    crit = []
    for r in range(order.size):
        crit.append(pool.critical_value(alpha, order[r:], union_bound=True))
        if adjusted[order[r]] > alpha:
            break
    return crit


def _maxt(t, psi, alpha, n_draws, seed, reference, step_down, method, pool=None, **meta):
    _check_alpha(alpha)
    z = t.normal_scores(reference)
    if pool is None:
        pool = _pool(psi, n_draws, seed, t.sidedness)
    adjusted = pool.adjusted_pvalues(z, step_down=step_down, union_bound=True)
    if step_down:
        crit = _step_down_criticals(pool, z, adjusted, alpha)
    else:
        crit = [pool.critical_value(alpha, union_bound=True)]
    policy = psi.policy if isinstance(psi, corr.CorrelationModel) else "user"
    events = psi.events() if isinstance(psi, corr.CorrelationModel) else {}
    return _outcome(t, reference, adjusted, alpha, method, critical_values=crit,
                    correlation_policy=policy, seed=seed, n_draws=pool.n_draws,
                    events=events, **meta)


def maxt_single_step(t, psi, alpha=0.05, n_draws=DEFAULT_DRAWS, seed=0, reference="normal", pool=None):
    """Common critical value from the max over all hypotheses."""
    return _maxt(t, psi, alpha, n_draws, seed, reference, False, MAXT, pool=pool)


def maxt_step_down(t, psi, alpha=0.05, n_draws=DEFAULT_DRAWS, seed=0, reference="normal", pool=None):
    """Step-down maxT: each step refers to the max over not-yet-rejected hypotheses."""
    return _maxt(t, psi, alpha, n_draws, seed, reference, True, STEP_DOWN, pool=pool)


def proposal(ds, alpha=0.05, theta=1.0, n_draws=DEFAULT_DRAWS, seed=0, sidedness=TWO_SIDED,
             reference="normal"):
    """Step-down maxT on the spurious-correlation model.

    ``seed`` is the run seed: the Gaussian pool uses ``derive_seed(seed, "mvn")``
    (shared with the maxT methods) and the PD repair ``derive_seed(seed, "repair")``.
    """
    t = t_statistics(ds, sidedness)
    psi = corr.build_spurious(ds, theta, seed=derive_seed(seed, "repair"))
    out = maxt_step_down(t, psi, alpha, n_draws, derive_seed(seed, "mvn"), reference)
    out.method = PROPOSAL
    out.theta = float(theta)
    out.seed = seed
    return out


def run_analysis(ds, method, alpha=0.05, sidedness=TWO_SIDED, theta=1.0, n_draws=DEFAULT_DRAWS,
                 seed=None, reference="normal", allow_negative_control=False):
    """Validate options, dispatch to a procedure and attach run metadata.

    ``seed`` is the run seed (a fresh one is drawn when ``None``); the
    outcome records it so the run can be repeated exactly.
    """
    method = canonical_method(method)
    _check_alpha(alpha)
    sidedness = check_sidedness(sidedness)
    if reference not in REFERENCES:
        raise ValidationError(f"reference must be one of {REFERENCES}")
    if method in NEGATIVE_CONTROLS and not allow_negative_control:
        raise ValidationError(
            f"{method} does not control the family-wise error rate; "
            "it is only available with allow_negative_control=True"
        )
    if n_draws < 1000:
        raise ValidationError("n_draws must be >= 1000")
    if seed is None:
        seed = fresh_seed()
    seed = int(seed)
    if method == PROPOSAL:
        check_theta(theta)

    t = t_statistics(ds, sidedness)
    if method == BONFERRONI:
        out = bonferroni(t, alpha, reference)
        out.seed = seed
        return out
    mvn_seed = derive_seed(seed, "mvn")
    repair_seed = derive_seed(seed, "repair")
    if method == MAXT:
        out = maxt_single_step(t, corr.build_conventional(ds), alpha, n_draws, mvn_seed, reference)
    elif method == STEP_DOWN:
        out = maxt_step_down(t, corr.build_conventional(ds), alpha, n_draws, mvn_seed, reference)
    elif method == PROPOSAL:
        psi = corr.build_spurious(ds, theta, seed=repair_seed)
        out = maxt_step_down(t, psi, alpha, n_draws, mvn_seed, reference)
        out.method = PROPOSAL
        out.theta = float(theta)
    else:
        psi = corr.build_global_pooled(ds, seed=repair_seed)
        out = maxt_step_down(t, psi, alpha, n_draws, mvn_seed, reference)
        out.method = GLOBAL_POOLED_SD
    out.seed = seed
    out.events = dict(out.events, seed_scheme=SEED_SCHEME, mvn_seed=mvn_seed, repair_seed=repair_seed)
    return out
