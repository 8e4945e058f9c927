"""Simulation harness for family-wise error rate and power studies.

Data are Gaussian with a block-diagonal exchangeable covariance shared by all
groups. The control group has mean zero; in each case group the first
``round(r * p)`` variables are shifted. Every replication draws from its own
stream derived from ``(seed, rep_index)``, so a report depends only on the
scenario and never on scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import correlation as corr
from .dataset import GroupedDataset
from .estimators import ONE_SIDED, check_sidedness, t_statistics
from .exceptions import ValidationError
from .mvn import SIMULATION_DRAWS, MaxDistSample, default_threads, standard_normal_pool
from .procedures import BONFERRONI, MAXT, METHODS, PROPOSAL, STEP_DOWN, canonical_method
from .seeding import derive_seed, rng_for

GLOBAL_POOLED_SD = "global-pooled"
GLOBAL_POOLED_SS = "global-pooled-maxt"
SIM_METHODS = METHODS + (GLOBAL_POOLED_SD, GLOBAL_POOLED_SS)


def gen_block_cov(p, rho, block_size=10):
    """Block-diagonal matrix of exchangeable blocks (unit diagonal, ``rho`` off it).

    The last block is truncated when ``block_size`` does not divide ``p``.
    """
    if p < 1 or block_size < 1:
        raise ValidationError("p and block_size must be positive")
    b = min(block_size, p)
    lower = -1.0 / (b - 1) if b > 1 else -math.inf
    if not lower < rho < 1.0:
        raise ValidationError(f"rho={rho} outside the positive-definite range ({lower:.4g}, 1)")
    cov = np.zeros((p, p))
    for start in range(0, p, block_size):
        stop = min(start + block_size, p)
        cov[start:stop, start:stop] = rho
    np.fill_diagonal(cov, 1.0)
    return cov


@dataclass
class SimScenario:
    """One simulation setting.

    ``case_shifts`` optionally gives a separate shift per case group; by
    default every case group is shifted by ``mu``.
    """

    rho: float = 0.3
    n: int = 12
    p: int = 50
    mu: float = 0.0
    r: float = 0.0
    m: int = 1
    block_size: int = 10
    sidedness: str = ONE_SIDED
    reference: str = "t"
    methods: tuple = METHODS
    reps: int = 2000
    alpha: float = 0.05
    seed: int = 0
    n_draws: int = SIMULATION_DRAWS
    theta: float = 1.0
    batches: int = 10
    case_shifts: tuple = None
    label: str = ""

    def __post_init__(self):
        self.methods = tuple(_sim_method(x) for x in self.methods)
        self.sidedness = check_sidedness(self.sidedness)
        if self.case_shifts is not None:
            self.case_shifts = tuple(float(x) for x in self.case_shifts)

    def validate(self):
        if self.reps < 1:
            raise ValidationError("reps must be >= 1")
        if self.n < 2:
            raise ValidationError("n must be >= 2")
        if self.m < 1 or self.p < 1:
            raise ValidationError("m and p must be >= 1")
        if not 0.0 <= self.r <= 1.0:
            raise ValidationError("r must lie in [0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must lie in (0, 1)")
        if self.reference not in ("normal", "t"):
            raise ValidationError("reference must be 'normal' or 't'")
        if self.case_shifts is not None and len(self.case_shifts) != self.m:
            raise ValidationError("case_shifts needs one entry per case group")
        if self.n_draws < 1000:
            raise ValidationError("n_draws must be >= 1000")
        if not self.methods:
            raise ValidationError("no methods selected")
        gen_block_cov(self.p, self.rho, self.block_size)
        return self

    @property
    def n_shifted(self):
        return int(math.floor(self.r * self.p + 0.5))

    def shifts(self):
        if self.case_shifts is not None:
            return self.case_shifts
        return (float(self.mu),) * self.m

    def alternative_mask(self):
        mask = np.zeros((self.m, self.p), dtype=bool)
        for s, shift in enumerate(self.shifts()):
            if shift != 0.0:
                mask[s, : self.n_shifted] = True
        return mask.reshape(-1)

    def to_dict(self):
        out = asdict(self)
        out["methods"] = list(self.methods)
        if self.case_shifts is not None:
            out["case_shifts"] = list(self.case_shifts)
        return out

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
        data = dict(data)
        if isinstance(data.get("methods"), str):
            data["methods"] = [x for x in data["methods"].split(",") if x]
        if "methods" in data:
            data["methods"] = tuple(data["methods"])
        return cls(**data)


def _sim_method(name):
    key = str(name).lower()
    if key in (GLOBAL_POOLED_SS, "global-maxt"):
        return GLOBAL_POOLED_SS
    return canonical_method(key)


def gen_dataset(scenario, rep_index, chol=None):
    """Gaussian dataset for replication ``rep_index`` of ``scenario``."""
    sc = scenario
    if chol is None:
        chol = np.linalg.cholesky(gen_block_cov(sc.p, sc.rho, sc.block_size))
    rng = rng_for(sc.seed, "rep", rep_index, "data")
    groups = [rng.standard_normal((sc.n, sc.p)) @ chol.T]
    k = sc.n_shifted
    for shift in sc.shifts():
        x = rng.standard_normal((sc.n, sc.p)) @ chol.T
        x[:, :k] += shift
        groups.append(x)
    return GroupedDataset(tuple(groups))


def evaluate_replication(scenario, ds, rep_index):
    """Adjusted p-values of every requested method on one dataset.

    Returns ``{method: (adjusted, single_step)}``. ``single_step`` is the
    single-step maxT adjusted p-value under the method's correlation model
    (the Bonferroni p-value for Bonferroni); it equals ``adjusted`` for the
    single-step methods.
    """
    sc = scenario
    t = t_statistics(ds, sc.sidedness)
    z = t.normal_scores(sc.reference)
    d = z.size
    out = {}
    methods = set(sc.methods)
    normals = None
    if methods - {BONFERRONI}:
        normals = standard_normal_pool(d, sc.n_draws, derive_seed(sc.seed, "rep", rep_index, "mvn"), threads=1)

    def pool_for(model):
        chol = corr.cholesky_factor(model.psi)
        return MaxDistSample.from_normals(normals, chol, rep_index, sc.sidedness)

    repair_seed = derive_seed(sc.seed, "rep", rep_index, "repair")
    if BONFERRONI in methods:
        bon = np.minimum(1.0, d * t.raw_pvalues(sc.reference))
        out[BONFERRONI] = (bon, bon)
    models = []
    if methods & {MAXT, STEP_DOWN}:
        models.append(((MAXT, STEP_DOWN), corr.build_conventional(ds)))
    if PROPOSAL in methods:
        models.append(((None, PROPOSAL), corr.build_spurious(ds, sc.theta, seed=repair_seed)))
    if methods & {GLOBAL_POOLED_SD, GLOBAL_POOLED_SS}:
        models.append(((GLOBAL_POOLED_SS, GLOBAL_POOLED_SD), corr.build_global_pooled(ds, seed=repair_seed)))
    for (single_name, step_name), model in models:
        pool = pool_for(model)
        single = pool.adjusted_pvalues(z, step_down=False, union_bound=True)
        if single_name in methods:
            out[single_name] = (single, single)
        if step_name in methods:
            out[step_name] = (pool.adjusted_pvalues(z, step_down=True, union_bound=True), single)
    return out


def _run_chunk(scenario, start, stop):
    sc = scenario
    chol = np.linalg.cholesky(gen_block_cov(sc.p, sc.rho, sc.block_size))
    alt = sc.alternative_mask()
    null = ~alt
    k = stop - start
    res = {mth: {"fwer": np.zeros(k, dtype=bool), "power": np.full(k, np.nan), "meanp": np.full(k, np.nan),
                 "meanp_ss": np.full(k, np.nan)}
           for mth in sc.methods}
    for i, rep in enumerate(range(start, stop)):
        ds = gen_dataset(sc, rep, chol)
        adjusted = evaluate_replication(sc, ds, rep)
        for mth, (adj, single) in adjusted.items():
            rejected = adj <= sc.alpha
            res[mth]["fwer"][i] = bool(np.any(rejected & null))
            if alt.any():
                res[mth]["power"][i] = rejected[alt].mean()
                res[mth]["meanp"][i] = adj[alt].mean()
                res[mth]["meanp_ss"][i] = single[alt].mean()
    return res


@dataclass
class MethodSummary:
    fwer: float = None
    fwer_se: float = None
    fwer_batch_sd: float = None
    power: float = None
    power_se: float = None
    mean_adjusted_p: float = None
    mean_adjusted_p_se: float = None
    mean_single_step_p: float = None


@dataclass
class SimReport:
    scenario: dict
    reps: int
    methods: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "reps": self.reps,
            "wall_time": self.wall_time,
            "methods": {k: asdict(v) for k, v in self.methods.items()},
        }

    def __getitem__(self, method):
        return self.methods[_sim_method(method)]


def _summarise(values, reps, batches, has_null, has_alt):
    summary = MethodSummary()
    if has_null:
        f = float(values["fwer"].mean())
        summary.fwer = f
        summary.fwer_se = math.sqrt(f * (1.0 - f) / reps)
        if batches > 1 and reps >= batches:
            parts = np.array_split(values["fwer"], batches)
            summary.fwer_batch_sd = float(np.std([x.mean() for x in parts], ddof=1))
    if has_alt:
        pw = values["power"]
        summary.power = float(pw.mean())
        summary.power_se = float(pw.std(ddof=1) / math.sqrt(reps)) if reps > 1 else None
        mp = values["meanp"]
        summary.mean_adjusted_p = float(mp.mean())
        summary.mean_adjusted_p_se = float(mp.std(ddof=1) / math.sqrt(reps)) if reps > 1 else None
        summary.mean_single_step_p = float(values["meanp_ss"].mean())
    return summary


def run_scenario(scenario, workers=None):
    """Run every replication of ``scenario`` and aggregate per method.

    FWER is the fraction of replications with at least one rejected true
    null (absent when there are no true nulls). Power is the mean fraction of
    true alternatives rejected; ``mean_adjusted_p`` averages the adjusted
    p-values of the true alternatives and ``mean_single_step_p`` does the
    same for the single-step maxT p-values under each method's correlation
    model.
    """
    sc = scenario.validate()
    workers = workers or default_threads()
    t0 = time.perf_counter()
    if workers > 1 and sc.reps > 1:
        bounds = np.linspace(0, sc.reps, min(workers * 4, sc.reps) + 1).astype(int)
        with ProcessPoolExecutor(workers) as ex:
            chunks = list(ex.map(_run_chunk, [sc] * (len(bounds) - 1), bounds[:-1], bounds[1:]))
    else:
        chunks = [_run_chunk(sc, 0, sc.reps)]
    merged = {
        mth: {key: np.concatenate([c[mth][key] for c in chunks]) for key in ("fwer", "power", "meanp", "meanp_ss")}
        for mth in sc.methods
    }
    alt = sc.alternative_mask()
    report = SimReport(sc.to_dict(), sc.reps)
    for mth in sc.methods:
        report.methods[mth] = _summarise(merged[mth], sc.reps, sc.batches, bool((~alt).any()), bool(alt.any()))
    report.wall_time = time.perf_counter() - t0
    return report


MIN_STUDY_REPS = 100


def estimate_fwer(scenario, workers=None):
    """:func:`run_scenario` for a study: requires at least 100 replications."""
    if scenario.reps < MIN_STUDY_REPS:
        raise ValidationError(f"FWER/power studies need reps >= {MIN_STUDY_REPS}")
    return run_scenario(scenario, workers)


estimate_power = estimate_fwer


def corollary1_demo(n=200, mu2=20.0, reps=2000, alpha=0.05, seed=0, p=2, sidedness=ONE_SIDED,
                    n_draws=SIMULATION_DRAWS, reference="normal", workers=None):
    """Three groups, uncorrelated variables, only case group 2 shifted.

    Compares the global-pooled correlation model (inside the step-down and
    the single-step maxT procedures) with Proposal. FWER counts rejections of
    the true nulls of case group 1.
    """
    scenario = SimScenario(
        rho=0.0, n=n, p=p, mu=0.0, r=1.0, m=2, sidedness=sidedness, reference=reference,
        methods=(GLOBAL_POOLED_SD, GLOBAL_POOLED_SS, PROPOSAL, STEP_DOWN), reps=reps,
        alpha=alpha, seed=seed, n_draws=n_draws, case_shifts=(0.0, mu2),
        label=f"global-pooled negative control (n={n}, shift={mu2})",
    )
    return run_scenario(scenario, workers)


# Published reference grids. Keys: (rho, n, p, mu, r).
TABLE1_REFERENCE = {
    (0.0, 12, 50, 0.0, 0.0): {"bonferroni": 4.53, "sdmaxt": 4.64, "proposal": 4.64},
    (0.2, 12, 50, 0.0, 0.0): {"bonferroni": 4.57, "sdmaxt": 4.82, "proposal": 4.80},
    (0.4, 12, 50, 0.0, 0.0): {"bonferroni": 4.28, "sdmaxt": 4.91, "proposal": 5.01},
    (0.6, 12, 50, 0.0, 0.0): {"bonferroni": 3.77, "sdmaxt": 5.07, "proposal": 5.26},
    (0.3, 6, 50, 0.0, 0.0): {"bonferroni": 3.53, "sdmaxt": 4.38, "proposal": 4.21},
    (0.3, 10, 50, 0.0, 0.0): {"bonferroni": 3.74, "sdmaxt": 4.29, "proposal": 4.32},
    (0.3, 14, 50, 0.0, 0.0): {"bonferroni": 4.29, "sdmaxt": 4.77, "proposal": 4.78},
    (0.3, 18, 50, 0.0, 0.0): {"bonferroni": 4.44, "sdmaxt": 4.90, "proposal": 4.84},
    (0.3, 12, 20, 0.0, 0.0): {"bonferroni": 4.26, "sdmaxt": 4.92, "proposal": 4.96},
    (0.3, 12, 40, 0.0, 0.0): {"bonferroni": 4.37, "sdmaxt": 4.91, "proposal": 4.88},
    (0.3, 12, 60, 0.0, 0.0): {"bonferroni": 4.46, "sdmaxt": 4.93, "proposal": 4.86},
    (0.3, 12, 80, 0.0, 0.0): {"bonferroni": 4.59, "sdmaxt": 5.04, "proposal": 4.99},
    (0.3, 12, 50, 0.6, 0.5): {"bonferroni": 2.39, "sdmaxt": 2.66, "proposal": 2.81},
    (0.3, 12, 50, 1.0, 0.5): {"bonferroni": 2.39, "sdmaxt": 2.67, "proposal": 3.06},
    (0.3, 12, 50, 1.4, 0.5): {"bonferroni": 2.39, "sdmaxt": 2.65, "proposal": 3.27},
    (0.3, 12, 50, 1.8, 0.5): {"bonferroni": 2.39, "sdmaxt": 2.68, "proposal": 3.40},
    (0.3, 12, 50, 1.2, 0.2): {"bonferroni": 3.60, "sdmaxt": 4.09, "proposal": 4.19},
    (0.3, 12, 50, 1.2, 0.4): {"bonferroni": 2.82, "sdmaxt": 3.11, "proposal": 3.53},
    (0.3, 12, 50, 1.2, 0.6): {"bonferroni": 1.96, "sdmaxt": 2.28, "proposal": 2.85},
    (0.3, 12, 50, 1.2, 0.8): {"bonferroni": 1.05, "sdmaxt": 1.18, "proposal": 1.78},
}

# power (%) and mean adjusted p-value (%) per method
TABLE2_REFERENCE = {
    (0.0, 12, 50, 1.2, 1.0): {"bonferroni": (30.4, 34.4), "maxt": (30.9, 33.8), "sdmaxt": (34.7, 28.8), "proposal": (38.8, 23.7)},
    (0.2, 12, 50, 1.2, 1.0): {"bonferroni": (33.0, 31.9), "maxt": (34.1, 29.6), "sdmaxt": (39.7, 25.4), "proposal": (47.2, 19.7)},
    (0.4, 12, 50, 1.2, 1.0): {"bonferroni": (33.2, 32.2), "maxt": (35.5, 27.5), "sdmaxt": (41.7, 24.3), "proposal": (51.5, 18.2)},
    (0.6, 12, 50, 1.2, 1.0): {"bonferroni": (30.5, 34.1), "maxt": (36.3, 25.1), "sdmaxt": (41.3, 23.3), "proposal": (54.6, 16.5)},
    (0.3, 6, 50, 1.2, 1.0): {"bonferroni": (6.9, 65.9), "maxt": (7.7, 59.6), "sdmaxt": (8.2, 58.6), "proposal": (12.4, 50.3)},
    (0.3, 10, 50, 1.2, 1.0): {"bonferroni": (21.2, 41.8), "maxt": (23.1, 37.4), "sdmaxt": (25.9, 34.4), "proposal": (35.6, 25.9)},
    (0.3, 14, 50, 1.2, 1.0): {"bonferroni": (40.8, 24.8), "maxt": (42.1, 21.9), "sdmaxt": (50.2, 18.1), "proposal": (57.3, 13.8)},
    (0.3, 18, 50, 1.2, 1.0): {"bonferroni": (59.8, 14.1), "maxt": (61.6, 12.5), "sdmaxt": (70.2, 8.7), "proposal": (74.3, 7.0)},
    (0.3, 12, 20, 1.2, 1.0): {"bonferroni": (46.8, 20.4), "maxt": (48.6, 17.1), "sdmaxt": (57.1, 13.4), "proposal": (64.0, 10.3)},
    (0.3, 12, 40, 1.2, 1.0): {"bonferroni": (35.4, 29.0), "maxt": (36.7, 25.4), "sdmaxt": (43.1, 21.7), "proposal": (52.1, 16.3)},
    (0.3, 12, 60, 1.2, 1.0): {"bonferroni": (29.9, 35.0), "maxt": (31.1, 31.4), "sdmaxt": (35.7, 27.9), "proposal": (44.2, 21.1)},
    (0.3, 12, 80, 1.2, 1.0): {"bonferroni": (26.3, 39.9), "maxt": (27.3, 35.6), "sdmaxt": (31.8, 32.2), "proposal": (41.6, 24.7)},
    (0.3, 12, 50, 0.9, 1.0): {"bonferroni": (14.3, 55.0), "maxt": (14.9, 50.6), "sdmaxt": (16.9, 48.5), "proposal": (21.8, 42.3)},
    (0.3, 12, 50, 1.1, 1.0): {"bonferroni": (23.4, 40.8), "maxt": (24.6, 36.5), "sdmaxt": (28.8, 33.3), "proposal": (36.7, 26.4)},
    (0.3, 12, 50, 1.3, 1.0): {"bonferroni": (43.3, 23.8), "maxt": (45.3, 21.0), "sdmaxt": (52.2, 16.9), "proposal": (60.5, 12.1)},
    (0.3, 12, 50, 1.5, 1.0): {"bonferroni": (55.8, 14.9), "maxt": (57.8, 12.9), "sdmaxt": (67.8, 8.8), "proposal": (77.1, 5.6)},
}

DESK_REPS = 2000
FULL_REPS = 10_000
FULL_DRAWS = 100_000


def _preset(grid, methods, reps, seed, n_draws, **kw):
    out = []
    for i, (rho, n, p, mu, r) in enumerate(grid):
        out.append(SimScenario(rho=rho, n=n, p=p, mu=mu, r=r, methods=methods, reps=reps,
                               seed=derive_seed(seed, "scenario", i), n_draws=n_draws,
                               label=f"rho={rho} n={n} p={p} mu={mu} r={r}", **kw))
    return out


def table1_scenarios(reps=DESK_REPS, seed=0, n_draws=SIMULATION_DRAWS, methods=(BONFERRONI, STEP_DOWN, PROPOSAL)):
    """FWER grid: 20 settings, one-sided tests with Welch-t calibration."""
    return _preset(TABLE1_REFERENCE, methods, reps, seed, n_draws)


def table2_scenarios(reps=DESK_REPS, seed=0, n_draws=SIMULATION_DRAWS, methods=METHODS):
    """Power grid: 16 settings with every hypothesis false (r = 1)."""
    return _preset(TABLE2_REFERENCE, methods, reps, seed, n_draws)


def reference_values(scenario):
    key = (float(scenario.rho), int(scenario.n), int(scenario.p), float(scenario.mu), float(scenario.r))
    return TABLE1_REFERENCE.get(key) or TABLE2_REFERENCE.get(key)


REPORT_COLUMNS = [
    "label", "rho", "n", "p", "m", "mu", "r", "reps", "method", "fwer", "fwer_se", "fwer_batch_sd",
    "power", "power_se", "mean_adjusted_p", "mean_adjusted_p_se", "mean_single_step_p", "reference_value",
    "reference_mean_p",
]


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def report_rows(reports):
    """Long layout: one row per scenario and method."""
    rows = []
    for rep in reports:
        sc = rep.scenario
        ref = reference_values(SimScenario.from_dict(sc)) or {}
        for mth, summ in rep.methods.items():
            refval, refp = ref.get(mth), None
            if isinstance(refval, tuple):
                refval, refp = refval
            rows.append({
                "label": sc.get("label", ""), "rho": sc["rho"], "n": sc["n"], "p": sc["p"], "m": sc["m"],
                "mu": sc["mu"], "r": sc["r"], "reps": rep.reps, "method": mth,
                "fwer": summ.fwer, "fwer_se": summ.fwer_se, "fwer_batch_sd": summ.fwer_batch_sd,
                "power": summ.power, "power_se": summ.power_se,
                "mean_adjusted_p": summ.mean_adjusted_p, "mean_adjusted_p_se": summ.mean_adjusted_p_se,
                "mean_single_step_p": summ.mean_single_step_p,
                "reference_value": refval, "reference_mean_p": refp,
            })
    return rows


def reports_to_csv(reports, layout="long"):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if layout == "long":
        w.writerow(REPORT_COLUMNS)
        for row in report_rows(reports):
            w.writerow([_fmt(row[c]) for c in REPORT_COLUMNS])
        return buf.getvalue()
    if layout != "wide":
        raise ValueError("layout must be 'long' or 'wide'")
    methods = []
    for rep in reports:
        for mth in rep.methods:
            if mth not in methods:
                methods.append(mth)
    head = ["label", "rho", "n", "p", "mu", "r", "reps"]
    for mth in methods:
        head += [f"{mth}_fwer", f"{mth}_power", f"{mth}_mean_adjusted_p"]
    w.writerow(head)
    for rep in reports:
        sc = rep.scenario
        row = [sc.get("label", ""), sc["rho"], sc["n"], sc["p"], sc["mu"], sc["r"], rep.reps]
        for mth in methods:
            s = rep.methods.get(mth)
            row += [s.fwer, s.power, s.mean_adjusted_p] if s else [None] * 3
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def reports_to_json(reports, config=None):
    payload = {"schema_version": 1}
    if config is not None:
        payload["config"] = config
    payload["reports"] = [_strip_wall(r.to_dict()) for r in reports]
    return json.dumps(payload, indent=2)


def _strip_wall(d):
    # wall time is reported separately so that equal seeds give equal bytes
    d = dict(d)
    d.pop("wall_time", None)
    return d


def load_scenarios(path):
    """Scenario JSON: one object, a list, or ``{"scenarios": [...]}``."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid scenario JSON: {exc}") from None
    if isinstance(data, dict) and "scenarios" in data:
        data = data["scenarios"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not all(isinstance(x, dict) for x in data):
        raise ValidationError("scenario file must hold an object or a list of objects")
    try:
        return [SimScenario.from_dict(x) for x in data]
    except TypeError as exc:
        raise ValidationError(str(exc)) from None


__all__ = [
    "SimReport",
    "SimScenario",
    "corollary1_demo",
    "estimate_fwer",
    "estimate_power",
    "gen_block_cov",
    "gen_dataset",
    "run_scenario",
    "table1_scenarios",
    "table2_scenarios",
]
