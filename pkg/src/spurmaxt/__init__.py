"""Many-to-one multiple testing with maxT-type procedures and spurious correlations."""

from .correlation import CorrelationModel, build_conventional, build_global_pooled, build_spurious, psd_repair
from .dataset import GroupedDataset, load_csv, summarize, write_csv
from .estimators import (
    ONE_SIDED,
    TWO_SIDED,
    TMatrix,
    cov_global_pooled,
    cov_hat_pair,
    cov_theta_combined,
    cov_tilde,
    empirical_variance_check,
    t_statistics,
)
from .exceptions import (
    DegenerateVariableError,
    InputError,
    NotPositiveDefiniteError,
    NumericError,
    ParseError,
    SchemaError,
    SpurMaxTError,
    ValidationError,
)
from .mvn import MaxDistSample, adjusted_pvalues, critical_value, sample_max_distribution, tail_prob
from .procedures import TestOutcome, bonferroni, maxt_single_step, maxt_step_down, proposal, run_analysis
from .seeding import derive_seed
from .simulation import SimReport, SimScenario, corollary1_demo, run_scenario

__version__ = "0.1.0"
