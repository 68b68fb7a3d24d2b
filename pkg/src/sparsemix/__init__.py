"""Sparse normal mixture detection.

Higher criticism, one-sided Berk-Jones, and average likelihood ratio
statistics on p-value samples, with Monte Carlo and asymptotic critical-value
calibration, size tables, and power curves.
"""

__version__ = "0.1.0"

from .calibration import (
    BridgePath,
    CalibrationMethod,
    CriticalValueTable,
    NullSample,
    alr_limit_cv,
    empirical_cv,
    evi_cv,
    evii_cv,
    ln_functional,
    quantile_index,
    sample_alr_limit_cal1,
    sample_alr_limit_cal2,
    sample_bridge_path,
    sample_ln,
    simulate_null_distribution,
    thresh_cv,
)
from .engine import alternative_statistics, null_statistics
from .errors import (
    AlphaOutOfRange,
    ConfigError,
    DomainError,
    EmptyOrSingleton,
    IncompatibleMethod,
    InsufficientReplicates,
    IoError,
    NegativeQ,
    NonFinite,
    OutOfRange,
    SampleTooSmall,
    SparsemixError,
    UnsupportedStatistic,
)
from .experiments import (
    PowerCurvePoint,
    SizeTableRow,
    beta_grid_default,
    power_curve,
    power_curve_csv,
    size_table,
    size_table_csv,
)
from .mixture import (
    MixtureSpec,
    SparsityParams,
    mixture_from,
    pvalue,
    r_of_beta,
    rho_star,
    sample_alternative,
    sample_null,
)
from .plots import svg_from_power_csv
from .rng import (
    DOMAIN_CAL1,
    DOMAIN_CAL2,
    DOMAIN_NULL,
    DOMAIN_POWER,
    RandomStream,
    stream_id_for,
)
from .stats import (
    SortedPValues,
    StatisticKind,
    StatisticResult,
    bj_plus,
    compute_statistic,
    hc_star,
    log_alr,
    log_lr_term,
    prepare,
    supported_kinds,
)

__all__ = [
    "__version__",
    "AlphaOutOfRange",
    "BridgePath",
    "CalibrationMethod",
    "ConfigError",
    "CriticalValueTable",
    "DomainError",
    "DOMAIN_CAL1",
    "DOMAIN_CAL2",
    "DOMAIN_NULL",
    "DOMAIN_POWER",
    "EmptyOrSingleton",
    "IncompatibleMethod",
    "InsufficientReplicates",
    "IoError",
    "MixtureSpec",
    "NegativeQ",
    "NonFinite",
    "NullSample",
    "OutOfRange",
    "PowerCurvePoint",
    "RandomStream",
    "SampleTooSmall",
    "SizeTableRow",
    "SortedPValues",
    "SparsemixError",
    "SparsityParams",
    "StatisticKind",
    "StatisticResult",
    "UnsupportedStatistic",
    "alr_limit_cv",
    "alternative_statistics",
    "beta_grid_default",
    "bj_plus",
    "compute_statistic",
    "empirical_cv",
    "evi_cv",
    "evii_cv",
    "hc_star",
    "ln_functional",
    "log_alr",
    "log_lr_term",
    "mixture_from",
    "null_statistics",
    "power_curve",
    "power_curve_csv",
    "prepare",
    "pvalue",
    "quantile_index",
    "r_of_beta",
    "rho_star",
    "sample_alr_limit_cal1",
    "sample_alr_limit_cal2",
    "sample_alternative",
    "sample_bridge_path",
    "sample_ln",
    "sample_null",
    "simulate_null_distribution",
    "size_table",
    "size_table_csv",
    "stream_id_for",
    "supported_kinds",
    "svg_from_power_csv",
    "thresh_cv",
]
