"""Zero-inflated extended generalized Pareto modeling of daily rainfall.

Dry days enter as a point mass at zero; wet-day amounts follow an
extended GPD whose carrier function flexes the bulk while keeping the
Pareto-type upper tail, so extremes are modeled without a threshold
selection step.  The package covers the distribution itself, maximum
likelihood and Bayesian fitting, bootstrap intervals, return levels, a
Monte Carlo study harness, a precipitation preprocessing pipeline and a
CLI tying everything together.
"""

from .carriers import (
    BetaCarrier,
    Carrier,
    PowerBetaCarrier,
    PowerCarrier,
    beta_cdf,
    make_carrier,
)
from .diagnostics import CdfCompareData, QqData, cdf_compare_data, qq_data
from .gpd import GpdParams, gpd_cdf, gpd_pdf, gpd_quantile, gpd_sf
from .inference import (
    BootstrapResult,
    FitError,
    FitOptions,
    FitResult,
    McmcOptions,
    bootstrap_ci,
    fit_bayes,
    fit_mle,
)
from .model import (
    Sample,
    ZiegpdParams,
    params_from_dict,
    params_to_dict,
    return_level,
    ziegpd_cdf,
    ziegpd_loglik,
    ziegpd_pdf,
    ziegpd_quantile,
    ziegpd_sample,
)
from .pipeline import (
    DailySeries,
    DataError,
    LoadReport,
    Station,
    filter_months,
    load_daily_csv,
    preprocess,
    read_sample_file,
    thin_records,
    write_sample_file,
    zero_threshold,
)
from .simulation import (
    RmseRow,
    RmseTable,
    SimConfig,
    StudyResult,
    ZigevGenerator,
    load_sim_config,
    run_model_based_study,
    run_study,
    run_zigev_study,
    sample_zigev,
)

__version__ = "0.1.0"

__all__ = [
    "BetaCarrier",
    "BootstrapResult",
    "Carrier",
    "CdfCompareData",
    "DailySeries",
    "DataError",
    "FitError",
    "FitOptions",
    "FitResult",
    "GpdParams",
    "LoadReport",
    "McmcOptions",
    "PowerBetaCarrier",
    "PowerCarrier",
    "QqData",
    "RmseRow",
    "RmseTable",
    "Sample",
    "SimConfig",
    "Station",
    "StudyResult",
    "ZiegpdParams",
    "ZigevGenerator",
    "beta_cdf",
    "bootstrap_ci",
    "cdf_compare_data",
    "filter_months",
    "fit_bayes",
    "fit_mle",
    "gpd_cdf",
    "gpd_pdf",
    "gpd_quantile",
    "gpd_sf",
    "load_daily_csv",
    "load_sim_config",
    "make_carrier",
    "params_from_dict",
    "params_to_dict",
    "preprocess",
    "qq_data",
    "read_sample_file",
    "return_level",
    "run_model_based_study",
    "run_study",
    "run_zigev_study",
    "sample_zigev",
    "thin_records",
    "write_sample_file",
    "zero_threshold",
    "ziegpd_cdf",
    "ziegpd_loglik",
    "ziegpd_pdf",
    "ziegpd_quantile",
    "ziegpd_sample",
]
