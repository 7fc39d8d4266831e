"""specdep: copula-based dependence changepoint analysis in the spectral domain.

The library cuts multichannel recordings into epochs, extracts per-band
Fourier coefficient magnitudes, models each epoch's marginal by a bootstrap
Gamma fit and each consecutive-epoch pair by an AIC-selected Archimedean
copula, and flags epochs where the bivariate Kolmogorov-Smirnov distance
between successive joint CDFs exceeds an empirically calibrated threshold.
Whole-regime comparisons (before/after an event, channel against channel)
use truncated D-vine copulas ranked by Clarke's exact binomial test.
"""

__version__ = "0.1.0"

from .bands import (
    BandMagnitudes,
    BandSpec,
    EpochTensor,
    StandardizedMagnitudes,
    band_extract,
    band_magnitude_matrix,
    default_bands,
    fourier_magnitudes,
    segment_epochs,
    standardize,
    unstandardize,
)
from .copulas import (
    DEFAULT_PANEL,
    CopulaModel,
    Family,
    KlicEstimate,
    copula_cdf,
    copula_loglik,
    copula_logpdf,
    copula_pdf,
    h_function,
    h_inverse,
    kendall_tau_empirical,
    klic_estimate,
    mle_theta,
    sample,
    select_family,
    tau_to_theta,
    theta_to_tau,
)
from .ks import (
    ChangepointReport,
    DetectionConfig,
    JointModel,
    KsSeries,
    bivariate_ks,
    dependence_shift_series,
    detect_changepoints,
    rank_pseudo_obs,
)
from .marginals import (
    BootstrapConfig,
    GammaFit,
    bootstrap_gamma_marginal,
    fit_gamma_mle,
    gamma_cdf,
    limiting_magnitude_cdf,
    limiting_magnitude_pdf,
    moving_block_bootstrap,
)
from .simulate import (
    DEFAULT_THRESHOLDS,
    DgpSpec,
    PowerResult,
    ThresholdTable,
    calibrate_thresholds,
    collect_null_statistics,
    power_scenario,
    simulate,
    simulate_dgp1,
    simulate_dgp2,
    simulate_gate_pair,
)
from .vines import (
    ClarkeResult,
    CompareConfig,
    DVineModel,
    build_dvine,
    clarke_test,
    compare_channels,
    compare_prepost,
    dvine_loglik_pointwise,
)

__all__ = [name for name in dir() if not name.startswith("_")]
