"""Survival probability of ground states after sudden quenches near quantum critical points."""

__version__ = "0.1.0"

from .fitscale import (FitError, FitReport, delta_trend, epsilon_exponent, fit_exponential, fit_m1,
                       loglog_envelope_slope, scaling_gamma, scaling_xi)
from .gaussian import (CovarianceState, QuadraticBosonForm, dicke_sp_effective, dicke_sp_two_mode,
                       quench_survival, williamson)
from .pairprod import mode_factor, survival_probability, survival_probability_streamed
from .semiclassics import ClassicalMode, ks_estimator, m1_model, m2_model, msc, semiclassical_estimates
from .series import SurvivalSeries
from .smalled import LMGParams, lmg_survival_probability, pair_subspace_oracle
from .spectra import DickeParams, IsingParams, QuenchSpec, XYParams

__all__ = [
    "ClassicalMode", "CovarianceState", "DickeParams", "FitError", "FitReport", "IsingParams",
    "LMGParams", "QuadraticBosonForm", "QuenchSpec", "SurvivalSeries", "XYParams", "delta_trend",
    "dicke_sp_effective", "dicke_sp_two_mode", "epsilon_exponent", "fit_exponential", "fit_m1",
    "ks_estimator", "lmg_survival_probability", "loglog_envelope_slope", "m1_model", "m2_model",
    "mode_factor", "msc", "pair_subspace_oracle", "quench_survival", "scaling_gamma", "scaling_xi",
    "semiclassical_estimates", "survival_probability", "survival_probability_streamed",
    "williamson",
]
