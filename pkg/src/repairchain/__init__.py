"""Exact and asymptotic return-time and last-exit analysis for the
repair-shop Markov chain X_(k+1) = (X_k - 1)^+ + J."""

from .decay import (
    CaseLabel,
    DecayParams,
    decay_params,
    eta,
    find_x0,
    tilt,
    tilt_to_critical,
    xi,
)
from .errors import (
    InvalidSpec,
    NoConvergence,
    NotNullRecurrent,
    NotPositiveRecurrent,
    NotTransient,
    OutOfRadius,
    RepairChainError,
)
from .last_exit import ExitAnalysis, exit_pmf, exit_weighted_verdict
from .model import (
    ChainClass,
    JumpModel,
    build_model,
    classify,
    eval_G,
    eval_G_by_series,
    exact_coefficients,
    explicit,
    geometric,
    half_stable,
    mean_gap,
    power_zeta,
)
from .return_time import (
    ExponentEstimate,
    MomentResult,
    PsiFunction,
    ReturnAnalysis,
    Verdict,
    VerdictLabel,
    asymptotic_exponent,
    eval_F,
    psi,
    psi_inv,
    return_pmf,
    tau_alpha_finite,
    tau_moment,
)
from .series_tools import (
    CriterionSeries,
    WeightFunction,
    block_ratio_diagnostic,
    criterion_terms,
    partial_sum_ratio,
)
from .sim import SimReport, sample_last_exit, sample_tau

__version__ = "0.1.0"

__all__ = [
    "CaseLabel",
    "ChainClass",
    "CriterionSeries",
    "DecayParams",
    "ExitAnalysis",
    "ExponentEstimate",
    "InvalidSpec",
    "JumpModel",
    "MomentResult",
    "NoConvergence",
    "NotNullRecurrent",
    "NotPositiveRecurrent",
    "NotTransient",
    "OutOfRadius",
    "PsiFunction",
    "RepairChainError",
    "ReturnAnalysis",
    "SimReport",
    "Verdict",
    "VerdictLabel",
    "WeightFunction",
    "asymptotic_exponent",
    "block_ratio_diagnostic",
    "build_model",
    "classify",
    "criterion_terms",
    "decay_params",
    "eta",
    "eval_F",
    "eval_G",
    "eval_G_by_series",
    "exact_coefficients",
    "exit_pmf",
    "exit_weighted_verdict",
    "explicit",
    "find_x0",
    "geometric",
    "half_stable",
    "mean_gap",
    "partial_sum_ratio",
    "power_zeta",
    "psi",
    "psi_inv",
    "return_pmf",
    "sample_last_exit",
    "sample_tau",
    "tau_alpha_finite",
    "tau_moment",
    "tilt",
    "tilt_to_critical",
    "xi",
]
