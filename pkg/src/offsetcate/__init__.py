"""Offset models for conditional treatment effects under a known odds-ratio.

Exact (sampling-free) evaluation on binary structural causal models with an
unobserved confounder.
"""
from .causal import (
    collapsibility_pipeline,
    implied_marginal_log_or,
    interventional,
    true_cate,
    true_marginal_log_or,
)
from .dgm import (
    JointTable,
    Regime,
    ScmSpec,
    build_joint,
    example1_table,
    observational_conditional,
    x_marginal,
)
from .estimators import (
    FITTERS,
    FitResult,
    MethodId,
    ate_baseline,
    fit_conditional_offset,
    fit_constrained,
    fit_constrained_offset,
    fit_full_observational,
    fit_marginal_offset,
    fit_mle,
    fit_rct_reference,
)
from .likelihood import ModelParams, expected_loglik, grad_expected_loglik
from .metrics import cate_prediction, pehe, predicted_cate

__version__ = "0.1.0"
