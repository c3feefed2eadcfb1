"""PEHE against the true conditional treatment effect."""
from __future__ import annotations

from numbers import Real
from typing import Mapping, Union

import numpy as np

from ._math import sigmoid
from .causal import true_cate
from .dgm import ScmSpec
from .estimators import FitResult
from .likelihood import ModelParams

# per-x predicted risk differences, or one constant for every x
CatePrediction = Union[Mapping[int, float], float]


def predicted_cate(fit: Union[FitResult, ModelParams], x: int) -> float:
    p = fit.params if isinstance(fit, FitResult) else fit
    f = p.beta0 + p.beta_x * x
    return float(sigmoid(f + p.beta_t) - sigmoid(f))


def cate_prediction(fit: Union[FitResult, ModelParams]) -> dict[int, float]:
    return {x: predicted_cate(fit, x) for x in (0, 1)}


def pehe(pred: CatePrediction, spec: ScmSpec) -> float:
    """Root of the P(x)-weighted squared error in predicted CATE."""
    px = spec.p_x_table()
    total = 0.0
    for x in (0, 1):
        guess = pred if isinstance(pred, Real) else pred[x]
        total += px[x] * (true_cate(spec, x) - guess) ** 2
    return float(np.sqrt(total))


def sample_pehe(tau_true, tau_pred) -> float:
    """PEHE over individual units, the finite-sample form."""
    tau_true = np.asarray(tau_true, dtype=float)
    tau_pred = np.asarray(tau_pred, dtype=float)
    return float(np.sqrt(np.mean(np.square(tau_true - tau_pred))))
