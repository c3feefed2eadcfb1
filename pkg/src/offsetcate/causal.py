"""Interventional quantities and conditional versus marginal odds-ratios."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ._math import logit, sigmoid
from .dgm import ScmSpec
from .likelihood import ModelParams


def interventional(spec: ScmSpec) -> dict[tuple[int, int], float]:
    """P(y=1 | do(t), x) keyed by ``(t, x)``, with u averaged over P(u|x)."""
    pu = spec.p_u_given_x()  # [x, u]
    pi = spec.outcome_probs()  # [t, x, u]
    tab = np.einsum("xu,txu->tx", pu, pi)
    return {(t, x): float(tab[t, x]) for t in (0, 1) for x in (0, 1)}


def true_cate(spec: ScmSpec, x: int) -> float:
    pi = interventional(spec)
    return pi[(1, x)] - pi[(0, x)]


def interventional_marginal(spec: ScmSpec) -> tuple[float, float]:
    """(P(y=1|do(t=0)), P(y=1|do(t=1))) over the population P(x, u)."""
    px = spec.p_x_table()
    pi = interventional(spec)
    p0 = px[0] * pi[(0, 0)] + px[1] * pi[(0, 1)]
    p1 = px[0] * pi[(1, 0)] + px[1] * pi[(1, 1)]
    return p0, p1


def true_marginal_log_or(spec: ScmSpec) -> float:
    """Marginal log odds-ratio a large trial in this population would report."""
    p0, p1 = interventional_marginal(spec)
    return logit(p1) - logit(p0)


def implied_marginal_log_or(params: ModelParams, x_weights: Mapping[int, float]) -> float:
    """Marginal log odds-ratio implied by a fitted conditional model.

    Averages the model's treated and untreated risks over ``x_weights`` and
    takes the difference of their log odds. No treatment probability enters.
    """
    w = np.array([x_weights[0], x_weights[1]], dtype=float)
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("x weights must sum to 1")
    f = params.beta0 + params.beta_x * np.array([0.0, 1.0])
    p1 = float(w @ sigmoid(f + params.beta_t))
    p0 = float(w @ sigmoid(f))
    return logit(p1) - logit(p0)


def implied_marginal_log_or_empirical(params: ModelParams, x_values: Sequence[float]) -> float:
    """Same quantity with the mean over observed covariate values."""
    x = np.asarray(x_values, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one observed x")
    f = params.beta0 + params.beta_x * x
    return logit(float(np.mean(sigmoid(f + params.beta_t)))) - logit(float(np.mean(sigmoid(f))))


def implied_marginal_log_or_grad(params: ModelParams, x_weights: Mapping[int, float]) -> np.ndarray:
    """Gradient of :func:`implied_marginal_log_or` in (beta0, beta_t, beta_x)."""
    w = np.array([x_weights[0], x_weights[1]], dtype=float)
    xs = np.array([0.0, 1.0])
    f = params.beta0 + params.beta_x * xs
    s1 = sigmoid(f + params.beta_t)
    s0 = sigmoid(f)
    p1, p0 = w @ s1, w @ s0
    d1 = w * s1 * (1.0 - s1)
    d0 = w * s0 * (1.0 - s0)
    g1 = np.array([d1.sum(), d1.sum(), d1 @ xs]) / (p1 * (1.0 - p1))
    g0 = np.array([d0.sum(), 0.0, d0 @ xs]) / (p0 * (1.0 - p0))
    return g1 - g0


@dataclass(frozen=True)
class CollapsibilityRow:
    x: int
    eta0_x: float
    eta1_x: float
    beta_t: float
    pi0_x: float
    pi1_x: float
    pi0: float
    pi1: float
    eta0: float
    eta1: float
    gamma_t: float


def collapsibility_pipeline(
    beta0_of_x: Mapping[int, float], beta_t: float, p_x1: float
) -> tuple[CollapsibilityRow, CollapsibilityRow]:
    """Pool stratum risks over x and compare the marginal to the conditional log OR.

    Returns one row per stratum; the pooled columns are shared.
    """
    if not 0.0 < p_x1 < 1.0:
        raise ValueError("p_x1 must lie in (0, 1)")
    pi0_x = {x: float(sigmoid(beta0_of_x[x])) for x in (0, 1)}
    pi1_x = {x: float(sigmoid(beta0_of_x[x] + beta_t)) for x in (0, 1)}
    pi0 = (1.0 - p_x1) * pi0_x[0] + p_x1 * pi0_x[1]
    pi1 = (1.0 - p_x1) * pi1_x[0] + p_x1 * pi1_x[1]
    eta0 = logit(pi0)
    eta1 = logit(pi1)
    gamma = eta1 - eta0
    return tuple(
        CollapsibilityRow(
            x=x,
            eta0_x=float(beta0_of_x[x]),
            eta1_x=float(beta0_of_x[x] + beta_t),
            beta_t=float(beta_t),
            pi0_x=pi0_x[x],
            pi1_x=pi1_x[x],
            pi0=pi0,
            pi1=pi1,
            eta0=eta0,
            eta1=eta1,
            gamma_t=gamma,
        )
        for x in (0, 1)
    )
