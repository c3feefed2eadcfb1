"""Expected log-likelihood of logistic (beta0, beta_t, beta_x) models.

The expectation is taken under an exact joint table, so the objective is the
infinite-sample limit of the per-observation Bernoulli log-likelihood.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._math import log_sigmoid, logit, sigmoid
from .dgm import JointTable, ScmSpec

COEFS = ("beta0", "beta_t", "beta_x")

# design rows z(t, x) = (1, t, x), indexed [x, t, coef]
_DESIGN = np.array(
    [[[1.0, t, x] for t in (0, 1)] for x in (0, 1)],
)


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of ``logit P(y=1|t,x) = beta0 + beta_t t + beta_x x``.

    ``free`` flags which coefficients an optimizer may move. A fixed
    ``beta_t`` is the treatment offset.
    """

    beta0: float = 0.0
    beta_t: float = 0.0
    beta_x: float = 0.0
    free: tuple[bool, bool, bool] = (True, True, True)

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(bool(f) for f in self.free))
        if len(self.free) != 3:
            raise ValueError("free mask needs one flag per coefficient")
        if not any(self.free):
            raise ValueError("at least one coefficient must be free")
        for name in COEFS:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def offset(cls, beta_t: float, beta0: float = 0.0, beta_x: float = 0.0) -> "ModelParams":
        return cls(beta0, beta_t, beta_x, free=(True, False, True))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.beta0, self.beta_t, self.beta_x])

    @property
    def free_index(self) -> np.ndarray:
        return np.flatnonzero(self.free)

    def with_vector(self, vec) -> "ModelParams":
        b0, bt, bx = (float(v) for v in vec)
        return replace(self, beta0=b0, beta_t=bt, beta_x=bx)

    def with_free(self, free_values) -> "ModelParams":
        """Copy with the free coefficients replaced, fixed ones untouched."""
        vec = self.vector
        vec[self.free_index] = free_values
        return self.with_vector(vec)

    def linear_predictor(self) -> np.ndarray:
        """``eta`` indexed ``[x, t]``."""
        return _DESIGN @ self.vector


def _xty(table: JointTable) -> np.ndarray:
    return table.prob.sum(axis=0)


def expected_loglik(params: ModelParams, table: JointTable) -> float:
    """E[ y log sigma(eta) + (1 - y) log(1 - sigma(eta)) ] under ``table``."""
    w = _xty(table)
    eta = params.linear_predictor()
    ll = w[..., 1] * log_sigmoid(eta) + w[..., 0] * log_sigmoid(-eta)
    return float(ll.sum())


def full_gradient(params: ModelParams, table: JointTable) -> np.ndarray:
    """Gradient with respect to all three coefficients."""
    w = _xty(table)
    eta = params.linear_predictor()
    resid = w[..., 1] - w.sum(axis=-1) * sigmoid(eta)
    return np.einsum("xt,xtk->k", resid, _DESIGN)


def grad_expected_loglik(params: ModelParams, table: JointTable) -> np.ndarray:
    """Gradient restricted to the free coefficients, in (beta0, beta_t, beta_x) order."""
    return full_gradient(params, table)[params.free_index]


def grad_at_truth_from_probs(p_u, p_t1_given_u, pi) -> float:
    """Derivative of the offset-model likelihood in beta0 at the true baseline.

    ``p_t1_given_u`` is ``(P(t=1|u=0), P(t=1|u=1))`` and ``pi[t][u]`` is
    P(y=1|t, u).
    """
    q0, q1 = p_t1_given_u
    pi = np.asarray(pi, dtype=float)
    d_t0 = (1.0 - q1) - (1.0 - q0)
    d_t1 = q1 - q0
    return float(
        p_u * (1.0 - p_u) * ((pi[0, 1] - pi[0, 0]) * d_t0 + (pi[1, 1] - pi[1, 0]) * d_t1)
    )


def grad_at_truth_closed_form(spec: ScmSpec) -> float:
    """Closed-form dL/dbeta0 at the true baseline log odds, for beta_x = 0 models."""
    if spec.beta_x != 0.0:
        raise ValueError("closed form only holds without a covariate effect (beta_x == 0)")
    # with beta_x = 0 the covariate is irrelevant; take the x=0 slice of pi
    pi = spec.outcome_probs()[:, 0, :]
    return grad_at_truth_from_probs(spec.marginal_p_u, spec.p_t1_given_u(), pi)


def ground_truth_baseline(spec: ScmSpec) -> tuple[float, float]:
    """(beta0*, beta_t*) of the interventional distribution, beta_x = 0 case."""
    if spec.beta_x != 0.0:
        raise ValueError("ground truth baseline defined here only for beta_x == 0")
    pu = spec.marginal_p_u
    pi = spec.outcome_probs()[:, 0, :]
    p0 = (1.0 - pu) * pi[0, 0] + pu * pi[0, 1]
    p1 = (1.0 - pu) * pi[1, 0] + pu * pi[1, 1]
    b0 = logit(p0)
    return b0, logit(p1) - b0


def alt_baseline_solution(beta0_star: float, beta_t_star: float) -> float:
    """The other baseline with the same CATE, by the symmetry sigma(-z) = 1 - sigma(z)."""
    return -(beta0_star + beta_t_star)


def cate_of(beta0: float, beta_t: float) -> float:
    return float(sigmoid(beta0 + beta_t) - sigmoid(beta0))


def cate_level_set_roots(delta: float, beta_t: float) -> tuple[float, ...]:
    """All ``beta0`` with ``sigma(beta0 + beta_t) - sigma(beta0) == delta``.

    Solves ``delta e^b y^2 + (delta (1 + e^b) - e^b + 1) y + delta = 0`` for
    ``y = e^beta0`` and keeps the positive roots. Returns zero, one or two
    values in increasing order. Raises for ``delta == beta_t == 0``, where
    every ``beta0`` qualifies.
    """
    if not abs(delta) < 1.0:
        raise ValueError("delta must lie strictly inside (-1, 1)")
    if delta == 0.0 and beta_t == 0.0:
        raise ValueError("delta = beta_t = 0: every baseline has zero CATE")
    eb = math.exp(beta_t)
    a = delta * eb
    b = delta * (1.0 + eb) - eb + 1.0
    c = delta
    if a == 0.0:
        ys = [] if b == 0.0 else [-c / b]
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            return ()
        sq = math.sqrt(disc)
        # avoid cancellation; product of roots is c / a = e^-b
        q = -0.5 * (b + math.copysign(sq, b))
        ys = [q / a, c / q] if q != 0.0 else [0.0]
    roots = sorted({_polish(math.log(y), delta, beta_t) for y in ys if y > 0.0})
    return tuple(roots)


def _polish(a: float, delta: float, b: float, steps: int = 3) -> float:
    # Newton on sigma(a + b) - sigma(a) - delta; derivative vanishes only at a double root
    for _ in range(steps):
        s1, s0 = sigmoid(a + b), sigmoid(a)
        f = s1 - s0 - delta
        df = s1 * (1.0 - s1) - s0 * (1.0 - s0)
        if df == 0.0 or abs(f) < 1e-17:
            break
        step = f / df
        if abs(step) > 1e-3:
            break
        a -= step
    return a


def central_difference_gradient(fun, x: Sequence[float], h: float = 1e-6) -> np.ndarray:
    """Central finite differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2.0 * h)
    return g
