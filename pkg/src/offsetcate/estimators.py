"""Estimation strategies for CATE models under a known relative effect.

All fits maximize the exact expected log-likelihood of an observational (or
randomized) joint table. The free/fixed mask on :class:`ModelParams` selects
between the fully observational model and offset models; the constrained
offset model ties the implied marginal log odds-ratio to a reported value
through an augmented Lagrangian.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from . import causal
from .dgm import JointTable, ScmSpec, build_joint, x_marginal
from .likelihood import ModelParams, expected_loglik, full_gradient

log = logging.getLogger(__name__)

GRAD_TOL = 1e-9
CONSTRAINT_TOL = 1e-8
# stop well inside CONSTRAINT_TOL so the reported residual is not at the edge
FEASIBILITY_TOL = 1e-2 * CONSTRAINT_TOL
MAX_INNER = 200
MAX_OUTER = 50
MU_INIT = 10.0
MU_GROWTH = 10.0
SHRINK_FACTOR = 4.0
HESSIAN_STEP = 1e-5
MAX_STEP = 5.0


class MethodId(enum.Enum):
    ATE_BASELINE = "ate_baseline"
    RCT_REFERENCE = "rct_reference"
    FULL_OBSERVATIONAL = "full_observational"
    CONDITIONAL_OFFSET = "conditional_offset"
    MARGINAL_OFFSET = "marginal_offset"
    CONSTRAINED_OFFSET = "constrained_offset"


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    loglik: float
    grad_norm: float
    constraint_residual: float = 0.0
    outer_iters: int = 0
    inner_iters: int = 0
    converged: bool = False


@dataclass
class _NewtonOutcome:
    x: np.ndarray
    iters: int
    grad_norm: float
    converged: bool


def _fd_hessian(grad, x, h=HESSIAN_STEP):
    n = x.size
    H = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        H[:, i] = (grad(x + e) - grad(x - e)) / (2.0 * h)
    return 0.5 * (H + H.T)


def _ascent_direction(H, g):
    # shift the Hessian until it is safely negative definite
    evals, evecs = np.linalg.eigh(H)
    scale = max(1.0, float(np.max(np.abs(evals))))
    top = float(evals.max())
    floor = -1e-8 * scale
    if top > floor:
        evals = evals - (top - floor)
    return -evecs @ ((evecs.T @ g) / evals)


def damped_newton(
    fun: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    x0,
    tol: float = GRAD_TOL,
    max_iter: int = MAX_INNER,
) -> _NewtonOutcome:
    """Maximize ``fun`` with Newton steps on a finite-difference Hessian.

    Steps are halved until an Armijo increase is seen. Near the optimum the
    function values stop resolving the increase, so a step that shrinks the
    gradient without a visible decrease is accepted too.
    """
    x = np.array(x0, dtype=float)
    f = fun(x)
    g = grad(x)
    gnorm = float(np.linalg.norm(g))
    it = 0
    while gnorm >= tol and it < max_iter:
        it += 1
        d = _ascent_direction(_fd_hessian(grad, x), g)
        slope = float(g @ d)
        if slope <= 0.0:
            d, slope = g, float(g @ g)
        dn = float(np.linalg.norm(d))
        if dn > MAX_STEP:
            d, slope = d * (MAX_STEP / dn), slope * (MAX_STEP / dn)
        step = 1.0
        for _ in range(60):
            x_new = x + step * d
            f_new = fun(x_new)
            if np.isfinite(f_new):
                if f_new >= f + 1e-4 * step * slope:
                    break
                g_new = grad(x_new)
                if (
                    np.linalg.norm(g_new) < gnorm
                    and f_new >= f - 1e-13 * (1.0 + abs(f))
                ):
                    break
            step *= 0.5
        else:
            log.debug("line search stalled at |g|=%g", gnorm)
            break
        x, f = x_new, f_new
        g = grad(x)
        gnorm = float(np.linalg.norm(g))
    return _NewtonOutcome(x, it, gnorm, gnorm < tol)


def fit_mle(
    table: JointTable, init: Optional[ModelParams] = None, max_iter: int = MAX_INNER
) -> FitResult:
    """Maximum expected likelihood over the free coefficients of ``init``.

    Fixed coefficients are carried through unchanged, which makes this one
    routine serve the full model and every offset model.
    """
    init = init or ModelParams()
    idx = init.free_index

    def fun(z):
        return expected_loglik(init.with_free(z), table)

    def grad(z):
        return full_gradient(init.with_free(z), table)[idx]

    out = damped_newton(fun, grad, init.vector[idx], max_iter=max_iter)
    params = init.with_free(out.x)
    if not out.converged:
        log.warning("fit_mle did not converge: |g|=%g after %d iterations", out.grad_norm, out.iters)
    return FitResult(
        params=params,
        loglik=expected_loglik(params, table),
        grad_norm=out.grad_norm,
        outer_iters=1,
        inner_iters=out.iters,
        converged=out.converged,
    )


def _projected_norm(g, a):
    aa = float(a @ a)
    if aa == 0.0:
        return float(np.linalg.norm(g))
    return float(np.linalg.norm(g - (g @ a) / aa * a))


def fit_constrained(
    table: JointTable,
    gamma_star: float,
    x_weights: Optional[Mapping[int, float]] = None,
    init: Optional[ModelParams] = None,
    max_outer: int = MAX_OUTER,
) -> FitResult:
    """Maximize the likelihood subject to an implied marginal log OR of ``gamma_star``.

    Augmented Lagrangian: each outer step maximizes
    ``L - lam * c - mu / 2 * c**2`` with ``c`` the constraint residual, then
    sets ``lam += mu * c`` and multiplies ``mu`` by 10 if ``|c|`` shrank by
    less than a factor 4. ``init`` defaults to the unconstrained MLE.
    """
    if x_weights is None:
        x_weights = x_marginal(table)
    if init is None:
        init = fit_mle(table).params
    if not all(init.free):
        raise ValueError("constrained fit needs all three coefficients free")

    def resid(z):
        return causal.implied_marginal_log_or(init.with_vector(z), x_weights) - gamma_star

    def resid_grad(z):
        return causal.implied_marginal_log_or_grad(init.with_vector(z), x_weights)

    def loglik(z):
        return expected_loglik(init.with_vector(z), table)

    def loglik_grad(z):
        return full_gradient(init.with_vector(z), table)

    z = init.vector
    lam, mu = 0.0, MU_INIT
    c = resid(z)
    inner_total = 0
    converged = False
    outer = 0
    proj = _projected_norm(loglik_grad(z), resid_grad(z))
    if abs(c) < FEASIBILITY_TOL and proj < CONSTRAINT_TOL:
        converged = True
    while not converged and outer < max_outer:
        outer += 1

        def phi(v, lam=lam, mu=mu):
            try:
                r = resid(v)
            except ValueError:
                # implied risks rounded to 0 or 1
                return -np.inf
            return loglik(v) - lam * r - 0.5 * mu * r * r

        def phi_grad(v, lam=lam, mu=mu):
            return loglik_grad(v) - (lam + mu * resid(v)) * resid_grad(v)

        out = damped_newton(phi, phi_grad, z, tol=1e-2 * GRAD_TOL)
        inner_total += out.iters
        z = out.x
        c_new = resid(z)
        proj = _projected_norm(loglik_grad(z), resid_grad(z))
        if abs(c_new) < FEASIBILITY_TOL and proj < CONSTRAINT_TOL:
            c = c_new
            converged = True
            break
        lam += mu * c_new
        if abs(c_new) > abs(c) / SHRINK_FACTOR:
            mu *= MU_GROWTH
        c = c_new

    params = init.with_vector(z)
    if not converged:
        log.warning("constrained fit did not converge: |c|=%g, |g_proj|=%g", c, proj)
    return FitResult(
        params=params,
        loglik=expected_loglik(params, table),
        grad_norm=proj,
        constraint_residual=float(c),
        outer_iters=outer,
        inner_iters=inner_total,
        converged=converged,
    )


def fit_rct_reference(spec: ScmSpec) -> FitResult:
    """Full logistic fit on the randomized version of ``spec``."""
    return fit_mle(build_joint(spec.randomized()))


def fit_full_observational(spec: ScmSpec) -> FitResult:
    return fit_mle(build_joint(spec))


def fit_conditional_offset(spec: ScmSpec) -> FitResult:
    """Offset model with beta_t fixed at the RCT reference's conditional log OR."""
    rct = fit_rct_reference(spec)
    return fit_mle(build_joint(spec), ModelParams.offset(rct.params.beta_t))


def fit_marginal_offset(spec: ScmSpec) -> FitResult:
    """Offset model with beta_t fixed at the trial's marginal log OR."""
    gamma = causal.true_marginal_log_or(spec)
    return fit_mle(build_joint(spec), ModelParams.offset(gamma))


def fit_constrained_offset(spec: ScmSpec) -> FitResult:
    table = build_joint(spec)
    return fit_constrained(table, causal.true_marginal_log_or(spec), x_marginal(table))


def ate_baseline(spec: ScmSpec) -> float:
    """Population risk difference under do(t=1) versus do(t=0)."""
    p0, p1 = causal.interventional_marginal(spec)
    return p1 - p0


FITTERS = {
    MethodId.RCT_REFERENCE: fit_rct_reference,
    MethodId.FULL_OBSERVATIONAL: fit_full_observational,
    MethodId.CONDITIONAL_OFFSET: fit_conditional_offset,
    MethodId.MARGINAL_OFFSET: fit_marginal_offset,
    MethodId.CONSTRAINED_OFFSET: fit_constrained_offset,
}
