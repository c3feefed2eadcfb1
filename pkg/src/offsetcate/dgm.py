"""Discrete data-generating mechanisms over binary (u, x, t, y).

Every distribution here is an exact probability table; nothing is sampled.
Coefficients use the centred coding ``0.5 * beta * (2v - 1)`` so each one is
a full log odds-ratio between the two levels of its variable.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._math import sigmoid

# axis order of JointTable.prob
U, X, T, Y = 0, 1, 2, 3


class Regime(enum.Enum):
    OBSERVATIONAL = "observational"
    RANDOMIZED = "randomized"


def _check_prob(name, value):
    if not (0.0 < value < 1.0) or math.isnan(value):
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {value!r}")


@dataclass(frozen=True)
class ScmSpec:
    """Parameters of the binary structural causal model.

    ``alpha`` couples the confounder to the covariate: P(u=1|x=0) = alpha and
    P(u=1|x=1) = 1 - alpha. When it is set, ``p_u`` is ignored and the
    marginal P(u=1) follows from ``p_x``.
    """

    p_u: float = 0.5
    p_x: float = 0.5
    beta_t: float = 1.0
    beta_x: float = 0.0
    beta_ut: float = 0.0
    beta_uy: float = 0.0
    alpha: Optional[float] = None
    regime: Regime = Regime.OBSERVATIONAL

    def __post_init__(self):
        _check_prob("p_u", self.p_u)
        _check_prob("p_x", self.p_x)
        if self.alpha is not None:
            _check_prob("alpha", self.alpha)
        for name in ("beta_t", "beta_x", "beta_ut", "beta_uy"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")

    def randomized(self) -> "ScmSpec":
        return self.replace(regime=Regime.RANDOMIZED)

    def replace(self, **changes) -> "ScmSpec":
        from dataclasses import replace

        return replace(self, **changes)

    @property
    def marginal_p_u(self) -> float:
        if self.alpha is None:
            return self.p_u
        return self.p_x * (1.0 - self.alpha) + (1.0 - self.p_x) * self.alpha

    def p_x_table(self) -> np.ndarray:
        """P(x) as a length-2 array."""
        return np.array([1.0 - self.p_x, self.p_x])

    def p_u_given_x(self) -> np.ndarray:
        """P(u|x) indexed ``[x, u]``."""
        if self.alpha is None:
            pu1 = np.array([self.p_u, self.p_u])
        else:
            pu1 = np.array([self.alpha, 1.0 - self.alpha])
        return np.stack([1.0 - pu1, pu1], axis=1)

    def p_t1_given_u(self) -> np.ndarray:
        """P(t=1|u) indexed ``[u]``; the covariate does not enter."""
        if self.regime is Regime.RANDOMIZED:
            return np.array([0.5, 0.5])
        return sigmoid(0.5 * self.beta_ut * np.array([-1.0, 1.0]))

    def outcome_probs(self) -> np.ndarray:
        """P(y=1|t, x, u) indexed ``[t, x, u]``."""
        s = np.array([-1.0, 1.0])
        eta = 0.5 * (
            self.beta_t * s[:, None, None]
            + self.beta_x * s[None, :, None]
            + self.beta_uy * s[None, None, :]
        )
        return sigmoid(eta)


@dataclass(frozen=True, eq=False)
class JointTable:
    """Exact joint distribution over binary ``(u, x, t, y)``.

    ``prob`` has shape ``(2, 2, 2, 2)`` with axes in that order.
    """

    prob: np.ndarray

    def __post_init__(self):
        p = np.array(self.prob, dtype=float)
        if p.shape != (2, 2, 2, 2):
            raise ValueError(f"joint table must have shape (2, 2, 2, 2), got {p.shape}")
        if np.any(p < 0.0) or not np.all(np.isfinite(p)):
            raise ValueError("joint table has negative or non-finite entries")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"joint table sums to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "prob", p)

    def __getitem__(self, key):
        u, x, t, y = key
        return float(self.prob[u, x, t, y])

    def items(self):
        for idx in np.ndindex(2, 2, 2, 2):
            yield idx, float(self.prob[idx])


def build_joint(spec: ScmSpec) -> JointTable:
    """Joint table P(u, x) P(t | u, x) P(y | t, x, u) for ``spec``."""
    p_ux = spec.p_x_table()[:, None] * spec.p_u_given_x()  # [x, u]
    pt1 = spec.p_t1_given_u()
    p_t = np.stack([1.0 - pt1, pt1], axis=1)  # [u, t]
    py1 = spec.outcome_probs()  # [t, x, u]
    p_y = np.stack([1.0 - py1, py1], axis=-1)  # [t, x, u, y]

    prob = (
        p_ux.T[:, :, None, None]
        * p_t[:, None, :, None]
        * p_y.transpose(2, 1, 0, 3)
    )
    return JointTable(prob)


def example1_table(p_u: float, p_t1_given_u, pi) -> JointTable:
    """Joint table for a covariate-free mechanism with arbitrary probabilities.

    ``p_t1_given_u[u]`` is P(t=1|u) and ``pi[t][u]`` is P(y=1|t, u). The
    covariate is carried as an independent fair coin with no effect, so the
    table plugs into the same likelihood code as :func:`build_joint`.
    """
    _check_prob("p_u", p_u)
    pt1 = np.asarray(p_t1_given_u, dtype=float)
    pi = np.asarray(pi, dtype=float)
    for v in np.concatenate([pt1.ravel(), pi.ravel()]):
        _check_prob("probability", float(v))
    p_u_arr = np.array([1.0 - p_u, p_u])
    p_t = np.stack([1.0 - pt1, pt1], axis=1)  # [u, t]
    p_y = np.stack([1.0 - pi.T, pi.T], axis=-1)  # [u, t, y]
    prob = p_u_arr[:, None, None, None] * p_t[:, None, :, None] * p_y[:, None, :, :]
    return JointTable(np.repeat(0.5 * prob, 2, axis=X))


def observational_conditional(table: JointTable) -> dict[tuple[int, int], float]:
    """P(y=1 | t, x) with the confounder summed out, keyed by ``(t, x)``."""
    p_xty = table.prob.sum(axis=U)  # [x, t, y]
    out = {}
    for t in (0, 1):
        for x in (0, 1):
            mass = p_xty[x, t].sum()
            if mass <= 0.0:
                raise ValueError(f"cell (t={t}, x={x}) has zero probability mass")
            out[(t, x)] = float(p_xty[x, t, 1] / mass)
    return out


def x_marginal(table: JointTable) -> dict[int, float]:
    p = table.prob.sum(axis=(U, T, Y))
    return {0: float(p[0]), 1: float(p[1])}
