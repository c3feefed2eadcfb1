"""Parameter sweeps over confounding strength, covariate effect and x-u coupling.

Each grid cell is independent. Cells may be evaluated in worker processes,
but results are always merged back in grid order, so the CSV written for a
sweep does not depend on ``jobs``.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import causal
from .dgm import ScmSpec, build_joint, x_marginal
from .estimators import (
    FITTERS,
    FitResult,
    MethodId,
    ate_baseline,
    fit_mle,
)
from .likelihood import ModelParams, expected_loglik, ground_truth_baseline
from .metrics import cate_prediction, pehe

CSV_HEADER = (
    "or_u,beta_x,alpha,p_u,p_x,beta_t,method,fit_beta0,fit_beta_t,fit_beta_x,"
    "implied_gamma,true_gamma,pehe,converged"
)

DEFAULT_OR_GRID = (1.0, 2.0, 5.0, 10.0)
DEFAULT_ALPHA_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
ALL_METHODS = tuple(MethodId)


def default_beta_x_grid(n: int = 21) -> tuple[float, ...]:
    return tuple(float(v) for v in np.linspace(0.0, math.log(10.0), n))


@dataclass(frozen=True)
class SweepSpec:
    or_u: tuple[float, ...] = DEFAULT_OR_GRID
    beta_x: tuple[float, ...] = field(default_factory=default_beta_x_grid)
    alpha: tuple[float, ...] = DEFAULT_ALPHA_GRID
    p_u: float = 0.5
    p_x: float = 0.5
    beta_t: float = 1.0
    methods: tuple[MethodId, ...] = ALL_METHODS

    def __post_init__(self):
        for name in ("or_u", "beta_x", "alpha", "methods"):
            if not getattr(self, name):
                raise ValueError(f"sweep grid {name!r} is empty")
        if any(not (v > 0.0) for v in self.or_u):
            raise ValueError("odds-ratios in or_u must be positive")
        if any(not (0.0 < a < 1.0) for a in self.alpha):
            raise ValueError("alpha values must lie in (0, 1)")

    def scm(self, or_u: float, beta_x: float, alpha: Optional[float] = None) -> ScmSpec:
        bu = math.log(or_u)
        return ScmSpec(
            p_u=self.p_u,
            p_x=self.p_x,
            beta_t=self.beta_t,
            beta_x=beta_x,
            beta_ut=bu,
            beta_uy=bu,
            alpha=alpha,
        )


@dataclass(frozen=True)
class SweepRow:
    or_u: float
    beta_x: float
    alpha: Optional[float]
    p_u: float
    p_x: float
    beta_t: float
    method: MethodId
    fit_beta0: Optional[float]
    fit_beta_t: Optional[float]
    fit_beta_x: Optional[float]
    implied_gamma: Optional[float]
    true_gamma: float
    pehe: float
    converged: bool

    @property
    def fitted_or_x(self) -> Optional[float]:
        return None if self.fit_beta_x is None else math.exp(self.fit_beta_x)

    def csv_fields(self) -> list[str]:
        return [_fmt(getattr(self, f.name)) for f in fields(self)]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, MethodId):
        return v.value
    return format(float(v), ".12g")


def evaluate_method(method: MethodId, spec: ScmSpec) -> tuple[Optional[FitResult], float]:
    """Fit one method on ``spec`` and return ``(fit, pehe)``; no fit for the ATE baseline."""
    if method is MethodId.ATE_BASELINE:
        return None, pehe(ate_baseline(spec), spec)
    fit = FITTERS[method](spec)
    return fit, pehe(cate_prediction(fit), spec)


def _cell_rows(sweep: SweepSpec, or_u: float, beta_x: float, alpha: Optional[float]) -> list[SweepRow]:
    spec = sweep.scm(or_u, beta_x, alpha)
    x_w = x_marginal(build_joint(spec))
    true_gamma = causal.true_marginal_log_or(spec)
    rows = []
    for method in sweep.methods:
        try:
            fit, err = evaluate_method(method, spec)
        except (ValueError, np.linalg.LinAlgError):
            rows.append(
                SweepRow(or_u, beta_x, alpha, spec.p_u, spec.p_x, spec.beta_t, method,
                         None, None, None, None, true_gamma, math.nan, False)
            )
            continue
        if fit is None:
            coefs, implied, ok = (None, None, None), None, True
        else:
            p = fit.params
            coefs = (p.beta0, p.beta_t, p.beta_x)
            implied = causal.implied_marginal_log_or(p, x_w)
            ok = fit.converged
        rows.append(
            SweepRow(or_u, beta_x, alpha, spec.p_u, spec.p_x, spec.beta_t, method,
                     *coefs, implied, true_gamma, err, ok)
        )
    return rows


def _cell_job(args):
    return _cell_rows(*args)


def _run_cells(cells: Sequence[tuple], jobs: int) -> list[SweepRow]:
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_cell_job, cells))
    else:
        chunks = [_cell_job(c) for c in cells]
    return [row for chunk in chunks for row in chunk]


def run_covariate_sweep(sweep: Optional[SweepSpec] = None, jobs: int = 1) -> list[SweepRow]:
    """All methods on every (or_u, beta_x) cell with x and u independent."""
    sweep = sweep or SweepSpec()
    cells = [(sweep, o, b, None) for o in sweep.or_u for b in sweep.beta_x]
    return _run_cells(cells, jobs)


def run_correlated_sweep(sweep: Optional[SweepSpec] = None, jobs: int = 1) -> list[SweepRow]:
    """As :func:`run_covariate_sweep` with P(u=1|x=0) = 1 - P(u=1|x=1) = alpha."""
    sweep = sweep or SweepSpec()
    cells = [(sweep, o, b, a) for a in sweep.alpha for o in sweep.or_u for b in sweep.beta_x]
    return _run_cells(cells, jobs)


@dataclass(frozen=True)
class Example1Result:
    or_u: float
    beta0_star: float
    beta_t_star: float
    full: FitResult
    offset: FitResult
    beta0_grid: np.ndarray
    beta_t_grid: np.ndarray
    loglik_grid: np.ndarray  # [i_beta_t, j_beta0]


def example1_spec(or_u: float, beta_t: float = 1.0, p_u: float = 0.5) -> ScmSpec:
    bu = math.log(or_u)
    return ScmSpec(p_u=p_u, beta_t=beta_t, beta_x=0.0, beta_ut=bu, beta_uy=bu)


def run_example1(
    or_grid: Iterable[float] = DEFAULT_OR_GRID,
    beta0_range: tuple[float, float] = (-2.0, 1.0),
    beta_t_range: tuple[float, float] = (-0.5, 3.5),
    resolution: int = 61,
) -> list[Example1Result]:
    """Ground truth, fully observational and offset solutions without a covariate.

    The covariate has no effect here, so every model keeps ``beta_x`` fixed
    at zero. Also returns the observational log-likelihood on a
    ``(beta0, beta_t)`` grid for contour plots.
    """
    results = []
    b0s = np.linspace(*beta0_range, resolution)
    bts = np.linspace(*beta_t_range, resolution)
    for or_u in or_grid:
        spec = example1_spec(or_u)
        table = build_joint(spec)
        b0_star, bt_star = ground_truth_baseline(spec)
        full = fit_mle(table, ModelParams(free=(True, True, False)))
        offset = fit_mle(table, ModelParams(0.0, bt_star, 0.0, free=(True, False, False)))
        grid = np.array(
            [[expected_loglik(ModelParams(b0, bt, 0.0), table) for b0 in b0s] for bt in bts]
        )
        results.append(Example1Result(or_u, b0_star, bt_star, full, offset, b0s, bts, grid))
    return results


def run_collapsibility_table():
    """Both settings of the non-collapsibility illustration, keyed by setting label."""
    return {
        "a": causal.collapsibility_pipeline({0: -1.5, 1: 0.5}, 1.0, 0.5),
        "b": causal.collapsibility_pipeline({0: -3.5, 1: 2.5}, 1.0, 0.5),
    }


# ---------------------------------------------------------------- output

def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()


def example1_to_csv(results: Sequence[Example1Result]) -> tuple[str, str]:
    """(solutions CSV, log-likelihood grid CSV)."""
    sol = io.StringIO()
    w = csv.writer(sol, lineterminator="\n")
    w.writerow(["or_u", "method", "beta0", "beta_t", "loglik", "converged"])
    for r in results:
        truth = ModelParams(r.beta0_star, r.beta_t_star, 0.0)
        table = build_joint(example1_spec(r.or_u))
        w.writerow([_fmt(r.or_u), "rct", _fmt(r.beta0_star), _fmt(r.beta_t_star),
                    _fmt(expected_loglik(truth, table)), "true"])
        for name, fit in (("full_observational", r.full), ("offset", r.offset)):
            w.writerow([_fmt(r.or_u), name, _fmt(fit.params.beta0), _fmt(fit.params.beta_t),
                        _fmt(fit.loglik), _fmt(fit.converged)])
    grid = io.StringIO()
    g = csv.writer(grid, lineterminator="\n")
    g.writerow(["or_u", "beta0", "beta_t", "loglik"])
    for r in results:
        for i, bt in enumerate(r.beta_t_grid):
            for j, b0 in enumerate(r.beta0_grid):
                g.writerow([_fmt(r.or_u), _fmt(b0), _fmt(bt), _fmt(r.loglik_grid[i, j])])
    return sol.getvalue(), grid.getvalue()


def collapsibility_to_csv(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in fields(causal.CollapsibilityRow)]
    w.writerow(["setting", *names])
    for label, rows in table.items():
        for row in rows:
            w.writerow([label] + [_fmt(getattr(row, n)) if n != "x" else str(row.x) for n in names])
    return buf.getvalue()


# ---------------------------------------------------------------- config

_LIST_KEYS = {"or_u", "beta_x", "alpha", "methods"}
_SCALAR_KEYS = {"p_u", "p_x", "beta_t"}


def parse_config(text: str) -> SweepSpec:
    """Read ``key = value`` lines into a :class:`SweepSpec`.

    Lists are comma-separated, ``#`` starts a comment, unknown keys raise.
    """
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in _LIST_KEYS:
            items = [v.strip() for v in value.split(",") if v.strip()]
            if key == "methods":
                kwargs[key] = tuple(MethodId(v) for v in items)
            else:
                kwargs[key] = tuple(float(v) for v in items)
        elif key in _SCALAR_KEYS:
            kwargs[key] = float(value)
        else:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
    return SweepSpec(**kwargs)


def load_config(path) -> SweepSpec:
    return parse_config(Path(path).read_text())
