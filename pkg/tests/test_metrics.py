import math

import numpy as np
import pytest

from offsetcate.causal import true_cate
from offsetcate.dgm import ScmSpec
from offsetcate.estimators import ate_baseline, fit_rct_reference
from offsetcate.likelihood import ModelParams
from offsetcate.metrics import cate_prediction, pehe, predicted_cate, sample_pehe


def test_perfect_prediction():
    spec = ScmSpec(beta_x=1.3, beta_ut=2.0, beta_uy=1.1, p_u=0.3, p_x=0.4)
    truth = {x: true_cate(spec, x) for x in (0, 1)}
    assert pehe(truth, spec) == 0.0


def test_ate_on_constant_cate():
    spec = ScmSpec(beta_t=1.0, beta_x=0.0)
    assert pehe(ate_baseline(spec), spec) == pytest.approx(0.0, abs=1e-16)


def test_two_point_weighted_formula(monkeypatch):
    import offsetcate.metrics as m

    monkeypatch.setattr(m, "true_cate", lambda spec, x: (0.1, 0.3)[x])
    # p_x = 0.5: half the CATE gap
    assert m.pehe(0.2, ScmSpec(p_x=0.5)) == pytest.approx(0.1, abs=1e-15)


@pytest.mark.parametrize(
    "b0, bx, x, pi0, pi1",
    [(-1.5, 2.0, 0, 0.182, 0.378), (-3.5, 6.0, 1, 0.924, 0.971)],
)
def test_predicted_cate_settings(b0, bx, x, pi0, pi1):
    # the tabulated arm risks are rounded to three places
    got = predicted_cate(ModelParams(b0, 1.0, bx), x)
    assert got == pytest.approx(pi1 - pi0, abs=1.5e-3)
    eta0 = b0 + bx * x
    assert got == pytest.approx(1 / (1 + math.exp(-eta0 - 1)) - 1 / (1 + math.exp(-eta0)), abs=1e-15)


def test_predicted_cate_zero_effect():
    assert predicted_cate(ModelParams(0.4, 0.0, -2.0), 1) == 0.0


def test_rct_pehe_vanishes_as_outcome_confounding_vanishes():
    errs = []
    for b in (1.0, 0.3, 0.1, 0.0):
        spec = ScmSpec(beta_x=math.log(3), beta_ut=2.0, beta_uy=b, p_u=0.25)
        errs.append(pehe(cate_prediction(fit_rct_reference(spec)), spec))
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 1e-9


def test_weighted_equals_enumerated_sample():
    spec = ScmSpec(p_x=0.3, beta_x=1.5, beta_ut=1.0, beta_uy=2.0, p_u=0.2)
    pred = {0: 0.05, 1: 0.2}
    xs = np.array([0] * 7 + [1] * 3)
    tau = np.array([true_cate(spec, x) for x in xs])
    tau_hat = np.array([pred[x] for x in xs])
    assert pehe(pred, spec) == pytest.approx(sample_pehe(tau, tau_hat), rel=1e-14)
