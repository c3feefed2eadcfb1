import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from offsetcate import causal
from offsetcate.dgm import ScmSpec, build_joint, observational_conditional
from offsetcate.likelihood import ModelParams

from conftest import brute_conditional, sig


def logit(p):
    return math.log(p / (1 - p))


class TestInterventional:
    def test_u_irrelevant(self):
        pi = causal.interventional(ScmSpec(beta_t=1.0, beta_uy=0.0, beta_ut=2.0))
        for x in (0, 1):
            assert pi[(1, x)] == pytest.approx(sig(0.5))
            assert pi[(0, x)] == pytest.approx(sig(-0.5))

    def test_example1_average_over_u(self):
        spec = ScmSpec(p_u=0.5, beta_t=1.0, beta_ut=1.0, beta_uy=2.0)
        pi00, pi01 = sig(0.5 * (-1 - 2)), sig(0.5 * (-1 + 2))
        assert causal.interventional(spec)[(0, 0)] == pytest.approx((pi00 + pi01) / 2, rel=1e-14)

    @given(
        st.floats(0.05, 0.95), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
        st.one_of(st.none(), st.floats(0.05, 0.95)),
    )
    @settings(max_examples=100, deadline=None)
    def test_randomization_oracle(self, p_u, bx, bu, bt, alpha):
        spec = ScmSpec(p_u=p_u, beta_t=bt, beta_x=bx, beta_ut=2 * bu, beta_uy=bu, alpha=alpha)
        pi = causal.interventional(spec)
        rct = observational_conditional(build_joint(spec.randomized()))
        for key in pi:
            assert abs(pi[key] - rct[key]) < 1e-12
            assert abs(pi[key] - brute_conditional(spec.randomized(), *key)) < 1e-12


@pytest.mark.parametrize(
    "spec, x, expected",
    [
        (ScmSpec(beta_t=0.0, beta_x=1.0, beta_uy=1.0, beta_ut=1.0), 0, 0.0),
        (ScmSpec(beta_t=0.0, beta_x=1.0, beta_uy=1.0, beta_ut=1.0), 1, 0.0),
    ],
)
def test_true_cate_zero_without_treatment_effect(spec, x, expected):
    assert causal.true_cate(spec, x) == pytest.approx(expected, abs=1e-16)


def test_true_cate_two_settings():
    # setting a x=0: risks 0.182 -> 0.378 ; setting b x=1: 0.924 -> 0.971
    a = causal.collapsibility_pipeline({0: -1.5, 1: 0.5}, 1.0, 0.5)[0]
    assert a.pi1_x - a.pi0_x == pytest.approx(0.196, abs=1e-3)
    b = causal.collapsibility_pipeline({0: -3.5, 1: 2.5}, 1.0, 0.5)[1]
    assert b.pi1_x - b.pi0_x == pytest.approx(0.047, abs=1e-3)


def test_true_marginal_log_or_collapsible_case():
    spec = ScmSpec(beta_t=1.3, beta_x=0.0, beta_uy=0.0, beta_ut=2.0)
    assert causal.true_marginal_log_or(spec) == pytest.approx(1.3, abs=1e-14)


class TestImpliedMarginal:
    def test_no_covariate_effect_is_collapsible(self):
        for w in (0.1, 0.5, 0.8):
            p = ModelParams(beta0=-0.7, beta_t=1.1, beta_x=0.0)
            assert causal.implied_marginal_log_or(p, {0: 1 - w, 1: w}) == pytest.approx(1.1, abs=1e-14)

    @pytest.mark.parametrize("b0, slope, gamma", [(-1.5, 2.0, 0.791), (-3.5, 6.0, 0.186)])
    def test_two_settings(self, b0, slope, gamma):
        p = ModelParams(beta0=b0, beta_t=1.0, beta_x=slope)
        assert causal.implied_marginal_log_or(p, {0: 0.5, 1: 0.5}) == pytest.approx(gamma, abs=5e-4)

    @pytest.mark.parametrize("p_treat", [0.1, 0.5, 0.9])
    def test_matches_hypothetical_trial_for_any_allocation(self, p_treat):
        params = ModelParams(beta0=-0.3, beta_t=0.8, beta_x=1.7)
        w = {0: 0.35, 1: 0.65}
        # explicit trial joint P(x) P(t) P(y|t,x); condition on arm
        joint = {
            (x, t): w[x] * (p_treat if t else 1 - p_treat) * sig(-0.3 + 0.8 * t + 1.7 * x)
            for x in (0, 1) for t in (0, 1)
        }
        arm = {t: sum(joint[(x, t)] for x in (0, 1)) / (p_treat if t else 1 - p_treat) for t in (0, 1)}
        expected = logit(arm[1]) - logit(arm[0])
        assert causal.implied_marginal_log_or(params, w) == pytest.approx(expected, rel=1e-13)

    def test_empirical_mean_equals_weights_for_matching_counts(self):
        params = ModelParams(beta0=0.2, beta_t=-0.6, beta_x=2.5)
        xs = [0] * 3 + [1] * 7
        assert causal.implied_marginal_log_or_empirical(params, xs) == pytest.approx(
            causal.implied_marginal_log_or(params, {0: 0.3, 1: 0.7}), rel=1e-14
        )

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        w = {0: 0.4, 1: 0.6}
        for _ in range(20):
            v = rng.uniform(-2, 2, 3)
            g = causal.implied_marginal_log_or_grad(ModelParams(*v), w)
            fd = np.empty(3)
            for i in range(3):
                e = np.zeros(3)
                e[i] = 1e-6
                fd[i] = (causal.implied_marginal_log_or(ModelParams(*(v + e)), w)
                         - causal.implied_marginal_log_or(ModelParams(*(v - e)), w)) / 2e-6
            assert np.linalg.norm(g - fd) < 1e-6 * max(1.0, np.linalg.norm(g))

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            causal.implied_marginal_log_or(ModelParams(), {0: 0.5, 1: 0.6})


class TestCollapsibility:
    def test_setting_a(self):
        row = causal.collapsibility_pipeline({0: -1.5, 1: 0.5}, 1.0, 0.5)[0]
        assert (row.pi0, row.pi1) == pytest.approx((0.402, 0.598), abs=5e-4)
        assert (row.eta0, row.eta1, row.gamma_t) == pytest.approx((-0.395, 0.395, 0.791), abs=5e-4)

    def test_setting_b(self):
        row = causal.collapsibility_pipeline({0: -3.5, 1: 2.5}, 1.0, 0.5)[1]
        assert (row.pi0, row.pi1, row.gamma_t) == pytest.approx((0.477, 0.523, 0.186), abs=5e-4)

    def test_extreme_example(self):
        b_t = math.log(0.02 * 0.99 / (0.98 * 0.01))
        row = causal.collapsibility_pipeline({0: logit(0.01), 1: logit(0.98)}, b_t, 0.5)[0]
        assert row.pi1_x == pytest.approx(0.02, abs=1e-12)
        assert (row.pi0, row.pi1) == pytest.approx((0.495, 0.505), abs=1e-12)
        assert math.exp(row.gamma_t) == pytest.approx(1.04, abs=5e-3)

    def test_gamma_is_difference_of_pooled_logits(self):
        for row in causal.collapsibility_pipeline({0: 0.3, 1: -2.0}, 0.7, 0.25):
            assert row.gamma_t == row.eta1 - row.eta0

    def test_marginal_shrinks_as_baseline_spread_grows(self):
        spreads = np.linspace(0.0, 12.0, 49)
        gammas = [
            causal.collapsibility_pipeline({0: -0.5 - s / 2, 1: -0.5 + s / 2}, 1.0, 0.5)[0].gamma_t
            for s in spreads
        ]
        assert np.all(np.diff(gammas) < 0)
        assert all(0 < g < 1.0 for g in gammas[1:])

    @given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0.05, 3), st.floats(0.05, 0.95))
    @settings(max_examples=200, deadline=None)
    def test_marginal_between_zero_and_conditional(self, b0, b1, bt, p):
        if abs(b0 - b1) < 1e-3:
            return
        g = causal.collapsibility_pipeline({0: b0, 1: b1}, bt, p)[0].gamma_t
        assert 0 < g < bt
