"""Tests for the reference estimators: Gaussianized-prior LMMSE and the
clipped-EP baseline."""

import math
from types import SimpleNamespace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from glmep.baselines import (
    PriorGaussianization,
    ep_clip_estimate,
    lmmse_estimate,
    prior_gaussianization,
)
from glmep.benchmark import SimConfig, gen_instance, noise_variance
from glmep.ep import Mode, run
from glmep.gmm import GmmFactor
from glmep.model import GlmModel

from oracles import gaussian_glm_posterior


def gaussian_model(rng, n_obs, k_sig, noise_var=0.1):
    A = rng.standard_normal((n_obs, k_sig))
    prior_means = rng.normal(size=k_sig)
    prior_vars = rng.uniform(0.4, 2.0, size=k_sig)
    priors = tuple(GmmFactor.gaussian(m, v) for m, v in zip(prior_means, prior_vars))
    x = prior_means + np.sqrt(prior_vars) * rng.standard_normal(k_sig)
    y = A @ x + math.sqrt(noise_var) * rng.standard_normal(n_obs)
    likelihoods = tuple(GmmFactor.gaussian(v, noise_var) for v in y)
    return GlmModel(A, priors, likelihoods, y), prior_means, prior_vars, noise_var


def mixture_model(rng, n_obs=3, k_sig=4, noise_var=0.05):
    A = rng.standard_normal((n_obs, k_sig))
    priors = tuple(
        GmmFactor.from_mixture([0.5, 0.5], [1.0, -1.0], [0.1, 0.1])
        for _ in range(k_sig)
    )
    x = rng.choice([-1.0, 1.0], size=k_sig) + math.sqrt(0.1) * rng.standard_normal(k_sig)
    y = A @ x + math.sqrt(noise_var) * rng.standard_normal(n_obs)
    likelihoods = tuple(GmmFactor.gaussian(v, noise_var) for v in y)
    return GlmModel(A, priors, likelihoods, y)


class TestPriorGaussianization:
    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            PriorGaussianization(means=[0.0, 1.0], variances=[1.0])

    def test_nonpositive_variance_rejected(self):
        with pytest.raises(ValueError):
            PriorGaussianization(means=[0.0], variances=[0.0])
        with pytest.raises(ValueError):
            PriorGaussianization(means=[0.0], variances=[-1.0])

    def test_arrays_are_frozen(self):
        g = PriorGaussianization(means=[0.5], variances=[2.0])
        with pytest.raises(ValueError):
            g.means[0] = 3.0
        with pytest.raises(ValueError):
            g.variances[0] = 3.0

    def test_matches_mixture_moments(self):
        # 0.7 N(1, 0.5) + 0.3 N(-2, 2):
        #   mean = 0.7*1 - 0.3*2 = 0.1
        #   E[t^2] = 0.7*(0.5+1) + 0.3*(2+4) = 1.05 + 1.8 = 2.85
        #   var = 2.85 - 0.01 = 2.84
        f = GmmFactor.from_mixture([0.7, 0.3], [1.0, -2.0], [0.5, 2.0])
        g0 = GmmFactor.gaussian(-0.25, 1.5)
        model = GlmModel(
            np.eye(2),
            (f, g0),
            (GmmFactor.gaussian(0.0, 1.0), GmmFactor.gaussian(0.0, 1.0)),
            np.zeros(2),
        )
        g = prior_gaussianization(model)
        assert_allclose(g.means, [0.1, -0.25], rtol=0, atol=1e-14)
        assert_allclose(g.variances, [2.84, 1.5], rtol=1e-14)


class TestLmmse:
    def test_noiseless_limit_recovers_y(self):
        rng = np.random.default_rng(0)
        k = 4
        priors = tuple(GmmFactor.gaussian(0.0, 1.0) for _ in range(k))
        likelihoods = tuple(GmmFactor.gaussian(0.0, 1.0) for _ in range(k))
        y = rng.normal(size=k)
        model = GlmModel(np.eye(k), priors, likelihoods, y)
        x_hat = lmmse_estimate(model, 1e-12)
        assert_allclose(x_hat, y, rtol=0, atol=1e-9)

    def test_matches_normal_equations(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            model = mixture_model(rng, n_obs=3, k_sig=2)
            noise_var = 0.05
            # The Gaussianized prior is what LMMSE sees; feed the same
            # moments to a direct normal-equations solve.
            g = prior_gaussianization(model)
            want, _ = gaussian_glm_posterior(
                model.A, g.means, g.variances, model.y, noise_var
            )
            got = lmmse_estimate(model, noise_var)
            assert_allclose(got, want, rtol=1e-10, atol=1e-12)

    def test_exact_posterior_mean_for_gaussian_prior(self):
        rng = np.random.default_rng(2)
        model, prior_means, prior_vars, noise_var = gaussian_model(rng, 3, 5)
        want, _ = gaussian_glm_posterior(
            model.A, prior_means, prior_vars, model.y, noise_var
        )
        assert_allclose(lmmse_estimate(model, noise_var), want, rtol=1e-10)

    def test_equals_ep_fixed_point_when_gaussian(self):
        rng = np.random.default_rng(3)
        model, _, _, noise_var = gaussian_model(rng, 4, 6)
        posterior = run(model, Mode("acep"), max_sweeps=30, tol=1e-12)
        assert_allclose(
            lmmse_estimate(model, noise_var), posterior.x_mean, rtol=0, atol=1e-8
        )

    def test_noise_var_must_be_positive(self):
        rng = np.random.default_rng(4)
        model, _, _, _ = gaussian_model(rng, 2, 3)
        with pytest.raises(ValueError):
            lmmse_estimate(model, 0.0)
        with pytest.raises(ValueError):
            lmmse_estimate(model, -0.1)


class TestEpClipEstimate:
    def test_delegates_to_clip_mode(self):
        rng = np.random.default_rng(5)
        model = mixture_model(rng)
        want = run(model, Mode("clip", 1e-8), max_sweeps=50, tol=1e-8).x_mean
        assert np.array_equal(ep_clip_estimate(model), want)

    def test_matches_acep_on_gaussian_model(self):
        rng = np.random.default_rng(6)
        model, _, _, _ = gaussian_model(rng, 4, 6)
        acep = run(model, Mode("acep"), max_sweeps=50, tol=1e-10)
        assert acep.threshold_hits == 0
        assert_allclose(ep_clip_estimate(model), acep.x_mean, rtol=0, atol=1e-10)

    def test_config_attributes_are_honored(self):
        rng = np.random.default_rng(7)
        model = mixture_model(rng)
        cfg = SimpleNamespace(max_sweeps=2, tol=1e-8)
        want = run(model, Mode("clip", 1e-8), max_sweeps=2, tol=1e-8).x_mean
        assert np.array_equal(ep_clip_estimate(model, cfg), want)
        # An unconverged two-sweep answer differs from the fixed point.
        assert not np.array_equal(want, ep_clip_estimate(model))

    def test_epsilon_override_reaches_engine(self):
        rng = np.random.default_rng(8)
        model = mixture_model(rng)
        # A floor so aggressive that messages stay visibly perturbed.
        big = ep_clip_estimate(model, SimpleNamespace(epsilon=0.5))
        default = ep_clip_estimate(model)
        assert not np.allclose(big, default)

    def test_finite_and_flooring_on_benchmark_instances(self):
        config = SimConfig(trials=10, methods=("clip",))
        sigma2 = noise_variance(config)
        hits = 0
        for trial in range(config.trials):
            rng = np.random.default_rng([config.seed, trial])
            model, _ = gen_instance(config, rng)
            x_hat = ep_clip_estimate(model)
            assert np.all(np.isfinite(x_hat))
            posterior = run(model, Mode("clip", config.epsilon), 50, 1e-8)
            hits += posterior.threshold_hits
            assert_allclose(x_hat, posterior.x_mean, rtol=0, atol=0)
            # Same instances are solvable by the linear baseline too.
            assert np.all(np.isfinite(lmmse_estimate(model, sigma2)))
        assert hits > 0
