"""Reference estimators: Gaussianized-prior LMMSE and always-proper EP.

The LMMSE baseline replaces every prior factor by a single Gaussian with the
same mean and variance and then applies the textbook linear estimator.  The
clipped-EP baseline delegates to the shared message-passing engine in
``clip`` mode, where every projected precision is floored at ``+epsilon``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ep import Mode, run
from .errors import SingularMatrix
from .model import GlmModel

__all__ = ["PriorGaussianization", "prior_gaussianization", "lmmse_estimate",
           "ep_clip_estimate"]


@dataclass(frozen=True)
class PriorGaussianization:
    """Per-dimension matched means and variances of the prior factors."""

    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        m = np.array(self.means, dtype=float).reshape(-1)
        v = np.array(self.variances, dtype=float).reshape(-1)
        if m.size != v.size:
            raise ValueError("means and variances must share a length")
        if not np.all(v > 0.0):
            raise ValueError("variances must be positive")
        m.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)


def prior_gaussianization(model: GlmModel) -> PriorGaussianization:
    """Moment-match each prior factor with a single Gaussian."""
    moments = [f.mixture_moments() for f in model.priors]
    means = np.array([m for m, _ in moments])
    variances = np.array([v for _, v in moments])
    return PriorGaussianization(means, variances)


def lmmse_estimate(model: GlmModel, noise_var: float) -> np.ndarray:
    """Linear MMSE estimate of x under the Gaussianized prior.

    ``x_hat = m0 + D A^T (A D A^T + noise_var I)^{-1} (y - A m0)`` with
    ``D = diag(v0)``.

    Raises:
        SingularMatrix: if the innovation covariance cannot be solved.
    """
    if not noise_var > 0.0:
        raise ValueError(f"noise_var must be positive, got {noise_var!r}")
    g = prior_gaussianization(model)
    A = model.A
    DAt = g.variances[:, None] * A.T
    S = A @ DAt
    S[np.diag_indices_from(S)] += noise_var
    resid = model.y - A @ g.means
    try:
        w = np.linalg.solve(S, resid)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"innovation covariance is singular: {exc}") from exc
    return g.means + DAt @ w


def ep_clip_estimate(model: GlmModel, config=None) -> np.ndarray:
    """Posterior mean of x from the clipped-EP baseline.

    ``config`` may be any object carrying ``epsilon``, ``max_sweeps``,
    ``tol``, ``init_xi``, and ``validate`` attributes (missing ones fall back
    to the engine defaults).
    """
    epsilon = getattr(config, "epsilon", 1e-8)
    max_sweeps = getattr(config, "max_sweeps", 50)
    tol = getattr(config, "tol", 1e-8)
    init_xi = getattr(config, "init_xi", 1.0)
    validate = getattr(config, "validate", False)
    posterior = run(
        model, Mode("clip", epsilon), max_sweeps, tol,
        init_xi=init_xi, validate=validate,
    )
    return posterior.x_mean
