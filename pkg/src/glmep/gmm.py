"""Gaussian-mixture factors and their beliefs under possibly improper messages.

A factor is a fixed weighted sum of unnormalized Gaussian kernels

    ``f(t) = sum_s w_s Nbar(t | m_s, tau_s)``,   ``w_s > 0``, ``tau_s > 0``.

The incoming message is kept in natural form ``mu(t) = exp(-xi t^2/2 + nu t)``
so that ``xi <= 0`` (non-integrable messages) and even ``xi = 0`` are valid
inputs.  The belief ``b(t) = f(t) mu(t)`` is integrable exactly when every
combined component precision ``tau_s^{-1} + xi`` is positive, i.e. when
``xi > -min_s tau_s^{-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonIntegrableBelief
from .gaussian import GaussNat1

__all__ = [
    "GmmFactor",
    "gmm_belief_moments",
    "gmm_responsibilities",
    "gmm_min_precision",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GmmFactor:
    """Weighted sum of unnormalized Gaussian kernels.

    Attributes:
        weights: positive kernel weights ``w_s`` (not required to normalize).
        means: kernel means ``m_s``.
        variances: positive kernel variances ``tau_s``.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        m = np.array(self.means, dtype=float).reshape(-1)
        v = np.array(self.variances, dtype=float).reshape(-1)
        if not (w.size == m.size == v.size) or w.size == 0:
            raise ValueError("weights, means, variances must share a nonzero length")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(m)) or not np.all(np.isfinite(v)):
            raise ValueError("GmmFactor parameters must be finite")
        if not np.all(w > 0.0):
            raise ValueError("weights must be positive")
        if not np.all(v > 0.0):
            raise ValueError("variances must be positive")
        for arr in (w, m, v):
            arr.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)
        # cached derived parameters used on every belief evaluation
        prec = 1.0 / v
        nat = m * prec
        logw = np.log(w)
        for arr in (prec, nat, logw):
            arr.flags.writeable = False
        object.__setattr__(self, "_precisions", prec)
        object.__setattr__(self, "_nat_means", nat)
        object.__setattr__(self, "_log_weights", logw)
        object.__setattr__(self, "_min_precision", float(prec.min()))

    @classmethod
    def from_mixture(cls, weights, means, variances) -> "GmmFactor":
        """Build the factor equal to a *normalized* Gaussian mixture density.

        ``sum_s p_s N(t|m_s, tau_s)`` with mixing weights ``p_s`` becomes
        kernel weights ``w_s = p_s / sqrt(2 pi tau_s)``.
        """
        p = np.asarray(weights, dtype=float).reshape(-1)
        v = np.asarray(variances, dtype=float).reshape(-1)
        return cls(p / np.sqrt(2.0 * math.pi * v), means, v)

    @classmethod
    def gaussian(cls, mean: float, variance: float) -> "GmmFactor":
        """Single normalized Gaussian density as a one-kernel factor."""
        return cls.from_mixture([1.0], [mean], [variance])

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def min_precision(self) -> float:
        """Smallest kernel precision ``min_s 1/tau_s``."""
        return self._min_precision

    def mixture_moments(self):
        """Mean and variance of the factor viewed as a (normalizable) density."""
        mass = self.weights * np.sqrt(2.0 * math.pi * self.variances)
        q = mass / mass.sum()
        mean = float(q @ self.means)
        var = float(q @ (self.variances + (self.means - mean) ** 2))
        return mean, var

    def log_density(self, t):
        """Log of the factor evaluated pointwise (stable across kernels)."""
        t = np.asarray(t, dtype=float)
        expo = self._log_weights - 0.5 * (t[..., None] - self.means) ** 2 / self.variances
        mx = expo.max(axis=-1)
        return mx + np.log(np.exp(expo - mx[..., None]).sum(axis=-1))


def gmm_min_precision(factor: GmmFactor) -> float:
    """Smallest kernel precision; beliefs need ``xi > -gmm_min_precision``."""
    return factor.min_precision


def _log_kernel_masses(factor: GmmFactor, mu: GaussNat1):
    """Per-kernel log of ``w_s integral Nbar(t|m_s,tau_s) mu(t) dt``."""
    xi_plus = factor._precisions + mu.xi
    if xi_plus.min() <= 0.0:
        raise NonIntegrableBelief(
            f"message precision {mu.xi!r} does not exceed "
            f"-{factor.min_precision!r}; belief is not integrable"
        )
    nu_plus = factor._nat_means + mu.nu
    log_eta = (
        factor._log_weights
        - 0.5 * factor._nat_means * factor.means
        + 0.5 * nu_plus * nu_plus / xi_plus
        + 0.5 * (_LOG_2PI - np.log(xi_plus))
    )
    return log_eta, nu_plus, xi_plus


def gmm_belief_moments(factor: GmmFactor, mu: GaussNat1):
    """Moments and log evidence of the belief ``b(t) = f(t) mu(t)``.

    The message is the natural-form kernel ``exp(-xi t^2/2 + nu t)``;
    ``log_evidence`` is the log of ``integral f(t) mu(t) dt`` under exactly
    that convention.  The integrability check runs before any moment is
    formed.

    Returns:
        Tuple ``(m_hat, tau_hat, log_evidence)``.

    Raises:
        NonIntegrableBelief: if any combined kernel precision is <= 0.
    """
    if factor.size == 1:
        # scalar fast path: single-kernel factors dominate the run time
        xi_plus = factor._precisions[0] + mu.xi
        if xi_plus <= 0.0:
            raise NonIntegrableBelief(
                f"message precision {mu.xi!r} does not exceed "
                f"-{factor.min_precision!r}; belief is not integrable"
            )
        nu_plus = factor._nat_means[0] + mu.nu
        m_hat = nu_plus / xi_plus
        tau_hat = 1.0 / xi_plus
        log_evidence = (
            factor._log_weights[0]
            - 0.5 * factor._nat_means[0] * factor.means[0]
            + 0.5 * nu_plus * m_hat
            + 0.5 * (_LOG_2PI - math.log(xi_plus))
        )
        return float(m_hat), float(tau_hat), float(log_evidence)

    log_eta, nu_plus, xi_plus = _log_kernel_masses(factor, mu)
    mx = log_eta.max()
    eta = np.exp(log_eta - mx)
    total = eta.sum()
    log_evidence = mx + math.log(total)
    rho = eta / total
    m_cond = nu_plus / xi_plus
    m_hat = float(rho @ m_cond)
    # centered form avoids cancellation in the spread term
    tau_hat = float(rho @ (1.0 / xi_plus) + rho @ (m_cond - m_hat) ** 2)
    return m_hat, tau_hat, float(log_evidence)


def gmm_responsibilities(factor: GmmFactor, mu: GaussNat1) -> np.ndarray:
    """Posterior kernel responsibilities of the belief (sums to one).

    Raises:
        NonIntegrableBelief: if the belief is not integrable.
    """
    log_eta, _, _ = _log_kernel_masses(factor, mu)
    mx = log_eta.max()
    eta = np.exp(log_eta - mx)
    return eta / eta.sum()
