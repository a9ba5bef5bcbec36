"""Precision-constrained moment matching for a single outgoing message.

Given target belief moments ``(m_hat, tau_hat)`` and the fixed remainder
message ``(nu_r, xi_r)`` at the same edge, the projected message minimizes
the Kullback-Leibler divergence from the belief to the normalized product
``mu_r(t) mu_p(t)`` subject to ``xi_p >= gamma``.  The objective

    ``D(xi_p) = -log(xi_p + xi_r) + log(2 pi) + (xi_p + xi_r) tau_hat``

is strictly convex on ``xi_p + xi_r > 0`` with unconstrained minimizer
``1/tau_hat - xi_r``, so the constrained solution is the clipped value

    ``xi_p = max(1/tau_hat - xi_r, gamma)``

and the mean is matched exactly through ``nu_p = (xi_p + xi_r) m_hat - nu_r``.
``gamma = -inf`` requests the unconstrained projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleThreshold, NonIntegrable

__all__ = ["ProjectionInput", "ProjectionOutput", "constrained_project", "kld_objective"]


@dataclass(frozen=True)
class ProjectionInput:
    """Belief moments, remainder message, and the precision lower bound."""

    m_hat: float
    tau_hat: float
    nu_r: float
    xi_r: float
    gamma: float = -math.inf


@dataclass(frozen=True)
class ProjectionOutput:
    nu_p: float
    xi_p: float
    threshold_active: bool


def constrained_project(inp: ProjectionInput) -> ProjectionOutput:
    """Solve the thresholded moment-matching problem.

    Ties (unconstrained minimizer exactly at ``gamma``) report
    ``threshold_active = False``.

    Raises:
        InfeasibleThreshold: if ``gamma`` is finite and ``gamma + xi_r <= 0``,
            i.e. the bound cannot yield an integrable product.
        ValueError: if ``tau_hat`` is not a positive finite variance.
    """
    if not (math.isfinite(inp.tau_hat) and inp.tau_hat > 0.0):
        raise ValueError(f"tau_hat must be positive and finite, got {inp.tau_hat!r}")
    if math.isfinite(inp.gamma) and inp.gamma + inp.xi_r <= 0.0:
        raise InfeasibleThreshold(
            f"gamma + xi_r = {inp.gamma + inp.xi_r!r} is not positive"
        )
    unconstrained = 1.0 / inp.tau_hat - inp.xi_r
    if unconstrained < inp.gamma:
        xi_p = inp.gamma
        active = True
    else:
        xi_p = unconstrained
        active = False
    nu_p = (xi_p + inp.xi_r) * inp.m_hat - inp.nu_r
    return ProjectionOutput(nu_p, xi_p, active)


def kld_objective(xi_p: float, tau_hat: float, xi_r: float) -> float:
    """Precision part of the divergence minimized by :func:`constrained_project`.

    Raises:
        NonIntegrable: if ``xi_p + xi_r <= 0`` (the divergence is undefined).
    """
    s = xi_p + xi_r
    if s <= 0.0:
        raise NonIntegrable(f"xi_p + xi_r = {s!r} is not positive")
    return -math.log(s) + math.log(2.0 * math.pi) + s * tau_hat
