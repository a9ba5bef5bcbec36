"""Unnormalized Gaussian forms and the linear algebra behind message passing.

Conventions
-----------
All Gaussian kernels in this package carry no normalization constant and use
the standard 1/2 exponent factor:

* scalar moment form     ``Nbar(t | m, tau)  = exp(-(t - m)^2 / (2 tau))``
* scalar natural form    ``Mbar(t | nu, xi)  = exp(-xi t^2 / 2 + nu t)``
* vector moment form     ``Nbar(x | m, C)    = exp(-(x - m)^T C^{-1} (x - m) / 2)``

Under this convention precision is exactly the reciprocal variance
(``xi = 1/tau``, ``nu = m/tau``) and products of kernels add natural
parameters.  Natural-form parameters may be non-integrable (``xi <= 0``);
moment-form pairs with ``tau < 0`` are legal as formal quotients.  Conversion
to moments is only defined for integrable forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .errors import (
    DegenerateVariance,
    NonIntegrable,
    NotPD,
    SingularMatrix,
    ThresholdViolation,
)

__all__ = [
    "GaussNat1",
    "GaussMoment1",
    "GaussNatVec",
    "GaussMomentVec",
    "nat_to_moment",
    "moment_to_nat",
    "gaussian_reproduction",
    "marginalize_linear_delta",
    "rank_one_pd_threshold",
    "rank_one_precision_update",
    "pd_tolerance",
    "min_eigenvalue",
    "require_spd",
]


def _require_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class GaussNat1:
    """Scalar natural-parameter pair (nu, xi) for ``exp(-xi t^2/2 + nu t)``."""

    nu: float
    xi: float

    def __post_init__(self):
        _require_finite("GaussNat1 parameters", self.nu, self.xi)

    @property
    def integrable(self) -> bool:
        return self.xi > 0.0


@dataclass(frozen=True)
class GaussMoment1:
    """Scalar moment pair (m, tau) for ``exp(-(t - m)^2 / (2 tau))``.

    ``tau`` must be positive when the pair represents belief moments; negative
    ``tau`` is allowed as the formal moment form of a non-integrable message.
    """

    m: float
    tau: float

    def __post_init__(self):
        _require_finite("GaussMoment1 parameters", self.m, self.tau)


def _sanitize_matrix(M, name):
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} must be finite")
    M = 0.5 * (M + M.T)
    M.flags.writeable = False
    return M


def _sanitize_vector(v, dim, name):
    v = np.array(v, dtype=float).reshape(-1)
    if v.size != dim:
        raise ValueError(f"{name} must have length {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite")
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class GaussNatVec:
    """Vector natural parameters (nu, Xi) for ``exp(-x^T Xi x / 2 + nu^T x)``.

    ``Xi`` is symmetrized on construction and both fields are frozen.
    """

    nu: np.ndarray
    Xi: np.ndarray

    def __post_init__(self):
        Xi = _sanitize_matrix(self.Xi, "Xi")
        nu = _sanitize_vector(self.nu, Xi.shape[0], "nu")
        object.__setattr__(self, "Xi", Xi)
        object.__setattr__(self, "nu", nu)

    @property
    def dim(self) -> int:
        return self.nu.size


@dataclass(frozen=True)
class GaussMomentVec:
    """Vector moment parameters (m, C) for ``exp(-(x-m)^T C^{-1} (x-m)/2)``."""

    m: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        C = _sanitize_matrix(self.C, "C")
        m = _sanitize_vector(self.m, C.shape[0], "m")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "m", m)

    @property
    def dim(self) -> int:
        return self.m.size


def pd_tolerance(C) -> float:
    """Scale-relative eigenvalue floor used by positive-definiteness checks."""
    C = np.asarray(C, dtype=float)
    k = C.shape[0]
    return 1e-10 * float(np.trace(C)) / k


def min_eigenvalue(C) -> float:
    return float(np.linalg.eigvalsh(0.5 * (C + np.asarray(C).T))[0])


def require_spd(C, name="matrix"):
    """Raise :class:`NotPD` unless all eigenvalues of ``C`` exceed the floor."""
    lo = min_eigenvalue(C)
    if not lo > pd_tolerance(C):
        raise NotPD(f"{name} is not positive definite (min eigenvalue {lo:.3e})")


def nat_to_moment(g: GaussNat1) -> GaussMoment1:
    """Convert natural parameters to moments; requires an integrable form."""
    if g.xi <= 0.0:
        raise NonIntegrable(f"xi must be positive to form moments, got {g.xi!r}")
    tau = 1.0 / g.xi
    return GaussMoment1(g.nu * tau, tau)


def moment_to_nat(g: GaussMoment1) -> GaussNat1:
    """Convert moments to natural parameters; ``tau`` may be negative."""
    if g.tau == 0.0:
        raise DegenerateVariance("tau = 0 has no natural-parameter form")
    xi = 1.0 / g.tau
    return GaussNat1(g.m * xi, xi)


def gaussian_reproduction(H, a_gauss: GaussMomentVec, b_gauss: GaussMomentVec):
    """Combine ``Nbar(Hx | a, A) Nbar(x | b, B)`` into posterior and evidence.

    Returns ``(c_gauss, scale_gauss)`` with

        ``Nbar(Hx|a,A) Nbar(x|b,B) = Nbar(x|c,C) Nbar(a|Hb, HBH^T + A)``

    where ``C = (H^T A^{-1} H + B^{-1})^{-1}`` and
    ``c = C (H^T A^{-1} a + B^{-1} b)``.

    Args:
        H: real matrix of shape (P, K).
        a_gauss: moment-form Gaussian over ``Hx`` (dimension P).
        b_gauss: moment-form Gaussian over ``x`` (dimension K).

    Raises:
        SingularMatrix: if A, B, or the combined precision cannot be solved.
    """
    H = np.asarray(H, dtype=float)
    if H.ndim != 2:
        raise ValueError(f"H must be a matrix, got shape {H.shape}")
    p, k = H.shape
    if a_gauss.dim != p or b_gauss.dim != k:
        raise ValueError("dimension mismatch between H and the Gaussian inputs")
    A, a = a_gauss.C, a_gauss.m
    B, b = b_gauss.C, b_gauss.m
    try:
        AinvH = np.linalg.solve(A, H)
        Ainva = np.linalg.solve(A, a)
        Binv = np.linalg.inv(B)
        prec = H.T @ AinvH + Binv
        C = np.linalg.inv(prec)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"gaussian_reproduction solve failed: {exc}") from exc
    C = 0.5 * (C + C.T)
    c = C @ (H.T @ Ainva + Binv @ b)
    scale = GaussMomentVec(H @ b, H @ B @ H.T + A)
    return GaussMomentVec(c, C), scale


def marginalize_linear_delta(a, x_gauss: GaussMomentVec, z_gauss: GaussMoment1):
    """Integrate ``Nbar(x|m_x,C_x) Nbar(z|m_z,tau_z) delta(z - a^T x)`` over x.

    The result is ``exp(log_scale) * Nbar(z | m, tau)`` with

        ``tau = [(a^T C_x a)^{-1} + tau_z^{-1}]^{-1}``
        ``m   = tau [(a^T C_x a)^{-1} a^T m_x + tau_z^{-1} m_z]``

    and ``log_scale`` collecting the square-root prefactor together with the
    evidence kernel ``Nbar(0 | m_z - a^T m_x, a^T C_x a + tau_z)``.  The
    prefactor is evaluated through the reduced-form determinant, which stays
    real whenever the quadratic form restricted to the hyperplane ``a^T x = z``
    is positive definite.

    Args:
        a: combination vector of length K (nonzero).
        x_gauss: moment-form Gaussian over x.
        z_gauss: moment-form Gaussian over z; ``tau_z`` may be negative as
            long as the combined form stays integrable.

    Returns:
        Tuple ``(GaussMoment1(m, tau), log_scale)``.

    Raises:
        NonIntegrable: if the combined form has no finite integral or the
            reduced quadratic form is not positive definite.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    k = a.size
    if x_gauss.dim != k:
        raise ValueError("a and x_gauss dimensions do not match")
    if not np.any(a):
        raise ValueError("a must be nonzero")
    C_x, m_x = x_gauss.C, x_gauss.m
    m_z, tau_z = z_gauss.m, z_gauss.tau
    if tau_z == 0.0:
        raise DegenerateVariance("tau_z = 0 is not supported")

    if k > 1:
        try:
            Cx_inv = np.linalg.inv(C_x)
        except np.linalg.LinAlgError as exc:
            raise NonIntegrable(f"C_x is singular: {exc}") from exc
        U = null_space(a[None, :])  # K x (K-1), orthonormal basis of a-perp
        M = U.T @ Cx_inv @ U
        M = 0.5 * (M + M.T)
        eigs = np.linalg.eigvalsh(M)
        if not eigs[0] > pd_tolerance(M):
            raise NonIntegrable(
                "quadratic form restricted to the hyperplane is not PD"
            )
        # det of reduced covariance: det(C_x) (a^T C_x a)^{-1} |a|^2 = 1/det(M)
        logdet_reduced_cov = -float(np.linalg.slogdet(M)[1])
    else:
        logdet_reduced_cov = 0.0

    s = float(a @ C_x @ a)
    if s == 0.0:
        raise NonIntegrable("a^T C_x a = 0: projected form is degenerate")
    inv_tau = 1.0 / s + 1.0 / tau_z
    if not inv_tau > 0.0:
        raise NonIntegrable(
            f"combined precision {inv_tau:.3e} is not positive; no finite integral"
        )
    tau = 1.0 / inv_tau
    m = tau * ((a @ m_x) / s + m_z / tau_z)
    resid = m_z - float(a @ m_x)
    log_scale = 0.5 * (
        (k - 1) * math.log(2.0 * math.pi)
        + logdet_reduced_cov
        - math.log(float(a @ a))
    ) - resid * resid / (2.0 * (s + tau_z))
    return GaussMoment1(float(m), tau), float(log_scale)


def rank_one_pd_threshold(C, a) -> float:
    """Largest infeasible precision perturbation along ``a``.

    ``(C^{-1} + delta a a^T)^{-1}`` stays positive definite exactly when
    ``delta > -1/(a^T C a)``; this function returns that bound.

    Raises:
        NotPD: if ``C`` fails the positive-definiteness check.
    """
    C = np.asarray(C, dtype=float)
    a = np.asarray(a, dtype=float).reshape(-1)
    require_spd(C, "C")
    return -1.0 / float(a @ C @ a)


def rank_one_precision_update(C, a, delta_xi: float):
    """Sherman-Morrison update of a covariance after a precision perturbation.

    Computes ``(C^{-1} + delta_xi a a^T)^{-1}`` as
    ``C - (C a)(C a)^T delta_xi / (1 + delta_xi a^T C a)``.  ``C`` is assumed
    symmetric positive definite (not re-verified here; the message-passing
    loop maintains it by induction and :func:`rank_one_pd_threshold` is the
    checking variant).

    Raises:
        ThresholdViolation: if ``delta_xi`` does not exceed the PD threshold.
    """
    C = np.asarray(C, dtype=float)
    a = np.asarray(a, dtype=float).reshape(-1)
    Ca = C @ a
    s = float(a @ Ca)
    denom = 1.0 + delta_xi * s
    if not denom > 0.0:
        raise ThresholdViolation(
            f"delta_xi = {delta_xi!r} is at or below the PD threshold {-1.0 / s!r}"
        )
    out = C - np.outer(Ca, Ca) * (delta_xi / denom)
    return 0.5 * (out + out.T)
