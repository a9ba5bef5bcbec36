"""Independent reference computations for the test suite.

Everything here is deliberately slow and simple: tensor-product
quadrature, dense grid searches, and textbook closed forms.  None of it
shares code with the package under test, so agreement between the two
is meaningful.

Conventions match the package: unnormalized Gaussian kernels
``exp(-(t - m)^2 / (2 tau))``, messages ``exp(-xi t^2 / 2 + nu t)``,
and ``precision = 1 / variance``.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.linalg import null_space
from scipy.special import logsumexp


def random_spd(rng, k, eig_lo=0.2, eig_hi=3.0):
    """Random symmetric positive definite matrix with bounded spectrum."""
    q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    eigs = rng.uniform(eig_lo, eig_hi, size=k)
    c = (q * eigs) @ q.T
    return 0.5 * (c + c.T)


def box_quadrature(f, lo, hi, start_nodes=24, rtol=1e-11, max_doublings=5):
    """Integrate ``f`` over the box ``[lo, hi]`` by tensor Gauss-Legendre.

    The node count per axis doubles until two successive estimates agree
    to ``rtol``.  ``f`` must accept an ``(npoints, d)`` array and return
    one value per row.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    d = lo.size
    nodes = start_nodes
    prev = None
    for _ in range(max_doublings + 1):
        axes, weights = [], []
        for i in range(d):
            x, w = np.polynomial.legendre.leggauss(nodes)
            axes.append(0.5 * (hi[i] - lo[i]) * x + 0.5 * (hi[i] + lo[i]))
            weights.append(0.5 * (hi[i] - lo[i]) * w)
        grids = np.meshgrid(*axes, indexing="ij")
        points = np.stack([g.ravel() for g in grids], axis=-1)
        wgrid = weights[0]
        for w in weights[1:]:
            wgrid = np.multiply.outer(wgrid, w)
        value = float(np.sum(f(points) * wgrid.ravel()))
        if prev is not None and abs(value - prev) <= rtol * max(1.0, abs(value)):
            return value
        prev = value
        nodes *= 2
    return value


def product_gaussian_x(a, m_x, cov_x, m_z, tau_z):
    """Moments of ``exp(-(x-m_x)' C^-1 (x-m_x)/2) * exp(-(a'x-m_z)^2/(2 tau_z))``.

    Returns ``(mean, cov, log_mass)`` of the (possibly improper-looking)
    product density over x, computed by direct dense algebra.  ``tau_z``
    may be negative as long as the combined precision stays positive
    definite.
    """
    a = np.asarray(a, dtype=float)
    m_x = np.asarray(m_x, dtype=float)
    cov_x = np.asarray(cov_x, dtype=float)
    k = a.size
    prec = np.linalg.inv(cov_x) + np.outer(a, a) / tau_z
    eigs = np.linalg.eigvalsh(0.5 * (prec + prec.T))
    if eigs.min() <= 0.0:
        raise ValueError("product density is not normalizable")
    cov = np.linalg.inv(prec)
    cov = 0.5 * (cov + cov.T)
    h = np.linalg.solve(cov_x, m_x) + a * (m_z / tau_z)
    mean = cov @ h
    # mass of exp(-q(x)/2) with q(x) = (x-mean)' prec (x-mean) + r
    r = m_x @ np.linalg.solve(cov_x, m_x) + m_z**2 / tau_z - mean @ prec @ mean
    sign, logdet = np.linalg.slogdet(prec)
    log_mass = -0.5 * r + 0.5 * (k * np.log(2.0 * np.pi) - logdet)
    return mean, cov, log_mass


def delta_marginal_oracle(a, m_x, cov_x, m_z, tau_z):
    """Quadrature reference for marginalizing z = a'x against a z-message.

    Computes mean, variance and total mass of a'x under the product
    density from :func:`product_gaussian_x`, entirely by tensor
    quadrature (no matrix identities).  Returns ``(m, tau, log_mass)``.
    Intended for small dimensions (K <= 3).
    """
    a = np.asarray(a, dtype=float)
    m_x = np.asarray(m_x, dtype=float)
    cov_x = np.asarray(cov_x, dtype=float)
    mean, cov, _ = product_gaussian_x(a, m_x, cov_x, m_z, tau_z)
    half = 10.0 * np.sqrt(np.diag(cov))
    lo, hi = mean - half, mean + half

    def kernel(points):
        dx = points - m_x
        qx = np.einsum("ij,jk,ik->i", dx, np.linalg.inv(cov_x), dx)
        dz = points @ a - m_z
        return np.exp(-0.5 * qx - dz**2 / (2.0 * tau_z))

    mass = box_quadrature(kernel, lo, hi)
    m1 = box_quadrature(lambda p: kernel(p) * (p @ a), lo, hi) / mass
    m2 = box_quadrature(lambda p: kernel(p) * (p @ a) ** 2, lo, hi) / mass
    return m1, m2 - m1**2, float(np.log(mass))


def delta_marginal_pointwise(a, m_x, cov_x, m_z, tau_z, z_values):
    """Evaluate the z-marginal b(z) = N(z) * int delta(z - a'x) N(x) dx.

    Uses the hyperplane parameterization x = a z / (a'a) + U u with U an
    orthonormal null-space basis, so the delta integral becomes a
    (K-1)-dimensional box quadrature scaled by 1/||a||.  Returns b at the
    requested z values.
    """
    a = np.asarray(a, dtype=float)
    m_x = np.asarray(m_x, dtype=float)
    cov_x = np.asarray(cov_x, dtype=float)
    u_basis = null_space(a[None, :])
    prec_x = np.linalg.inv(cov_x)
    norm_a = np.linalg.norm(a)
    # box for the in-plane coordinates, from the conditional covariance
    cov_u = np.linalg.inv(u_basis.T @ prec_x @ u_basis)
    half = 10.0 * np.sqrt(np.diag(cov_u))
    out = []
    for z in np.atleast_1d(z_values):
        x0 = a * (z / (a @ a))
        center = cov_u @ (u_basis.T @ prec_x @ (m_x - x0))

        def plane_kernel(upoints, x0=x0):
            x = x0[None, :] + upoints @ u_basis.T
            dx = x - m_x
            qx = np.einsum("ij,jk,ik->i", dx, prec_x, dx)
            return np.exp(-0.5 * qx)

        plane = box_quadrature(plane_kernel, center - half, center + half)
        out.append(np.exp(-((z - m_z) ** 2) / (2.0 * tau_z)) * plane / norm_a)
    return np.array(out)


def gmm_belief_oracle(weights, means, variances, nu, xi):
    """Reference moments of ``sum_s w_s N-kernel(t; m_s, tau_s) * exp(-xi t^2/2 + nu t)``.

    Returns ``(m_hat, tau_hat, log_mass)`` by 1-d adaptive quadrature in
    a shifted log domain.  Requires ``xi + min_s(1/tau_s) > 0``.
    """
    weights = np.asarray(weights, dtype=float)
    means = np.asarray(means, dtype=float)
    variances = np.asarray(variances, dtype=float)
    if xi + (1.0 / variances).min() <= 0.0:
        raise ValueError("belief is not integrable")

    def log_f(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        comp = np.log(weights)[:, None] - (t[None, :] - means[:, None]) ** 2 / (
            2.0 * variances[:, None]
        )
        return logsumexp(comp, axis=0) - 0.5 * xi * t**2 + nu * t

    # effective per-component peaks bound the support
    eff_prec = 1.0 / variances + xi
    eff_mean = (means / variances + nu) / eff_prec
    eff_sd = 1.0 / np.sqrt(eff_prec)
    lo = float((eff_mean - 14.0 * eff_sd).min())
    hi = float((eff_mean + 14.0 * eff_sd).max())
    grid = np.linspace(lo, hi, 4001)
    shift = float(log_f(grid).max())
    breakpoints = sorted(set(np.clip(eff_mean, lo, hi)))

    def moment(power):
        val, _ = quad(
            lambda t: t**power * np.exp(log_f(t)[0] - shift),
            lo,
            hi,
            points=breakpoints,
            limit=300,
        )
        return val

    mass = moment(0)
    m1 = moment(1) / mass
    m2 = moment(2) / mass
    return m1, m2 - m1**2, shift + float(np.log(mass))


def projection_objective(s, tau_hat):
    """KL(N(m, tau_hat) || N(m, 1/s)) up to constants, for matched means."""
    return -0.5 * np.log(s * tau_hat) + 0.5 * s * tau_hat - 0.5


def projection_grid_argmin(tau_hat, xi_r, gamma=-np.inf, num=400001):
    """Grid-search reference for the thresholded precision projection.

    Minimizes the matched-mean KL objective over the combined precision
    ``s = xi_p + xi_r`` subject to ``xi_p >= gamma``, and returns the
    winning ``xi_p``.  The grid spans six decades around the
    unconstrained optimum ``s = 1/tau_hat``.
    """
    s_opt = 1.0 / tau_hat
    s_grid = np.geomspace(s_opt * 1e-3, s_opt * 1e3, num)
    if np.isfinite(gamma):
        s_min = gamma + xi_r
        if s_min <= 0.0:
            raise ValueError("infeasible threshold")
        s_grid = np.concatenate(([s_min], s_grid[s_grid >= s_min]))
    vals = projection_objective(s_grid, tau_hat)
    return float(s_grid[np.argmin(vals)] - xi_r)


def gaussian_glm_posterior(A, prior_means, prior_vars, y, noise_var):
    """Exact posterior for the all-Gaussian model y = A x + w.

    Returns ``(x_mean, x_cov)`` from the normal equations.
    """
    A = np.asarray(A, dtype=float)
    prior_means = np.asarray(prior_means, dtype=float)
    prior_vars = np.asarray(prior_vars, dtype=float)
    y = np.asarray(y, dtype=float)
    d_inv = np.diag(1.0 / prior_vars)
    prec = d_inv + A.T @ A / noise_var
    cov = np.linalg.inv(prec)
    cov = 0.5 * (cov + cov.T)
    mean = cov @ (d_inv @ prior_means + A.T @ y / noise_var)
    return mean, cov
