"""Message passing on the linear-mixing factor graph with integrability control.

Three variants share one schedule and differ only in how outgoing message
precisions are bounded:

* ``acep`` - every projection is clipped at the exact bound that keeps the
  receiving belief integrable (plus ``epsilon``); non-integrable *messages*
  are allowed and no update is ever skipped.
* ``epc``  - projections are unconstrained; an update whose source belief is
  non-integrable is skipped and counted.
* ``clip`` - every projected precision is floored at ``+epsilon``, so all
  messages stay proper Gaussians.

One sweep visits observation chains ``n = 0..N-1`` and then signal chains
``k = 0..K-1``.  Each observation chain runs

    ``f_z -> z_n``, ``z_n -> f_y``, ``f_y -> z_n``, ``z_n -> f_z``

and each signal chain runs

    ``f_z -> x_k``, ``x_k -> f_x``, ``f_x -> x_k``, ``x_k -> f_z``.

Under this ordering the two closing updates are literal copies of the
preceding factor message, and the cached belief covariance at the mixing
factor is maintained with rank-one updates, then rebuilt from scratch at the
end of every sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonIntegrableBelief, SingularMatrix, ValidationError
from .gaussian import (
    GaussMoment1,
    GaussNat1,
    min_eigenvalue,
    pd_tolerance,
    rank_one_precision_update,
)
from .gmm import gmm_belief_moments, gmm_min_precision
from .model import GlmModel
from .projection import ProjectionInput, constrained_project

__all__ = [
    "Mode",
    "Counters",
    "GlmState",
    "Posterior",
    "SweepReport",
    "init_state",
    "belief_fz_x_marginal",
    "belief_fz_z_marginal",
    "update_fz_to_z",
    "update_z_to_fy",
    "update_fy_to_z",
    "update_z_to_fz",
    "update_fz_to_x",
    "update_x_to_fx",
    "update_fx_to_x",
    "update_x_to_fz",
    "sweep",
    "run",
    "MESSAGE_FAMILIES",
    "SKIPPABLE_FAMILIES",
]

MODE_KINDS = ("acep", "epc", "clip")

MESSAGE_FAMILIES = (
    "fy_to_z",
    "z_to_fy",
    "fz_to_z",
    "z_to_fz",
    "fx_to_x",
    "x_to_fx",
    "fz_to_x",
    "x_to_fz",
)

# families whose source belief sits at a mixture factor; only these can be
# skipped by EPC
SKIPPABLE_FAMILIES = ("fy_to_z", "fx_to_x")


@dataclass(frozen=True)
class Mode:
    """Algorithm variant plus the slack added to every active bound."""

    kind: str
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.kind not in MODE_KINDS:
            raise ValueError(f"kind must be one of {MODE_KINDS}, got {self.kind!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")


@dataclass
class Counters:
    """Per-family diagnostic counters for one run."""

    threshold_hits: dict = field(
        default_factory=lambda: {f: 0 for f in MESSAGE_FAMILIES}
    )
    skipped_updates: dict = field(
        default_factory=lambda: {f: 0 for f in SKIPPABLE_FAMILIES}
    )

    @property
    def total_threshold_hits(self) -> int:
        return sum(self.threshold_hits.values())

    @property
    def total_skipped(self) -> int:
        return sum(self.skipped_updates.values())


class GlmState:
    """All messages plus the cached mixing-factor belief.

    Messages are stored as natural-parameter arrays (``nu``, ``xi``), one
    entry per edge: four observation-side families of length N and four
    signal-side families of length K.  ``cov_fz``/``mean_fz`` cache the
    moments of the belief at the mixing factor; ``nat_fz`` is the matching
    aggregated linear term.
    """

    def __init__(self, model: GlmModel, init_xi: float = 1.0):
        if not (math.isfinite(init_xi) and init_xi > 0.0):
            raise ValueError(f"init_xi must be positive, got {init_xi!r}")
        n, k = model.shape
        self.nu_fy_z = np.zeros(n)
        self.xi_fy_z = np.full(n, init_xi)
        self.nu_z_fy = np.zeros(n)
        self.xi_z_fy = np.full(n, init_xi)
        self.nu_fz_z = np.zeros(n)
        self.xi_fz_z = np.full(n, init_xi)
        self.nu_z_fz = np.zeros(n)
        self.xi_z_fz = np.full(n, init_xi)
        self.nu_fx_x = np.zeros(k)
        self.xi_fx_x = np.full(k, init_xi)
        self.nu_x_fx = np.zeros(k)
        self.xi_x_fx = np.full(k, init_xi)
        self.nu_fz_x = np.zeros(k)
        self.xi_fz_x = np.full(k, init_xi)
        self.nu_x_fz = np.zeros(k)
        self.xi_x_fz = np.full(k, init_xi)
        self.cov_fz = None
        self.nat_fz = None
        self.mean_fz = None
        self.counters = Counters()
        self.validate = False


def refresh_cache(state: GlmState, model: GlmModel):
    """Rebuild the cached mixing-factor belief from scratch.

    Solves ``C = [A^T diag(xi_z) A + diag(xi_x)]^{-1}`` and refreshes the
    aggregated linear term and mean.

    Raises:
        SingularMatrix: if the combined precision cannot be inverted.
    """
    A = model.A
    prec = A.T @ (A * state.xi_z_fz[:, None])
    prec[np.diag_indices_from(prec)] += state.xi_x_fz
    try:
        cov = np.linalg.inv(prec)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"mixing-factor precision is singular: {exc}") from exc
    state.cov_fz = 0.5 * (cov + cov.T)
    state.nat_fz = A.T @ state.nu_z_fz + state.nu_x_fz
    state.mean_fz = state.cov_fz @ state.nat_fz


def init_state(model: GlmModel, init_xi: float = 1.0) -> GlmState:
    """Fresh state: all precisions ``init_xi``, all linear terms zero."""
    state = GlmState(model, init_xi)
    refresh_cache(state, model)
    return state


def belief_fz_x_marginal(state: GlmState, k: int) -> GaussMoment1:
    """k-th diagonal marginal of the cached mixing-factor belief."""
    return GaussMoment1(float(state.mean_fz[k]), float(state.cov_fz[k, k]))


def belief_fz_z_marginal(state: GlmState, model: GlmModel, n: int) -> GaussMoment1:
    """Marginal of ``z_n = a_n^T x`` under the cached mixing-factor belief."""
    a = model.A[n]
    return GaussMoment1(float(a @ state.mean_fz), float(a @ state.cov_fz @ a))


# ---------------------------------------------------------------------------
# shared update machinery


def _project(state, mode, family, m_hat, tau_hat, nu_r, xi_r, acep_bound,
             damping, old_nu, old_xi, pd_bound=None):
    """Mode-dispatched projection with counter bookkeeping and damping.

    ``acep_bound`` is the exact integrability bound (without slack) used by
    ACEP.  ``pd_bound`` is only passed on the general (non-copy) path of the
    mixing-side updates, where even CLIP has to respect positive
    definiteness of the cached covariance.
    """
    if mode.kind == "acep":
        gamma = acep_bound + mode.epsilon
    elif mode.kind == "clip":
        gamma = mode.epsilon
        if pd_bound is not None and pd_bound + mode.epsilon > gamma:
            gamma = pd_bound + mode.epsilon
    else:  # epc
        gamma = -math.inf
    if gamma + xi_r <= 0.0:
        # a bound this low can never bind: clipping requires the projected
        # product precision 1/tau_hat to drop below gamma + xi_r, and the
        # former is positive.  Treat it as unconstrained instead of tripping
        # the projection's infeasibility error.
        gamma = -math.inf
    out = constrained_project(ProjectionInput(m_hat, tau_hat, nu_r, xi_r, gamma))
    if out.threshold_active:
        state.counters.threshold_hits[family] += 1
    nu, xi = out.nu_p, out.xi_p
    if damping != 1.0:
        nu = damping * nu + (1.0 - damping) * old_nu
        xi = damping * xi + (1.0 - damping) * old_xi
        if math.isfinite(gamma) and xi < gamma:
            xi = gamma
    return nu, xi


def _check_invariants(state, cov_changed=False):
    """Validation-mode belief checks (positive sums, PD cache)."""
    zs = state.xi_fz_z + state.xi_fy_z
    if zs.min() <= 0.0:
        n = int(zs.argmin())
        raise ValidationError(
            f"belief at z_{n} has precision sum {zs[n]!r} <= 0"
        )
    xs = state.xi_fz_x + state.xi_fx_x
    if xs.min() <= 0.0:
        k = int(xs.argmin())
        raise ValidationError(
            f"belief at x_{k} has precision sum {xs[k]!r} <= 0"
        )
    if cov_changed:
        lo = min_eigenvalue(state.cov_fz)
        if not lo > pd_tolerance(state.cov_fz):
            raise ValidationError(
                f"cached mixing-factor covariance lost PD (min eig {lo:.3e})"
            )


def _variable_belief(nu_a, xi_a, nu_b, xi_b, where):
    """Moments of the two-message product at a variable node."""
    xi_sum = xi_a + xi_b
    if xi_sum <= 0.0:
        raise ValidationError(
            f"belief at {where} has precision sum {xi_sum!r} <= 0"
        )
    tau_hat = 1.0 / xi_sum
    return (nu_a + nu_b) * tau_hat, tau_hat


# ---------------------------------------------------------------------------
# observation-side updates


def update_fz_to_z(state, model, n, mode, damping=1.0):
    """Project the mixing-factor z-marginal onto the edge toward ``z_n``."""
    a = model.A[n]
    Ca = state.cov_fz @ a
    tau = float(a @ Ca)
    m = float(a @ state.mean_fz)
    old_nu = float(state.nu_fz_z[n])
    old_xi = float(state.xi_fz_z[n])
    xi_r = float(state.xi_z_fz[n])
    nu, xi = _project(
        state, mode, "fz_to_z", m, tau,
        float(state.nu_z_fz[n]), xi_r,
        acep_bound=-float(state.xi_fy_z[n]),
        damping=damping, old_nu=old_nu, old_xi=old_xi,
    )
    state.nu_fz_z[n] = nu
    state.xi_fz_z[n] = xi
    if state.validate:
        if mode.kind != "clip" and damping == 1.0:
            # after-update identity: new precision plus the stale return
            # message equals the marginal precision of the cached belief
            lhs = xi + xi_r
            rhs = 1.0 / tau
            if abs(lhs - rhs) > 1e-8 * max(1.0, abs(rhs)):
                raise ValidationError(
                    f"fz->z identity failed at n={n}: {lhs!r} vs {rhs!r}"
                )
        _check_invariants(state)


def update_z_to_fy(state, model, n, mode, damping=1.0):
    """Turn the belief at ``z_n`` around toward the likelihood factor."""
    m_hat, tau_hat = _variable_belief(
        float(state.nu_fz_z[n]), float(state.xi_fz_z[n]),
        float(state.nu_fy_z[n]), float(state.xi_fy_z[n]),
        where=f"z_{n}",
    )
    old_nu = float(state.nu_z_fy[n])
    old_xi = float(state.xi_z_fy[n])
    nu, xi = _project(
        state, mode, "z_to_fy", m_hat, tau_hat,
        float(state.nu_fy_z[n]), float(state.xi_fy_z[n]),
        acep_bound=-gmm_min_precision(model.likelihoods[n]),
        damping=damping, old_nu=old_nu, old_xi=old_xi,
    )
    state.nu_z_fy[n] = nu
    state.xi_z_fy[n] = xi
    if state.validate:
        _check_invariants(state)


def update_fy_to_z(state, model, n, mode, damping=1.0):
    """Moment-match the likelihood belief; EPC skips if it is improper."""
    mu_in = GaussNat1(float(state.nu_z_fy[n]), float(state.xi_z_fy[n]))
    try:
        m_hat, tau_hat, _ = gmm_belief_moments(model.likelihoods[n], mu_in)
    except NonIntegrableBelief:
        if mode.kind == "epc":
            state.counters.skipped_updates["fy_to_z"] += 1
            return
        raise
    old_nu = float(state.nu_fy_z[n])
    old_xi = float(state.xi_fy_z[n])
    nu, xi = _project(
        state, mode, "fy_to_z", m_hat, tau_hat,
        mu_in.nu, mu_in.xi,
        acep_bound=-float(state.xi_fz_z[n]),
        damping=damping, old_nu=old_nu, old_xi=old_xi,
    )
    state.nu_fy_z[n] = nu
    state.xi_fy_z[n] = xi
    if state.validate:
        _check_invariants(state)


def update_z_to_fz(state, model, n, mode, damping=1.0, ordered=True):
    """Close the observation chain and maintain the cached belief.

    With ``ordered=True`` (the sweep schedule) the outgoing message is a
    literal copy of the fresh likelihood message and no threshold is
    evaluated.  The general path projects the belief at ``z_n`` with the
    positive-definiteness bound instead.
    """
    a = model.A[n]
    old_nu = float(state.nu_z_fz[n])
    old_xi = float(state.xi_z_fz[n])
    if ordered:
        nu = float(state.nu_fy_z[n])
        xi = float(state.xi_fy_z[n])
        if damping != 1.0:
            nu = damping * nu + (1.0 - damping) * old_nu
            xi = damping * xi + (1.0 - damping) * old_xi
    else:
        m_hat, tau_hat = _variable_belief(
            float(state.nu_fz_z[n]), float(state.xi_fz_z[n]),
            float(state.nu_fy_z[n]), float(state.xi_fy_z[n]),
            where=f"z_{n}",
        )
        s = float(a @ state.cov_fz @ a)
        pd_bound = old_xi - 1.0 / s
        nu, xi = _project(
            state, mode, "z_to_fz", m_hat, tau_hat,
            float(state.nu_fz_z[n]), float(state.xi_fz_z[n]),
            acep_bound=pd_bound,
            damping=damping, old_nu=old_nu, old_xi=old_xi,
            pd_bound=pd_bound,
        )
    delta_xi = xi - old_xi
    delta_nu = nu - old_nu
    if delta_xi != 0.0:
        state.cov_fz = rank_one_precision_update(state.cov_fz, a, delta_xi)
    if delta_nu != 0.0:
        state.nat_fz = state.nat_fz + delta_nu * a
    state.mean_fz = state.cov_fz @ state.nat_fz
    state.nu_z_fz[n] = nu
    state.xi_z_fz[n] = xi
    if state.validate:
        _check_invariants(state, cov_changed=True)


# ---------------------------------------------------------------------------
# signal-side updates (mirror images of the observation side)


def update_fz_to_x(state, model, k, mode, damping=1.0):
    """Project the mixing-factor x_k-marginal onto the edge toward ``x_k``."""
    tau = float(state.cov_fz[k, k])
    m = float(state.mean_fz[k])
    old_nu = float(state.nu_fz_x[k])
    old_xi = float(state.xi_fz_x[k])
    nu, xi = _project(
        state, mode, "fz_to_x", m, tau,
        float(state.nu_x_fz[k]), float(state.xi_x_fz[k]),
        acep_bound=-float(state.xi_fx_x[k]),
        damping=damping, old_nu=old_nu, old_xi=old_xi,
    )
    state.nu_fz_x[k] = nu
    state.xi_fz_x[k] = xi
    if state.validate:
        _check_invariants(state)


def update_x_to_fx(state, model, k, mode, damping=1.0):
    """Turn the belief at ``x_k`` around toward the prior factor."""
    m_hat, tau_hat = _variable_belief(
        float(state.nu_fz_x[k]), float(state.xi_fz_x[k]),
        float(state.nu_fx_x[k]), float(state.xi_fx_x[k]),
        where=f"x_{k}",
    )
    old_nu = float(state.nu_x_fx[k])
    old_xi = float(state.xi_x_fx[k])
    nu, xi = _project(
        state, mode, "x_to_fx", m_hat, tau_hat,
        float(state.nu_fx_x[k]), float(state.xi_fx_x[k]),
        acep_bound=-gmm_min_precision(model.priors[k]),
        damping=damping, old_nu=old_nu, old_xi=old_xi,
    )
    state.nu_x_fx[k] = nu
    state.xi_x_fx[k] = xi
    if state.validate:
        _check_invariants(state)


def update_fx_to_x(state, model, k, mode, damping=1.0):
    """Moment-match the prior belief; EPC skips if it is improper."""
    mu_in = GaussNat1(float(state.nu_x_fx[k]), float(state.xi_x_fx[k]))
    try:
        m_hat, tau_hat, _ = gmm_belief_moments(model.priors[k], mu_in)
    except NonIntegrableBelief:
        if mode.kind == "epc":
            state.counters.skipped_updates["fx_to_x"] += 1
            return
        raise
    old_nu = float(state.nu_fx_x[k])
    old_xi = float(state.xi_fx_x[k])
    nu, xi = _project(
        state, mode, "fx_to_x", m_hat, tau_hat,
        mu_in.nu, mu_in.xi,
        acep_bound=-float(state.xi_fz_x[k]),
        damping=damping, old_nu=old_nu, old_xi=old_xi,
    )
    state.nu_fx_x[k] = nu
    state.xi_fx_x[k] = xi
    if state.validate:
        _check_invariants(state)


def update_x_to_fz(state, model, k, mode, damping=1.0, ordered=True):
    """Close the signal chain and maintain the cached belief.

    The rank-one covariance maintenance runs along the basis vector ``e_k``.
    """
    old_nu = float(state.nu_x_fz[k])
    old_xi = float(state.xi_x_fz[k])
    if ordered:
        nu = float(state.nu_fx_x[k])
        xi = float(state.xi_fx_x[k])
        if damping != 1.0:
            nu = damping * nu + (1.0 - damping) * old_nu
            xi = damping * xi + (1.0 - damping) * old_xi
    else:
        m_hat, tau_hat = _variable_belief(
            float(state.nu_fz_x[k]), float(state.xi_fz_x[k]),
            float(state.nu_fx_x[k]), float(state.xi_fx_x[k]),
            where=f"x_{k}",
        )
        pd_bound = old_xi - 1.0 / float(state.cov_fz[k, k])
        nu, xi = _project(
            state, mode, "x_to_fz", m_hat, tau_hat,
            float(state.nu_fz_x[k]), float(state.xi_fz_x[k]),
            acep_bound=pd_bound,
            damping=damping, old_nu=old_nu, old_xi=old_xi,
            pd_bound=pd_bound,
        )
    delta_xi = xi - old_xi
    delta_nu = nu - old_nu
    if delta_xi != 0.0:
        e_k = np.zeros(state.cov_fz.shape[0])
        e_k[k] = 1.0
        state.cov_fz = rank_one_precision_update(state.cov_fz, e_k, delta_xi)
    if delta_nu != 0.0:
        state.nat_fz = state.nat_fz.copy()
        state.nat_fz[k] += delta_nu
    state.mean_fz = state.cov_fz @ state.nat_fz
    state.nu_x_fz[k] = nu
    state.xi_x_fz[k] = xi
    if state.validate:
        _check_invariants(state, cov_changed=True)


# ---------------------------------------------------------------------------
# schedule


@dataclass
class SweepReport:
    max_mean_change: float
    threshold_hits: int
    skipped_updates: int


@dataclass
class Posterior:
    """Final variable beliefs plus run diagnostics."""

    x_mean: np.ndarray
    x_var: np.ndarray
    z_mean: np.ndarray
    z_var: np.ndarray
    sweeps: int
    converged: bool
    counters: Counters

    @property
    def threshold_hits(self) -> int:
        return self.counters.total_threshold_hits

    @property
    def skipped_updates(self) -> int:
        return self.counters.total_skipped


def _posterior_moments(state):
    xi_x = state.xi_fx_x + state.xi_fz_x
    xi_z = state.xi_fz_z + state.xi_fy_z
    if xi_x.min() <= 0.0 or xi_z.min() <= 0.0:
        raise ValidationError("a variable belief is non-integrable at readout")
    x_var = 1.0 / xi_x
    z_var = 1.0 / xi_z
    x_mean = (state.nu_fx_x + state.nu_fz_x) * x_var
    z_mean = (state.nu_fz_z + state.nu_fy_z) * z_var
    return x_mean, x_var, z_mean, z_var


def _check_cache_coherence(state, model):
    """Compare the incrementally maintained cache against a fresh solve."""
    A = model.A
    prec = A.T @ (A * state.xi_z_fz[:, None])
    prec[np.diag_indices_from(prec)] += state.xi_x_fz
    fresh_cov = np.linalg.inv(prec)
    fresh_nat = A.T @ state.nu_z_fz + state.nu_x_fz
    fresh_mean = fresh_cov @ fresh_nat
    cov_err = np.linalg.norm(state.cov_fz - fresh_cov) / np.linalg.norm(fresh_cov)
    mean_err = np.linalg.norm(state.mean_fz - fresh_mean) / max(
        1.0, np.linalg.norm(fresh_mean)
    )
    if cov_err > 1e-6 or mean_err > 1e-6:
        raise ValidationError(
            f"cached belief drifted from the full solve "
            f"(cov {cov_err:.3e}, mean {mean_err:.3e})"
        )


def sweep(state: GlmState, model: GlmModel, mode: Mode, damping=1.0) -> SweepReport:
    """One full pass: N observation chains, K signal chains, cache rebuild.

    Returns the maximum absolute change of the posterior means (over both
    ``x`` and ``z``) together with current counter totals.
    """
    x_before, _, z_before, _ = _posterior_moments(state)
    n_obs, n_sig = model.shape
    for n in range(n_obs):
        update_fz_to_z(state, model, n, mode, damping)
        update_z_to_fy(state, model, n, mode, damping)
        update_fy_to_z(state, model, n, mode, damping)
        update_z_to_fz(state, model, n, mode, damping)
    for k in range(n_sig):
        update_fz_to_x(state, model, k, mode, damping)
        update_x_to_fx(state, model, k, mode, damping)
        update_fx_to_x(state, model, k, mode, damping)
        update_x_to_fz(state, model, k, mode, damping)
    if state.validate:
        _check_cache_coherence(state, model)
    refresh_cache(state, model)
    x_after, _, z_after, _ = _posterior_moments(state)
    change = max(
        float(np.abs(x_after - x_before).max()),
        float(np.abs(z_after - z_before).max()),
    )
    return SweepReport(
        change,
        state.counters.total_threshold_hits,
        state.counters.total_skipped,
    )


def run(model: GlmModel, mode: Mode, max_sweeps: int = 50, tol: float = 1e-8,
        *, init_xi: float = 1.0, damping: float = 1.0,
        validate: bool = False) -> Posterior:
    """Run sweeps until the posterior means settle or the budget is spent.

    Args:
        model: problem instance.
        mode: algorithm variant and epsilon.
        max_sweeps: sweep budget; hitting it reports ``converged=False``.
        tol: convergence threshold on the max posterior-mean change.
        init_xi: initial precision of every message (positive).
        damping: optional message damping in (0, 1]; 1.0 disables it.
            Damped precisions are re-floored at the active bound, trading
            exact moment matching for extra stability.
        validate: enable per-update invariant checks (slower).

    Returns:
        :class:`Posterior` with variable means/variances and diagnostics.
    """
    if not (0.0 < damping <= 1.0):
        raise ValueError(f"damping must lie in (0, 1], got {damping!r}")
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be at least 1")
    state = init_state(model, init_xi)
    state.validate = validate
    converged = False
    sweeps = 0
    for _ in range(max_sweeps):
        report = sweep(state, model, mode, damping)
        sweeps += 1
        if report.max_mean_change < tol:
            converged = True
            break
    x_mean, x_var, z_mean, z_var = _posterior_moments(state)
    return Posterior(
        x_mean, x_var, z_mean, z_var, sweeps, converged, state.counters
    )
