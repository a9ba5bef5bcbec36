"""Walk through the Gaussian building blocks.

Shows how a multivariate Gaussian belief over ``x`` is collapsed onto the
scalar ``z = a'x`` against an (possibly non-integrable) incoming message,
and where the rank-one precision update loses positive definiteness.

Run:  python3 demos/delta_marginal_identities.py
"""

import numpy as np

from glmep.errors import ThresholdViolation
from glmep.gaussian import (
    GaussMoment1,
    GaussMomentVec,
    marginalize_linear_delta,
    rank_one_pd_threshold,
    rank_one_precision_update,
)


def main():
    rng = np.random.default_rng(7)

    print("=== collapsing a Gaussian onto z = a'x ===")
    C = np.array([[1.5, 0.4, -0.2], [0.4, 0.9, 0.1], [-0.2, 0.1, 1.2]])
    m = np.array([0.3, -0.6, 1.0])
    a = np.array([1.0, -2.0, 0.5])
    x_belief = GaussMomentVec(m, C)

    s = float(a @ C @ a)
    print(f"direction a = {a},  a'Ca = {s:.4f},  a'm = {float(a @ m):.4f}")

    # A proper incoming message first.
    z_msg = GaussMoment1(m=0.2, tau=0.8)
    marg, log_scale = marginalize_linear_delta(a, x_belief, z_msg)
    print(f"proper message  (m={z_msg.m}, tau={z_msg.tau}):")
    print(f"  -> marginal m={marg.m:+.6f}  tau={marg.tau:.6f}  log_scale={log_scale:+.4f}")

    # Messages may carry negative precision: the product stays integrable
    # as long as the combined precision 1/(a'Ca) + 1/tau is positive.
    z_anti = GaussMoment1(m=0.2, tau=-3.0 * s)
    marg, log_scale = marginalize_linear_delta(a, x_belief, z_anti)
    print(f"anti-Gaussian message (tau={z_anti.tau:.4f} < 0):")
    print(f"  -> marginal m={marg.m:+.6f}  tau={marg.tau:.6f}  log_scale={log_scale:+.4f}")
    print(f"  widened past the prior slice: tau={marg.tau:.4f} > a'Ca={s:.4f}")

    print()
    print("=== rank-one precision update and its PD threshold ===")
    a2 = rng.standard_normal(3)
    a2 /= np.linalg.norm(a2)
    threshold = rank_one_pd_threshold(C, a2)
    print(f"threshold for C^-1 + delta a a': delta > {threshold:.6f}")
    for rel in (0.5, 0.999, 1.001):
        delta = threshold * rel
        try:
            updated = rank_one_precision_update(C, a2, delta)
            lo = np.linalg.eigvalsh(updated).min()
            print(f"  delta = {delta:+.6f} ({rel:5.3f} of threshold): "
                  f"ok, min eig of updated C = {lo:.3e}")
        except ThresholdViolation as exc:
            print(f"  delta = {delta:+.6f} ({rel:5.3f} of threshold): rejected ({exc})")


if __name__ == "__main__":
    main()
