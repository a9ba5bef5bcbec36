"""Moment matching against Gaussian-mixture factors.

A site belief is the product of a mixture factor and a Gaussian message.
The message may carry negative precision; the belief stays integrable as
long as the message precision exceeds minus the narrowest component's
precision.  This demo shows the matched moments, the per-component
responsibilities, and what happens at the integrability boundary.

Run:  python3 demos/mixture_beliefs.py
"""

from glmep.errors import NonIntegrableBelief
from glmep.gaussian import GaussNat1
from glmep.gmm import GmmFactor, gmm_belief_moments, gmm_responsibilities


def main():
    prior = GmmFactor.from_mixture(
        weights=[0.5, 0.5], means=[1.0, -1.0], variances=[0.1, 0.1]
    )
    print("two-spike factor: components at +1 and -1, variance 0.1 each")
    m, v = prior.mixture_moments()
    print(f"factor moments alone: mean={m:+.4f} variance={v:.4f}")

    print()
    print("=== sharpening the belief with Gaussian messages ===")
    for nu, xi in ((0.0, 0.5), (2.0, 2.0), (-4.0, 4.0)):
        msg = GaussNat1(nu, xi)
        m_hat, tau_hat, log_ev = gmm_belief_moments(prior, msg)
        resp = gmm_responsibilities(prior, msg)
        print(f"message (nu={nu:+.1f}, xi={xi:.1f}) -> "
              f"m_hat={m_hat:+.5f} tau_hat={tau_hat:.5f} "
              f"log_evidence={log_ev:+.4f} responsibilities={resp.round(4)}")

    print()
    print("=== negative-precision messages ===")
    lo = -prior.min_precision
    print(f"integrable while xi > {lo:.1f} (minus the narrowest precision)")
    for xi in (0.8 * lo, 0.99 * lo):
        msg = GaussNat1(0.3, xi)
        m_hat, tau_hat, _ = gmm_belief_moments(prior, msg)
        print(f"  xi={xi:+.3f}: m_hat={m_hat:+.5f} tau_hat={tau_hat:.5f} "
              "(wider than the factor itself)")
    try:
        gmm_belief_moments(prior, GaussNat1(0.3, 1.001 * lo))
    except NonIntegrableBelief as exc:
        print(f"  xi={1.001 * lo:+.3f}: rejected ({exc})")


if __name__ == "__main__":
    main()
