"""The scalar constrained moment-matching projection.

Given matched belief moments (m_hat, tau_hat), a stale return message
(nu_r, xi_r), and a precision floor gamma, the projection picks the
outgoing natural parameters.  When the unconstrained answer
1/tau_hat - xi_r respects the floor it is used as-is (moment matching);
otherwise the precision is pinned at gamma and only the mean is matched.

Run:  python3 demos/constrained_projection.py
"""

import numpy as np

from glmep.errors import InfeasibleThreshold
from glmep.projection import ProjectionInput, constrained_project, kld_objective


def describe(inp):
    out = constrained_project(inp)
    kind = "bound active" if out.threshold_active else "interior optimum"
    print(f"  tau_hat={inp.tau_hat:<5} xi_r={inp.xi_r:+.2f} gamma={inp.gamma:+.2f}"
          f"  ->  xi_p={out.xi_p:+.6f} nu_p={out.nu_p:+.6f}  ({kind})")
    # mean-match identity holds in both regimes
    m_p = (out.nu_p + inp.nu_r) / (out.xi_p + inp.xi_r)
    print(f"      reconstructed belief mean {m_p:+.6f} == m_hat {inp.m_hat:+.6f}")
    return out


def main():
    print("=== unconstrained vs clipped projections ===")
    loose = ProjectionInput(m_hat=0.8, tau_hat=0.5, nu_r=0.1, xi_r=0.4, gamma=-0.2)
    describe(loose)
    tight = ProjectionInput(m_hat=0.8, tau_hat=0.5, nu_r=0.1, xi_r=0.4, gamma=1.9)
    describe(tight)
    print("  a floor with gamma + xi_r <= 0 can never make the belief"
          " integrable and is rejected:")
    try:
        constrained_project(
            ProjectionInput(m_hat=0.8, tau_hat=0.5, nu_r=0.1, xi_r=0.4, gamma=-1.0)
        )
    except InfeasibleThreshold as exc:
        print(f"    InfeasibleThreshold: {exc}")

    print()
    print("=== the objective the projection minimizes ===")
    inp = tight
    grid = np.linspace(inp.gamma - 0.8, inp.gamma + 4.0, 9)
    out = constrained_project(inp)
    for xi in grid:
        s = xi + inp.xi_r
        if s <= 0.0:
            print(f"  xi_p={xi:+.3f}  (belief not integrable)")
            continue
        val = kld_objective(xi, inp.tau_hat, inp.xi_r)
        marker = "  <- infeasible (below gamma)" if xi < inp.gamma else ""
        print(f"  xi_p={xi:+.3f}  objective={val:.6f}{marker}")
    print(f"  clipped answer sits at the floor: xi_p = gamma = {out.xi_p}")

    print()
    print("=== negative message precisions are handled the same way ===")
    describe(ProjectionInput(m_hat=-0.3, tau_hat=2.0, nu_r=0.0, xi_r=1.2, gamma=-0.9))


if __name__ == "__main__":
    main()
