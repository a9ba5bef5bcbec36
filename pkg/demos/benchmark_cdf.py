"""Small Monte Carlo benchmark with an NMSE CDF plot.

Runs 200 trials of the default 8x12 experiment, writes the per-trial CSV
plus the key-value summary, and draws the empirical NMSE CDFs into
``benchmark_cdf.png``.  The full-size run (1000 trials) is available from
the command line:  glm-ep-bench --trials 1000 --out results.csv

Run:  python3 demos/benchmark_cdf.py
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from glmep.benchmark import (
    SimConfig,
    run_monte_carlo,
    summary_path_for,
    write_results,
)


def main():
    config = SimConfig(trials=200, out_path="benchmark_results.csv")
    print(f"running {config.trials} trials of the "
          f"{config.n}x{config.k} benchmark at {config.snr_db} dB ...")
    summary = run_monte_carlo(config)
    write_results(summary, config.out_path)
    print(f"wrote {config.out_path} and {summary_path_for(config.out_path)}")

    print()
    print(f"{'method':<8} {'median':>12} {'mean':>12} {'clips':>7} {'skips':>6}")
    for method in config.methods:
        print(f"{method:<8} {summary.median_nmse(method):>12.6f} "
              f"{summary.mean_nmse(method):>12.6f} "
              f"{summary.threshold_hits_total(method):>7} "
              f"{summary.skipped_total(method):>6}")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for method, style in zip(config.methods, ("-", "--", "-.", ":")):
        vals = summary.nmse_values(method)
        cdf = (1.0 + np.arange(vals.size)) / vals.size
        ax.semilogx(vals, cdf, style, label=method)
    ax.set_xlabel("NMSE")
    ax.set_ylabel("empirical CDF")
    ax.set_title(f"{config.n}x{config.k}, {config.snr_db} dB, "
                 f"{config.trials} trials")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig("benchmark_cdf.png", dpi=150)
    print()
    print("wrote benchmark_cdf.png")


if __name__ == "__main__":
    main()
