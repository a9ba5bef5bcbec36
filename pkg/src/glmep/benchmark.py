"""Monte Carlo benchmark: instance generation, NMSE, and result files.

The default configuration draws a fresh (N, K) = (8, 12) instance per trial:
i.i.d. standard-normal mixing matrix, binary-mixture priors whose component
magnitude halves with the dimension index,

    ``p(x_k) = 1/2 N(x | +2^{-k}, 0.1 * 4^{-k}) + 1/2 N(x | -2^{-k}, 0.1 * 4^{-k})``

for zero-based ``k``, and additive white Gaussian noise calibrated so that
the *expected* per-observation signal power meets the requested SNR.  Every
trial owns an independent, trial-indexed random stream, so results are
reproducible and independent of the total trial count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import ep
from .baselines import lmmse_estimate
from .errors import GlmEpError, ZeroSignal
from .gmm import GmmFactor
from .model import GlmModel

__all__ = [
    "KNOWN_METHODS",
    "SimConfig",
    "TrialResult",
    "RunSummary",
    "prior_factor",
    "noise_variance",
    "gen_instance",
    "nmse",
    "run_monte_carlo",
    "write_results",
    "summary_path_for",
]

KNOWN_METHODS = ("acep", "epc", "clip", "lmmse")

CSV_HEADER = "trial,method,nmse,sweeps,converged,threshold_hits,skipped_updates"


@dataclass(frozen=True)
class SimConfig:
    """Benchmark knobs; defaults reproduce the headline experiment."""

    n: int = 8
    k: int = 12
    snr_db: float = 15.0
    trials: int = 1000
    seed: int = 1
    methods: tuple = KNOWN_METHODS
    epsilon: float = 1e-8
    max_sweeps: int = 50
    tol: float = 1e-8
    init_xi: float = 1.0
    out_path: str = "results.csv"
    validate: bool = False

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not math.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")
        methods = tuple(self.methods)
        if len(methods) == 0:
            raise ValueError("at least one method is required")
        for m in methods:
            if m not in KNOWN_METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {KNOWN_METHODS}")
        if len(set(methods)) != len(methods):
            raise ValueError("methods must not repeat")
        object.__setattr__(self, "methods", methods)


@dataclass(frozen=True)
class TrialResult:
    trial_id: int
    method: str
    nmse: float
    sweeps: int
    converged: bool
    threshold_hits: int
    skipped_updates: int


def prior_factor(k_index: int) -> GmmFactor:
    """Binary-mixture prior for zero-based dimension ``k_index``."""
    mean = 2.0 ** (-k_index)
    var = 0.1 * 4.0 ** (-k_index)
    return GmmFactor.from_mixture([0.5, 0.5], [mean, -mean], [var, var])


def _prior_second_moments(k: int) -> np.ndarray:
    k_idx = np.arange(k)
    return (1.0 + 0.1) * 4.0 ** (-k_idx)


def noise_variance(config: SimConfig) -> float:
    """Noise power meeting ``snr_db`` for the expected signal power.

    With i.i.d. standard-normal mixing rows, ``E[z_n^2] = sum_k E[x_k^2]``,
    so one scalar serves every observation.
    """
    signal_power = float(_prior_second_moments(config.k).sum())
    return signal_power / 10.0 ** (config.snr_db / 10.0)


def gen_instance(config: SimConfig, rng: np.random.Generator):
    """Draw one problem instance.

    Returns:
        Tuple ``(GlmModel, x_true)``.
    """
    n, k = config.n, config.k
    A = rng.standard_normal((n, k))
    priors = tuple(prior_factor(i) for i in range(k))
    signs = rng.integers(0, 2, size=k) * 2 - 1
    k_idx = np.arange(k)
    x_true = signs * 2.0 ** (-k_idx) + np.sqrt(0.1 * 4.0 ** (-k_idx)) * rng.standard_normal(k)
    sigma2 = noise_variance(config)
    y = A @ x_true + math.sqrt(sigma2) * rng.standard_normal(n)
    likelihoods = tuple(GmmFactor.gaussian(float(y[i]), sigma2) for i in range(n))
    return GlmModel(A, priors, likelihoods, y), x_true


def nmse(x_hat, x_true) -> float:
    """``|x_hat - x_true|^2 / |x_true|^2``.

    Raises:
        ZeroSignal: if the reference signal is identically zero.
        ValueError: on length mismatch.
    """
    x_hat = np.asarray(x_hat, dtype=float).reshape(-1)
    x_true = np.asarray(x_true, dtype=float).reshape(-1)
    if x_hat.size != x_true.size:
        raise ValueError("x_hat and x_true must have the same length")
    denom = float(x_true @ x_true)
    if denom == 0.0:
        raise ZeroSignal("reference signal is identically zero")
    diff = x_hat - x_true
    return float(diff @ diff) / denom


@dataclass
class RunSummary:
    """All trial rows plus per-method aggregates for one benchmark run."""

    config: SimConfig
    results: list
    failures: list = field(default_factory=list)
    family_threshold_hits: dict = field(default_factory=dict)
    family_skipped: dict = field(default_factory=dict)

    def _rows(self, method: str):
        return [r for r in self.results if r.method == method]

    def nmse_values(self, method: str) -> np.ndarray:
        """Sorted finite NMSE values (the empirical CDF support)."""
        vals = np.array(
            [r.nmse for r in self._rows(method) if math.isfinite(r.nmse)]
        )
        return np.sort(vals)

    def median_nmse(self, method: str) -> float:
        return float(np.median(self.nmse_values(method)))

    def mean_nmse(self, method: str) -> float:
        return float(np.mean(self.nmse_values(method)))

    def percentile_nmse(self, method: str, q: float) -> float:
        return float(np.percentile(self.nmse_values(method), q))

    def failed_count(self, method: str) -> int:
        return sum(1 for r in self._rows(method) if not math.isfinite(r.nmse))

    def threshold_hits_total(self, method: str) -> int:
        return sum(r.threshold_hits for r in self._rows(method))

    def skipped_total(self, method: str) -> int:
        return sum(r.skipped_updates for r in self._rows(method))


def _empty_family_counts():
    return {f: 0 for f in ep.MESSAGE_FAMILIES}


def _run_method(model, x_true, sigma2, method, config):
    """One (trial, method) cell; returns (nmse, sweeps, converged, counters)."""
    if method == "lmmse":
        x_hat = lmmse_estimate(model, sigma2)
        return nmse(x_hat, x_true), 0, True, None
    posterior = ep.run(
        model,
        ep.Mode(method, config.epsilon),
        config.max_sweeps,
        config.tol,
        init_xi=config.init_xi,
        validate=config.validate,
    )
    return nmse(posterior.x_mean, x_true), posterior.sweeps, posterior.converged, posterior.counters


def run_monte_carlo(config: SimConfig) -> RunSummary:
    """Run the benchmark described by ``config``.

    A method failure (any library error or linear-algebra failure) is
    recorded as an infinite NMSE for that cell and noted in
    ``summary.failures``; remaining methods and trials continue.
    """
    summary = RunSummary(
        config=config,
        results=[],
        family_threshold_hits={m: _empty_family_counts() for m in config.methods},
        family_skipped={
            m: {f: 0 for f in ep.SKIPPABLE_FAMILIES} for m in config.methods
        },
    )
    sigma2 = noise_variance(config)
    for trial in range(config.trials):
        rng = np.random.default_rng([config.seed, trial])
        model, x_true = gen_instance(config, rng)
        for method in config.methods:
            try:
                err, sweeps, converged, counters = _run_method(
                    model, x_true, sigma2, method, config
                )
            except (GlmEpError, np.linalg.LinAlgError) as exc:
                summary.failures.append((trial, method, f"{type(exc).__name__}: {exc}"))
                summary.results.append(
                    TrialResult(trial, method, math.inf, 0, False, 0, 0)
                )
                continue
            hits = skipped = 0
            if counters is not None:
                hits = counters.total_threshold_hits
                skipped = counters.total_skipped
                agg = summary.family_threshold_hits[method]
                for fam, c in counters.threshold_hits.items():
                    agg[fam] += c
                agg = summary.family_skipped[method]
                for fam, c in counters.skipped_updates.items():
                    agg[fam] += c
            summary.results.append(
                TrialResult(trial, method, err, sweeps, converged, hits, skipped)
            )
    return summary


def summary_path_for(csv_path: str) -> str:
    """Sibling key-value summary path for a CSV output path."""
    base, _ = os.path.splitext(csv_path)
    return base + "_summary.txt"


def _format_float(x: float) -> str:
    return repr(float(x))


def write_results(summary: RunSummary, path: str):
    """Write the per-trial CSV and the sibling key-value summary.

    Rows appear in trial order, methods in configuration order, floats in
    shortest round-trip form, so identical runs produce identical bytes.
    """
    lines = [CSV_HEADER]
    for r in summary.results:
        lines.append(
            f"{r.trial_id},{r.method},{_format_float(r.nmse)},{r.sweeps},"
            f"{'true' if r.converged else 'false'},{r.threshold_hits},"
            f"{r.skipped_updates}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    cfg = summary.config
    kv = [
        ("n", cfg.n),
        ("k", cfg.k),
        ("snr_db", _format_float(cfg.snr_db)),
        ("trials", cfg.trials),
        ("seed", cfg.seed),
        ("epsilon", _format_float(cfg.epsilon)),
        ("methods", ",".join(cfg.methods)),
    ]
    for m in cfg.methods:
        vals = summary.nmse_values(m)
        if vals.size:
            kv.append((f"{m}.median_nmse", _format_float(np.median(vals))))
            kv.append((f"{m}.mean_nmse", _format_float(np.mean(vals))))
        else:
            kv.append((f"{m}.median_nmse", "nan"))
            kv.append((f"{m}.mean_nmse", "nan"))
        kv.append((f"{m}.trials_ok", vals.size))
        kv.append((f"{m}.trials_failed", summary.failed_count(m)))
        kv.append((f"{m}.threshold_hits_total", summary.threshold_hits_total(m)))
        kv.append((f"{m}.skipped_updates_total", summary.skipped_total(m)))
        for fam, c in summary.family_threshold_hits.get(m, {}).items():
            kv.append((f"{m}.threshold_hits.{fam}", c))
    with open(summary_path_for(path), "w") as fh:
        for key, value in kv:
            fh.write(f"{key} = {value}\n")
