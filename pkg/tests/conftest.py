"""Shared fixtures for the test suite."""

import time

import pytest

from glmep.benchmark import SimConfig, run_monte_carlo


@pytest.fixture(scope="session")
def full_benchmark():
    """One full 1000-trial benchmark run with per-update validation on.

    Several acceptance checks consume the same run — the per-family
    counters, the validation outcome, and the NMSE orderings — so it is
    executed once per session.  Returns ``(summary, elapsed_seconds)``.
    """
    config = SimConfig(validate=True)
    t0 = time.perf_counter()
    summary = run_monte_carlo(config)
    elapsed = time.perf_counter() - t0
    return summary, elapsed
