"""Command-line benchmark runner (installed as ``glm-ep-bench``).

Flags mirror :class:`~glmep.benchmark.SimConfig`.  A flat ``key = value``
config file can seed any subset of them; explicit flags win.  Lines starting
with ``#`` and blank lines are ignored; keys may use ``-`` or ``_``.
"""

from __future__ import annotations

import argparse
import sys

from .benchmark import (
    KNOWN_METHODS,
    SimConfig,
    run_monte_carlo,
    summary_path_for,
    write_results,
)
from .errors import GlmEpError

_FLAG_TYPES = {
    "n": int,
    "k": int,
    "snr_db": float,
    "trials": int,
    "seed": int,
    "methods": str,
    "epsilon": float,
    "max_sweeps": int,
    "tol": float,
    "init_xi": float,
    "out": str,
    "validate": bool,
}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot interpret {text!r} as a boolean")


def load_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` file into typed option values."""
    options = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key not in _FLAG_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
            caster = _FLAG_TYPES[key]
            if caster is bool:
                options[key] = _parse_bool(value)
            else:
                options[key] = caster(value)
    return options


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glm-ep-bench",
        description="Monte Carlo NMSE benchmark for the message-passing estimators.",
    )
    parser.add_argument("--n", type=int, default=None, help="observations per instance")
    parser.add_argument("--k", type=int, default=None, help="signal dimensions per instance")
    parser.add_argument("--snr-db", type=float, default=None, help="signal-to-noise ratio in dB")
    parser.add_argument("--trials", type=int, default=None, help="number of Monte Carlo trials")
    parser.add_argument("--seed", type=int, default=None, help="base seed for the trial streams")
    parser.add_argument(
        "--methods", type=str, default=None,
        help=f"comma-separated subset of {','.join(KNOWN_METHODS)}",
    )
    parser.add_argument("--epsilon", type=float, default=None, help="slack added to active precision bounds")
    parser.add_argument("--max-sweeps", type=int, default=None, help="sweep budget per run")
    parser.add_argument("--tol", type=float, default=None, help="posterior-mean convergence threshold")
    parser.add_argument("--init-xi", type=float, default=None, help="initial message precision")
    parser.add_argument("--out", type=str, default=None, help="CSV output path")
    parser.add_argument("--config", type=str, default=None, help="flat key = value config file")
    parser.add_argument(
        "--validate", action="store_true", default=None,
        help="enable per-update invariant checks",
    )
    return parser


def _merged_config(args) -> SimConfig:
    options = {}
    if args.config is not None:
        options.update(load_config_file(args.config))
    flag_values = {
        "n": args.n,
        "k": args.k,
        "snr_db": args.snr_db,
        "trials": args.trials,
        "seed": args.seed,
        "methods": args.methods,
        "epsilon": args.epsilon,
        "max_sweeps": args.max_sweeps,
        "tol": args.tol,
        "init_xi": args.init_xi,
        "out": args.out,
        "validate": args.validate,
    }
    for key, value in flag_values.items():
        if value is not None:
            options[key] = value
    kwargs = {}
    for key, value in options.items():
        if key == "methods":
            kwargs["methods"] = tuple(
                part.strip() for part in str(value).split(",") if part.strip()
            )
        elif key == "out":
            kwargs["out_path"] = value
        else:
            kwargs[key] = value
    return SimConfig(**kwargs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _merged_config(args)
        summary = run_monte_carlo(config)
        write_results(summary, config.out_path)
    except (GlmEpError, OSError, ValueError) as exc:
        print(f"glm-ep-bench: error: {exc}", file=sys.stderr)
        return 1
    for method in config.methods:
        ok = summary.nmse_values(method).size
        failed = summary.failed_count(method)
        if ok:
            print(
                f"{method:>6}: median NMSE {summary.median_nmse(method):.6g}, "
                f"mean {summary.mean_nmse(method):.6g} "
                f"({ok} ok, {failed} failed)"
            )
        else:
            print(f"{method:>6}: no successful trials ({failed} failed)")
    print(f"wrote {config.out_path} and {summary_path_for(config.out_path)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
