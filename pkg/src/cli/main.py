"""Command-line front end: ``collocation solve|compare|convergence``.

Values come from an optional ``--config`` key=value file; flags given on
the command line override them. Exit codes: 0 when every solve
converged, 2 when any solve stopped without converging, 1 on a
configuration or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence

from cli.artifacts import comparison_rows, scaling_rows, write_run_artifacts, write_table
from cli.runner import ExperimentResult, build_config, compare, convergence, run_config
from config import read_config_file
from core.errors import CollocationError
from core.models import ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

# flag dest -> config key
_FLAG_KEYS = {
    "problem": "problem",
    "method": "method",
    "methods": "methods",
    "hs_form": "hs_form",
    "N": "N",
    "N_list": "N_list",
    "out": "out",
    "kkt_tol": "kkt_tol",
    "max_outer_iters": "max_outer_iters",
    "max_inner_iters": "max_inner_iters",
    "samples_per_interval": "samples_per_interval",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value experiment file")
    p.add_argument("--problem")
    p.add_argument("--hs-form", dest="hs_form", choices=("separated", "compressed"))
    p.add_argument("--out", help="output directory (default: results)")
    p.add_argument("--kkt-tol", dest="kkt_tol")
    p.add_argument("--max-outer-iters", dest="max_outer_iters")
    p.add_argument("--max-inner-iters", dest="max_inner_iters")
    p.add_argument("--samples-per-interval", dest="samples_per_interval")
    p.add_argument("--fair", action="store_true", default=None, help="double N for trapezoidal methods")
    p.add_argument("--no-timing", dest="timing", action="store_false", default=None, help="write wall_time_s as null")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collocation", description="Higher-order direct collocation experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    solve_p = sub.add_parser("solve", help="solve one problem with one method")
    _add_common(solve_p)
    solve_p.add_argument("--method")
    solve_p.add_argument("--N")

    compare_p = sub.add_parser("compare", help="solve with several methods and tabulate errors")
    _add_common(compare_p)
    compare_p.add_argument("--methods", help="comma separated, e.g. tz1,tz2")
    compare_p.add_argument("--N")

    conv_p = sub.add_parser("convergence", help="error scaling over a list of N")
    _add_common(conv_p)
    conv_p.add_argument("--method")
    conv_p.add_argument("--methods")
    conv_p.add_argument("--N-list", dest="N_list", help="comma separated, e.g. 20,40,80")
    conv_p.add_argument("--warm-start", dest="warm_start", action="store_true", default=None)
    return parser


def merged_values(args: argparse.Namespace) -> Dict[str, str]:
    """File values overridden by the flags that were given."""
    values: Dict[str, str] = read_config_file(args.config) if args.config else {}
    for dest, key in _FLAG_KEYS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[key] = str(v)
    if args.fair is not None:
        values["fair"] = "true"
    if args.timing is not None:
        values["timing"] = "false"
    if getattr(args, "warm_start", None) is not None:
        values["warm_start"] = "true"
    return values


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _exit_code(results: Sequence[ExperimentResult]) -> int:
    if all(r.solution.converged for r in results):
        return EXIT_OK
    for r in results:
        if not r.solution.converged:
            logger.warning("%s N=%d did not converge: %s", r.method, r.mesh.N, r.solution.message)
    return EXIT_NOT_CONVERGED


def cmd_solve(config: ExperimentConfig) -> int:
    result = run_config(config, config.method, config.N)
    write_run_artifacts(result, config.out_dir, timing=config.timing)
    return _exit_code([result])


def cmd_compare(config: ExperimentConfig) -> int:
    results = compare(config)
    for r in results:
        write_run_artifacts(r, config.out_dir / f"{r.method}_N{r.mesh.N}", timing=config.timing)
    write_table(config.out_dir / "comparison.csv", comparison_rows(results, timing=config.timing))
    return _exit_code(results)


def cmd_convergence(config: ExperimentConfig) -> int:
    results: List[ExperimentResult] = convergence(config)
    write_table(config.out_dir / "scaling.csv", scaling_rows(results, timing=config.timing))
    return _exit_code(results)


COMMANDS = {"solve": cmd_solve, "compare": cmd_compare, "convergence": cmd_convergence}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = build_config(merged_values(args))
        return COMMANDS[args.command](config)
    except CollocationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
