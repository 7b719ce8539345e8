"""Experiment orchestration shared by the CLI and the MCP tools.

Resolves method names to schemes, runs transcribe -> solve -> reconstruct
-> measure for one (problem, method, N) cell, and builds the comparison
and scaling tables.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from config import parse_bool, parse_float, parse_int, parse_list
from core.errors import ConfigError, NotFoundError, ValidationError
from core.models import ExperimentConfig, Family, HSForm, Mesh, SchemeId, Solution, SolveOptions
from metrics.dynamic_error import ErrorReport, integrate_errors
from model.ocp import OcpDefinition
from problems.registry import get_entry
from schemes.interpolant import PolyTrajectory
from solver.auglag import solve
from transcribe.guess import assemble_initial_guess, guess_from_trajectory
from transcribe.nlp import ProblemSize, problem_size, transcribe
from transcribe.transcription import prepare_problem

logger = logging.getLogger(__name__)

METHODS = ("tz1", "tz2", "tzm", "hs1", "hs2", "hsm")


def resolve_scheme(method: str, ocp: OcpDefinition, hs_form: HSForm = HSForm.SEPARATED) -> SchemeId:
    """Map tz1/tz2/tzm/hs1/hs2/hsm to a scheme for this problem's order.

    Raises:
      NotFoundError for other names; SchemeMismatchError when the order
      fits neither the problem nor a lift.
    """
    key = (method or "").strip().lower()
    if key not in METHODS:
        raise NotFoundError(f"unknown method: {method}")
    family = Family.HERMITE_SIMPSON if key.startswith("hs") else Family.TRAPEZOIDAL
    order = ocp.order if key.endswith("m") else int(key[2:])
    scheme = SchemeId(family, order, HSForm(hs_form))
    prepare_problem(ocp, scheme)
    return scheme


def intervals_for(method: str, N: int, fair: bool) -> int:
    # equal collocation-point counts: trapezoidal runs twice as many intervals
    if fair and method.strip().lower().startswith("tz"):
        return 2 * N
    return N


@dataclass(frozen=True)
class ExperimentResult:
    """Everything one solve produces.

    Field groups:
    - Selection: problem, method, scheme, mesh, ocp
    - Outcome: size, solution, trajectory, report, wall_time_s
    """

    problem: str
    method: str
    scheme: SchemeId
    mesh: Mesh
    ocp: OcpDefinition
    size: ProblemSize
    solution: Solution
    trajectory: PolyTrajectory
    report: ErrorReport
    wall_time_s: float


def run_experiment(
    problem: str,
    method: str,
    N: int,
    *,
    hs_form: HSForm = HSForm.SEPARATED,
    options: Optional[SolveOptions] = None,
    samples_per_interval: int = 64,
    warm_start: Optional[PolyTrajectory] = None,
) -> ExperimentResult:
    entry = get_entry(problem)
    ocp = entry.build()
    scheme = resolve_scheme(method, ocp, hs_form)
    mesh = Mesh(N, ocp.t_f)
    nlp = transcribe(ocp, scheme, mesh)
    if warm_start is not None:
        guess = guess_from_trajectory(ocp, scheme, mesh, warm_start)
    else:
        guess = assemble_initial_guess(ocp, scheme, mesh, entry.waypoints(ocp))

    start = time.perf_counter()
    solution = solve(nlp, guess, options)
    wall = time.perf_counter() - start

    trajectory = nlp.transcription.trajectory(solution.z)
    report = integrate_errors(trajectory, ocp, samples_per_interval)
    problem_dims = nlp.transcription.ocp
    size = problem_size(scheme, problem_dims.n_x, problem_dims.n_u, problem_dims.n_b, N)
    logger.info(
        "%s %s N=%d: status=%s cost=%.6g E2=%s (%.2fs)",
        entry.name,
        method,
        N,
        solution.status.value,
        solution.cost,
        report.E2,
        wall,
    )
    return ExperimentResult(
        problem=entry.name,
        method=method.strip().lower(),
        scheme=scheme,
        mesh=mesh,
        ocp=ocp,
        size=size,
        solution=solution,
        trajectory=trajectory,
        report=report,
        wall_time_s=wall,
    )


def run_config(config: ExperimentConfig, method: str, N: int, warm_start: Optional[PolyTrajectory] = None) -> ExperimentResult:
    return run_experiment(
        config.problem,
        method,
        N,
        hs_form=config.hs_form,
        options=config.options,
        samples_per_interval=config.samples_per_interval,
        warm_start=warm_start,
    )


def compare(config: ExperimentConfig) -> List[ExperimentResult]:
    """One solve per method; trapezoidal N doubled when ``fair`` is set."""
    if len(config.methods) < 2:
        raise ValidationError("compare needs at least 2 methods")
    return [run_config(config, m, intervals_for(m, config.N, config.fair)) for m in config.methods]


def convergence(config: ExperimentConfig) -> List[ExperimentResult]:
    """One solve per (method, N); with ``warm_start`` each N seeds the next."""
    if len(config.N_list) < 3:
        raise ValidationError("convergence needs at least 3 values in N_list")
    methods = config.methods or (config.method,)
    results: List[ExperimentResult] = []
    for method in methods:
        previous: Optional[PolyTrajectory] = None
        for N in config.N_list:
            result = run_config(config, method, intervals_for(method, N, config.fair), previous)
            results.append(result)
            if config.warm_start:
                previous = result.trajectory
    return results


def build_config(values: Mapping[str, str]) -> ExperimentConfig:
    """ExperimentConfig from raw string values (file merged with flags).

    Raises:
      ConfigError for missing or malformed values.
    """
    if not values.get("problem"):
        raise ConfigError("problem is required")

    defaults = SolveOptions()
    options = SolveOptions(
        kkt_tol=parse_float("kkt_tol", values["kkt_tol"]) if "kkt_tol" in values else defaults.kkt_tol,
        max_outer_iters=(
            parse_int("max_outer_iters", values["max_outer_iters"])
            if "max_outer_iters" in values
            else defaults.max_outer_iters
        ),
        max_inner_iters=(
            parse_int("max_inner_iters", values["max_inner_iters"])
            if "max_inner_iters" in values
            else defaults.max_inner_iters
        ),
        penalty_init=(
            parse_float("penalty_init", values["penalty_init"]) if "penalty_init" in values else defaults.penalty_init
        ),
        penalty_growth=(
            parse_float("penalty_growth", values["penalty_growth"])
            if "penalty_growth" in values
            else defaults.penalty_growth
        ),
    )

    try:
        hs_form = HSForm(values.get("hs_form", HSForm.SEPARATED.value).strip().lower())
    except ValueError as e:
        raise ConfigError(f"hs_form: expected 'separated' or 'compressed', got '{values['hs_form']}'") from e

    kwargs: Dict[str, object] = {"problem": values["problem"].strip(), "options": options, "hs_form": hs_form}
    if "method" in values:
        kwargs["method"] = values["method"].strip().lower()
    if "methods" in values:
        kwargs["methods"] = tuple(m.lower() for m in parse_list("methods", values["methods"]))
    if "N" in values:
        kwargs["N"] = parse_int("N", values["N"])
    if "N_list" in values:
        kwargs["N_list"] = tuple(parse_int("N_list", v) for v in parse_list("N_list", values["N_list"]))
    if "fair" in values:
        kwargs["fair"] = parse_bool("fair", values["fair"])
    if "warm_start" in values:
        kwargs["warm_start"] = parse_bool("warm_start", values["warm_start"])
    if "samples_per_interval" in values:
        kwargs["samples_per_interval"] = parse_int("samples_per_interval", values["samples_per_interval"])
    if "timing" in values:
        kwargs["timing"] = parse_bool("timing", values["timing"])
    if "out" in values:
        kwargs["out_dir"] = Path(values["out"])
    return ExperimentConfig(**kwargs)
