"""Artifact writers for experiment results.

One solve writes solution.json, trajectory.csv, errors.csv and
summary.json into its output directory; compare and convergence runs add
comparison.csv / scaling.csv. With timing disabled wall times are
written as null so repeated runs are byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from cli.runner import ExperimentResult
from config import DEFAULT_TRAJECTORY_SAMPLES_PER_INTERVAL
from metrics.export import error_summary, write_csv, write_errors_csv, write_json
from schemes.interpolant import controls_on_intervals, evaluate_on_intervals


def summary_dict(result: ExperimentResult, *, timing: bool = True) -> dict:
    sol = result.solution
    return {
        "problem": result.problem,
        "method": result.method,
        "hs_form": result.scheme.hs_form.value,
        "N": result.mesh.N,
        "n_vars": result.size.n_vars,
        "n_eq": result.size.n_eq,
        "n_dof": result.size.n_dof,
        "cost": sol.cost,
        "kkt_residual": sol.kkt_residual,
        "constraint_violation": sol.constraint_violation,
        "iterations": sol.iterations,
        "status": sol.status.value,
        "wall_time_s": result.wall_time_s if timing else None,
        **error_summary(result.report),
    }


def _derivative_name(r: int, i: int) -> str:
    if r == 0:
        return f"q{i}"
    if r == 1:
        return f"dq{i}"
    return f"d{r}q{i}"


def trajectory_rows(result: ExperimentResult, samples_per_interval: int = DEFAULT_TRAJECTORY_SAMPLES_PER_INTERVAL):
    """Header and rows: t, q and its derivatives up to order M, then u."""
    traj = result.trajectory
    base = result.ocp.base
    M, n_q, N = base.order, base.n_q, traj.N

    idx = np.append(np.repeat(np.arange(N), samples_per_interval), N - 1)
    tau = np.append(np.tile(traj.h * np.arange(samples_per_interval) / samples_per_interval, N), traj.h)
    t = traj.knots[idx] + tau

    columns = [evaluate_on_intervals(traj, idx, tau, r)[:, :n_q] for r in range(M + 1)]
    u = controls_on_intervals(traj, idx, tau)

    header = ["t"]
    for r in range(M + 1):
        header += [_derivative_name(r, i + 1) for i in range(n_q)]
    header += [f"u{i + 1}" for i in range(u.shape[1])]
    rows = np.column_stack([t, *columns, u])
    return header, rows


def solution_dict(result: ExperimentResult) -> dict:
    sol = result.solution
    traj = result.trajectory
    payload = {
        "problem": result.problem,
        "method": result.method,
        "hs_form": result.scheme.hs_form.value,
        "N": result.mesh.N,
        "t_f": result.mesh.t_f,
        "status": sol.status.value,
        "message": sol.message,
        "cost": sol.cost,
        "knot_times": result.mesh.knots,
        "controls": traj.controls,
        "decision_vector": sol.z,
    }
    if traj.mid_controls is not None:
        payload["mid_controls"] = traj.mid_controls
    return payload


def write_run_artifacts(result: ExperimentResult, out_dir: Path, *, timing: bool = True) -> Dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header, rows = trajectory_rows(result)
    return {
        "solution": write_json(out / "solution.json", solution_dict(result)),
        "trajectory": write_csv(out / "trajectory.csv", header, rows),
        "errors": write_errors_csv(result.report, out / "errors.csv"),
        "summary": write_json(out / "summary.json", summary_dict(result, timing=timing)),
    }


def _e_columns(results: Sequence[ExperimentResult], which: int) -> List[str]:
    n_q = max(r.ocp.base.n_q for r in results)
    return [f"E{which}_q{i + 1}" for i in range(n_q)]


def comparison_rows(results: Sequence[ExperimentResult], *, timing: bool = True):
    """method, N, status, E1/E2 per coordinate, E2 ratio to the first method, wall time."""
    e1_cols, e2_cols = _e_columns(results, 1), _e_columns(results, 2)
    ratio_cols = [f"E2_ratio_q{i + 1}" for i in range(len(e2_cols))]
    header = ["method", "N", "status", *e1_cols, *e2_cols, *ratio_cols, "wall_time_s"]
    first = results[0].report.E2
    rows = []
    for r in results:
        E2 = r.report.E2
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(E2 > 0, first / E2, np.inf)
        rows.append(
            [
                r.method,
                r.mesh.N,
                r.solution.status.value,
                *r.report.E1,
                *E2,
                *ratio,
                r.wall_time_s if timing else None,
            ]
        )
    return header, rows


def scaling_rows(results: Sequence[ExperimentResult], *, timing: bool = True):
    """method, N, status, E2 per coordinate (and joint when defined), wall time."""
    e2_cols = _e_columns(results, 2)
    header = ["method", "N", "status", *e2_cols, "E2_joint", "wall_time_s"]
    rows = [
        [
            r.method,
            r.mesh.N,
            r.solution.status.value,
            *r.report.E2,
            r.report.E2_joint,
            r.wall_time_s if timing else None,
        ]
        for r in results
    ]
    return header, rows


def write_table(path: Path, table) -> Path:
    header, rows = table
    return write_csv(path, header, rows)
