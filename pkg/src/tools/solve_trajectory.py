"""MCP tool that solves one benchmark problem with one collocation method.

Registers 'solve_trajectory', which runs transcribe -> solve -> measure in
a worker thread and returns the same summary written to summary.json.
"""

from __future__ import annotations

import asyncio
import re
from pathlib import Path
from typing import Callable, Optional

from mcp.server.fastmcp import FastMCP

from cli.artifacts import summary_dict, write_run_artifacts
from cli.runner import ExperimentResult, run_experiment
from config import MAX_SERVER_INTERVALS, PROJECT_ROOT, RESULTS_DIR
from core.errors import AccessDeniedError, ValidationError
from core.models import HSForm

Runner = Callable[..., ExperimentResult]


def _check_intervals(N: int) -> int:
    try:
        n = int(N)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"N must be an integer, got {N!r}") from e
    if n < 1:
        raise ValidationError("N must be at least 1")
    if n > MAX_SERVER_INTERVALS:
        raise ValidationError(f"N={n} exceeds MAX_SERVER_INTERVALS={MAX_SERVER_INTERVALS}")
    return n


def _safe_out_dir() -> Path:
    # Resolve and enforce output dir is inside PROJECT_ROOT
    raw = (RESULTS_DIR or "").strip() or "results"
    p = Path(raw)
    out_dir = p if p.is_absolute() else (PROJECT_ROOT / p)
    out_dir = out_dir.resolve()

    try:
        out_dir.relative_to(PROJECT_ROOT)
    except ValueError as e:
        raise AccessDeniedError("RESULTS_DIR must be within PROJECT_ROOT") from e

    return out_dir


def _run_dir_name(problem: str, method: str, N: int) -> str:
    stem = re.sub(r"[^\w-]", "", f"{problem}_{method}_N{N}")
    return stem or "run"


def register(mcp: FastMCP, *, runner: Optional[Runner] = None) -> None:
    run = runner or run_experiment

    @mcp.tool(name="solve_trajectory")
    async def solve_trajectory(
        problem: str,
        method: str = "hs2",
        N: int = 25,
        hs_form: str = "separated",
        write_artifacts: bool = False,
    ) -> dict:
        """Solve a registered problem and return its summary.

        Params:
          - problem: registered problem name (see list_problems).
          - method: tz1, tz2, tzm, hs1, hs2 or hsm (default: "hs2").
          - N: number of mesh intervals (default: 25).
          - hs_form: "separated" or "compressed" Hermite-Simpson variables.
          - write_artifacts: also write solution/trajectory/errors/summary
            files under RESULTS_DIR.

        Returns:
          Summary dict: sizes, cost, KKT residual, status, wall time and
          the integrated dynamic errors E1/E2.

        Raises:
          ValidationError for bad inputs or N above MAX_SERVER_INTERVALS;
          NotFoundError for unknown problem or method; AccessDeniedError if
          RESULTS_DIR is outside the project root.
        """
        name = (problem or "").strip()
        if not name:
            raise ValidationError("Problem name is empty")
        n = _check_intervals(N)
        try:
            form = HSForm((hs_form or "separated").strip().lower())
        except ValueError as e:
            raise ValidationError(f"hs_form must be 'separated' or 'compressed', got '{hs_form}'") from e

        out_dir = _safe_out_dir() if write_artifacts else None

        # the solve is CPU bound
        result = await asyncio.to_thread(run, name, method, n, hs_form=form)

        summary = summary_dict(result)
        if out_dir is not None:
            target = out_dir / _run_dir_name(result.problem, result.method, n)
            write_run_artifacts(result, target)
            summary["artifacts_dir"] = str(target)
        return summary
