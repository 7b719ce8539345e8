"""MCP tool that compares collocation methods on one problem.

Registers 'compare_methods', returning one row per method in the same
layout as comparison.csv.
"""

from __future__ import annotations

import asyncio
from typing import Callable, List, Optional, Sequence

from mcp.server.fastmcp import FastMCP

from cli.artifacts import comparison_rows
from cli.runner import ExperimentResult, compare
from core.errors import ValidationError
from core.models import ExperimentConfig
from tools.solve_trajectory import _check_intervals

Comparer = Callable[[ExperimentConfig], Sequence[ExperimentResult]]


def register(mcp: FastMCP, *, comparer: Optional[Comparer] = None) -> None:
    run = comparer or compare

    @mcp.tool(name="compare_methods")
    async def compare_methods(
        problem: str,
        methods: List[str],
        N: int = 25,
        fair: bool = False,
    ) -> List[dict]:
        """Solve one problem with several methods and tabulate the errors.

        Params:
          - problem: registered problem name.
          - methods: at least two of tz1, tz2, tzm, hs1, hs2, hsm.
          - N: intervals for Hermite-Simpson methods (and trapezoidal ones
            unless fair is set).
          - fair: run trapezoidal methods on 2N intervals so both families
            use the same number of collocation points.

        Returns:
          List of dicts keyed by the comparison.csv header (method, N,
          status, E1_q*, E2_q*, E2_ratio_q*, wall_time_s).

        Raises:
          ValidationError for fewer than two methods or bad N; NotFoundError
          for unknown names.
        """
        name = (problem or "").strip()
        if not name:
            raise ValidationError("Problem name is empty")
        chosen = tuple(m.strip().lower() for m in (methods or []) if m and m.strip())
        if len(chosen) < 2:
            raise ValidationError("compare_methods needs at least 2 methods")
        n = _check_intervals(N)
        if fair:
            _check_intervals(2 * n)

        config = ExperimentConfig(problem=name, methods=chosen, N=n, fair=bool(fair))
        results = await asyncio.to_thread(run, config)

        header, rows = comparison_rows(results)
        return [dict(zip(header, row)) for row in rows]
