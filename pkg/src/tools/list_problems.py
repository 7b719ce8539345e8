"""MCP tool listing the registered benchmark problems."""

from __future__ import annotations

from typing import List

from mcp.server.fastmcp import FastMCP

from problems.registry import describe_problem, list_problems as registered_names


def register(mcp: FastMCP) -> None:
    @mcp.tool(name="list_problems")
    async def list_problems() -> List[dict]:
        """Return every registered problem with its order, sizes and units.

        Returns:
          Sorted list of dicts: name, description, order, n_q, n_u, n_b,
          t_f, units.
        """
        return [describe_problem(name) for name in registered_names()]
