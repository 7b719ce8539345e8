"""Server bootstrap for the collocation MCP service.

Creates the FastMCP instance, wires the experiment tools, registers the
scheme catalog resource and starts the MCP server (stdio transport).
"""

from mcp.server.fastmcp import FastMCP

from cli.runner import compare, run_experiment

from tools.compare_methods import register as register_compare_methods
from tools.list_problems import register as register_list_problems
from tools.solve_trajectory import register as register_solve_trajectory

from resources.scheme_catalog import register_resources

mcp = FastMCP("collocation-mcp")


def register_tools() -> None:
    register_solve_trajectory(mcp, runner=run_experiment)
    register_compare_methods(mcp, comparer=compare)
    register_list_problems(mcp)


def register_all() -> None:
    register_tools()
    register_resources(mcp)


register_all()


def main() -> None:
    mcp.run(transport="stdio")


if __name__ == "__main__":
    main()
