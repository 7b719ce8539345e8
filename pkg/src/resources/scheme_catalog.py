"""Scheme catalog resource for the MCP server.

Registers a plain-text table of the trapezoidal and Hermite-Simpson
schemes so agents can pick a method before calling solve_trajectory.
"""

from mcp.server.fastmcp import FastMCP

from core.models import Family, SchemeId

CATALOG_URI = "collocation://schemes/catalog"


def _row(method: str, scheme: SchemeId) -> str:
    return (
        f"{method:<5} {scheme.family.value:<16} M={scheme.order:<2} s={scheme.n_collocation} "
        f"d={scheme.degree:<2} exact<=deg {scheme.exactness_degree:<2} "
        f"order>={scheme.known_order:<2} controls={scheme.control_interp.value}"
    )


def render_catalog() -> str:
    lines = [
        "Collocation schemes (d = M + s - 1, order of accuracy at least d)",
        "",
        _row("tz1", SchemeId(Family.TRAPEZOIDAL, 1)),
        _row("tz2", SchemeId(Family.TRAPEZOIDAL, 2)),
        _row("hs1", SchemeId(Family.HERMITE_SIMPSON, 1)),
        _row("hs2", SchemeId(Family.HERMITE_SIMPSON, 2)),
        "",
        "tzm   trapezoidal      M = problem order, s=2, d=M+1, controls=piecewise_linear",
        "hsm   hermite_simpson  M = problem order, s=3, d=M+2, controls=piecewise_quadratic",
        "",
        "tz1/hs1 lift higher-order problems to first order; hs1 is known to reach order 4.",
        "Hermite-Simpson accepts hs_form=separated (midpoint states are variables)",
        "or hs_form=compressed (midpoint states eliminated).",
    ]
    return "\n".join(lines) + "\n"


def register_resources(mcp: FastMCP) -> None:
    """
    Register the scheme catalog resource for the MCP server.
    """

    @mcp.resource(
        CATALOG_URI,
        mime_type="text/plain",
        description="Collocation schemes: family, order, polynomial degree, exactness, control interpolation",
    )
    def scheme_catalog() -> str:
        return render_catalog()
