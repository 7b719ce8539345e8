import pytest

from tools import list_problems as list_tool


@pytest.mark.asyncio
async def test_list_problems_describes_registry(dummy_mcp):
    list_tool.register(dummy_mcp)
    fn = dummy_mcp.tools["list_problems"]

    out = await fn()
    assert [p["name"] for p in out] == ["cartpole", "oscillator", "triple_integrator"]
    by_name = {p["name"]: p for p in out}
    assert by_name["cartpole"]["n_b"] == 8
    assert by_name["triple_integrator"]["order"] == 3
    assert by_name["oscillator"]["units"] == ["m"]
