import numpy as np
import pytest

from cli.runner import run_experiment

pytestmark = pytest.mark.slow

N_LIST = [20, 40, 80, 160]
METHODS = ["tz1", "tz2", "hs1", "hs2"]


@pytest.fixture(scope="module")
def study():
    return {method: [run_experiment("cartpole", method, N) for N in N_LIST] for method in METHODS}


def _errors(study, method) -> np.ndarray:
    return np.array([result.report.E2 for result in study[method]])


def test_all_scaling_runs_converge(study):
    for method, results in study.items():
        for N, result in zip(N_LIST, results):
            assert result.solution.converged, (method, N)


def test_errors_decrease_with_mesh_size(study):
    for method in METHODS:
        E2 = _errors(study, method)
        assert np.all(np.diff(E2, axis=0) < 0.0), (method, E2)


@pytest.mark.parametrize("low, high", [("tz1", "tz2"), ("hs1", "hs2")])
def test_improvement_factor_grows_with_mesh_size(study, low, high):
    factor = _errors(study, low) / _errors(study, high)
    assert np.all(factor > 1.0)
    assert np.all(np.diff(factor, axis=0) >= 0.0), factor


def test_wall_time_grows_at_most_quadratically(study):
    for method in METHODS:
        wall = np.array([result.wall_time_s for result in study[method]])
        slope = np.polyfit(np.log(N_LIST), np.log(wall), 1)[0]
        assert slope <= 2.0, (method, wall)
