import numpy as np
import pytest

from core.errors import OutOfMeshError, UnitMismatchError, ValidationError
from core.models import Family, Mesh, SchemeId
from metrics.dynamic_error import dynamic_error, integrate_errors
from model.ocp import OcpDefinition, lift_to_first_order
from problems.cartpole import cartpole
from problems.oscillator import exact_solution, oscillator
from schemes.interpolant import build_interpolant
from schemes.steps import tz_step

TZ1 = SchemeId(Family.TRAPEZOIDAL, 1)
TZ2 = SchemeId(Family.TRAPEZOIDAL, 2)


def forced(g) -> OcpDefinition:
    """q'' = g(t, u) with a single configuration coordinate."""
    return OcpDefinition(n_q=1, n_u=1, order=2, dynamics=lambda levels, u, t: g(t, u), t_f=1.0)


def cubic_traj(mesh: Mesh):
    # q = t^3 / 6 with u = t
    t = mesh.knots
    X = np.stack([t**3 / 6.0, t**2 / 2.0], axis=-1)[:, :, None]
    return build_interpolant(TZ2, X, t[:, None], mesh, controls=t[:, None])


def collocated_oscillator(N: int):
    """TZ2 knot values chained with the implicit step on q'' = -q."""
    ocp = oscillator()
    mesh = Mesh(N, ocp.t_f)
    X = [np.array([[1.0], [0.0]])]
    for _ in range(N):
        y = X[-1]
        for _ in range(200):
            y = tz_step(2, X[-1], -X[-1][0], -y[0], mesh.h)
        X.append(y)
    X = np.array(X)
    traj = build_interpolant(TZ2, X, -X[:, 0], mesh, controls=np.zeros((N + 1, 1)))
    return ocp, traj


def lifted_oscillator(N: int):
    """TZ1 trajectory of the lifted oscillator through the exact knot states."""
    ocp = oscillator()
    lifted = lift_to_first_order(ocp)
    mesh = Mesh(N, ocp.t_f)
    x = exact_solution().state(mesh.knots)
    f = lifted.dynamics(x[:, None, :], np.zeros((N + 1, 1)), mesh.knots)
    traj = build_interpolant(TZ1, x[:, None, :], f, mesh, controls=np.zeros((N + 1, 1)))
    return ocp, traj


def test_eps1_is_zero_for_order_m_schemes():
    ocp, traj = collocated_oscillator(8)
    t = np.random.default_rng(0).uniform(0.0, ocp.t_f, 80)
    np.testing.assert_array_equal(dynamic_error(traj, ocp, 1, t), 0.0)


def test_eps2_vanishes_everywhere_on_exact_data():
    ocp = forced(lambda t, u: u)
    traj = cubic_traj(Mesh(4, 1.0))
    t = np.linspace(0.0, 1.0, 41)
    np.testing.assert_allclose(dynamic_error(traj, ocp, 2, t), 0.0, atol=1e-13)
    report = integrate_errors(traj, ocp)
    assert report.E2[0] <= 1e-10
    assert report.E1[0] == 0.0


def test_eps2_vanishes_at_collocation_points():
    ocp, traj = collocated_oscillator(10)
    at_knots = dynamic_error(traj, ocp, 2, traj.knots)
    np.testing.assert_allclose(at_knots, 0.0, atol=1e-12)
    between = dynamic_error(traj, ocp, 2, traj.knots[:-1] + 0.5 * traj.h)
    assert np.max(np.abs(between)) > 1e-6


def test_eps2_is_continuous_for_tz2():
    ocp, traj = collocated_oscillator(10)
    for t in traj.knots[1:-1]:
        left = dynamic_error(traj, ocp, 2, t, side="left")
        right = dynamic_error(traj, ocp, 2, t, side="right")
        np.testing.assert_allclose(left, right, atol=1e-9)


def test_integral_of_synthetic_residual():
    # q = 0 and g = -sin(pi t) leave eps2 = sin(pi t)
    ocp = forced(lambda t, u: -np.sin(np.pi * t)[..., None])
    mesh = Mesh(4, 1.0)
    traj = build_interpolant(TZ2, np.zeros((5, 2, 1)), np.zeros((5, 1)), mesh, controls=np.zeros((5, 1)))
    report = integrate_errors(traj, ocp)
    assert report.E2[0] == pytest.approx(2.0 / np.pi, abs=1e-6)
    assert report.E2_joint == pytest.approx(report.E2[0])
    assert report.summary(2) == {"q1": pytest.approx(2.0 / np.pi, abs=1e-6), "joint": report.E2_joint}


def test_lifted_trajectory_has_kinematic_error():
    ocp, traj = lifted_oscillator(8)
    t = traj.knots[:-1] + 0.5 * traj.h
    assert np.max(np.abs(dynamic_error(traj, ocp, 1, t))) > 1e-4
    np.testing.assert_allclose(dynamic_error(traj, ocp, 1, traj.knots[:-1]), 0.0, atol=1e-15)


def test_lifted_acceleration_jumps_at_knots():
    ocp, traj = lifted_oscillator(7)
    jumps = [
        abs(dynamic_error(traj, ocp, 2, t, side="left")[0] - dynamic_error(traj, ocp, 2, t, side="right")[0])
        for t in traj.knots[1:-1]
    ]
    assert min(jumps) > 1e-6


def test_report_shapes_and_sample_count():
    ocp, traj = lifted_oscillator(6)
    report = integrate_errors(traj, ocp)
    assert report.sample_times.size == 6 * 65
    assert report.sample_times.size >= 10 * traj.N
    assert report.eps1.shape == report.eps2.shape == (390, 1)
    assert np.all(report.E1 >= 0) and np.all(report.E2 >= 0)
    assert report.units == ("m",)


def test_doubling_samples_barely_moves_integrals():
    ocp, traj = lifted_oscillator(16)
    a = integrate_errors(traj, ocp, 64)
    b = integrate_errors(traj, ocp, 128)
    np.testing.assert_allclose(b.E1, a.E1, rtol=1e-3)
    np.testing.assert_allclose(b.E2, a.E2, rtol=1e-3)


def test_joint_error_needs_shared_units():
    mesh = Mesh(4, 2.0)
    traj = build_interpolant(TZ2, np.zeros((5, 2, 2)), np.zeros((5, 2)), mesh, controls=np.zeros((5, 1)))
    report = integrate_errors(traj, cartpole())
    assert report.E2_joint is None and report.E1_joint is None
    assert report.summary(1)["joint"] is None
    with pytest.raises(UnitMismatchError):
        integrate_errors(traj, cartpole(), joint=True)


@pytest.mark.parametrize("S", [0, 6, 8, 9, 11, True])
def test_bad_sample_counts_are_rejected(S):
    ocp, traj = lifted_oscillator(4)
    with pytest.raises(ValidationError):
        integrate_errors(traj, ocp, S)


def test_bad_order_and_time_are_rejected():
    ocp, traj = collocated_oscillator(4)
    with pytest.raises(ValidationError):
        dynamic_error(traj, ocp, 3, 0.5)
    with pytest.raises(OutOfMeshError):
        dynamic_error(traj, ocp, 2, ocp.t_f + 1.0)
