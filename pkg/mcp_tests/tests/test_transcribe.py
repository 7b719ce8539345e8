import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from core.errors import DimensionError, SchemeMismatchError, ValidationError
from core.models import Family, HSForm, Mesh, SchemeId
from model.ocp import OcpDefinition
from problems.cartpole import cartpole
from problems.triple_integrator import triple_integrator
from transcribe.guess import assemble_initial_guess, guess_from_trajectory
from transcribe.layout import VariableLayout
from transcribe.nlp import problem_size, transcribe
from transcribe.quadrature import quadrature_cost, quadrature_weights
from transcribe.transcription import Transcription

TZ1 = SchemeId(Family.TRAPEZOIDAL, 1)
TZ2 = SchemeId(Family.TRAPEZOIDAL, 2)
HS1 = SchemeId(Family.HERMITE_SIMPSON, 1)
HS2 = SchemeId(Family.HERMITE_SIMPSON, 2)
HS2C = SchemeId(Family.HERMITE_SIMPSON, 2, HSForm.COMPRESSED)


def _control(levels, u, t):
    return np.array(u, dtype=float)


def _energy(x, u, t):
    return np.sum(u * u, axis=-1)


def single_integrator() -> OcpDefinition:
    """x' = u from x(0) = 0 on [0, 1]."""
    return OcpDefinition(
        n_q=1,
        n_u=1,
        order=1,
        dynamics=_control,
        t_f=1.0,
        running_cost=_energy,
        boundary_constraints=lambda x0, xf, t_f: x0,
        n_b=1,
    )


def double_integrator() -> OcpDefinition:
    return OcpDefinition(n_q=1, n_u=1, order=2, dynamics=_control, t_f=1.0, running_cost=_energy)


def _exact_cubic_z(nlp) -> np.ndarray:
    # q = t^3 / 6, q' = t^2 / 2, u = t satisfies q'' = u
    lay, mesh = nlp.layout, nlp.transcription.mesh

    def states(t):
        return np.stack([t**3 / 6.0, t**2 / 2.0], axis=-1)

    z = np.zeros(lay.n_vars)
    z[lay.state_idx] = states(mesh.knots)
    z[lay.control_idx] = mesh.knots[:, None]
    if lay.mid_state_idx is not None:
        z[lay.mid_state_idx] = states(mesh.midpoints)
    if lay.mid_control_idx is not None:
        z[lay.mid_control_idx] = mesh.midpoints[:, None]
    return z


# ---- sizes ----


@pytest.mark.parametrize(
    "scheme,N,expected",
    [
        (TZ2, 50, (255, 208, 47)),
        (TZ1, 50, (255, 208, 47)),
        (HS2, 25, (255, 208, 47)),
        (HS2C, 25, (155, 108, 47)),
    ],
)
def test_cartpole_problem_sizes(scheme, N, expected):
    size = problem_size(scheme, 4, 1, 8, N)
    assert (size.n_vars, size.n_eq, size.n_dof) == expected

    nlp = transcribe(cartpole(), scheme, Mesh(N, 2.0))
    assert (nlp.n_vars, nlp.n_eq, nlp.n_dof) == expected
    assert nlp.n_ineq == 0
    assert nlp.lower.shape == nlp.upper.shape == (nlp.n_vars,)


@given(
    n_x=st.integers(1, 12),
    n_u=st.integers(1, 4),
    n_b=st.integers(0, 8),
    N=st.integers(1, 200),
)
def test_equal_size_at_twice_the_intervals(n_x, n_u, n_b, N):
    tz = problem_size(TZ2, n_x, n_u, n_b, 2 * N)
    hs = problem_size(HS2, n_x, n_u, n_b, N)
    hsc = problem_size(HS2C, n_x, n_u, n_b, N)
    assert (tz.n_vars, tz.n_eq) == (hs.n_vars, hs.n_eq)
    assert hsc.n_dof == hs.n_dof
    assert hsc.n_vars < hs.n_vars


def test_scheme_order_must_fit_problem():
    with pytest.raises(SchemeMismatchError):
        transcribe(triple_integrator(), TZ2, Mesh(4, 1.0))
    # order-1 schemes lift instead
    nlp = transcribe(triple_integrator(), TZ1, Mesh(4, 1.0))
    assert nlp.transcription.ocp.order == 1
    assert nlp.transcription.source.order == 3


# ---- residuals ----


def test_tz1_single_interval_rows():
    nlp = transcribe(single_integrator(), TZ1, Mesh(1, 1.0))
    eq = nlp.eq_constraints(np.array([0.2, 1.0, 0.7, 3.0]))
    np.testing.assert_allclose(eq, [-1.5, 0.2])


def test_evaluate_rejects_wrong_length():
    nlp = transcribe(single_integrator(), TZ1, Mesh(1, 1.0))
    with pytest.raises(DimensionError):
        nlp.eq_constraints(np.zeros(3))


@pytest.mark.parametrize("scheme", [TZ2, HS2, HS2C])
def test_exact_cubic_has_zero_defects(scheme):
    nlp = transcribe(double_integrator(), scheme, Mesh(5, 1.0))
    z = _exact_cubic_z(nlp)
    assert np.max(np.abs(nlp.eq_constraints(z))) <= 1e-10


def test_stacked_vector_layout():
    nlp = transcribe(cartpole(), HS2, Mesh(3, 2.0))
    z = np.random.default_rng(0).uniform(-1, 1, nlp.n_vars)
    stacked = nlp.stacked(z)
    assert stacked.shape == (nlp.n_cost_terms + nlp.n_eq + nlp.n_ineq,)
    np.testing.assert_array_equal(stacked[nlp.n_cost_terms :], nlp.eq_constraints(z))
    assert nlp.cost(z) == pytest.approx(np.sum(stacked[: nlp.n_cost_terms]))


@pytest.mark.parametrize("scheme", [TZ1, TZ2, HS2, HS2C])
def test_sparsity_pattern_covers_dependencies(scheme):
    nlp = transcribe(cartpole(), scheme, Mesh(3, 2.0))
    rng = np.random.default_rng(1)
    z = rng.uniform(-1, 1, nlp.n_vars)
    base = nlp.stacked(z)
    for j in range(nlp.n_vars):
        zp = z.copy()
        zp[j] += 1e-3
        changed = np.abs(nlp.stacked(zp) - base) > 0
        assert not np.any(changed & ~nlp.sparsity[:, j]), f"column {j}"


# ---- quadrature ----


def test_quadrature_weights():
    w = quadrature_weights(TZ2, Mesh(2, 2.0))
    np.testing.assert_allclose(w, [0.5, 1.0, 0.5])
    assert w.sum() == pytest.approx(2.0)

    t = Mesh(2, 1.0).knots
    assert quadrature_weights(TZ2, Mesh(2, 1.0)) @ t**2 == pytest.approx(0.375)

    w = quadrature_weights(HS2, Mesh(1, 1.0))
    np.testing.assert_allclose(w, [1 / 6, 2 / 3, 1 / 6])
    assert w @ np.array([0.0, 0.25, 1.0]) == pytest.approx(1 / 3)


def test_quadrature_cost_of_u_equals_t():
    ocp = double_integrator()
    nlp = transcribe(ocp, TZ2, Mesh(4, 1.0))
    assert quadrature_cost(ocp, TZ2, Mesh(4, 1.0), _exact_cubic_z(nlp)) == pytest.approx(0.34375)
    nlp = transcribe(ocp, HS2, Mesh(4, 1.0))
    assert nlp.cost(_exact_cubic_z(nlp)) == pytest.approx(1 / 3)


# ---- layout ----


def test_layout_index_of():
    lay = VariableLayout.build(TZ2, Mesh(2, 1.0), n_q=2, n_u=1)
    assert lay.n_vars == 15
    assert lay.index_of(1, 1, 0) == 7
    assert lay.index_of(1, "u", 0) == 9
    with pytest.raises(ValidationError):
        lay.index_of(0, 0, 0, midpoint=True)
    with pytest.raises(ValidationError):
        lay.index_of(0, 2, 0)

    lay = VariableLayout.build(HS2, Mesh(2, 1.0), n_q=2, n_u=1)
    assert lay.index_of(0, 0, 1, midpoint=True) == 6
    assert lay.index_of(1, 0, 0) == 10

    lay = VariableLayout.build(HS2C, Mesh(2, 1.0), n_q=2, n_u=1)
    assert lay.index_of(0, "u", 0, midpoint=True) == 5
    assert lay.index_of(1, 0, 0) == 6
    assert lay.mid_state_idx is None


def test_layout_indices_are_a_permutation():
    for scheme in (TZ2, HS2, HS2C):
        lay = VariableLayout.build(scheme, Mesh(3, 1.0), n_q=2, n_u=1)
        parts = [lay.state_idx, lay.control_idx, lay.mid_state_idx, lay.mid_control_idx]
        every = np.sort(np.concatenate([p.reshape(-1) for p in parts if p is not None]))
        np.testing.assert_array_equal(every, np.arange(lay.n_vars))


# ---- initial guesses ----


def test_assemble_initial_guess_interpolates_waypoints():
    ocp = single_integrator()
    z = assemble_initial_guess(ocp, TZ1, Mesh(2, 1.0), [0.0, 1.0])
    lay = Transcription.build(ocp, TZ1, Mesh(2, 1.0)).layout
    np.testing.assert_allclose(z[lay.state_idx[:, 0]], [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(z[lay.control_idx], 0.0)

    z = assemble_initial_guess(ocp, TZ1, Mesh(4, 1.0), [0.0, 2.0, 0.0])
    lay = Transcription.build(ocp, TZ1, Mesh(4, 1.0)).layout
    np.testing.assert_allclose(z[lay.state_idx[:, 0]], [0.0, 1.0, 2.0, 1.0, 0.0])


def test_assemble_initial_guess_fills_midpoints():
    ocp = single_integrator()
    z = assemble_initial_guess(ocp, HS1, Mesh(1, 1.0), [0.0, 1.0])
    lay = Transcription.build(ocp, HS1, Mesh(1, 1.0)).layout
    assert z[lay.mid_state_idx[0, 0]] == pytest.approx(0.5)


def test_assemble_initial_guess_errors():
    ocp = single_integrator()
    with pytest.raises(ValidationError):
        assemble_initial_guess(ocp, TZ1, Mesh(2, 1.0), [])
    with pytest.raises(ValidationError):
        assemble_initial_guess(ocp, TZ1, Mesh(2, 1.0), [0.0, 1.0], times=[0.5, 0.5])
    with pytest.raises(DimensionError):
        assemble_initial_guess(cartpole(), TZ2, Mesh(2, 2.0), [[0.0, 1.0, 2.0]])


def test_guess_from_trajectory_reproduces_cubic():
    ocp = double_integrator()
    coarse = transcribe(ocp, TZ2, Mesh(4, 1.0))
    traj = coarse.transcription.trajectory(_exact_cubic_z(coarse))

    fine = transcribe(ocp, HS2, Mesh(8, 1.0))
    z = guess_from_trajectory(ocp, HS2, Mesh(8, 1.0), traj)
    np.testing.assert_allclose(z, _exact_cubic_z(fine), atol=1e-12)


def test_guess_from_trajectory_checks_dimensions():
    ocp = double_integrator()
    coarse = transcribe(ocp, TZ2, Mesh(4, 1.0))
    traj = coarse.transcription.trajectory(_exact_cubic_z(coarse))
    with pytest.raises(DimensionError):
        guess_from_trajectory(cartpole(), TZ2, Mesh(4, 2.0), traj)
