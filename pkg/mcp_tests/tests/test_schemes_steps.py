import math

import numpy as np
import pytest
from numpy.polynomial import Polynomial

from core.errors import ValidationError
from schemes.steps import (
    eliminated_midpoint_coefficients,
    hs_coefficients,
    hs_midpoint,
    hs_step,
    taylor_eval,
    tz_step,
)

RNG_SEED = 20240611


def _random_inputs(n=1000):
    rng = np.random.default_rng(RNG_SEED)
    return {
        "x": rng.uniform(-2, 2, n),
        "v": rng.uniform(-2, 2, n),
        "x1": rng.uniform(-2, 2, n),
        "v1": rng.uniform(-2, 2, n),
        "gk": rng.uniform(-2, 2, n),
        "gc": rng.uniform(-2, 2, n),
        "gk1": rng.uniform(-2, 2, n),
        "h": rng.uniform(0.01, 1.0, n),
    }


# ---- documented examples ----


def test_tz_step_first_order_constant_slope():
    np.testing.assert_allclose(tz_step(1, [0.0], 1.0, 1.0, 1.0), [1.0])


def test_tz_step_second_order_constant_acceleration():
    np.testing.assert_allclose(tz_step(2, [0.0, 0.0], 2.0, 2.0, 1.0), [1.0, 2.0])


def test_tz_step_third_order_cubic():
    np.testing.assert_allclose(tz_step(3, [0.0, 0.0, 0.0], 6.0, 6.0, 1.0), [1.0, 3.0, 6.0])


def test_hs_step_first_order_constant_slope():
    y_end, y_mid = hs_step(1, [0.0], [1.0], 1.0, 1.0, 1.0, 1.0)
    np.testing.assert_allclose(y_end, [1.0])
    np.testing.assert_allclose(y_mid, [0.5])


def test_hs_step_second_order_quadratic():
    y_end, y_mid = hs_step(2, [0.0, 0.0], [1.0, 2.0], 2.0, 2.0, 2.0, 1.0)
    np.testing.assert_allclose(y_end, [1.0, 2.0])
    np.testing.assert_allclose(y_mid, [0.25, 1.0])


def test_hs_step_second_order_quartic():
    # q = t^4, g = 12 t^2
    y_end, _ = hs_step(2, [0.0, 0.0], None, 0.0, 3.0, 12.0, 1.0, eliminate_gc=False)
    np.testing.assert_allclose(y_end, [1.0, 4.0], rtol=1e-14)


@pytest.mark.parametrize("M,h", [(0, 1.0), (1, 0.0), (2, -0.5), (19, 1.0)])
def test_steps_reject_bad_input(M, h):
    with pytest.raises(ValidationError):
        tz_step(M, np.zeros(max(M, 1)), 0.0, 0.0, h)
    with pytest.raises(ValidationError):
        hs_step(M, np.zeros(max(M, 1)), np.zeros(max(M, 1)), 0.0, 0.0, 0.0, h)


def test_hs_step_needs_endpoint_when_eliminating():
    with pytest.raises(ValidationError):
        hs_step(2, [0.0, 0.0], None, 0.0, 0.0, 0.0, 1.0)


# ---- reductions to the first- and second-order collocation rows ----


def test_tz1_matches_trapezoid_rule():
    d = _random_inputs()
    got = tz_step(1, d["x"][None], d["gk"], d["gk1"], d["h"])[0]
    expected = d["x"] + d["h"] / 2 * (d["gk"] + d["gk1"])
    np.testing.assert_allclose(got, expected, rtol=1e-13, atol=1e-13)


def test_tz2_matches_rows():
    d = _random_inputs()
    h = d["h"]
    got = tz_step(2, np.stack([d["x"], d["v"]]), d["gk"], d["gk1"], h)
    q1 = d["x"] + d["v"] * h + h**2 / 6 * (d["gk1"] + 2 * d["gk"])
    v1 = d["v"] + h / 2 * (d["gk1"] + d["gk"])
    np.testing.assert_allclose(got[0], q1, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(got[1], v1, rtol=1e-13, atol=1e-13)


def test_hs1_matches_simpson_rows():
    d = _random_inputs()
    h = d["h"]
    y_end, y_mid = hs_step(1, d["x"][None], d["x1"][None], d["gk"], d["gc"], d["gk1"], h)
    np.testing.assert_allclose(y_end[0], d["x"] + h / 6 * (d["gk"] + 4 * d["gc"] + d["gk1"]), rtol=1e-13, atol=1e-13)
    mid = 0.5 * (d["x"] + d["x1"]) + h / 8 * (d["gk"] - d["gk1"])
    np.testing.assert_allclose(y_mid[0], mid, rtol=1e-13, atol=1e-13)


def test_hs2_matches_rows():
    d = _random_inputs()
    h = d["h"]
    y_k = np.stack([d["x"], d["v"]])
    y_k1 = np.stack([d["x1"], d["v1"]])
    y_end, y_mid = hs_step(2, y_k, y_k1, d["gk"], d["gc"], d["gk1"], h)

    q1 = d["x"] + d["v"] * h + h**2 / 6 * (d["gk"] + 2 * d["gc"])
    v1 = d["v"] + h / 6 * (d["gk"] + 4 * d["gc"] + d["gk1"])
    qc = d["x"] + h / 32 * (13 * d["v"] + 3 * d["v1"]) + h**2 / 192 * (11 * d["gk"] - 5 * d["gk1"])
    vc = 0.5 * (d["v"] + d["v1"]) + h / 8 * (d["gk"] - d["gk1"])
    np.testing.assert_allclose(y_end[0], q1, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(y_end[1], v1, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(y_mid[0], qc, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(y_mid[1], vc, rtol=1e-12, atol=1e-13)


def test_eliminated_midpoint_equals_raw_when_endpoint_consistent():
    rng = np.random.default_rng(RNG_SEED)
    for M in (1, 2, 3, 5):
        y_k = rng.uniform(-1, 1, (M, 100))
        g_k, g_c, g_k1 = rng.uniform(-1, 1, (3, 100))
        h = 0.3
        y_end, raw_mid = hs_step(M, y_k, None, g_k, g_c, g_k1, h, eliminate_gc=False)
        elim_mid = hs_midpoint(M, y_k, y_end, g_k, g_k1, h)
        np.testing.assert_allclose(elim_mid, raw_mid, rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("M", [1, 2, 3, 4, 6])
def test_general_midpoint_row(M):
    # closed-form row for level M - l, with q_k^(M-1) weighted by (l+1)(2l^2 + 4l - 3)
    rng = np.random.default_rng(M)
    y_k = rng.uniform(-1, 1, M)
    y_k1 = rng.uniform(-1, 1, M)
    g_k, g_k1, h = rng.uniform(-1, 1), rng.uniform(-1, 1), 0.7
    mid = hs_midpoint(M, y_k, y_k1, g_k, g_k1, h)

    half = h / 2
    for l in range(1, M + 1):
        j = M - l
        den = 2 * math.factorial(l + 2)
        expected = sum(y_k[i] * half ** (i - j) / math.factorial(i - j) for i in range(j, M - 1))
        expected += half ** (l - 1) * (l + 1) * (2 * l * l + 4 * l - 3) / den * y_k[M - 1]
        expected += half ** (l - 1) * 3 * (l + 1) / den * y_k1[M - 1]
        expected += half**l * (2 * l * l + 2 * l - 1) / den * g_k
        expected -= half**l * (2 * l + 1) / den * g_k1
        assert mid[j] == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_eliminated_coefficients_top_level_is_average():
    a = eliminated_midpoint_coefficients(1, [0.2], 1.4, 0.5, -0.3, 0.8)
    assert taylor_eval(a, 0.4, 0) == pytest.approx(0.5 * (0.2 + 1.4) + 0.8 / 8 * (0.5 + 0.3), rel=1e-14)


# ---- exactness classes ----


def _poly_samples(p: Polynomial, M: int, t_k: float, h: float):
    y_k = np.array([p.deriv(j)(t_k) if j else p(t_k) for j in range(M)])
    y_k1 = np.array([p.deriv(j)(t_k + h) if j else p(t_k + h) for j in range(M)])
    g = p.deriv(M)
    return y_k, y_k1, g(t_k), g(t_k + h / 2), g(t_k + h)


@pytest.mark.parametrize("M", [1, 2, 3, 5])
def test_trapezoidal_exact_up_to_degree_m_plus_1(M):
    rng = np.random.default_rng(100 + M)
    for _ in range(20):
        p = Polynomial(rng.uniform(-1, 1, M + 2))
        t_k, h = rng.uniform(-1, 1), rng.uniform(0.1, 1.0)
        y_k, y_k1, g_k, _, g_k1 = _poly_samples(p, M, t_k, h)
        np.testing.assert_allclose(tz_step(M, y_k, g_k, g_k1, h), y_k1, rtol=1e-11, atol=1e-11)


@pytest.mark.parametrize("M", [1, 2, 3, 5])
def test_hermite_simpson_exact_up_to_degree_m_plus_2(M):
    rng = np.random.default_rng(200 + M)
    for _ in range(20):
        p = Polynomial(rng.uniform(-1, 1, M + 3))
        t_k, h = rng.uniform(-1, 1), rng.uniform(0.1, 1.0)
        y_k, y_k1, g_k, g_c, g_k1 = _poly_samples(p, M, t_k, h)
        y_end, y_mid = hs_step(M, y_k, y_k1, g_k, g_c, g_k1, h)
        np.testing.assert_allclose(y_end, y_k1, rtol=1e-11, atol=1e-11)
        mid = np.array([p.deriv(j)(t_k + h / 2) if j else p(t_k + h / 2) for j in range(M)])
        np.testing.assert_allclose(y_mid, mid, rtol=1e-11, atol=1e-11)


@pytest.mark.parametrize("M", [2, 3])
def test_trapezoidal_not_exact_one_degree_higher(M):
    p = Polynomial([0.0] * (M + 2) + [1.0])
    y_k, y_k1, g_k, _, g_k1 = _poly_samples(p, M, 0.0, 1.0)
    assert np.max(np.abs(tz_step(M, y_k, g_k, g_k1, 1.0) - y_k1)) > 1e-3


def test_hs1_exact_on_quartics_when_dynamics_depend_on_time_only():
    # x' = f(t) with f cubic: the endpoint row is Simpson's rule
    rng = np.random.default_rng(7)
    for _ in range(20):
        x = Polynomial(rng.uniform(-1, 1, 5))
        f = x.deriv()
        t_k, h = rng.uniform(-1, 1), rng.uniform(0.1, 1.0)
        y_end, _ = hs_step(1, [x(t_k)], None, f(t_k), f(t_k + h / 2), f(t_k + h), h, eliminate_gc=False)
        assert y_end[0] == pytest.approx(x(t_k + h), rel=1e-11, abs=1e-11)


def test_taylor_eval_beyond_degree_is_zero():
    a = hs_coefficients(1, [1.0], 1.0, 1.0, 1.0, 1.0)
    assert taylor_eval(a, 0.5, 4) == 0.0
