"""Per-interval collocation steps for the trapezoidal and Hermite-Simpson families.

Every step goes through the coefficient form of the interval polynomial,

    q^(j)(tau) = sum_{i=j}^{d} a_i tau^(i-j) / (i-j)!,

with a_j = q_k^(j) for j < M and the top coefficients fixed by the
dynamics samples. Arrays carry the derivative level on axis 0 and any
trailing shape (intervals, coordinates) is broadcast.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from core.errors import ValidationError
from core.models import MAX_ORDER

FACTORIALS = tuple(math.factorial(i) for i in range(MAX_ORDER + 3))


def _check(M: int, h) -> None:
    if isinstance(M, bool) or not isinstance(M, (int, np.integer)):
        raise ValidationError(f"Order must be an integer, got {M!r}")
    if not 1 <= M <= MAX_ORDER:
        raise ValidationError(f"Order must be within 1..{MAX_ORDER}, got {M}")
    if not np.all(np.asarray(h) > 0):
        raise ValidationError("Interval width h must be > 0")


def _levels(M: int, y: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 0 or arr.shape[0] != M:
        raise ValidationError(f"{what} must have {M} derivative levels on axis 0")
    return arr


def taylor_eval(a: np.ndarray, tau, r: int = 0) -> np.ndarray:
    """r-th derivative of sum_i a_i tau^i / i! (coefficients on axis 0)."""
    d = a.shape[0] - 1
    if r > d:
        return np.zeros(np.broadcast(a[0], tau).shape)
    out = a[r] * 1.0
    p = tau
    for k in range(1, d - r + 1):
        out = out + a[r + k] * p / FACTORIALS[k]
        p = p * tau
    return np.broadcast_to(out, np.broadcast(a[0], tau).shape).copy()


def advance(a: np.ndarray, M: int, tau) -> np.ndarray:
    """Derivative levels 0..M-1 of the interval polynomial at tau."""
    return np.stack([taylor_eval(a, tau, j) for j in range(M)])


def tz_coefficients(M: int, y_k, g_k, g_k1, h) -> np.ndarray:
    _check(M, h)
    y = _levels(M, y_k, "y_k")
    g_k = np.asarray(g_k, dtype=float)
    g_k1 = np.asarray(g_k1, dtype=float)
    shape = np.broadcast(y[0], g_k, g_k1).shape
    a = np.empty((M + 2,) + shape)
    a[:M] = y
    a[M] = g_k
    a[M + 1] = (g_k1 - g_k) / h
    return a


def hs_coefficients(M: int, y_k, g_k, g_c, g_k1, h) -> np.ndarray:
    _check(M, h)
    y = _levels(M, y_k, "y_k")
    g_k, g_c, g_k1 = (np.asarray(g, dtype=float) for g in (g_k, g_c, g_k1))
    shape = np.broadcast(y[0], g_k, g_c, g_k1).shape
    a = np.empty((M + 3,) + shape)
    a[:M] = y
    a[M] = g_k
    a[M + 1] = -(3.0 * g_k - 4.0 * g_c + g_k1) / h
    a[M + 2] = 4.0 * (g_k - 2.0 * g_c + g_k1) / (h * h)
    return a


def eliminated_midpoint_coefficients(M: int, y_k, top_k1, g_k, g_k1, h) -> np.ndarray:
    """Hermite-Simpson coefficients with g_c replaced through the endpoint row.

    Isolating g_c from q_{k+1}^(M-1) = q_k^(M-1) + h/6 (g_k + 4 g_c + g_{k+1})
    gives g_c = 3 (q_{k+1}^(M-1) - q_k^(M-1)) / (2h) - (g_k + g_{k+1}) / 4;
    ``top_k1`` is q_{k+1}^(M-1).
    """
    _check(M, h)
    y = _levels(M, y_k, "y_k")
    g_k = np.asarray(g_k, dtype=float)
    g_k1 = np.asarray(g_k1, dtype=float)
    delta = np.asarray(top_k1, dtype=float) - y[M - 1]
    shape = np.broadcast(y[0], g_k, g_k1, delta).shape
    a = np.empty((M + 3,) + shape)
    a[:M] = y
    a[M] = g_k
    a[M + 1] = -(4.0 * g_k + 2.0 * g_k1) / h + 6.0 * delta / (h * h)
    a[M + 2] = 6.0 * (g_k + g_k1) / (h * h) - 12.0 * delta / (h * h * h)
    return a


def tz_step(M: int, y_k, g_k, g_k1, h) -> np.ndarray:
    """Trapezoidal-family prediction of (q, ..., q^(M-1)) at t_{k+1}."""
    a = tz_coefficients(M, y_k, g_k, g_k1, h)
    return advance(a, M, h)


def hs_midpoint(M: int, y_k, y_k1, g_k, g_k1, h) -> np.ndarray:
    """Midpoint stack from knot data only (g_c eliminated)."""
    y_k1 = _levels(M, y_k1, "y_k1")
    a = eliminated_midpoint_coefficients(M, y_k, y_k1[M - 1], g_k, g_k1, h)
    return advance(a, M, 0.5 * h)


def hs_step(
    M: int,
    y_k,
    y_k1: Optional[np.ndarray],
    g_k,
    g_c,
    g_k1,
    h,
    *,
    eliminate_gc: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """Hermite-Simpson prediction at t_{k+1} and at the midpoint.

    With ``eliminate_gc`` the midpoint stack uses the g_c-free form built
    from ``y_k1[M-1]``; otherwise it is the raw interval polynomial at h/2.
    """
    a = hs_coefficients(M, y_k, g_k, g_c, g_k1, h)
    y_end = advance(a, M, h)
    if not eliminate_gc:
        return y_end, advance(a, M, 0.5 * h)
    if y_k1 is None:
        raise ValidationError("y_k1 is required when eliminating g_c")
    return y_end, hs_midpoint(M, y_k, y_k1, g_k, g_k1, h)
