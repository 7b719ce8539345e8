"""Finite differences with column grouping.

Columns that never share a nonzero row can be perturbed together, so a
banded collocation Jacobian costs two evaluations per color rather than
two per variable. The same grouping gives weighted second derivatives
sum_r w_r d2F_r with one evaluation per pair of colors.
"""

from __future__ import annotations

from typing import Callable, List, Optional, Sequence

import numpy as np

from core.errors import DerivativeError, DimensionError
from core.models import SolveOptions

SECOND_ORDER_STEP = float(np.finfo(float).eps ** 0.25)


def _relative_step(opts: Optional[SolveOptions]) -> float:
    return (opts or SolveOptions()).fd_step


def group_columns(sparsity: np.ndarray) -> List[np.ndarray]:
    """Greedy coloring of columns with disjoint row supports."""
    pattern = np.asarray(sparsity, dtype=bool)
    m, n = pattern.shape
    used: List[np.ndarray] = []
    members: List[List[int]] = []
    for j in range(n):
        rows = pattern[:, j]
        for color, taken in enumerate(used):
            if not np.any(taken & rows):
                taken |= rows
                members[color].append(j)
                break
        else:
            used.append(rows.copy())
            members.append([j])
    return [np.asarray(cols, dtype=int) for cols in members]


def _groups(
    sparsity: Optional[np.ndarray], groups: Optional[Sequence[np.ndarray]], n: int
) -> Sequence[np.ndarray]:
    if groups is not None:
        return groups
    if sparsity is not None:
        return group_columns(sparsity)
    return [np.array([j]) for j in range(n)]


def finite_diff_jacobian(
    fn: Callable[[np.ndarray], np.ndarray],
    x,
    opts: Optional[SolveOptions] = None,
    *,
    sparsity: Optional[np.ndarray] = None,
    groups: Optional[Sequence[np.ndarray]] = None,
) -> np.ndarray:
    """Jacobian of a vector function, shape (m, n).

    The step for variable i is ``fd_step * max(1, |x_i|)``; the divisor is
    the realized difference of the perturbed points. ``groups`` reuses a
    coloring of ``sparsity`` computed earlier.

    Raises:
      DerivativeError naming the first variable whose perturbation gives a
      non-finite value.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    step = _relative_step(opts) * np.maximum(1.0, np.abs(x))

    groups = _groups(sparsity, groups, n)
    jac: Optional[np.ndarray] = None

    for cols in groups:
        x_plus = x.copy()
        x_minus = x.copy()
        x_plus[cols] += step[cols]
        x_minus[cols] -= step[cols]
        f_plus = np.atleast_1d(np.asarray(fn(x_plus), dtype=float))
        f_minus = np.atleast_1d(np.asarray(fn(x_minus), dtype=float))

        bad = ~(np.isfinite(f_plus) & np.isfinite(f_minus))
        if np.any(bad):
            culprit = cols[0]
            if sparsity is not None:
                hit = [j for j in cols if np.any(sparsity[bad, j])]
                culprit = hit[0] if hit else culprit
            raise DerivativeError(f"Non-finite value when perturbing variable {culprit}", index=int(culprit))

        if jac is None:
            jac = np.zeros((f_plus.size, n))
        diff = f_plus - f_minus
        denom = x_plus[cols] - x_minus[cols]
        if sparsity is None:
            jac[:, cols] = diff[:, None] / denom
        else:
            mask = np.asarray(sparsity[:, cols], dtype=bool)
            jac[:, cols] = np.where(mask, diff[:, None] / denom, 0.0)

    if jac is None:
        return np.zeros((0, n))
    return jac


def finite_diff_gradient(
    fn: Callable[[np.ndarray], float],
    x,
    opts: Optional[SolveOptions] = None,
) -> np.ndarray:
    """Gradient of a scalar function by central differences."""
    scalar = np.ndim(x) == 0
    grad = finite_diff_jacobian(lambda v: np.atleast_1d(fn(v[0] if scalar else v)), x, opts)[0]
    return grad[0] if scalar else grad


def finite_diff_hessian(
    fn: Callable[[np.ndarray], np.ndarray],
    x,
    weights,
    *,
    sparsity: Optional[np.ndarray] = None,
    groups: Optional[Sequence[np.ndarray]] = None,
) -> np.ndarray:
    """Weighted Hessian sum_r weights[r] * d2 fn_r(x), shape (n, n).

    Forward second differences over pairs of column groups. Within a group
    each row depends on at most one column, so the difference of row r for
    groups (a, b) is the single entry d2 fn_r / dx_i dx_j. The step for
    variable i is ``SECOND_ORDER_STEP * max(1, |x_i|)``.

    Raises:
      DerivativeError naming a variable whose perturbation gives a
      non-finite value.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    groups = _groups(sparsity, groups, n)
    step = (x + SECOND_ORDER_STEP * np.maximum(1.0, np.abs(x))) - x

    def evaluate(z: np.ndarray, culprit: int) -> np.ndarray:
        out = np.atleast_1d(np.asarray(fn(z), dtype=float))
        if not np.all(np.isfinite(out)):
            raise DerivativeError(f"Non-finite value when perturbing variable {culprit}", index=int(culprit))
        return out

    f0 = evaluate(x, 0)
    if w.shape != f0.shape:
        raise DimensionError(f"weights must have {f0.size} entries, got {w.size}")
    m = f0.size

    # owner[g][r]: the column of group g that row r depends on, or -1
    owners = []
    shifts = []
    for cols in groups:
        if sparsity is None:
            owners.append(np.full(m, cols[0]))
        else:
            sub = np.asarray(sparsity[:, cols], dtype=bool)
            owners.append(np.where(sub.any(axis=1), cols[np.argmax(sub, axis=1)], -1))
        e = np.zeros(n)
        e[cols] = step[cols]
        shifts.append(e)

    singles = [evaluate(x + e, int(cols[0])) for cols, e in zip(groups, shifts)]
    H = np.zeros((n, n))
    for a in range(len(groups)):
        for b in range(a, len(groups)):
            rows = (owners[a] >= 0) & (owners[b] >= 0) & (w != 0.0)
            if not np.any(rows):
                continue
            f_ab = evaluate(x + shifts[a] + shifts[b], int(groups[a][0]))
            d = f_ab - singles[a] - singles[b] + f0
            i, j = owners[a][rows], owners[b][rows]
            vals = w[rows] * d[rows] / (step[i] * step[j])
            np.add.at(H, (i, j), vals)
            if a != b:
                np.add.at(H, (j, i), vals)
    return H
