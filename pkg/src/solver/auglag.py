"""Augmented-Lagrangian solver with a structured quasi-Newton inner loop.

Each inner iteration minimizes

    phi = f + lam.c + rho/2 |c|^2 + 1/(2 rho) sum(max(0, mu + rho h)^2 - mu^2)

with the model B + rho Je^T Je + rho Ja^T Ja (Ja: rows with mu + rho h > 0).
B approximates the second-order terms sum_r w_r d2F_r, w being the cost
weights and the effective multipliers lam + rho c, max(0, mu + rho h). It
is rebuilt from grouped second differences at the start of every inner
solve and after any step that needed backtracking, and SR1-updated from
the structured secant pair otherwise. A shifted Cholesky factorization
gives the step and an Armijo backtracking search accepts it. Variable
bounds become linear inequality rows.

Outer iterations follow a tolerance schedule. When the violation is at
most eta the multipliers take the first-order update and both eta and the
inner tolerance omega are tightened; otherwise the penalty grows and eta,
omega are reset from it. Neither drops below kkt_tol.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from config import MAX_PENALTY
from core.errors import DerivativeError, DimensionError
from core.models import Solution, SolveOptions, SolveStatus
from solver.derivatives import finite_diff_hessian, finite_diff_jacobian, group_columns
from transcribe.nlp import Nlp

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-12
SR1_SKIP = 1e-8
MAX_SHIFTS = 40

# tolerance schedule: eta = ETA0 rho^-ETA_RESET after a penalty increase,
# eta /= rho^ETA_TIGHTEN after a multiplier update; omega likewise with 1, 1
ETA0 = 0.1
ETA_RESET = 0.1
ETA_TIGHTEN = 0.9
OMEGA0 = 1.0


@dataclass(frozen=True)
class _BoundRows:
    lower_idx: np.ndarray
    upper_idx: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    jac: np.ndarray

    @classmethod
    def build(cls, nlp: Nlp) -> "_BoundRows":
        lower = np.asarray(nlp.lower, dtype=float)
        upper = np.asarray(nlp.upper, dtype=float)
        lo = np.flatnonzero(np.isfinite(lower))
        hi = np.flatnonzero(np.isfinite(upper))
        jac = np.zeros((lo.size + hi.size, nlp.n_vars))
        jac[np.arange(lo.size), lo] = -1.0
        jac[lo.size + np.arange(hi.size), hi] = 1.0
        return cls(lower_idx=lo, upper_idx=hi, lower=lower[lo], upper=upper[hi], jac=jac)

    def values(self, z: np.ndarray) -> np.ndarray:
        return np.concatenate([self.lower - z[self.lower_idx], z[self.upper_idx] - self.upper])


@dataclass(frozen=True)
class _Point:
    z: np.ndarray
    f: float
    c: np.ndarray
    h: np.ndarray
    grad_f: Optional[np.ndarray] = None
    Je: Optional[np.ndarray] = None
    Jh: Optional[np.ndarray] = None

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.f) and np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.h)))


class _Evaluator:
    def __init__(self, nlp: Nlp, opts: SolveOptions) -> None:
        self.nlp = nlp
        self.opts = opts
        self.bounds = _BoundRows.build(nlp)
        self.nt = nlp.n_cost_terms
        self.ne = nlp.n_eq
        self.groups: Optional[Sequence[np.ndarray]] = (
            group_columns(nlp.sparsity) if nlp.sparsity is not None else None
        )

    @property
    def n_ineq(self) -> int:
        return self.nlp.n_ineq + self.bounds.jac.shape[0]

    def point(self, z: np.ndarray) -> _Point:
        F = np.asarray(self.nlp.stacked(z), dtype=float)
        nt, ne = self.nt, self.ne
        return _Point(
            z=z,
            f=float(np.sum(F[:nt])),
            c=F[nt : nt + ne],
            h=np.concatenate([F[nt + ne :], self.bounds.values(z)]),
        )

    def with_derivatives(self, p: _Point) -> _Point:
        if self.nlp.jacobian is not None:
            J = np.asarray(self.nlp.jacobian(p.z), dtype=float)
        else:
            J = finite_diff_jacobian(
                self.nlp.stacked, p.z, self.opts, sparsity=self.nlp.sparsity, groups=self.groups
            )
        nt, ne = self.nt, self.ne
        return replace(
            p,
            grad_f=J[:nt].sum(axis=0),
            Je=J[nt : nt + ne],
            Jh=np.vstack([J[nt + ne :], self.bounds.jac]),
        )

    def second_order(self, p: _Point, lam: np.ndarray, mu: np.ndarray, rho: float) -> np.ndarray:
        """sum_r w_r d2F_r over the stacked rows; bound rows are linear."""
        shifted = np.maximum(0.0, mu + rho * p.h)[: self.nlp.n_ineq]
        weights = np.concatenate([np.ones(self.nt), lam + rho * p.c, shifted])
        return finite_diff_hessian(
            self.nlp.stacked, p.z, weights, sparsity=self.nlp.sparsity, groups=self.groups
        )


def _merit(p: _Point, lam: np.ndarray, mu: np.ndarray, rho: float) -> float:
    shifted = np.maximum(0.0, mu + rho * p.h)
    return float(p.f + lam @ p.c + 0.5 * rho * (p.c @ p.c) + (shifted @ shifted - mu @ mu) / (2.0 * rho))


def _merit_grad(p: _Point, lam: np.ndarray, mu: np.ndarray, rho: float) -> np.ndarray:
    return p.grad_f + p.Je.T @ (lam + rho * p.c) + p.Jh.T @ np.maximum(0.0, mu + rho * p.h)


def _gauss_newton(p: _Point, mu: np.ndarray, rho: float) -> np.ndarray:
    Je = sparse.csr_matrix(p.Je)
    Ja = sparse.csr_matrix(p.Jh[(mu + rho * p.h) > 0.0])
    return (Je.T @ Je + Ja.T @ Ja).toarray()


def _violation(p: _Point) -> float:
    eq = float(np.max(np.abs(p.c))) if p.c.size else 0.0
    ineq = float(np.max(p.h)) if p.h.size else 0.0
    return max(eq, ineq, 0.0)


class _ShiftedCholesky:
    """Solve H d = -g, adding tau I until H + tau I is positive definite."""

    def __init__(self) -> None:
        self.last = 0.0

    def direction(self, H: np.ndarray, g: np.ndarray) -> np.ndarray:
        diag = np.diag(H)
        if not diag.size:
            return -g
        beta = 1e-10 * max(1.0, float(np.max(np.abs(diag))))
        tau = 0.0 if float(np.min(diag)) > 0.0 else beta - float(np.min(diag))
        for _ in range(MAX_SHIFTS):
            shifted = H.copy()
            shifted[np.diag_indices_from(shifted)] += tau
            try:
                factor = cho_factor(shifted)
            except LinAlgError:
                tau = max(10.0 * tau, beta, 0.1 * self.last)
                continue
            self.last = tau
            return -cho_solve(factor, g)
        return -g


class _Curvature:
    """Second-order terms of the merit Hessian, reset from differences and SR1-updated."""

    def __init__(self, n: int) -> None:
        self.B = np.zeros((n, n))

    def reset(self, B: np.ndarray) -> None:
        self.B = 0.5 * (B + B.T)

    def update(self, s: np.ndarray, y: np.ndarray) -> None:
        r = y - self.B @ s
        rs = float(r @ s)
        if not np.isfinite(rs) or abs(rs) <= SR1_SKIP * float(np.linalg.norm(r) * np.linalg.norm(s)):
            return
        self.B += np.outer(r, r) / rs


def _minimize_inner(
    ev: _Evaluator,
    p: _Point,
    lam: np.ndarray,
    mu: np.ndarray,
    rho: float,
    tol: float,
) -> Tuple[_Point, int, bool]:
    """Minimize phi from p until max|grad phi| <= tol; returns (point, iterations, reached)."""
    opts = ev.opts
    curv = _Curvature(ev.nlp.n_vars)
    chol = _ShiftedCholesky()
    phi = _merit(p, lam, mu, rho)
    g = _merit_grad(p, lam, mu, rho)
    refresh = True

    for it in range(opts.max_inner_iters):
        if float(np.max(np.abs(g))) <= tol:
            return p, it, True

        if refresh:
            curv.reset(ev.second_order(p, lam, mu, rho))
        H = curv.B + rho * _gauss_newton(p, mu, rho)
        step = chol.direction(H, g)
        slope = float(g @ step)
        if not slope < 0.0:
            step, slope = -g, -float(g @ g)

        alpha = 1.0
        while True:
            trial = ev.point(p.z + alpha * step)
            if trial.finite and _merit(trial, lam, mu, rho) <= phi + ARMIJO * alpha * slope:
                break
            alpha *= 0.5
            if alpha < MIN_STEP:
                return p, it + 1, False
        refresh = alpha < 1.0

        trial = ev.with_derivatives(trial)
        if not refresh:
            s = trial.z - p.z
            y = (
                (trial.grad_f - p.grad_f)
                + (trial.Je - p.Je).T @ (lam + rho * trial.c)
                + (trial.Jh - p.Jh).T @ np.maximum(0.0, mu + rho * trial.h)
            )
            curv.update(s, y)

        p = trial
        phi = _merit(p, lam, mu, rho)
        g = _merit_grad(p, lam, mu, rho)

    return p, opts.max_inner_iters, float(np.max(np.abs(g))) <= tol


def _diverged(z: np.ndarray, f: float, message: str, iterations: int = 0) -> Solution:
    logger.info("solve diverged: %s", message)
    return Solution(
        z=z,
        cost=f,
        kkt_residual=float("inf"),
        constraint_violation=float("inf"),
        iterations=iterations,
        status=SolveStatus.DIVERGED,
        message=message,
    )


def solve(nlp: Nlp, guess, opts: Optional[SolveOptions] = None) -> Solution:
    """Minimize an Nlp from a starting point.

    Never raises on non-convergence: the best iterate seen (smallest
    max(kkt_residual, constraint_violation)) is returned with status
    ``max_iters``; non-finite values at the guess give ``diverged``.

    Raises:
      DimensionError when the guess does not have n_vars entries.
    """
    opts = opts or SolveOptions()
    z0 = np.asarray(guess, dtype=float).reshape(-1).copy()
    if z0.shape != (nlp.n_vars,):
        raise DimensionError(f"Guess must have {nlp.n_vars} entries, got {z0.size}")
    z0 = np.clip(z0, nlp.lower, nlp.upper)

    ev = _Evaluator(nlp, opts)
    point = ev.point(z0)
    if not point.finite:
        return _diverged(z0, point.f, "non-finite cost or constraint values at the initial guess")
    try:
        point = ev.with_derivatives(point)
    except DerivativeError as e:
        return _diverged(z0, point.f, str(e))

    tol = opts.kkt_tol
    lam = np.zeros(ev.ne)
    mu = np.zeros(ev.n_ineq)
    rho = float(opts.penalty_init)
    eta = max(ETA0 * rho**-ETA_RESET, tol)
    omega = max(OMEGA0 / rho, tol)
    inner_total = 0
    best: Optional[Tuple[float, Solution]] = None

    for outer in range(1, opts.max_outer_iters + 1):
        try:
            point, inner, reached = _minimize_inner(ev, point, lam, mu, rho, omega)
        except DerivativeError as e:
            if best is not None:
                return replace(best[1], status=SolveStatus.DIVERGED, message=str(e))
            return _diverged(point.z, point.f, str(e), outer)
        inner_total += inner

        # grad phi equals the Lagrangian gradient at the updated multipliers
        grad_lagrangian = _merit_grad(point, lam, mu, rho)
        lam_next = lam + rho * point.c
        mu_next = np.maximum(0.0, mu + rho * point.h)

        violation = _violation(point)
        stationarity = float(np.max(np.abs(grad_lagrangian))) if grad_lagrangian.size else 0.0
        complementarity = float(np.max(np.abs(np.minimum(mu_next, -point.h)))) if mu_next.size else 0.0
        kkt = max(stationarity, complementarity)
        logger.debug(
            "outer %d: rho=%.1e eta=%.1e omega=%.1e violation=%.3e kkt=%.3e inner=%d%s cost=%.10g",
            outer,
            rho,
            eta,
            omega,
            violation,
            kkt,
            inner,
            "" if reached else " (inner stopped early)",
            point.f,
        )

        current = Solution(
            z=point.z.copy(),
            cost=point.f,
            kkt_residual=kkt,
            constraint_violation=violation,
            iterations=outer,
            status=SolveStatus.MAX_ITERS,
            inner_iterations=inner_total,
            eq_multipliers=lam_next.copy(),
            ineq_multipliers=mu_next[: nlp.n_ineq].copy(),
        )
        score = max(kkt, violation)
        if best is None or score < best[0]:
            best = (score, current)

        if kkt <= tol and violation <= tol:
            logger.info("solve converged in %d outer / %d inner iterations", outer, inner_total)
            return replace(current, status=SolveStatus.CONVERGED, message="converged")

        if violation <= eta:
            lam, mu = lam_next, mu_next
            eta = max(eta / rho**ETA_TIGHTEN, tol)
            omega = max(omega / rho, tol)
        else:
            rho = min(rho * opts.penalty_growth, MAX_PENALTY)
            eta = max(ETA0 * rho**-ETA_RESET, tol)
            omega = max(OMEGA0 / rho, tol)

    result = replace(
        best[1],
        iterations=opts.max_outer_iters,
        inner_iterations=inner_total,
        message=f"no convergence within {opts.max_outer_iters} outer iterations",
    )
    logger.info(
        "solve stopped: kkt=%.3e violation=%.3e after %d outer iterations",
        result.kkt_residual,
        result.constraint_violation,
        opts.max_outer_iters,
    )
    return result
