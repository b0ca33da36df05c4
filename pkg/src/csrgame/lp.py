"""Dense two-phase simplex for covering LPs ``min c.x  s.t.  A x >= b, x >= 0``.

Small and deterministic: Bland's rule for both entering and leaving
variables, so it cannot cycle.  The optimal basis also yields a dual
vector, which callers use as an optimality certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["LPResult", "NumericalFailure", "solve_covering_lp"]

PIVOT_EPS = 1e-12


class NumericalFailure(ArithmeticError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[np.ndarray]
    objective: Optional[float]
    dual: Optional[np.ndarray]
    dual_objective: Optional[float]
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    piv = T[row, col]
    if abs(piv) < PIVOT_EPS:
        raise NumericalFailure(f"pivot {piv:.3e} at ({row}, {col})")
    T[row] /= piv
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _simplex(T: np.ndarray, basis: list[int], cost: np.ndarray, allowed: int, tol: float) -> tuple[str, int]:
    """Minimise ``cost`` over columns ``[0, allowed)`` starting from a feasible basis."""
    m = T.shape[0]
    iters = 0
    while True:
        reduced = cost[:allowed] - cost[basis] @ T[:, :allowed]
        entering = next((j for j in range(allowed) if reduced[j] < -tol), None)
        if entering is None:
            return "optimal", iters
        col = T[:, entering]
        best = None
        for i in range(m):
            if col[i] > tol:
                ratio = T[i, -1] / col[i]
                # Bland: among minimum ratios, smallest basic variable index leaves
                if best is None or ratio < best[0] - tol or (abs(ratio - best[0]) <= tol and basis[i] < best[1]):
                    best = (ratio, basis[i], i)
        if best is None:
            return "unbounded", iters
        leave = best[2]
        _pivot(T, leave, entering)
        basis[leave] = entering
        iters += 1


def solve_covering_lp(c, A, b, tol: float = 1e-9) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    # Row i: A_i x - s_i = b_i, negated when b_i <= 0 so that the surplus
    # variable starts basic and no artificial is needed.
    sign = np.where(b > 0, 1.0, -1.0)
    M = np.hstack([A, -np.eye(m)]) * sign[:, None]
    rhs = b * sign
    need_art = np.flatnonzero(sign > 0)
    n_std = n + m
    n_art = need_art.size
    T = np.zeros((m, n_std + n_art + 1))
    T[:, :n_std] = M
    T[:, -1] = rhs
    basis: list[int] = []
    for i in range(m):
        if sign[i] > 0:
            a = n_std + int(np.searchsorted(need_art, i))
            T[i, a] = 1.0
            basis.append(a)
        else:
            basis.append(n + i)

    iters = 0
    if n_art:
        phase1 = np.zeros(n_std + n_art)
        phase1[n_std:] = 1.0
        status, it = _simplex(T, basis, phase1, n_std + n_art, tol)
        iters += it
        if T[:, -1] @ phase1[basis] > tol * max(1.0, float(np.abs(b).max())):
            return LPResult("infeasible", None, None, None, None, iters)
        for i in range(m):
            if basis[i] >= n_std:
                j = next((j for j in range(n_std) if abs(T[i, j]) > tol), None)
                if j is None:
                    raise NumericalFailure(f"row {i} has no structural column to pivot on")
                _pivot(T, i, j)
                basis[i] = j
        T = np.hstack([T[:, :n_std], T[:, -1:]])

    cost = np.concatenate([c, np.zeros(m)])
    status, it = _simplex(T, basis, cost, n_std, tol)
    iters += it
    if status != "optimal":
        return LPResult(status, None, None, None, None, iters)
    x_std = np.zeros(n_std)
    x_std[basis] = T[:, -1]
    x = x_std[:n]
    x[np.abs(x) < tol] = 0.0
    # dual of the standard form: B^T pi = c_B, then undo the row negation
    B = M[:, basis]
    pi = np.linalg.solve(B.T, cost[basis])
    y = pi * sign
    return LPResult("optimal", x, float(c @ x), y, float(b @ y), iters)
