"""Dense two-phase simplex for small equality-form linear programs.

Solves  min c.x  subject to  A x = b,  x >= 0  with Bland's anti-cycling
rule.  Problem sizes here are tiny (tens of variables), so a plain dense
tableau is simpler and more predictable than anything fancier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

PIVOT_TOL = 1e-11


class SimplexError(RuntimeError):
    """Pivot limit exceeded; the instance is numerically pathological."""


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float | None


def _pivot(tableau: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _run_phase(
    tableau: np.ndarray,
    basis: list[int],
    cost: np.ndarray,
    allowed: int,
    max_pivots: int,
) -> tuple[str, np.ndarray]:
    """Pivot until no allowed column has a negative reduced cost (Bland)."""
    m = tableau.shape[0]
    for _ in range(max_pivots):
        reduced = cost[: allowed + 1].copy()
        for i in range(m):
            if cost[basis[i]] != 0.0:
                reduced -= cost[basis[i]] * tableau[i, : allowed + 1]
        entering = -1
        for j in range(allowed):
            if reduced[j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return OPTIMAL, reduced
        leaving = -1
        best = np.inf
        for i in range(m):
            a = tableau[i, entering]
            if a > PIVOT_TOL:
                ratio = tableau[i, -1] / a
                if ratio < best - PIVOT_TOL or (
                    abs(ratio - best) <= PIVOT_TOL
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best = ratio
                    leaving = i
        if leaving < 0:
            return UNBOUNDED, reduced
        _pivot(tableau, basis, leaving, entering)
    raise SimplexError("pivot limit exceeded")


def solve_lp(
    c,
    A,
    b,
    *,
    feas_tol: float = 1e-9,
    max_pivots: int = 50_000,
) -> LpResult:
    """Two-phase simplex for min c.x, A x = b, x >= 0."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a matrix")
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")
    A = A.copy()
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # Phase 1: artificial variables with identity basis.
    tableau = np.zeros((m, n + m + 1))
    tableau[:, :n] = A
    tableau[:, n : n + m] = np.eye(m)
    tableau[:, -1] = b
    basis = list(range(n, n + m))
    cost1 = np.zeros(n + m + 1)
    cost1[n : n + m] = 1.0
    status, _ = _run_phase(tableau, basis, cost1, n + m, max_pivots)
    if status != OPTIMAL:
        raise SimplexError("phase 1 reported unbounded, which is impossible")
    infeasibility = sum(tableau[i, -1] for i in range(m) if basis[i] >= n)
    if infeasibility > feas_tol:
        return LpResult(INFEASIBLE, None, None)

    # Drive leftover artificials out of the basis, dropping redundant rows.
    keep = []
    for i in range(m):
        if basis[i] < n:
            keep.append(i)
            continue
        col = -1
        for j in range(n):
            if abs(tableau[i, j]) > PIVOT_TOL:
                col = j
                break
        if col >= 0:
            _pivot(tableau, basis, i, col)
            keep.append(i)
    if len(keep) != m:
        tableau = tableau[keep]
        basis = [basis[i] for i in keep]
        m = len(keep)

    # Phase 2 on the original objective.
    cost2 = np.zeros(n + tableau.shape[1] - n)
    cost2[:n] = c
    status, _ = _run_phase(tableau, basis, cost2, n, max_pivots)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)
    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tableau[i, -1]
    np.clip(x, 0.0, None, out=x)
    return LpResult(OPTIMAL, x, float(c @ x))


def feasible_vertex(A, b, *, feas_tol: float = 1e-9) -> np.ndarray | None:
    """A vertex of {x >= 0 : A x = b}, or None when the polytope is empty."""
    n = np.asarray(A).shape[1]
    result = solve_lp(np.zeros(n), A, b, feas_tol=feas_tol)
    return result.x if result.status == OPTIMAL else None


def maximize_coordinate(A, b, k: int, *, feas_tol: float = 1e-9) -> tuple[float, np.ndarray] | None:
    """Maximize x_k over {x >= 0 : A x = b}; None when infeasible."""
    n = np.asarray(A).shape[1]
    c = np.zeros(n)
    c[k] = -1.0
    result = solve_lp(c, A, b, feas_tol=feas_tol)
    if result.status != OPTIMAL:
        return None
    return float(result.x[k]), result.x
