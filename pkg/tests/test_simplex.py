import itertools
import random

import numpy as np
import pytest

from belfuse.simplex import (
    INFEASIBLE,
    OPTIMAL,
    feasible_vertex,
    maximize_coordinate,
    solve_lp,
)


def brute_force_optimum(c, A, b, tol=1e-9):
    """Independent oracle: enumerate every basic feasible solution.

    A vertex of {x >= 0 : A x = b} is the unique solution supported on a
    set of linearly independent columns, so all column subsets of size up
    to m with full column rank are tried.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    best = None
    for size in range(min(m, n) + 1):
        for cols in itertools.combinations(range(n), size):
            sub = A[:, cols] if cols else np.zeros((m, 0))
            if cols and np.linalg.matrix_rank(sub) < len(cols):
                continue
            sol = np.linalg.lstsq(sub, b, rcond=None)[0] if cols else np.zeros(0)
            residual = (sub @ sol - b) if cols else -b
            if np.abs(residual).max() > tol:
                continue
            if cols and sol.min() < -tol:
                continue
            x = np.zeros(n)
            if cols:
                x[list(cols)] = np.clip(sol, 0.0, None)
            value = float(c @ x)
            if best is None or value < best - 1e-12:
                best = value
    return best


def test_known_optimum():
    # min -x - y  s.t.  x + y + s = 1
    result = solve_lp([-1.0, -1.0, 0.0], [[1.0, 1.0, 1.0]], [1.0])
    assert result.status == OPTIMAL
    assert result.objective == pytest.approx(-1.0)


def test_infeasible_detected():
    # x1 + x2 = 1 and x1 + x2 = 2 cannot both hold
    result = solve_lp(
        [0.0, 0.0],
        [[1.0, 1.0], [1.0, 1.0]],
        [1.0, 2.0],
    )
    assert result.status == INFEASIBLE


def test_unbounded_detected():
    # min -x with only x - y = 0: x can grow forever
    result = solve_lp([-1.0, 0.0], [[1.0, -1.0]], [0.0])
    assert result.status == "unbounded"


def test_redundant_rows_handled():
    A = [[1.0, 1.0], [2.0, 2.0]]
    result = solve_lp([1.0, 0.0], A, [1.0, 2.0])
    assert result.status == OPTIMAL
    assert result.objective == pytest.approx(0.0)


def test_degenerate_vertex():
    # forces a degenerate basic solution; Bland's rule must not cycle
    A = [[1.0, 1.0, 1.0, 0.0], [1.0, 1.0, 0.0, 1.0]]
    b = [1.0, 1.0]
    result = solve_lp([0.0, -1.0, 0.0, 0.0], A, b)
    assert result.status == OPTIMAL
    assert result.objective == pytest.approx(-1.0)


def test_random_lps_against_enumeration():
    rng = random.Random(42)
    for trial in range(60):
        m = rng.randint(1, 3)
        n = rng.randint(m, 6)
        A = [[rng.randint(0, 3) for _ in range(n)] for _ in range(m)]
        # build a feasible instance by picking the rhs from a random point
        x0 = [rng.uniform(0, 1) for _ in range(n)]
        b = [sum(A[i][j] * x0[j] for j in range(n)) for i in range(m)]
        c = [rng.uniform(-1, 1) for _ in range(n)]
        result = solve_lp(c, A, b)
        oracle = brute_force_optimum(c, A, b)
        if result.status == OPTIMAL:
            assert oracle is not None
            assert result.objective == pytest.approx(oracle, abs=1e-7)
            assert np.abs(np.asarray(A) @ result.x - np.asarray(b)).max() < 1e-8
        elif result.status == INFEASIBLE:
            assert oracle is None
        # unbounded instances are possible; the oracle cannot certify those


def test_feasible_vertex_and_coordinate_max():
    A = np.array([[1.0, 1.0, 1.0]])
    b = np.array([1.0])
    v = feasible_vertex(A, b)
    assert v is not None
    assert v.sum() == pytest.approx(1.0)
    best, point = maximize_coordinate(A, b, 1)
    assert best == pytest.approx(1.0)
    assert point[1] == pytest.approx(1.0)
    assert feasible_vertex(np.array([[1.0, 1.0]]), np.array([-0.5])) is None
