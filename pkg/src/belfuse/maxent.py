"""Shared entropy-maximization core.

Maximizes  H(f) = -sum f ln f  over  { f >= 0 : block marginals fixed },
where each block partitions the variables into groups with prescribed
group sums.  The driver follows a projected-gradient scheme: each step
solves the quadratic program

    min sum (theta (1 + ln f) + df)^2
    s.t. f + df >= 0,  group sums of df all zero,

accepts the step when the entropy does not decrease, and halves theta
otherwise.  An independent iterative proportional fitting routine is
provided as a cross-checking oracle; it shares nothing with the gradient
path beyond the problem statement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import simplex

DELTA_INF_TOL = 1e-9
FORCED_ZERO_TOL = 1e-11
LOG_FLOOR = 1e-300
STALL_WINDOW = 64
REFINE_GRAD_TOL = 1e-11
REFINE_MAX_STEPS = 20_000


class ConvergenceError(RuntimeError):
    """The iteration budget ran out before the stopping rule was met."""


@dataclass(frozen=True)
class SolverConfig:
    """Projected-gradient controls; all values must be positive."""

    theta0: float = 1.0
    max_iterations: int = 200_000
    entropy_tolerance: float = 1e-12
    step_floor: float = 1e-14
    feasibility_tolerance: float = 1e-9

    def __post_init__(self):
        for name in (
            "theta0",
            "max_iterations",
            "entropy_tolerance",
            "step_floor",
            "feasibility_tolerance",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class MaxentResult:
    f: np.ndarray
    iterations: int
    entropy: float


def entropy_vec(f) -> float:
    """-sum f ln f with the convention 0 ln 0 = 0."""
    f = np.asarray(f, dtype=float)
    pos = f > 0.0
    return float(-np.sum(f[pos] * np.log(f[pos])))


def assemble_rows(n_vars: int, blocks) -> tuple[np.ndarray, np.ndarray]:
    """Stack one indicator row per (block, group) into A x = b form."""
    rows = []
    rhs = []
    for groups, targets in blocks:
        groups = np.asarray(groups, dtype=int)
        for g, target in enumerate(targets):
            row = np.zeros(n_vars)
            row[groups == g] = 1.0
            rows.append(row)
            rhs.append(target)
    return np.array(rows), np.array(rhs)


def project_to_polytope(d, A, lo, *, tol=1e-10, max_rounds=None):
    """min ||x - d||^2  s.t.  A x = 0,  x >= lo  (0 must be feasible).

    Primal active-set on the bound constraints; each subproblem is an
    equality-constrained least-squares solve of the KKT system.
    """
    d = np.asarray(d, dtype=float)
    A = np.asarray(A, dtype=float)
    lo = np.asarray(lo, dtype=float)
    n = d.size
    n_eq = A.shape[0]
    x = np.zeros(n)
    active: list[int] = []
    rounds = max_rounds if max_rounds is not None else 3 * n + 60
    for _ in range(rounds):
        n_act = len(active)
        size = n + n_eq + n_act
        kkt = np.zeros((size, size))
        kkt[:n, :n] = np.eye(n)
        kkt[:n, n : n + n_eq] = A.T
        kkt[n : n + n_eq, :n] = A
        rhs = np.zeros(size)
        rhs[:n] = d
        for i, k in enumerate(active):
            kkt[:n, n + n_eq + i] = np.eye(n)[:, k]
            kkt[n + n_eq + i, k] = 1.0
            rhs[n + n_eq + i] = lo[k]
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        xhat = sol[:n]
        violation = lo - xhat
        if violation.max() <= tol:
            x = xhat
            if active:
                mults = sol[n + n_eq :]
                worst = int(np.argmax(mults))
                if mults[worst] > tol:
                    active.pop(worst)
                    continue
            return np.maximum(xhat, lo)
        direction = xhat - x
        alpha = 1.0
        blocking = -1
        decreasing = direction < -1e-15
        if decreasing.any():
            steps = np.full(n, np.inf)
            steps[decreasing] = (lo[decreasing] - x[decreasing]) / direction[decreasing]
            for k in np.argsort(steps):
                k = int(k)
                if k in active:
                    continue
                if steps[k] < alpha:
                    alpha = max(steps[k], 0.0)
                    blocking = k
                break
        if blocking < 0:
            # numerically stuck: candidate violates a bound that no move explains
            return np.maximum(xhat, lo)
        x = x + alpha * direction
        x[blocking] = lo[blocking]
        active.append(blocking)
    raise ConvergenceError("active-set projection did not terminate")


def _interior_start(A, b, vertex, feas_tol):
    """Freeze coordinates that are zero in every feasible point; average
    coordinate-maximizing vertices for a strictly positive start elsewhere."""
    n = vertex.size
    support = vertex > FORCED_ZERO_TOL
    solutions = [vertex]
    for k in range(n):
        if support[k]:
            continue
        res = simplex.maximize_coordinate(A, b, k, feas_tol=feas_tol)
        if res is None:
            continue
        best, point = res
        if best > FORCED_ZERO_TOL:
            support[k] = True
            solutions.append(point)
    start = np.mean(solutions, axis=0)
    start[~support] = 0.0
    return support, start


def _refine(f, A_s, projector, theta, cfg):
    """Drive the projected entropy gradient toward zero with the same
    update rule, halving the step whenever the gradient norm stops
    shrinking (the sign that the step exceeds the stable range)."""
    steps = 0
    prev_norm = np.inf
    flat = 0
    for _ in range(REFINE_MAX_STEPS):
        grad = -(1.0 + np.log(np.maximum(f, LOG_FLOOR)))
        pgrad = projector @ grad
        norm = float(np.abs(pgrad).max())
        if norm < REFINE_GRAD_TOL:
            break
        if norm >= prev_norm:
            theta *= 0.5
            if theta < cfg.step_floor:
                break
            flat += 1
            if flat > 200:
                break
        else:
            flat = 0
        prev_norm = norm
        delta = theta * pgrad
        if np.any(f + delta < 0.0):
            delta = project_to_polytope(theta * grad, A_s, -f)
        f = np.clip(f + delta, 0.0, None)
        steps += 1
    return f, steps


def maxent_maximize(
    n_vars: int,
    blocks,
    cfg: SolverConfig | None = None,
    *,
    start=None,
) -> MaxentResult | None:
    """Entropy-maximizing point of the block-marginal polytope.

    Returns None when the constraints are infeasible; raises
    ConvergenceError when the iteration budget is exhausted.
    """
    cfg = cfg or SolverConfig()
    if n_vars == 0:
        return None

    frozen = np.zeros(n_vars, dtype=bool)
    for groups, targets in blocks:
        targets = np.asarray(targets, dtype=float)
        frozen |= targets[np.asarray(groups, dtype=int)] <= 0.0
    free = np.flatnonzero(~frozen)
    if free.size == 0:
        return None
    reduced_blocks = []
    for groups, targets in blocks:
        groups = np.asarray(groups, dtype=int)
        for g, target in enumerate(targets):
            if target > 0.0 and not np.any(groups[free] == g):
                return None  # positive target with every member frozen
        reduced_blocks.append((groups[free], targets))
    A, b = assemble_rows(free.size, reduced_blocks)

    vertex = simplex.feasible_vertex(A, b, feas_tol=cfg.feasibility_tolerance)
    if vertex is None:
        return None
    support, interior = _interior_start(A, b, vertex, cfg.feasibility_tolerance)

    if start is not None:
        start = np.asarray(start, dtype=float)
        if start.shape != (n_vars,):
            raise ValueError("start vector has the wrong length")
        if np.any(start[frozen] > cfg.feasibility_tolerance):
            raise ValueError("start point puts mass on a frozen coordinate")
        f = start[free].copy()
        if np.any(f[~support] > cfg.feasibility_tolerance):
            raise ValueError("start point puts mass on a forced-zero coordinate")
        f[~support] = 0.0
    else:
        f = interior

    idx = np.flatnonzero(support)
    f = f[idx]
    A_s = A[:, idx]
    pinv = np.linalg.pinv(A_s)
    projector = np.eye(idx.size) - pinv @ A_s

    theta = cfg.theta0
    h_cur = entropy_vec(f)
    iterations = 0
    converged = False
    stall = 0
    for _ in range(cfg.max_iterations):
        iterations += 1
        grad_target = 1.0 + np.log(np.maximum(f, LOG_FLOOR))
        d = -theta * grad_target
        delta = projector @ d
        if np.any(f + delta < 0.0):
            delta = project_to_polytope(d, A_s, -f)
        f_new = f + delta
        np.clip(f_new, 0.0, None, out=f_new)
        h_new = entropy_vec(f_new)
        if h_new < h_cur:
            theta *= 0.5
            if theta < cfg.step_floor:
                converged = True
                break
            stall += 1
            if stall >= STALL_WINDOW:
                converged = True
                break
            continue
        improvement = h_new - h_cur
        f = f_new
        h_cur = h_new
        # delta scales with theta, so the increment test is normalized by
        # theta: |delta|/theta estimates the projected entropy gradient,
        # which bounds the distance to the optimum regardless of how far
        # theta was halved on the way here.
        if improvement < cfg.entropy_tolerance and np.abs(delta).max() < DELTA_INF_TOL * theta:
            converged = True
            break
        # near the float-precision optimum the entropy comparison can no
        # longer certify progress; a long run without a tolerance-sized
        # improvement means the iterate has stopped moving
        if improvement < cfg.entropy_tolerance:
            stall += 1
            if stall >= STALL_WINDOW:
                converged = True
                break
        else:
            stall = 0
        # let the step recover after an accepted move; otherwise an early
        # excursion near the boundary pins theta far below the stable
        # level and the iteration crawls
        theta = min(theta * 2.0, cfg.theta0)
    if not converged:
        raise ConvergenceError(
            f"no convergence within {cfg.max_iterations} iterations"
        )

    # Terminal refinement: entropy comparisons saturate at float precision
    # long before the iterate does, so the last stretch applies the same
    # update monitored by the projected gradient norm instead, which is
    # measurable all the way down.
    f, extra = _refine(f, A_s, projector, theta, cfg)
    iterations += extra

    residual = A_s @ f - b
    if np.abs(residual).max() > 1e-12:
        f = f - pinv @ residual
        np.clip(f, 0.0, None, out=f)

    out = np.zeros(n_vars)
    out[free[idx]] = f
    return MaxentResult(out, iterations, entropy_vec(out))


def ipf_fit(
    n_vars: int,
    blocks,
    *,
    max_cycles: int = 100_000,
    conv_tol: float = 1e-10,
    stall_tol: float = 1e-15,
    infeasible_residual: float = 1e-8,
) -> np.ndarray | None:
    """Iterative proportional fitting from the uniform start.

    Cycles over the marginal blocks, rescaling group by group.  Converges
    to the entropy-maximizing point when the constraints are feasible.
    Returns None on an infeasibility certificate (a positive target with
    no support mass, or a stalled cycle far from the targets).
    """
    if n_vars == 0:
        return None
    parsed = [
        (np.asarray(groups, dtype=int), np.asarray(targets, dtype=float))
        for groups, targets in blocks
    ]
    frozen = np.zeros(n_vars, dtype=bool)
    for groups, targets in parsed:
        frozen |= targets[groups] <= 0.0
    f = np.where(frozen, 0.0, 1.0)
    if f.sum() == 0.0:
        return None
    f /= f.sum()
    prev = f.copy()
    for _ in range(max_cycles):
        for groups, targets in parsed:
            current = np.bincount(groups, weights=f, minlength=targets.size)
            missing = (targets > 1e-12) & (current <= 0.0)
            if missing.any():
                return None
            ratio = np.where(current > 0.0, targets / np.where(current > 0.0, current, 1.0), 0.0)
            f = f * ratio[groups]
        residual = 0.0
        for groups, targets in parsed:
            current = np.bincount(groups, weights=f, minlength=targets.size)
            residual = max(residual, float(np.abs(current - targets).max()))
        if residual < conv_tol:
            return f
        change = float(np.abs(f - prev).max())
        if change < stall_tol:
            if residual > infeasible_residual:
                return None
            raise ConvergenceError(
                "iterative scaling stalled near the feasibility boundary"
            )
        prev = f.copy()
    raise ConvergenceError(f"iterative scaling did not converge in {max_cycles} cycles")
