"""Dense linear programming for phase-discretized Chebyshev problems.

Problems have the shape ``maximize c.x subject to A x <= b`` with ``x`` free.
Every LP produced by this package has ``b >= 0`` (the zero polynomial is
feasible), so a cold solve can start from the origin.

The solver is an active-set (vertex) simplex: a basis is a set of ``d``
linearly independent active rows.  Phase one walks from a feasible start
point to a vertex; phase two is the primal vertex simplex.  Pricing is
Dantzig's rule until ``BLAND_AFTER`` consecutive degenerate pivots, after
which Bland's rule runs until progress resumes.  Ties always go to the
lowest index, so results are deterministic and cycling is excluded.

Warm starts after appending rows rescale the previous optimum into the new
feasible set (possible whenever all bounds are positive) and continue the
primal method from there.

Bounds are relaxed by a fixed per-row amount of order ``PERTURB`` before
pivoting, which removes most vertex degeneracy.  ``method="highs"`` hands the
same program to scipy's HiGHS solver instead; :func:`solve_robust` uses it as
a fallback when the simplex exhausts its pivot budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
BLAND_AFTER = 25
DEGENERATE_TOL = 1e-11
PERTURB = 1e-9

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration-limit"


class MalformedLPError(ValueError):
    """Raised when an LP fails shape or finiteness checks."""


@dataclass
class LinearProgram:
    """``maximize`` (or minimize) ``objective . x`` subject to ``rows x <= bounds``.

    Rows are stored as one dense array; :meth:`with_rows` returns a new
    program with rows appended, leaving the original untouched.
    """

    objective: np.ndarray
    rows: np.ndarray
    bounds: np.ndarray
    maximize: bool = True

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        d = self.objective.size
        rows = np.asarray(self.rows, dtype=float)
        if rows.size == 0:
            rows = rows.reshape(0, d)
        self.rows = rows
        self.bounds = np.asarray(self.bounds, dtype=float).reshape(-1)
        self.validate()

    @classmethod
    def from_constraints(cls, objective, constraints, maximize=True):
        """Build from a list of ``(row, bound)`` pairs."""
        objective = np.asarray(objective, dtype=float).reshape(-1)
        d = objective.size
        for row, _ in constraints:
            if np.asarray(row).reshape(-1).size != d:
                raise MalformedLPError(f"row length {np.asarray(row).size} != {d}")
        if constraints:
            rows = np.array([np.asarray(r, dtype=float).reshape(-1) for r, _ in constraints])
            bounds = np.array([float(b) for _, b in constraints])
        else:
            rows = np.zeros((0, d))
            bounds = np.zeros(0)
        return cls(objective, rows, bounds, maximize)

    @property
    def row_norms(self) -> np.ndarray:
        if getattr(self, "_norms", None) is None or len(self._norms) != self.n_rows:
            self._norms = np.linalg.norm(self.rows, axis=1)
        return self._norms

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    def validate(self):
        d = self.objective.size
        if d < 1:
            raise MalformedLPError("objective must have at least one entry")
        if self.rows.ndim != 2 or self.rows.shape[1] != d:
            raise MalformedLPError(f"rows must have shape (k, {d}), got {self.rows.shape}")
        if self.bounds.shape != (self.rows.shape[0],):
            raise MalformedLPError("one bound per row required")
        if not np.all(np.isfinite(self.bounds)):
            raise MalformedLPError("bounds must be finite")
        if not (np.all(np.isfinite(self.rows)) and np.all(np.isfinite(self.objective))):
            raise MalformedLPError("rows and objective must be finite")

    def with_rows(self, rows, bounds) -> "LinearProgram":
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        bounds = np.asarray(bounds, dtype=float).reshape(-1)
        if rows.shape[1:] != (self.n_vars,):
            raise MalformedLPError(f"new rows must have {self.n_vars} columns, got {rows.shape}")
        if rows.shape[0] != bounds.size:
            raise MalformedLPError("one bound per new row required")
        out = LinearProgram(
            self.objective,
            np.vstack([self.rows, rows]),
            np.concatenate([self.bounds, bounds]),
            self.maximize,
        )
        out._norms = np.concatenate([self.row_norms, np.linalg.norm(rows, axis=1)])
        return out

    def max_violation(self, x) -> float:
        if self.n_rows == 0:
            return 0.0
        return float(np.max(self.rows @ x - self.bounds))


@dataclass
class LpSolution:
    status: str
    point: np.ndarray
    value: float
    iterations: int
    basis: tuple = ()
    ray: np.ndarray | None = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _ratio_test(rows, bounds, x, direction, exclude, row_norms, harris=False):
    """Step length to the first blocking row along ``direction``.

    Returns ``(t, j)`` or ``(inf, -1)`` when nothing blocks.  By default ties
    go to the lowest row index.  With ``harris`` the step bound is relaxed by
    the degeneracy tolerance and the blocking row with the largest rate
    within it is chosen, which keeps the basis well conditioned.
    """
    rates = rows @ direction
    rates[list(exclude)] = 0.0
    scale = row_norms * np.linalg.norm(direction)
    blocking = np.flatnonzero(rates > PIVOT_TOL * np.maximum(scale, 1e-300))
    if blocking.size == 0:
        return np.inf, -1
    r = rates[blocking]
    slack = bounds[blocking] - rows[blocking] @ x
    tol = DEGENERATE_TOL * np.maximum(1.0, np.abs(bounds[blocking]))
    # round-off sized slacks count as tight so degenerate ties are exact
    slack[slack <= tol] = 0.0
    ratios = slack / r
    if harris:
        bound = np.min((slack + tol) / r)
        candidates = np.flatnonzero(ratios <= bound)
        pick = candidates[np.argmax(r[candidates] / row_norms[blocking[candidates]])]
        return float(max(ratios[pick], 0.0)), int(blocking[pick])
    best = ratios.min()
    # blocking is sorted, so the first tie is the lowest index
    j = int(blocking[np.flatnonzero(ratios <= best + 1e-12 * max(1.0, best))[0]])
    return float(best), j


def _perturbed(bounds):
    # a fixed per-row relaxation in [1, 2) * PERTURB breaks vertex degeneracy;
    # it depends only on the row index, so warm and cold solves see the same LP
    i = np.arange(bounds.size)
    frac = np.mod(i * 0.6180339887498949, 1.0)
    return bounds + PERTURB * (1.0 + frac) * np.maximum(1.0, np.abs(bounds))


def _polish(lp, AB, lu, basis, x):
    """Move an optimum of the perturbed LP onto the original bounds.

    The final basis is re-solved against the unperturbed bounds; if that
    vertex is infeasible (the perturbation changed which vertex is optimal)
    the point is shrunk toward the origin instead.
    """
    rhs = AB @ x
    rhs[: len(basis)] = lp.bounds[basis]
    exact = linalg.lu_solve(lu, rhs, check_finite=False)
    if lp.max_violation(exact) <= 0.1 * FEAS_TOL:
        return exact
    if lp.max_violation(x) > 0 and np.all(lp.bounds > 0):
        return x / max(1.0, float(np.max((lp.rows @ x) / lp.bounds)))
    return x


def _sense(lp):
    return lp.objective if lp.maximize else -lp.objective


def _finish(lp, status, x, iterations, basis=(), ray=None):
    return LpSolution(status, x, float(lp.objective @ x), iterations, tuple(basis), ray)


class _Span:
    """Orthonormal basis of the span of the pinned rows, grown one row at a time."""

    def __init__(self, d):
        self.q = np.zeros((0, d))

    def residual(self, v):
        r = v - self.q.T @ (self.q @ v)
        return r - self.q.T @ (self.q @ r)

    def add(self, row) -> bool:
        r = self.residual(row)
        nr = np.linalg.norm(r)
        if nr <= PIVOT_TOL * max(1.0, np.linalg.norm(row)):
            return False
        self.q = np.vstack([self.q, r / nr])
        return True

    def level_direction(self):
        """A unit vector orthogonal to the span (lowest coordinate axis first)."""
        for i in range(self.q.shape[1]):
            e = np.zeros(self.q.shape[1])
            e[i] = 1.0
            r = self.residual(e)
            if np.linalg.norm(r) > 1e-6:
                return r / np.linalg.norm(r)
        raise RuntimeError("span is already full")


def _tight_rows(A, b, x, span):
    """Greedy lowest-index selection of linearly independent tight rows."""
    chosen: list[int] = []
    slack = b - A @ x
    for j in np.flatnonzero(slack <= FEAS_TOL * np.maximum(1.0, np.abs(b))):
        if span.add(A[j]):
            chosen.append(int(j))
            if len(chosen) == A.shape[1]:
                break
    return chosen


_HIGHS_STATUS = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}


def _solve_highs(lp: LinearProgram, iteration_limit: int) -> LpSolution:
    res = optimize.linprog(-_sense(lp), A_ub=lp.rows if lp.n_rows else None,
                           b_ub=lp.bounds if lp.n_rows else None, bounds=(None, None),
                           method="highs-ds", options={"maxiter": iteration_limit})
    status = _HIGHS_STATUS.get(res.status, ITERATION_LIMIT)
    x = res.x if res.x is not None else np.zeros(lp.n_vars)
    return _finish(lp, status, np.asarray(x, dtype=float), int(res.nit))


def solve(lp: LinearProgram, iteration_limit: int = 20000, start=None, method: str = "simplex") -> LpSolution:
    """Solve from the origin, or from a feasible ``start`` point.

    Phase one walks to a vertex, each step following the projection of the
    objective onto the null space of the active rows.
    """
    if method == "highs":
        lp.validate()
        return _solve_highs(lp, iteration_limit)
    if method != "simplex":
        raise ValueError(f"unknown method {method!r}")
    lp.validate()
    c = _sense(lp)
    A, b = lp.rows, _perturbed(lp.bounds)
    norms = lp.row_norms
    d = lp.n_vars
    span = _Span(d)
    if start is None:
        if np.any(b < -FEAS_TOL):
            raise MalformedLPError("cold solve needs the origin to be feasible (bounds >= 0)")
        x = np.zeros(d)
        active: list[int] = []
    else:
        x = np.asarray(start, dtype=float).copy()
        if lp.max_violation(x) > FEAS_TOL:
            raise MalformedLPError("start point is infeasible")
        active = _tight_rows(A, b, x, span)
    # directions pinned where the feasible set contains a line orthogonal to c
    virtual: list[np.ndarray] = []
    iterations = 0
    c_scale = max(1.0, float(np.linalg.norm(c)))

    while len(active) + len(virtual) < d:
        if iterations >= iteration_limit:
            return _finish(lp, ITERATION_LIMIT, x, iterations, active)
        direction = span.residual(c)
        iterations += 1
        if np.linalg.norm(direction) > PIVOT_TOL * c_scale:
            t, j = _ratio_test(A, b, x, direction, active, norms)
            if j < 0:
                return _finish(lp, UNBOUNDED, x, iterations, active, ray=direction)
            x = x + t * direction
            if span.add(A[j]):
                active.append(j)
            continue
        # objective already spanned by the active rows: move along a level direction
        v = span.level_direction()
        for sign in (1.0, -1.0):
            t, j = _ratio_test(A, b, x, sign * v, active, norms)
            if j >= 0:
                x = x + t * sign * v
                if span.add(A[j]):
                    active.append(j)
                break
        else:
            span.add(v)
            virtual.append(v)

    n_virtual = len(virtual)
    basis = list(active)
    stalled = 0
    while True:
        if iterations >= iteration_limit:
            return _finish(lp, ITERATION_LIMIT, x, iterations, basis)
        AB = np.vstack([A[basis]] + ([np.array(virtual)] if n_virtual else []))
        bB = np.concatenate([b[basis], np.array(virtual).reshape(-1, d) @ x if n_virtual else []])
        lu = linalg.lu_factor(AB, check_finite=False)
        x = linalg.lu_solve(lu, bB, check_finite=False)
        y = linalg.lu_solve(lu, c, trans=1, check_finite=False)
        y_real = y[: len(basis)]
        negative = [k for k in range(len(basis)) if y_real[k] < -PIVOT_TOL]
        if not negative:
            return _finish(lp, OPTIMAL, _polish(lp, AB, lu, basis, x), iterations, basis)
        if stalled >= BLAND_AFTER:
            k = min(negative, key=lambda k: basis[k])
        else:
            k = min(negative, key=lambda k: (y_real[k], basis[k]))
        e = np.zeros(d)
        e[k] = -1.0
        direction = linalg.lu_solve(lu, e, check_finite=False)
        iterations += 1
        t, j = _ratio_test(A, b, x, direction, basis, norms, harris=stalled < BLAND_AFTER)
        if j < 0:
            return _finish(lp, UNBOUNDED, x, iterations, basis, ray=direction)
        gain = t * -y_real[k]
        stalled = stalled + 1 if gain <= 1e-12 * max(1.0, abs(float(c @ x))) else 0
        x = x + t * direction
        basis[k] = j


def resolve_with_added_constraints(previous: LpSolution, lp: LinearProgram, rows, bounds,
                                   iteration_limit: int = 20000, solver=None):
    """Append rows to ``lp`` and re-optimize starting near ``previous``.

    Returns ``(solution, extended_lp)``.  The previous point is pulled back
    along the ray to the origin until it satisfies the new rows; with no
    usable previous point the extended LP is solved cold.  ``solver`` has
    the signature of :func:`solve` (default) or :func:`solve_robust`.
    """
    run = solver or solve
    extended = lp.with_rows(rows, bounds)
    x = previous.point
    if previous.status not in (OPTIMAL, ITERATION_LIMIT) or x is None or lp.max_violation(x) > FEAS_TOL:
        return run(extended, iteration_limit), extended
    new_rows, new_bounds = extended.rows[lp.n_rows:], extended.bounds[lp.n_rows:]
    if new_rows.shape[0] == 0 or np.all(new_rows @ x <= new_bounds + FEAS_TOL):
        if previous.status == OPTIMAL:
            return LpSolution(OPTIMAL, x, previous.value, 0, previous.basis), extended
        return run(extended, iteration_limit, start=x), extended
    if np.any(new_bounds <= 0):
        return run(extended, iteration_limit), extended
    ratio = float(np.max((new_rows @ x) / new_bounds))
    return run(extended, iteration_limit, start=x / max(1.0, ratio)), extended


def solve_robust(lp: LinearProgram, budget: int, start=None) -> LpSolution:
    """Simplex with a pivot budget, then HiGHS if the budget runs out."""
    sol = solve(lp, budget, start)
    if sol.status != ITERATION_LIMIT:
        return sol
    fallback = _solve_highs(lp, max(10 * budget, 10000))
    fallback.iterations += sol.iterations
    return fallback
