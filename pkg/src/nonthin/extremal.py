"""Degree-limited extremal values by linear programming.

For a point cloud ``E`` and degree ``n`` the extremal value is

    V_n(z0) = sup { (1/n) log |P(z0)| : deg P <= n, |P| <= 1 on E }.

The modulus bound is replaced by ``K`` tangent half-planes per sample,
``Re(exp(2 pi i k / K) P(p)) <= 1``, which enlarges the feasible set by at
most the factor ``1 / cos(pi / K)``.  Maximizing ``Re P(z0)`` over this
polytope is an LP.  Rows are generated lazily: the LP starts from the four
axis phases and only the most violated phase per sample is added per round.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lp as lpmod
from .regions import SampledRegion, as_points

DEFAULT_PHASES = 64
CUT_TOL = 1e-9


class ExtremalError(ValueError):
    pass


class InsufficientSamplesError(ExtremalError):
    """Fewer than twice as many sample points as monomials."""


class DegenerateSampleError(ExtremalError):
    """The cloud does not determine polynomials of the requested degree."""


@dataclass(frozen=True)
class BasisSpec:
    """Monomials of total degree <= n in ``(z - center) / radius``."""

    degree: int
    center: tuple
    radius: float
    exponents: tuple

    @classmethod
    def for_points(cls, points: np.ndarray, degree: int) -> "BasisSpec":
        if degree < 1:
            raise ExtremalError("degree must be a positive integer")
        points = as_points(points)
        m = points.shape[1]
        lo = points.real.min(axis=0) + 1j * points.imag.min(axis=0)
        hi = points.real.max(axis=0) + 1j * points.imag.max(axis=0)
        center = 0.5 * (lo + hi)
        radius = float(np.max(np.linalg.norm(points - center, axis=1)))
        if radius <= 0:
            radius = max(1.0, float(np.linalg.norm(center)))
        exps = tuple(e for total in range(degree + 1)
                     for e in _exponents_of_total(m, total))
        return cls(degree, tuple(complex(c) for c in center), radius, exps)

    @property
    def dim(self) -> int:
        return len(self.center)

    def __len__(self):
        return len(self.exponents)

    def evaluate(self, z) -> np.ndarray:
        """Basis values, shape ``(N, len(self))``."""
        w = (as_points(z, self.dim) - np.asarray(self.center)) / self.radius
        powers = [w[:, k, None] ** np.arange(self.degree + 1) for k in range(self.dim)]
        cols = [np.prod([powers[k][:, e[k]] for k in range(self.dim)], axis=0) for e in self.exponents]
        return np.column_stack(cols)


def _exponents_of_total(m, total):
    if m == 1:
        return [(total,)]
    return [(total - j, j) for j in range(total + 1)]


def monomial_count(m: int, n: int) -> int:
    return n + 1 if m == 1 else (n + 1) * (n + 2) // 2


def phase_slack(K: int, n: int) -> float:
    """Worst-case overestimate of the degree-``n`` value due to ``K`` phases."""
    return math.log(1.0 / math.cos(math.pi / K)) / n


@dataclass
class _CutState:
    """LP bookkeeping reused by :func:`refine_phases`."""

    basis_values: np.ndarray
    objective_scale: float
    program: lpmod.LinearProgram
    solution: lpmod.LpSolution
    present: set
    to_monomial: np.ndarray


@dataclass
class GreenEstimate:
    z0: np.ndarray
    degree: int
    value: float
    raw_value: float
    certificate: np.ndarray
    basis: BasisSpec
    phases: int
    slack: float
    iterations: int
    converged: bool = True
    status: str = lpmod.OPTIMAL
    lp_objective: float = float("nan")
    rounds: int = 0
    _state: _CutState | None = field(default=None, repr=False)

    def polynomial(self, z) -> np.ndarray:
        """Evaluate the certificate polynomial."""
        return self.basis.evaluate(z) @ self.certificate

    def certificate_log_value(self) -> float:
        """``(1/n) log |P(z0)|`` recomputed from the certificate."""
        return math.log(abs(self.polynomial(self.z0)[0])) / self.degree


def _rows(values, phases, K):
    rot = values * np.exp(2j * np.pi * np.asarray(phases) / K)
    return np.column_stack([rot.real, -rot.imag])


def _orthonormal_basis(basis, points):
    V = basis.evaluate(points)
    U, s, Wh = np.linalg.svd(V, full_matrices=False)
    if s[-1] < 1e-12 * s[0]:
        raise DegenerateSampleError(
            f"sample cloud is numerically not unisolvent at degree {basis.degree} "
            f"(singular value ratio {s[-1] / s[0]:.2e})")
    # q(z) = phi(z) @ T has orthonormal values U on the cloud
    T = Wh.conj().T / s
    return U, T


def _budget(n_rows, n_vars, cap):
    # simplex pivots allowed before handing the LP to HiGHS
    return min(cap, 2000 + 10 * n_vars + n_rows // 2)


def _sample_hit(points, z0):
    scale = max(1.0, float(np.max(np.linalg.norm(points, axis=1))))
    return bool(np.any(np.linalg.norm(points - z0, axis=1) <= 1e-12 * scale))


def extremal_value(region: SampledRegion, z0, n: int, K: int = DEFAULT_PHASES,
                   iteration_limit: int = 50000, max_rounds: int = 200) -> GreenEstimate:
    """Degree-``n`` extremal value of the cloud at ``z0``.

    The reported ``value`` is ``(1/n) log |P(z0)|`` for the (rotated)
    certificate ``P``, clamped below at zero; ``raw_value`` keeps the
    unclamped log.  ``slack`` bounds the overestimate caused by the phase
    discretization.
    """
    if K < 4:
        raise ExtremalError("need at least 4 phases")
    points = region.points
    z0 = as_points(z0, region.dim)[0]
    basis = BasisSpec.for_points(points, n)
    if len(points) < 2 * len(basis):
        raise InsufficientSamplesError(
            f"{len(points)} samples for {len(basis)} monomials; need at least {2 * len(basis)}")
    slack = phase_slack(K, n)

    if _sample_hit(points, z0):
        cert = np.zeros(len(basis), dtype=complex)
        cert[0] = 1.0
        return GreenEstimate(z0, n, 0.0, 0.0, cert, basis, K, slack, 0, lp_objective=1.0)

    U, T = _orthonormal_basis(basis, points)
    g = (basis.evaluate(z0) @ T)[0]
    scale = float(np.max(np.abs(g)))
    objective = np.concatenate([g.real, -g.imag]) / scale

    # the first LP sees four axis phases on a thinned subset; cuts add the rest
    seed = np.unique(np.linspace(0, len(points), min(len(points), 4 * len(basis)),
                                 endpoint=False).astype(int))
    start = [0, K // 4, K // 2, (3 * K) // 4]
    idx = np.repeat(seed, len(start))
    ph = np.tile(start, len(seed))
    program = lpmod.LinearProgram(objective, _rows(U[idx], ph[:, None], K), np.ones(len(idx)))
    solution = lpmod.solve_robust(program, _budget(len(idx), 2 * len(basis), iteration_limit))
    state = _CutState(U, scale, program, solution, set(zip(idx.tolist(), ph.tolist())), T)
    return _cut_loop(state, basis, z0, n, K, iteration_limit, max_rounds, solution.iterations)


def _cut_loop(state, basis, z0, n, K, iteration_limit, max_rounds, iterations, rounds=0):
    U = state.basis_values
    d = len(basis)
    while rounds < max_rounds:
        sol = state.solution
        if sol.status == lpmod.OPTIMAL:
            vals = U @ (sol.point[:d] + 1j * sol.point[d:])
            threshold = 1 + CUT_TOL
        elif sol.status == lpmod.UNBOUNDED:
            # cut along the improving ray: rows that grow without bound
            if sol.ray is None:
                break
            vals = U @ (sol.ray[:d] + 1j * sol.ray[d:])
            threshold = 1e-9 * float(np.max(np.abs(vals)))
        else:
            break
        k = np.mod(np.rint(-np.angle(vals) * K / (2 * np.pi)), K).astype(int)
        lhs = np.real(vals * np.exp(2j * np.pi * k / K))
        viol = np.flatnonzero(lhs > threshold)
        new = [(int(i), int(k[i])) for i in viol if (int(i), int(k[i])) not in state.present]
        if not new:
            break
        rounds += 1
        ni = np.array([i for i, _ in new])
        nk = np.array([kk for _, kk in new])
        rows = _rows(U[ni], nk[:, None], K)
        budget = _budget(state.program.n_rows + len(new), 2 * d, iteration_limit)
        sol, prog = lpmod.resolve_with_added_constraints(
            sol, state.program, rows, np.ones(len(new)), budget, solver=lpmod.solve_robust)
        state.present.update(new)
        state.program, state.solution = prog, sol
        iterations += sol.iterations

    sol = state.solution
    slack = phase_slack(K, n)
    if sol.status == lpmod.UNBOUNDED:
        return GreenEstimate(z0, n, math.inf, math.inf, np.zeros(d, dtype=complex), basis, K, slack,
                             iterations, converged=False, status=sol.status, rounds=rounds, _state=state)
    coef = sol.point[:d] + 1j * sol.point[d:]
    cert = state.to_monomial @ coef
    p0 = (basis.evaluate(z0) @ cert)[0]
    if abs(p0) > 0:
        cert = cert * (abs(p0) / p0)
    modulus = abs(p0)
    raw = math.log(modulus) / n if modulus > 0 else -math.inf
    converged = sol.optimal and rounds < max_rounds
    return GreenEstimate(z0, n, max(0.0, raw), raw, cert, basis, K, slack, iterations,
                         converged=converged, status=sol.status if converged else lpmod.ITERATION_LIMIT,
                         lp_objective=sol.value * state.objective_scale, rounds=rounds, _state=state)


def refine_phases(estimate: GreenEstimate, region: SampledRegion, target_slack: float,
                  iteration_limit: int = 50000) -> GreenEstimate:
    """Double the phase count until the slack bound drops below ``target_slack``.

    Old tangent rows stay valid for the finer phase set, so only violated
    rows are appended and the value can only move down.
    """
    if estimate.slack <= target_slack:
        return estimate
    n = estimate.degree
    K = estimate.phases
    while phase_slack(K, n) > target_slack:
        K *= 2
    state = estimate._state
    if state is None:
        # z0 was a sample point (value already 0) or no LP state was kept
        if estimate.value == 0.0 and estimate.lp_objective == 1.0:
            return GreenEstimate(**{**estimate.__dict__, "phases": K, "slack": phase_slack(K, n)})
        return extremal_value(region, estimate.z0, n, K, iteration_limit)
    factor = K // estimate.phases
    state = _CutState(state.basis_values, state.objective_scale, state.program, state.solution,
                      {(i, k * factor) for i, k in state.present}, state.to_monomial)
    return _cut_loop(state, estimate.basis, estimate.z0, n, K, iteration_limit, 200,
                     estimate.iterations, estimate.rounds)


def green_grid(region: SampledRegion, grid, n: int, K: int = DEFAULT_PHASES, threads: int = 1) -> list:
    """Extremal values over a grid of points, in grid order.

    Failures are returned in place as estimates with ``converged=False``
    and the error message in ``status``.
    """
    pts = as_points(grid, region.dim)

    def one(z):
        try:
            return extremal_value(region, z, n, K)
        except (ExtremalError, np.linalg.LinAlgError) as exc:
            basis = BasisSpec.for_points(region.points, n)
            return GreenEstimate(z, n, math.nan, math.nan, np.zeros(len(basis), complex), basis, K,
                                 phase_slack(K, n), 0, converged=False, status=f"error: {exc}")

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, pts))
    return [one(z) for z in pts]


@dataclass
class DegreeTrend:
    """Extremal values over increasing degrees and their 1/n extrapolation."""

    degrees: tuple
    values: tuple
    slacks: tuple
    extrapolated: float
    converged: bool

    @property
    def top(self) -> float:
        return self.values[-1]


def richardson(degrees, values) -> float:
    """Eliminate the ``a/n`` term using the two highest degrees (clamped at 0)."""
    (n1, v1), (n2, v2) = sorted(zip(degrees, values))[-2:]
    return max(0.0, (n2 * v2 - n1 * v1) / (n2 - n1))


def degree_trend(region: SampledRegion, z0, degrees=(4, 8, 16), K: int = DEFAULT_PHASES) -> DegreeTrend:
    ests = [extremal_value(region, z0, n, K) for n in degrees]
    values = tuple(e.value for e in ests)
    if len(degrees) >= 2:
        extrap = richardson(degrees, values)
    else:
        extrap = values[0]
    return DegreeTrend(tuple(degrees), values, tuple(e.slack for e in ests), extrap,
                       all(e.converged for e in ests))


def exponent_tuples(m, n):
    """All exponent tuples of total degree <= n, graded order."""
    return [e for e in itertools.chain.from_iterable(_exponents_of_total(m, t) for t in range(n + 1))]
