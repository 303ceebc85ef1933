"""Limits in R and |z|: thinness profiles, Robin constants, capacity slopes.

Every value fed into these limits is a two-degree Richardson trend
(degrees ``n // 2`` and ``n``) rather than a single finite-degree LP value:
finite-degree extremal values undershoot the Green function by roughly
``c / n``, which would otherwise bias every verdict toward non-thinness.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .extremal import DEFAULT_PHASES, DegreeTrend, degree_trend
from .regions import (Density, Region, RegionError, SampledRegion, TruncationSchedule,
                      as_points, sample)

NON_THIN = "non-thin-evidence"
THIN = "thin-evidence"
INCONCLUSIVE = "inconclusive"

NON_THIN_LIMIT = 0.05
THIN_FLOOR = 0.10
FLAT_BAND = 0.02
TREND_TOL = 0.02
MIN_DIRECTIONS = 8


class AsymptoticsError(ValueError):
    pass


def trend_degrees(n: int) -> tuple:
    if n < 2:
        raise AsymptoticsError("degree must be at least 2 for a two-degree trend")
    return (n // 2, n)


def _trend(region: SampledRegion, z, n: int, K: int) -> DegreeTrend:
    return degree_trend(region, z, trend_degrees(n), K)


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# ------------------------------------------------------------------ profiles

@dataclass
class LimitProfile:
    """Truncation profile ``R -> V_{E_R}(z)`` with a thin/non-thin verdict."""

    z: np.ndarray
    radii: tuple
    values: tuple
    trends: tuple = field(repr=False)
    extrapolated: float
    fit_slope: float
    verdict: str
    converged: bool
    degree: int
    phases: int

    @property
    def slacks(self) -> tuple:
        return tuple(t.slacks[-1] for t in self.trends)

    @property
    def raw_values(self) -> tuple:
        """Values at the top degree, before extrapolation in ``n``."""
        return tuple(t.top for t in self.trends)

    def nonincreasing(self, tol: float = TREND_TOL) -> bool:
        v = self.values
        return all(b <= a + tol + s for a, b, s in zip(v, v[1:], self.slacks))

    def rows(self) -> list[dict]:
        return [{"R": R, "v": v, "v_raw": t.top, "slack": t.slacks[-1], "degree": self.degree}
                for R, v, t in zip(self.radii, self.values, self.trends)]


def fit_limit(radii, values) -> tuple[float, float]:
    """Least-squares fit ``v = v_inf + a / sqrt(R)``; returns ``(v_inf, a)``."""
    x = 1.0 / np.sqrt(np.asarray(radii, dtype=float))
    a, v_inf = np.polyfit(x, np.asarray(values, dtype=float), 1)
    return float(v_inf), float(a)


def classify(values, limit, slacks=None, converged=True) -> str:
    """Verdict from the raw trend and the extrapolated limit."""
    if not converged:
        return INCONCLUSIVE
    slacks = slacks or [0.0] * len(values)
    v = list(values)
    decreasing = v[-1] < v[0] and all(b <= a + TREND_TOL + s for a, b, s in zip(v, v[1:], slacks))
    if limit <= NON_THIN_LIMIT and decreasing:
        return NON_THIN
    if min(v) >= THIN_FLOOR and max(v) - min(v) <= FLAT_BAND:
        return THIN
    return INCONCLUSIVE


def thinness_profile(spec: Region, z, schedule, n: int = 8, K: int = DEFAULT_PHASES,
                     density: Density | None = None, threads: int = 1) -> LimitProfile:
    """Profile ``V_{E_R}(z)`` over a truncation schedule.

    ``v_i`` is the Richardson trend over degrees ``(n // 2, n)`` on
    ``sample(spec, R_i)``; the limit comes from fitting ``v_inf + a R^-1/2``.
    """
    if not isinstance(schedule, TruncationSchedule):
        schedule = TruncationSchedule(tuple(schedule))
    if len(schedule) < 3:
        raise AsymptoticsError("a profile needs at least 3 radii")
    z = as_points(z, spec.dim)[0]

    def one(R):
        return _trend(sample(spec, R, density), z, n, K)

    trends = tuple(_map(one, schedule.radii, threads))
    values = tuple(t.extrapolated for t in trends)
    converged = all(t.converged for t in trends)
    v_inf, a = fit_limit(schedule.radii, values)
    verdict = classify(values, v_inf, [t.slacks[-1] for t in trends], converged)
    return LimitProfile(z, schedule.radii, values, trends, v_inf, a, verdict, converged, n, K)


# ------------------------------------------------------------ Robin constant

@dataclass
class RobinEstimate:
    gamma: float
    directions: np.ndarray
    radii: tuple
    # rows: one per radius, columns per direction, of v(z) - log|z|
    excess: np.ndarray
    degree: int
    converged: bool = True

    @property
    def capacity(self) -> float:
        return math.exp(-self.gamma)


def ray_directions(m: int, count: int = MIN_DIRECTIONS) -> np.ndarray:
    """Deterministic unit directions in C^m, none along a coordinate axis for m = 1."""
    k = np.arange(count)
    if m == 1:
        return np.exp(2j * np.pi * (k + 0.5) / count)[:, None]
    # Hopf coordinates with a golden-ratio spread of the modulus split
    t = np.arccos(np.sqrt(np.mod(0.5 + k * 0.6180339887498949, 1.0)))
    a = 2 * np.pi * (k + 0.5) / count
    b = 2 * np.pi * np.mod(k * 0.7548776662466927, 1.0)
    return np.column_stack([np.cos(t) * np.exp(1j * a), np.sin(t) * np.exp(1j * b)])


def robin_constant(spec, n: int = 8, radii=None, directions: int = MIN_DIRECTIONS,
                   K: int = DEFAULT_PHASES, density: Density | None = None,
                   threads: int = 1) -> RobinEstimate:
    """Estimate ``gamma = lim sup (V(z) - log|z|)`` along rays.

    ``spec`` is a bounded :class:`Region` or an already sampled cloud.
    Default radii are 8 and 16 times the cloud's outer radius; the estimate
    is the median of ``v - log|z|`` over all directions at the two largest
    radii.
    """
    if isinstance(spec, SampledRegion):
        cloud = spec
    else:
        if not getattr(spec, "bounded", True) or not math.isfinite(spec.circumradius()):
            raise AsymptoticsError(f"{type(spec).__name__} is unbounded; the Robin constant needs a compact set")
        cloud = sample(spec, spec.circumradius() * (1 + 1e-9), density)
    if directions < MIN_DIRECTIONS:
        raise AsymptoticsError(f"need at least {MIN_DIRECTIONS} directions")
    outer = float(np.max(np.linalg.norm(cloud.points, axis=1)))
    if outer == 0:
        raise AsymptoticsError("a single point has no Robin constant")
    radii = tuple(float(r) for r in (radii or (8 * outer, 16 * outer)))
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise AsymptoticsError("radii must be strictly increasing")
    if min(radii) <= outer:
        raise AsymptoticsError("ray radii must exceed the set's outer radius")
    dirs = ray_directions(cloud.dim, directions)
    jobs = [(r, u) for r in radii for u in dirs]

    def one(job):
        r, u = job
        return _trend(cloud, r * u, n, K)

    trends = _map(one, jobs, threads)
    excess = np.array([t.extrapolated - math.log(r) for (r, _), t in zip(jobs, trends)])
    excess = excess.reshape(len(radii), len(dirs))
    top = excess[-2:] if len(radii) >= 2 else excess
    return RobinEstimate(float(np.median(top)), dirs, radii, excess, n,
                         all(t.converged for t in trends))


# ---------------------------------------------------------- capacity slope

@dataclass
class CapacitySlope:
    radii: tuple
    gammas: tuple
    slope: float
    C_m: float
    estimates: tuple = field(repr=False, default=())

    @property
    def capacities(self) -> tuple:
        return tuple(math.exp(-g) for g in self.gammas)

    @property
    def threshold(self) -> float:
        return (self.C_m - 1) / self.C_m

    @property
    def meaningful(self) -> bool:
        return self.C_m > 1

    @property
    def criterion_met(self) -> bool:
        return self.slope > self.threshold

    @property
    def verdict(self) -> str:
        return "criterion-met" if self.criterion_met else "criterion-not-met"

    def rows(self) -> list[dict]:
        return [{"R": R, "gamma": g, "capacity": math.exp(-g)} for R, g in zip(self.radii, self.gammas)]


def capacity_slope(spec: Region, schedule, C_m: float, n: int = 8, K: int = DEFAULT_PHASES,
                   directions: int = MIN_DIRECTIONS, density: Density | None = None,
                   threads: int = 1) -> CapacitySlope:
    """Least-squares slope of ``log C(E_R)`` against ``log R``.

    ``C_m`` has no default: the constant is not known in closed form, so the
    verdict ``slope > (C_m - 1) / C_m`` is always conditional on the value
    the caller supplies.
    """
    if C_m is None:
        raise AsymptoticsError("C_m must be supplied; there is no default")
    C_m = float(C_m)
    if not C_m > 0:
        raise AsymptoticsError("C_m must be positive")
    if not isinstance(schedule, TruncationSchedule):
        schedule = TruncationSchedule(tuple(schedule))
    if len(schedule) < 3:
        raise AsymptoticsError("a slope needs at least 3 radii")
    estimates = []
    for R in schedule:
        try:
            cloud = sample(spec, R, density)
        except RegionError as exc:
            raise AsymptoticsError(str(exc)) from exc
        estimates.append(robin_constant(cloud, n, None, directions, K, threads=threads))
    gammas = tuple(e.gamma for e in estimates)
    # log C = -gamma
    slope = float(np.polyfit(np.log(schedule.radii), -np.asarray(gammas), 1)[0])
    return CapacitySlope(schedule.radii, gammas, slope, C_m, tuple(estimates))
