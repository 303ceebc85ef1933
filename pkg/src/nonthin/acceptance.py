"""The twelve acceptance criteria, runnable from tests and from ``nonthin verify``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import genus0 as g0
from . import lp as lpmod
from .asymptotics import NON_THIN, THIN, capacity_slope, robin_constant, thinness_profile
from .extremal import degree_trend, extremal_value, phase_slack
from .regions import (Ball, Density, Disk, Example1, Halfline, Product, RemoveSlice, Segment, Slab,
                      sample, segment_green)

LOG_SQRT5 = 0.5 * math.log(5.0)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _fmt(xs, digits=4):
    return "[" + ", ".join(f"{x:.{digits}f}" for x in xs) + "]"


# Each criterion returns (passed, detail).  ``ctx`` shares results with #12.

def disk_green(ctx):
    t0 = time.perf_counter()
    region = sample(Disk(0, 1), 1.0, Density(boundary=256, interior=64))
    got = [extremal_value(region, z, 8, 64).value for z in (1.5, 2.0, 4.0)]
    want = [math.log(z) for z in (1.5, 2.0, 4.0)]
    elapsed = time.perf_counter() - t0
    ok = all(abs(a - b) <= 0.01 for a, b in zip(got, want)) and elapsed < 10
    return ok, f"values {_fmt(got)} vs {_fmt(want)}, {elapsed:.2f}s < 10s"


def segment_green_oracle(ctx):
    region = sample(Segment(-2, 2), 2.0)
    out = []
    ok = True
    for z, want in ((3.0, 0.96242), (2j, 0.88137)):
        tr = degree_trend(region, z, (8, 16))
        out.append(f"z0={z}: {tr.extrapolated:.4f} (n=16 raw {tr.top:.4f}) vs {want}")
        ok &= abs(tr.extrapolated - want) <= 0.02 and tr.converged
    return ok, "; ".join(out)


def ball_green(ctx):
    t0 = time.perf_counter()
    est = extremal_value(sample(Ball(1.0), 1.0), (2, 0), 6)
    elapsed = time.perf_counter() - t0
    ok = abs(est.value - math.log(2)) <= 0.02 and elapsed < 60 and est.converged
    return ok, f"{est.value:.5f} vs log 2 = {math.log(2):.5f}, {elapsed:.1f}s < 60s"


def capacities(ctx):
    cases = ((Disk(0, 1), 1.0, 0.03), (Disk(0, 0.5), 0.5, 0.03), (Segment(-2, 2), 1.0, 0.05))
    got = [robin_constant(spec, 8).capacity for spec, _, _ in cases]
    ok = all(abs(c - want) <= tol for c, (_, want, tol) in zip(got, cases))
    return ok, f"capacities {_fmt(got)} vs [1, 0.5, 1]"


def non_thin_profile(ctx):
    prof = thinness_profile(Product(Halfline(), Halfline()), (-1, -1), (4, 8, 16), n=8)
    ctx["halfline2"] = prof
    g = [float(segment_green(-1, 0, R)) for R in prof.radii]
    inside = all(gi - 0.05 <= v <= 2 * gi + 0.05 for v, gi in zip(prof.values, g))
    decreasing = all(b < a for a, b in zip(prof.values, prof.values[1:]))
    ok = inside and decreasing and prof.verdict == NON_THIN
    return ok, (f"v {_fmt(prof.values)}, g_R {_fmt(g)}, limit {prof.extrapolated:.4f}, "
                f"verdict {prof.verdict}")


def thin_profile(ctx):
    prof = thinness_profile(Slab((1, 0), (-2, 2)), (3, 0), (4, 8, 16), n=8)
    ctx["slab"] = prof
    ok = min(prof.values) >= 0.90 and prof.verdict == THIN
    return ok, f"v {_fmt(prof.values)} (raw n=8 {_fmt(prof.raw_values)}), verdict {prof.verdict}"


def example1(ctx):
    prof = thinness_profile(RemoveSlice(Example1(), (1, 0)), (1, 2), (4, 8, 16), n=8)
    ctx["example1"] = prof
    floor = LOG_SQRT5 - 0.05
    ok = min(prof.values) >= floor
    return ok, (f"v {_fmt(prof.values)} vs floor log sqrt5 - 0.05 = {floor:.4f} "
                f"(log 2 = {math.log(2):.4f} is a lower bound from the cylinder {{|z2| <= 1}})")


def slopes(ctx):
    balls = capacity_slope(Ball(math.inf), (2, 4, 8), C_m=2.0, n=4)
    half = capacity_slope(Halfline(), (4, 8, 16), C_m=2.0, n=8)
    fixed = capacity_slope(Disk(0, 1), (2, 4, 8), C_m=2.0, n=4)
    ctx["slopes"] = (balls, half, fixed)
    got = [balls.slope, half.slope, fixed.slope]
    ok = abs(got[0] - 1) <= 0.05 and abs(got[1] - 1) <= 0.05 and abs(got[2]) <= 0.05
    return ok, f"slopes balls/halfline/disk {_fmt(got)} vs [1, 1, 0]"


def _harmonic(n):
    return math.fsum(1.0 / j for j in range(1, n + 1)) if n > 0 else 0.0


def genus_exact(ctx):
    t0 = time.perf_counter()
    lam = np.array([0.6, 0.8])
    l = 0.6
    prod = g0.LinearFormProduct(form=(1, 0))
    expo = g0.ExponentialApproximant(form=(1, 0))
    errs = []
    for n in (10, 100, 1000, 10000):
        for t in (2.5, 0.37 * n + 0.5):
            # zeros w_j = j / l: count is min(n, floor(t l))
            errs.append(g0.counting(prod, n, t, lam) - min(n, math.floor(t * l)))
        for R in (5.5, 0.3 * n + 0.5):
            m = math.ceil(R * l)
            want = l * (_harmonic(n) - _harmonic(m - 1)) if m <= n else 0.0
            errs.append(abs(g0.tail_sum(prod, n, lam, R) - want))
        errs.append(g0.counting(expo, n, math.sqrt(n), lam) - (n if n / l <= math.sqrt(n) else 0))
        errs.append(abs(g0.tail_sum(expo, n, lam, 10.0) - (l if n / l >= 10 else 0.0)))
    n_range = np.linspace(1000, 10000, 10).astype(int)
    rep = g0.condition_checks(prod, [lam], n_range, radii=(5.5,))
    m = math.ceil(5.5 * l)
    want42 = [l * (_harmonic(n) - _harmonic(m - 1)) / n for n in n_range]
    errs.extend(np.abs(rep.tail_table[0, 0] - want42))
    rep_e = g0.condition_checks(expo, [lam], n_range)
    errs.extend(np.abs(rep_e.unit_count[0] - l / n_range))
    errs.extend(np.abs(rep_e.growth_count[0]))
    worst = float(np.max(np.abs(errs)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 30
    return ok, f"max deviation {worst:.2e} over n up to 1e4, kappa {rep_e.kappa:g}, {elapsed:.1f}s < 30s"


def theorem4(ctx):
    expo = g0.ExponentialApproximant()
    x = np.linspace(-3, 3, 25)
    grid = (x[:, None] + 1j * x[None, :]).reshape(-1)
    E = grid[grid.real >= 0]
    n_range = range(10, 1001, 10)
    good = g0.growth_verify(expo, E, grid, n_range)
    cheb = g0.ChebyshevSlab(form=(1, 0))
    slab = sample(Slab((1, 0), (-2, 2)), 4.0)
    cgrid = np.array([[3, 0], [0, 1], [2j, 0], [1 + 1j, 1]], dtype=complex)
    bad = g0.growth_verify(cheb, slab, cgrid, range(10, 201, 10))
    at3 = float(np.exp(max(g0.log_growth(cheb, n, [[3, 0]])[0] for n in range(110, 201, 10))))
    ok = (abs(good.hypothesis_margin - 1) <= 0.05 and abs(good.conclusion_margin - 1) <= 0.05 and good.verified
          and bad.hypothesis_holds and not bad.verified and at3 >= 2.5)
    return ok, (f"exponential margins {good.hypothesis_margin:.4f}/{good.conclusion_margin:.4f} "
                f"verified={good.verified}; chebyshev margins {bad.hypothesis_margin:.4f}/"
                f"{bad.conclusion_margin:.4f}, at l(z)=3 {at3:.4f}, verified={bad.verified}")


def jensen(ctx):
    fams = [g0.CustomZeroTable(entries={"default": {"alpha": 1}}, weights=1),
            g0.CustomZeroTable(entries={"default": {"zeros": [2]}}, weights=1),
            g0.CustomZeroTable(entries={"default": {"zeros": [0.5]}}, weights=1)]
    got = [g0.circle_average(f, 1, quadrature=4096) for f in fams]
    want = [0.0, 0.0, math.log(2)]
    ok = all(abs(a - b) <= 1e-6 for a, b in zip(got, want))
    return ok, f"averages {_fmt(got, 8)} vs [0, 0, log 2]"


def properties(ctx):
    rng = np.random.default_rng(20240611)
    failures = []
    # LP feasibility, determinism and warm/cold agreement
    for _ in range(20):
        d = int(rng.integers(2, 8))
        rows = rng.integers(-5, 6, size=(4 * d, d)).astype(float)
        rows = np.vstack([rows, np.eye(d), -np.eye(d)])
        lp_ = lpmod.LinearProgram(rng.normal(size=d), rows, rng.integers(1, 10, size=len(rows)).astype(float))
        a, b = lpmod.solve(lp_), lpmod.solve(lp_)
        if not (a.optimal and lp_.max_violation(a.point) <= 1e-8 and np.array_equal(a.point, b.point)):
            failures.append("lp")
        half = len(rows) // 2
        first = lpmod.LinearProgram(lp_.objective, rows[:half], lp_.bounds[:half])
        s1 = lpmod.solve(first)
        if s1.optimal:
            warm, _ = lpmod.resolve_with_added_constraints(s1, first, rows[half:], lp_.bounds[half:])
            if abs(warm.value - a.value) > 1e-8:
                failures.append("warm/cold")
    # sample-set antitonicity and scaling invariance on the segment
    seg = sample(Segment(-2, 2), 2.0)
    full = extremal_value(seg, 3.0, 6)
    sub = extremal_value(seg.subset(np.arange(len(seg)) % 2 == 0), 3.0, 6)
    if sub.lp_objective < full.lp_objective - 1e-9:
        failures.append("antitonicity")
    s = float(rng.uniform(0.2, 5.0))
    scaled = extremal_value(seg.scaled(s), 3.0 * s, 6)
    if abs(scaled.value - full.value) > 1e-6:
        failures.append("scaling")
    # power supermultiplicativity
    for n1, n2 in ((2, 3), (4, 2)):
        v = {n: extremal_value(seg, 3.0, n).value for n in (n1, n2, n1 * n2)}
        if v[n1 * n2] < max(v[n1], v[n2]) - phase_slack(64, n1 * n2):
            failures.append(f"supermultiplicativity {n1}x{n2}")
    # capacity and profile monotonicity
    for sl in ctx.get("slopes", ()):
        caps = sl.capacities
        if any(b < a - 0.02 for a, b in zip(caps, caps[1:])):
            failures.append("capacity monotonicity")
    for key in ("halfline2", "slab", "example1"):
        if key in ctx and not ctx[key].nonincreasing():
            failures.append(f"profile monotonicity ({key})")
    # quadrature normalization
    grid = g0.DirectionGrid.for_dim(2, int(rng.integers(100, 3000)))
    # a vanishing order of 3 and no other zeros counts 3 on every slice
    const = g0.CustomZeroTable(form=(1, 0), entries={"default": {"alpha": 3}})
    if abs(grid.weights.sum() - 1) > 1e-12 or abs(g0.counting_integrated(const, 1, 0.5, grid) - 3) > 1e-9:
        failures.append("quadrature")
    return not failures, "all property checks hold" if not failures else "failed: " + ", ".join(failures)


CRITERIA = [
    (1, "disk Green oracle", disk_green),
    (2, "segment Green oracle", segment_green_oracle),
    (3, "C^2 ball oracle", ball_green),
    (4, "capacity oracles", capacities),
    (5, "non-thinness profile (halfline^2)", non_thin_profile),
    (6, "thinness profile (slab)", thin_profile),
    (7, "example1 minus slice lower bound", example1),
    (8, "capacity slopes", slopes),
    (9, "genus-zero exact checks", genus_exact),
    (10, "growth theorem harness", theorem4),
    (11, "circle averages", jensen),
    (12, "property suites", properties),
]


def run(only=None, echo=None) -> list[CriterionResult]:
    """Run the criteria (all, or the numbers in ``only``) in order."""
    ctx: dict = {}
    results = []
    for number, name, fn in CRITERIA:
        if only and number not in only:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = fn(ctx)
        except Exception as exc:  # a crash is a failure, reported like one
            ok, detail = False, f"error: {type(exc).__name__}: {exc}"
        res = CriterionResult(number, name, bool(ok), detail, time.perf_counter() - t0)
        results.append(res)
        if echo:
            echo(res.line())
    return results
