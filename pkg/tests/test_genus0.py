import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from nonthin import genus0 as g0
from nonthin import regions as rg

HARMONIC = g0.LinearFormProduct()                       # prod_{j<=n} (1 - l/j), l = z
HARMONIC2 = g0.LinearFormProduct(form=(1, 0))           # same in C^2 with l = z1
EXPO = g0.ExponentialApproximant()
EXPO2 = g0.ExponentialApproximant(form=(1, 0))
CHEB = g0.ChebyshevSlab(form=(1, 0))
E1 = np.array([1.0 + 0j, 0j])


def H(n):
    return float(sum(Fraction(1, j) for j in range(1, n + 1)))


# ---- counting

def test_counting_harmonic():
    assert g0.counting(HARMONIC2, 10, 5.5, E1) == 5
    assert g0.counting(HARMONIC, 10, 0.5) == 0


def test_counting_exponential_outside_sqrt():
    assert g0.counting(EXPO2, 100, 10.0, E1) == 0
    assert g0.counting(EXPO2, 100, 100.0, E1) == 100


def test_counting_includes_vanishing_order():
    fam = g0.CustomZeroTable(entries={"default": {"alpha": 2, "zeros": [3]}})
    assert g0.counting(fam, 1, 1.0) == 2
    assert g0.counting(fam, 1, 3.0) == 3


def test_lazy_tail_is_uncertain():
    fam = g0.CustomZeroTable(entries={"default": {"zeros": [1, 2], "tail_radius": 5, "tail_bound": 0.1}})
    assert g0.counting(fam, 1, 4.0) == 2
    with pytest.raises(g0.UncertainCountError):
        g0.counting(fam, 1, 6.0)
    value, bound = g0.tail_sum(fam, 1, None, 1.5, with_bound=True)
    assert value == pytest.approx(0.5) and bound == 0.1


def test_counting_integrated_constant_and_m1():
    grid = g0.DirectionGrid.for_dim(2, 500)
    const = g0.CustomZeroTable(form=(1, 0), entries={"default": {"alpha": 3}})
    assert g0.counting_integrated(const, 1, 0.5, grid) == pytest.approx(3.0, abs=1e-9)
    assert g0.counting_integrated(HARMONIC, 10, 5.5) == g0.counting(HARMONIC, 10, 5.5)


def test_counting_integrated_matches_fubini_study_integral():
    # |lam1|^2 is uniform on [0, 1] under the normalized measure; the count is min(n, floor(t |lam1|))
    n, t = 10, 5.5
    oracle = integrate.quad(lambda u: min(n, math.floor(t * math.sqrt(u))), 0, 1,
                            points=[(k / t) ** 2 for k in range(1, 6)], limit=200)[0]
    got = g0.counting_integrated(HARMONIC2, n, t, g0.DirectionGrid.for_dim(2, 10_000))
    assert got == pytest.approx(oracle, abs=1e-3)
    # at t = 1 only |lam1| = 1 counts, a null set
    assert g0.counting_integrated(HARMONIC2, n, 1.0, g0.DirectionGrid.for_dim(2, 2000)) == pytest.approx(0, abs=1e-3)


def test_direction_grid_invariants():
    for m, count in ((1, 5), (2, 2048), (2, 37)):
        grid = g0.DirectionGrid.for_dim(m, count)
        assert abs(grid.weights.sum() - 1) <= 1e-12
        assert np.all(grid.weights > 0)
        assert np.allclose(np.linalg.norm(grid.directions, axis=1), 1.0)


# ---- tail sums

def test_tail_sum_examples():
    assert g0.tail_sum(HARMONIC, 10, None, 5.5).real == pytest.approx(sum(1 / j for j in range(6, 11)), abs=1e-12)
    assert g0.tail_sum(HARMONIC, 10, None, 5.5).real == pytest.approx(0.645635, abs=1e-6)
    assert g0.tail_sum(HARMONIC, 10, None, 11.0) == 0
    assert g0.tail_sum(EXPO, 50, None, 10.0) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(1, 200), st.floats(0.1, 250), st.floats(0.1, 250))
def test_tail_sum_difference(n, R1, R2):
    lo, hi = sorted((R1, R2))
    diff = g0.tail_sum(HARMONIC, n, None, lo) - g0.tail_sum(HARMONIC, n, None, hi)
    direct = sum(1 / j for j in range(1, n + 1) if lo <= j < hi)
    assert diff.real == pytest.approx(direct, abs=1e-9)


# ---- evaluation

def test_chebyshev_values():
    # T_n(l / 2) on [-2, 2]; oracle from numpy's Chebyshev basis
    t3 = np.polynomial.chebyshev.Chebyshev.basis(3)
    assert g0.evaluate(CHEB, 3, (2, 0)).real == pytest.approx(1.0, abs=1e-12)
    assert g0.evaluate(CHEB, 3, (4, 0)).real == pytest.approx(t3(2.0), rel=1e-12)
    assert t3(2.0) == 26


def test_exponential_value():
    assert g0.evaluate(EXPO, 4, 1.0).real == pytest.approx(0.31640625, abs=1e-14)


def test_evaluate_at_zero_and_truncation():
    assert g0.evaluate(HARMONIC, 10, 7.0) == 0
    full = g0.evaluate_full(HARMONIC, 10, 0.3)
    part = g0.evaluate_full(HARMONIC, 10, 0.3, J=4)
    assert full.relative_error == 0
    # the bound covers the dropped factors, i.e. full / part
    assert abs(full.value / part.value - 1) <= part.relative_error


def test_evaluate_large_n_log_domain():
    ev = g0.evaluate_full(EXPO, 10_000, 50.0)
    assert ev.log_abs == pytest.approx(10_000 * math.log1p(-50 / 10_000), rel=1e-12)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(1, 40), st.complex_numbers(max_magnitude=5), st.complex_numbers(min_magnitude=0.2, max_magnitude=3))
def test_slice_consistency(n, w, lam1):
    lam = np.array([lam1, 0.5])
    z = w * lam
    direct = np.prod([1 - z[0] / j for j in range(1, n + 1)])
    via_slice = g0.slice_evaluate(HARMONIC2.slice(n, lam), w)
    assert via_slice == pytest.approx(direct, rel=1e-9, abs=1e-12)
    s = HARMONIC2.slice(n, lam)
    assert np.allclose(s.zeros, np.arange(1, n + 1) / lam1, rtol=1e-15)


# ---- conditions

N_RANGE = tuple(range(100, 1001, 100))


def test_exponential_kappa_zero():
    rep = g0.condition_checks(EXPO2, [E1, np.array([0.6, 0.8])], N_RANGE)
    assert rep.kappa == 0.0
    # unit count: multiplicity-n zero at n/|l| gives (n |l| / n) / n
    for i, l in enumerate((1.0, 0.6)):
        assert np.allclose(rep.unit_count[i], [l / n for n in N_RANGE], atol=1e-15)
        assert rep.unit_count_proxy[i] <= l / N_RANGE[0]


def test_harmonic_tail_table_table():
    rep = g0.condition_checks(HARMONIC2, [E1, np.array([0.6, 0.8])], N_RANGE, radii=(2.0, 5.5))
    for i, l in enumerate((1.0, 0.6)):
        for r, R in enumerate((2.0, 5.5)):
            j0 = math.ceil(R * l) - 1
            want = [l * (H(n) - H(j0)) / n for n in N_RANGE]
            assert np.allclose(rep.tail_table[i, r], want, atol=1e-9, rtol=0)


def test_condition_range_guard():
    with pytest.raises(g0.GenusZeroError):
        g0.condition_checks(EXPO, None, range(1, 5))


def test_counting_monotone():
    for n in (5, 20):
        counts = [g0.counting(HARMONIC, n, t) for t in np.linspace(0.5, 30, 40)]
        assert counts == sorted(counts)
    assert [g0.counting(HARMONIC, n, 7.5) for n in range(1, 15)] == sorted(g0.counting(HARMONIC, n, 7.5)
                                                                          for n in range(1, 15))


# ---- growth harness

def test_growth_exponential_verified():
    E = rg.sample(rg.Slab((1 + 0j,), (0.0, 3.0)), 3.0)
    xs = np.linspace(-3, 3, 13)
    grid = (xs[:, None] + 1j * xs[None, :]).reshape(-1)
    rep = g0.growth_verify(EXPO, E, grid, range(100, 1001, 100))
    assert rep.verified and rep.hypothesis_holds and rep.conclusion_holds


def test_growth_chebyshev_not_verified():
    slab = rg.sample(rg.Slab((1 + 0j, 0j), (-2.0, 2.0)), 4.0)
    rep = g0.growth_verify(CHEB, slab, [(3, 0)], range(10, 201, 10))
    assert rep.hypothesis_margin <= 1 + 1e-9
    assert rep.conclusion_margin >= 2.5
    assert not rep.verified


def test_growth_constant_family():
    one = g0.CustomZeroTable(entries={"default": {}}, weights=1)
    rep = g0.growth_verify(one, [0.5, 2.0], [10.0], range(1, 11))
    assert rep.hypothesis_margin == 1.0 and rep.conclusion_margin == 1.0 and rep.verified


# ---- circle averages and theorem 5

@pytest.mark.parametrize("entry,want", [
    ({"alpha": 1}, 0.0),
    ({"zeros": [2]}, 0.0),
    ({"zeros": [0.5]}, math.log(2)),
])
def test_circle_average_examples(entry, want):
    fam = g0.CustomZeroTable(entries={"default": entry}, weights=1)
    assert g0.circle_average(fam, 1, quadrature=4096) == pytest.approx(want, abs=1e-6)


def test_circle_average_zero_on_circle_is_flagged():
    data = g0.CustomZeroTable(entries={"default": {"zeros": [1]}}, weights=1).data(1)
    ca = g0.slice_circle_average(data, 1024)
    assert ca.flagged
    # the nudged node contributes about log(1e-9) / N
    assert ca.value == pytest.approx(0.0, abs=abs(math.log(g0.CIRCLE_NUDGE)) / 1024 + 1e-3)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=4).filter(lambda c: abs(abs(c) - 1) > 0.1),
                min_size=1, max_size=6), st.floats(0.5, 3))
def test_jensen_consistency(zeros, a):
    fam = g0.CustomZeroTable(entries={"default": {"zeros": [[z.real, z.imag] for z in zeros], "a": a}}, weights=1)
    data = fam.data(1)
    assert g0.circle_average(fam, 1, quadrature=4096) == pytest.approx(g0.jensen_average(data), abs=1e-6)


def test_theorem5_exponent_and_check():
    assert g0.theorem5_exponent(1.0, 0.9, 2.0) == pytest.approx(1.25)
    with pytest.raises(g0.GenusZeroError):
        g0.theorem5_exponent(1.0, 0.2, 2.0)
    rep = g0.theorem5_check(EXPO, None, [1, 2, 4, 8], range(10, 101, 10), 1.0, 0.9, 2.0, quadrature=256)
    assert rep.passed and not rep.flagged


def test_family_json_roundtrip():
    for fam in (HARMONIC2, EXPO, CHEB, g0.CustomZeroTable(entries={"default": {"zeros": [2]}})):
        again = g0.from_json(fam.to_json())
        z = np.full(fam.dim, 0.7)
        assert g0.evaluate(again, 5, z) == pytest.approx(g0.evaluate(fam, 5, z))
