import math

import numpy as np
import pytest

from nonthin import extremal as ex
from nonthin import regions as rg

LOG2 = math.log(2)


@pytest.fixture(scope="module")
def disk():
    return rg.sample(rg.Disk(0, 1), 1.0, rg.Density(256, 64))


@pytest.fixture(scope="module")
def segment():
    return rg.sample(rg.Segment(-2, 2), 2.0)


def _check_certificate(est, cloud):
    """Independent re-evaluation of the reported polynomial."""
    P = est.polynomial(cloud.points)
    assert np.max(np.abs(P)) <= (1 / math.cos(math.pi / est.phases)) * (1 + 1e-9)
    assert est.certificate_log_value() == pytest.approx(est.raw_value, abs=1e-6)


def test_monomial_counts():
    assert ex.monomial_count(1, 8) == 9
    assert ex.monomial_count(2, 6) == 28
    b = ex.BasisSpec.for_points(np.array([[1 + 0j, 0j], [0j, 2 + 0j]]), 3)
    assert len(b) == 10 and b.radius > 0


def test_disk_at_two(disk):
    est = ex.extremal_value(disk, 2.0, 8, 64)
    assert est.value == pytest.approx(LOG2, abs=0.01)
    assert est.slack == pytest.approx(math.log(1 / math.cos(math.pi / 64)) / 8)
    _check_certificate(est, disk)


def test_interior_sample_point_is_zero(disk):
    inside = disk.points[~disk.boundary_mask][0]
    for n in (2, 5):
        assert ex.extremal_value(disk, inside, n).value == 0.0


def _chebyshev(z, n, a=-2.0, b=2.0):
    """(1/n) log |T_n| at the affine image of z: the exact degree-n value on [a, b] for real z."""
    t = np.polynomial.chebyshev.Chebyshev.basis(n)
    return math.log(abs(t((2 * z - a - b) / (b - a)))) / n


def test_segment_degree16_brackets(segment):
    # finite degree sits below the Green value by about c/n; T_16 is feasible
    for z in (3.0, 2j):
        est = ex.extremal_value(segment, z, 16, 64)
        assert est.value >= _chebyshev(z, 16) - 1e-6
        assert est.value <= float(rg.segment_green(z, -2, 2)) + est.slack
        _check_certificate(est, segment)
    assert ex.extremal_value(segment, 3.0, 16).value == pytest.approx(_chebyshev(3.0, 16), abs=1e-3)


@pytest.mark.parametrize("z,want", [(3.0, 0.96242), (2j, 0.88137)])
def test_segment_trend(segment, z, want):
    tr = ex.degree_trend(segment, z, (8, 16))
    assert tr.converged
    assert tr.extrapolated == pytest.approx(want, abs=0.02)


def test_ball_c2():
    cloud = rg.sample(rg.Ball(1.0, 2), 1.0)
    est = ex.extremal_value(cloud, (2, 0), 6)
    assert est.value == pytest.approx(LOG2, abs=0.02)


def test_green_grid_disk(disk):
    vals = [e.value for e in ex.green_grid(disk, [1.5, 2.0, 4.0], 8, threads=2)]
    assert vals == pytest.approx([math.log(1.5), LOG2, math.log(4)], abs=0.01)
    inner = [e.value for e in ex.green_grid(disk, [0.1, 0.3j, -0.5], 6)]
    assert max(inner) <= ex.phase_slack(64, 6) + 1e-9


def test_product_sandwich():
    R = 6.0
    cloud = rg.sample(rg.product(rg.Segment(0, R), rg.Segment(0, R)), R * math.sqrt(2))
    est = ex.extremal_value(cloud, (-1, -1), 8)
    g = float(rg.segment_green(-1, 0, R))
    tol = est.slack + 0.02
    # P(z1) with T_8 on [0, R] is a competitor, so the exact degree-8 value bounds from below
    assert _chebyshev(-1.0, 8, 0.0, R) - tol <= est.value <= 2 * g + tol


def test_refine_phases_disk(disk):
    coarse = ex.extremal_value(disk, 2.0, 8, 4)
    fine = ex.refine_phases(coarse, disk, 1e-3)
    assert fine.slack <= 1e-3
    assert fine.value == pytest.approx(LOG2, abs=0.01)
    assert fine.value <= coarse.value + 1e-9
    assert coarse.value - fine.value <= coarse.slack + 1e-9
    assert ex.refine_phases(fine, disk, 1e-2) is fine


def test_refine_phases_segment(segment):
    fine = ex.refine_phases(ex.extremal_value(segment, 3.0, 16, 16), segment, 1e-3)
    assert fine.slack <= 1e-3
    assert fine.value == pytest.approx(_chebyshev(3.0, 16), abs=1e-3)


def test_rotation_real_part_equals_modulus(segment):
    # maximizing Re P(z0) at a point where the optimum is not real
    est = ex.extremal_value(segment, 1 + 2j, 6)
    p0 = est.polynomial(np.array([[1 + 2j]]))[0]
    assert abs(p0.imag) <= 1e-9 * abs(p0)
    assert math.log(abs(p0)) / 6 == pytest.approx(est.raw_value, abs=1e-9)


def test_too_few_samples_rejected():
    cloud = rg.sample(rg.Disk(0, 1), 1.0, rg.Density(8, 0))
    with pytest.raises(ex.InsufficientSamplesError):
        ex.extremal_value(cloud, 2.0, 8)


def test_richardson():
    assert ex.richardson((4, 8), (1.0, 0.5)) == pytest.approx(0.0)


# --- properties (segment LPs are small; fixed seeds)

def test_antitonicity(segment):
    full = ex.extremal_value(segment, 3.0, 6)
    for k in (2, 3):
        sub = ex.extremal_value(segment.subset(np.arange(len(segment)) % k == 0), 3.0, 6)
        assert sub.lp_objective >= full.lp_objective - 1e-9


@pytest.mark.parametrize("s", [0.3, 2.5, 7.0])
def test_scaling_invariance(segment, s):
    a = ex.extremal_value(segment, 3.0 + 0.5j, 6)
    b = ex.extremal_value(segment.scaled(s), s * (3.0 + 0.5j), 6)
    assert b.value == pytest.approx(a.value, abs=1e-6)


@pytest.mark.parametrize("n1,n2", [(2, 3), (4, 2)])
def test_power_supermultiplicativity(segment, n1, n2):
    v = {n: ex.extremal_value(segment, 3.0, n).value for n in (n1, n2, n1 * n2)}
    assert v[n1 * n2] >= max(v[n1], v[n2]) - ex.phase_slack(64, n1 * n2)


def test_nonnegative_and_deterministic(segment):
    rng = np.random.default_rng(7)
    pts = rng.uniform(-3, 3, 6) + 1j * rng.uniform(-1, 1, 6)
    a = [e.value for e in ex.green_grid(segment, pts, 4)]
    b = [e.value for e in ex.green_grid(segment, pts, 4, threads=3)]
    assert a == b
    assert min(a) >= 0.0
