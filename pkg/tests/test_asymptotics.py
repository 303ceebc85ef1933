import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonthin import asymptotics as asy
from nonthin import regions as rg


@pytest.mark.parametrize("spec,gamma,tol", [
    (rg.Disk(0, 1), 0.0, 0.03),
    (rg.Disk(0, 0.5), math.log(2), 0.03),
])
def test_robin_disks(spec, gamma, tol):
    est = asy.robin_constant(spec, n=8)
    assert est.gamma == pytest.approx(gamma, abs=tol)
    assert est.capacity == math.exp(-est.gamma)
    assert est.excess.shape == (2, 8)
    assert all(b > a for a, b in zip(est.radii, est.radii[1:]))


def test_robin_segment():
    est = asy.robin_constant(rg.Segment(-2, 2), n=16)
    assert est.capacity == pytest.approx(1.0, abs=0.05)


def test_robin_rejects_unbounded_and_bad_radii():
    with pytest.raises(asy.AsymptoticsError):
        asy.robin_constant(rg.Halfline((0j,), (1 + 0j,)))
    with pytest.raises(asy.AsymptoticsError):
        asy.robin_constant(rg.Disk(0, 1), radii=(0.5, 2.0))
    with pytest.raises(asy.AsymptoticsError):
        asy.robin_constant(rg.Disk(0, 1), directions=4)


def test_ray_directions_unit():
    for m in (1, 2):
        d = asy.ray_directions(m, 16)
        assert np.allclose(np.linalg.norm(d, axis=1), 1.0)


def test_full_space_profile_is_zero():
    prof = asy.thinness_profile(rg.Ball(math.inf, 2), (1, 1), (2, 4, 8), n=4)
    assert max(prof.values) <= 1e-9
    assert all(v >= 0 for v in prof.raw_values)


def test_slab_profile_thin():
    slab = rg.Slab((1 + 0j, 0j), (-2.0, 2.0))
    prof = asy.thinness_profile(slab, (3, 0), (4, 8, 16), n=8)
    assert min(prof.values) >= 0.90
    assert prof.verdict == asy.THIN
    assert prof.nonincreasing()
    assert [r["R"] for r in prof.rows()] == [4.0, 8.0, 16.0]


def test_profile_needs_three_radii():
    with pytest.raises(asy.AsymptoticsError):
        asy.thinness_profile(rg.Disk(0, 1), 2.0, (1, 2))


def test_bounded_set_slope_is_flat():
    sl = asy.capacity_slope(rg.Disk(0, 1), (2, 4, 8), C_m=2.0, n=6)
    assert sl.slope == pytest.approx(0.0, abs=0.05)
    assert sl.threshold == 0.5 and not sl.criterion_met
    caps = sl.capacities
    assert all(b >= a - 0.02 for a, b in zip(caps, caps[1:]))


def test_slope_requires_cm():
    with pytest.raises(asy.AsymptoticsError):
        asy.capacity_slope(rg.Disk(0, 1), (2, 4, 8), C_m=None)
    with pytest.raises(asy.AsymptoticsError):
        asy.capacity_slope(rg.Disk(0, 1), (2, 4, 8), C_m=-1)


def test_classify_rules():
    assert asy.classify([0.3, 0.1, 0.02], 0.01) == asy.NON_THIN
    assert asy.classify([0.96, 0.96, 0.965], 0.96) == asy.THIN
    assert asy.classify([0.3, 0.5, 0.7], 0.9) == asy.INCONCLUSIVE
    assert asy.classify([0.3, 0.1, 0.02], 0.01, converged=False) == asy.INCONCLUSIVE


@settings(max_examples=50, deadline=None, derandomize=True)
@given(st.floats(0, 2), st.floats(-3, 3),
       st.lists(st.floats(1, 100), min_size=3, max_size=6, unique=True))
def test_fit_limit_recovers_model(v_inf, a, radii):
    radii = sorted(radii)
    if radii[-1] / radii[0] < 1.5:
        radii[-1] = radii[0] * 2
    vals = [v_inf + a / math.sqrt(r) for r in radii]
    got_v, got_a = asy.fit_limit(radii, vals)
    assert got_v == pytest.approx(v_inf, abs=1e-6)
    assert got_a == pytest.approx(a, abs=1e-6)


@settings(max_examples=50, deadline=None, derandomize=True)
@given(st.lists(st.floats(0, 2), min_size=3, max_size=6), st.floats(-1, 3))
def test_classify_total(values, limit):
    assert asy.classify(values, limit) in (asy.NON_THIN, asy.THIN, asy.INCONCLUSIVE)
