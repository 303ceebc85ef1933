import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonthin import regions as rg

SPECS = {
    "disk": rg.Disk(0, 1),
    "ball": rg.Ball(1.0, 2),
    "polydisk": rg.Polydisk(1.0, 2.0),
    "segment": rg.Segment(-2, 2),
    "halfline": rg.Halfline((0j,), (1 + 0j,)),
    "slab": rg.Slab((1 + 0j, 0j), (-2.0, 2.0)),
    "cone": rg.Cone((1 + 0j, 0j), 0.5),
    "example1": rg.Example1(),
    "product": rg.product(rg.Halfline((0j,), (1 + 0j,)), rg.Halfline((0j,), (1 + 0j,))),
    "fatten": rg.fatten(rg.Segment(-2, 2), 0.5),
    "union": rg.Union((rg.Disk(0, 1), rg.Disk(3, 1))),
}


def test_disk_sample_counts():
    s = rg.sample(rg.Disk(0, 1), 1.0, rg.Density(256, 64))
    assert len(s) == 320
    assert np.all(np.abs(s.points[:, 0]) <= 1 + 1e-12)
    assert np.sum(np.isclose(np.abs(s.points[:, 0]), 1.0)) == 256


def test_slab_membership():
    s = rg.sample(SPECS["slab"], 4.0)
    z1 = s.points[:, 0]
    assert np.all(np.abs(z1.imag) <= 1e-12)
    assert np.all((z1.real >= -2 - 1e-12) & (z1.real <= 2 + 1e-12))
    assert np.all(np.linalg.norm(s.points, axis=1) <= 4 + 1e-9)


def test_example1_sample_pieces():
    s = rg.sample(rg.Example1(), 2.0)
    p = s.points
    strip = np.abs(p[:, 1]) <= 1 + 1e-12
    axis = np.abs(p[:, 0]) <= 1e-12
    assert np.all(strip | axis)
    assert np.any(axis & (np.abs(p[:, 1]) > 1.5))
    assert np.all(np.linalg.norm(p, axis=1) <= 2 + 1e-9)


def test_fatten_distance():
    s = rg.sample(SPECS["fatten"], 4.0)
    d = rg.Segment(-2, 2).distance(s.points)
    assert np.all(d <= 0.5 + 1e-9)


def test_product_of_halflines_is_real_nonnegative():
    s = rg.sample(SPECS["product"], 8.0)
    assert np.all(np.abs(s.points.imag) <= 1e-12)
    assert np.all(s.points.real >= -1e-12)


def test_truncate_schedule_of_full_space():
    clouds = rg.truncate_schedule(rg.Ball(math.inf, 2), (2, 4, 8))
    assert [c.R for c in clouds] == [2.0, 4.0, 8.0]
    for c in clouds:
        assert np.max(np.linalg.norm(c.points, axis=1)) == pytest.approx(c.R)


def test_empty_truncation_is_an_error():
    with pytest.raises(rg.EmptyRegionError):
        rg.sample(rg.Disk(10, 1), 2.0)


def test_invalid_specs_rejected():
    with pytest.raises(rg.RegionError):
        rg.Disk(0, -1)
    with pytest.raises(rg.RegionError):
        rg.fatten(rg.Segment(-1, 1), 0.0)
    with pytest.raises(rg.RegionError):
        rg.product(rg.Ball(1.0, 2), rg.Disk(0, 1))
    with pytest.raises(rg.RegionError):
        rg.TruncationSchedule((4, 2))


def test_closed_forms():
    ex = rg.RemoveSlice(rg.Example1(), (1 + 0j, 0j))
    assert rg.closed_form_green(ex, (1, 2)) == pytest.approx(math.log(math.sqrt(5)), abs=1e-12)
    # Joukowski: g(3) = log((3 + sqrt 5) / 2)
    assert rg.closed_form_green(rg.Segment(-2, 2), 3) == pytest.approx(math.log((3 + math.sqrt(5)) / 2), abs=1e-12)
    assert rg.closed_form_green(rg.Segment(-2, 2), 3) == pytest.approx(0.96242, abs=1e-5)
    u = np.array([0.6, 0.8j])
    assert rg.closed_form_green(rg.Ball(1.0, 2), u) == pytest.approx(0.0, abs=1e-15)
    assert rg.closed_form_green(SPECS["slab"], (3, 0)) is None


def test_segment_green_matches_chebyshev_growth():
    # oracle: (1/n) log |T_n(z/2)| -> g(z); T_n via numpy's Chebyshev class
    z = 2j
    n = 400
    t = np.polynomial.chebyshev.Chebyshev.basis(n)
    approx = math.log(abs(t(z / 2))) / n + math.log(2) / n
    assert float(rg.segment_green(z, -2, 2)) == pytest.approx(approx, abs=5e-3)
    assert float(rg.segment_green(z, -2, 2)) == pytest.approx(math.log(1 + math.sqrt(2)), abs=1e-12)


def test_json_roundtrip():
    for spec in SPECS.values():
        again = rg.from_json(spec.to_json())
        a, b = rg.sample(spec, 4.0), rg.sample(again, 4.0)
        assert np.array_equal(a.points, b.points)


@pytest.mark.parametrize("name", sorted(SPECS))
def test_sample_invariants(name):
    spec = SPECS[name]
    R = 4.0
    a, b = rg.sample(spec, R), rg.sample(spec, R)
    assert np.array_equal(a.points, b.points)
    assert len(a) > 0
    assert np.all(np.linalg.norm(a.points, axis=1) <= R * (1 + 1e-9))
    assert np.all(spec.contains(a.points))
    assert a.boundary_count >= len(a) / 2


@settings(max_examples=25, deadline=None, derandomize=True)
@given(st.sampled_from(sorted(SPECS)), st.floats(2.0, 6.0), st.floats(1.0, 3.0))
def test_nesting(name, R, factor):
    spec = SPECS[name]
    small = rg.sample(spec, R)
    assert np.all(spec.contains(small.points))
    assert np.all(np.linalg.norm(small.points, axis=1) <= R * factor * (1 + 1e-9))
