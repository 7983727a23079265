import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_depth, brute_pairs, make_instance
from diskspanner.geometry import (
    Disk,
    DiskInstance,
    GeneralPositionError,
    Point,
    circle_intersection_points,
    contains,
    crossing_vertices,
    depth_at,
    disks_intersect,
    intersecting_pairs,
    require_general_position,
    validate_general_position,
)

coord = st.floats(-10, 10, allow_nan=False)
radius = st.floats(0.1, 5, allow_nan=False)


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point(float("nan"), 0.0)


def test_disk_rejects_non_positive_radius():
    with pytest.raises(ValueError):
        Disk.of(0, 0, 0.0)


def test_lens_intersection_points(lens):
    pts = circle_intersection_points(*lens)
    got = sorted((round(p.x, 12), round(p.y, 12)) for p in pts)
    h = math.sqrt(3) / 2
    assert got == [(0.5, -round(h, 12)), (0.5, round(h, 12))]


def test_disjoint_and_nested_circles_have_no_crossings():
    assert circle_intersection_points(Disk.of(0, 0, 1), Disk.of(5, 0, 1)) == []
    assert circle_intersection_points(Disk.of(0, 0, 3), Disk.of(0.5, 0, 1)) == []


@pytest.mark.parametrize("b", [Disk.of(2, 0, 1, 1), Disk.of(0.5, 0, 0.5, 1), Disk.of(0, 0, 1, 1)])
def test_degenerate_pairs_raise(b):
    with pytest.raises(GeneralPositionError) as exc:
        circle_intersection_points(Disk.of(0, 0, 1, 0), b)
    assert exc.value.offending


def test_closed_disks_contain_boundary():
    d = Disk.of(0, 0, 2)
    assert contains(d, Point(2.0, 0.0))
    assert not contains(d, Point(2.0 + 1e-9, 0.0))


@settings(max_examples=200, deadline=None)
@given(coord, coord, radius, coord, coord, radius)
def test_crossing_points_lie_on_both_circles(x1, y1, r1, x2, y2, r2):
    a, b = Disk.of(x1, y1, r1, 0), Disk.of(x2, y2, r2, 1)
    try:
        pts = circle_intersection_points(a, b)
    except GeneralPositionError:
        return
    d = math.hypot(x2 - x1, y2 - y1)
    crossing = abs(r1 - r2) < d < r1 + r2
    assert len(pts) == (2 if crossing else 0)
    for p in pts:
        assert math.hypot(p.x - x1, p.y - y1) == pytest.approx(r1, rel=1e-7, abs=1e-7)
        assert math.hypot(p.x - x2, p.y - y2) == pytest.approx(r2, rel=1e-7, abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(coord, coord, radius, coord, coord, radius)
def test_intersection_is_symmetric(x1, y1, r1, x2, y2, r2):
    a, b = Disk.of(x1, y1, r1, 0), Disk.of(x2, y2, r2, 1)
    assert disks_intersect(a, b) == disks_intersect(b, a)


def test_depth_matches_brute_count():
    rng = np.random.default_rng(0)
    c, r = rng.uniform(0, 1, (40, 2)), rng.uniform(0.05, 0.3, 40)
    inst = DiskInstance.from_arrays(c, r)
    for p in rng.uniform(0, 1, (50, 2)):
        assert depth_at(Point(*p), inst) == brute_depth(p, c, r)


def test_intersecting_pairs_match_brute_force():
    rng = np.random.default_rng(1)
    c, r = rng.uniform(0, 1, (80, 2)), rng.uniform(0.01, 0.1, 80)
    got = {tuple(p) for p in intersecting_pairs(c, r).tolist()}
    assert got == brute_pairs(c, r)


def test_crossing_vertices_pairing():
    c = np.array([[0.0, 0.0], [1.0, 0.0], [0.2, 0.0]])
    r = np.array([1.0, 1.0, 0.1])
    pairs = intersecting_pairs(c, r)
    cp, pts = crossing_vertices(c, r, pairs)
    # the small disk sits inside disk 0 and does not cross it
    assert [tuple(p) for p in cp.tolist()] == [(0, 1)]
    assert len(pts) == 2


def test_instance_ids_must_be_positions():
    with pytest.raises(ValueError):
        DiskInstance((Disk.of(0, 0, 1, 1),))


def test_instance_arrays_are_read_only():
    inst = make_instance([(0, 0, 1), (3, 0, 1)])
    with pytest.raises(ValueError):
        inst.centers[0, 0] = 5.0


def test_general_position_report():
    ok = make_instance([(0, 0, 1), (1, 0, 1)])
    assert validate_general_position(ok).ok

    dup = make_instance([(0, 0, 1), (0, 0, 1)])
    rep = validate_general_position(dup)
    assert not rep.ok and rep.duplicates

    tangent = make_instance([(0, 0, 1), (2, 0, 1)])
    assert validate_general_position(tangent).tangencies

    # three circles through the origin
    conc = make_instance([(1, 0, 1), (-1, 0, 1), (0, 1, 1)])
    rep = validate_general_position(conc)
    assert rep.concurrent
    with pytest.raises(GeneralPositionError):
        require_general_position(conc)


def test_internal_tangency_is_rejected():
    rep = validate_general_position(make_instance([(0, 0, 2), (1, 0, 1)]))
    assert rep.tangencies
