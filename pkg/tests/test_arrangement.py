import numpy as np
import pytest

from conftest import brute_depth, brute_pairs, make_instance
from diskspanner.arrangement import (
    LensOracle,
    build_arrangement,
    min_depth_in_lens,
    shallow_edges,
    shallow_edges_bipartite,
    shallow_pairs,
)
from diskspanner.generators import GENERATORS, generate
from diskspanner.geometry import Disk, GeneralPositionError, Point


def test_single_disk():
    arr = build_arrangement([Disk.of(0, 0, 1)])
    assert (arr.n_faces, arr.n_vertices, arr.n_arcs) == (2, 0, 1)
    assert sorted(arr.depths().tolist()) == [0, 1]
    assert arr.arcs[0].full_circle


def test_lens_fixture(lens):
    arr = build_arrangement(lens)
    assert sorted(arr.depths().tolist()) == [0, 1, 1, 2]
    assert (arr.n_vertices, arr.n_arcs) == (2, 4)
    assert arr.faces[arr.unbounded_face].depth == 0
    deep = next(f for f in arr.faces if f.depth == 2)
    assert arr.covering_set(deep.id) == (0, 1)


def test_nested_and_disjoint_components():
    disks = [Disk.of(0, 0, 3, 0), Disk.of(0.5, 0, 1, 1), Disk.of(10, 0, 1, 2), Disk.of(0.7, 0.3, 0.2, 3)]
    arr = build_arrangement(disks)
    assert sorted(arr.depths().tolist()) == [0, 1, 1, 2, 3]
    for f in arr.faces:
        assert brute_depth(tuple(f.representative), *_arrays(disks)) == f.depth


def _arrays(disks):
    return np.array([[d.center.x, d.center.y] for d in disks]), np.array([d.radius for d in disks])


def test_empty_arrangement():
    arr = build_arrangement([])
    assert arr.n_faces == 1 and arr.depths().tolist() == [0]


@pytest.mark.parametrize("name", GENERATORS)
def test_representatives_and_adjacency(name):
    for seed in range(4):
        inst = generate(name, 30, seed)
        arr = build_arrangement(inst)
        depth = arr.depths()
        for f in arr.faces:
            assert brute_depth(tuple(f.representative), inst.centers, inst.radii) == f.depth
            for g in f.adjacent:
                assert abs(depth[g] - f.depth) == 1


def test_euler_characteristic():
    for seed in range(10):
        arr = build_arrangement(generate("uniform_unit", 40, seed))
        full = sum(1 for a in arr.arcs if a.full_circle)
        assert arr.n_vertices + full - arr.n_arcs + arr.n_faces == 1 + arr.curve_components()


def test_face_at_agrees_with_representatives():
    inst = generate("clustered", 40, 5)
    arr = build_arrangement(inst)
    for f in arr.faces:
        assert arr.face_at(f.representative) == f.id


def test_face_at_on_boundary_raises(lens):
    arr = build_arrangement(lens)
    with pytest.raises(ValueError, match="perturb"):
        arr.face_at(Point(-1.0, 0.0))


def test_capped_arrangement_merges_deep_faces():
    inst = generate("stacked", 25, 0)
    full, capped = build_arrangement(inst), build_arrangement(inst, cap=5)
    shallow = int((full.depths() <= 5).sum())
    holes = [f for f in capped.faces if f.hole]
    assert capped.n_faces == shallow + len(holes)
    assert all(f.depth == 6 for f in holes)
    assert all(f.depth <= 5 for f in capped.faces if not f.hole)


def test_degenerate_input_is_rejected():
    with pytest.raises(GeneralPositionError):
        build_arrangement([Disk.of(0, 0, 1, 0), Disk.of(2, 0, 1, 1)])


def test_min_depth_in_lens_fixture(lens):
    third = Disk.of(0.5, 0.0, 0.3, 2)
    depth, witness = min_depth_in_lens(lens[0], lens[1], lens + [third])
    assert depth == 2
    assert brute_depth(tuple(witness), *_arrays(lens + [third])) == 2
    with pytest.raises(ValueError):
        min_depth_in_lens(lens[0], Disk.of(9, 9, 1, 3), lens)


def test_shallow_edges_small_fixture():
    # three disks all meeting near the origin; each pair also has a private part of its lens
    inst = make_instance([(0, 0, 1), (1.2, 0, 1), (0.6, 0.9, 1)])
    assert [e.pair for e in shallow_edges(inst, 2)] == [(0, 1), (0, 2), (1, 2)]
    assert all(e.depth == 2 for e in shallow_edges(inst, 2))


def test_pair_only_inside_third_disk_needs_k3():
    inst = make_instance([(-0.1, 0, 0.3), (0.1, 0, 0.3), (0, 0, 1)])
    assert (0, 1) not in {e.pair for e in shallow_edges(inst, 2)}
    edge = next(e for e in shallow_edges(inst, 3) if e.pair == (0, 1))
    assert edge.depth == 3


@pytest.mark.parametrize("seed", range(12))
def test_shallow_edges_match_lens_oracle(seed):
    name = GENERATORS[seed % len(GENERATORS)]
    inst = generate(name, 25, seed)
    oracle = LensOracle(list(inst))
    expected = {p: oracle.min_depth(*p)[0] for p in brute_pairs(inst.centers, inst.radii)}
    for k in (2, 4, 25):
        edges = shallow_edges(inst, k)
        assert {e.pair: e.depth for e in edges} == {p: d for p, d in expected.items() if d <= k}
        for e in edges:
            assert brute_depth(tuple(e.witness), inst.centers, inst.radii) == e.depth
            assert e.depth <= k


def test_shallow_pairs_fast_path_matches_arrangement():
    inst = generate("uniform_unit", 200, 4)
    deep_k = 1000
    got = shallow_pairs(inst.centers, inst.radii, deep_k)
    assert {tuple(p) for p in got.tolist()} == brute_pairs(inst.centers, inst.radii)
    got = shallow_pairs(inst.centers, inst.radii, 3)
    assert {tuple(p) for p in got.tolist()} == {e.pair for e in shallow_edges(inst, 3)}


def test_bipartite_depth_counts_both_sides():
    inst = generate("stacked", 20, 2)
    disks = list(inst)
    left, right = disks[::2], disks[1::2]
    for k in (3, 8, 20):
        got = {e.pair for e in shallow_edges_bipartite(left, right, k)}
        side = {d.id: 0 for d in left} | {d.id: 1 for d in right}
        want = {e.pair for e in shallow_edges(inst, k) if side[e.a] != side[e.b]}
        assert got == want


def test_bipartite_rejects_shared_ids(lens):
    with pytest.raises(ValueError):
        shallow_edges_bipartite(lens, lens[:1], 2)


def test_k_must_be_positive(lens):
    with pytest.raises(ValueError):
        shallow_edges(lens, 0)
