"""Arrangements of disk boundary circles and k-shallow intersection edges.

The arrangement is built by splitting every circle at its crossing
vertices, ordering the four outgoing half-edges around each vertex by
tangent direction, and tracing face cycles.  Curve components that do not
cross anything else (nested or disjoint circles) are attached to the face
that surrounds them by shooting a ray to the left.  Depths are assigned by
a breadth-first traversal from the unbounded face, changing by one per
boundary crossing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.spatial import cKDTree

from .geometry import (
    TOL,
    Disk,
    DiskInstance,
    Point,
    as_arrays,
    circle_intersection_points,
    crossing_vertices,
    disks_intersect,
    instance_scale,
    intersecting_pairs,
    require_general_position,
)

TWO_PI = 2.0 * math.pi
_CHUNK = 4_000_000
_DENSE_LIMIT = 1024


@dataclass(frozen=True)
class ArrangementVertex:
    id: int
    location: Point
    circles: tuple[int, int]


@dataclass(frozen=True)
class Arc:
    id: int
    circle: int
    start: int | None  # None for a vertex-free full circle
    end: int | None
    theta0: float
    theta1: float

    @property
    def full_circle(self) -> bool:
        return self.start is None


@dataclass(frozen=True)
class Face:
    id: int
    representative: Point
    depth: int
    adjacent: tuple[int, ...]
    arcs: tuple[int, ...]
    hole: bool = False


@dataclass(frozen=True)
class WitnessedEdge:
    a: int
    b: int
    witness: Point
    depth: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)


class _Topology:
    """Array-level arrangement over local circle indices 0..m-1."""

    def __init__(self, centers: np.ndarray, radii: np.ndarray):
        self.centers = centers
        self.radii = radii
        self.m = m = len(radii)
        self.scale = instance_scale(centers, radii)

        pairs = intersecting_pairs(centers, radii)
        self.pairs = pairs
        cpairs, vxy = crossing_vertices(centers, radii, pairs)
        self.crossing_pairs = cpairs
        self.vert_xy = vxy
        self.vert_circles = np.repeat(cpairs, 2, axis=0)
        nv = len(vxy)

        # per-circle angular order of vertex incidences
        e_circle = np.concatenate([self.vert_circles[:, 0], self.vert_circles[:, 1]])
        e_vertex = np.concatenate([np.arange(nv), np.arange(nv)])
        e_theta = np.arctan2(vxy[e_vertex, 1] - centers[e_circle, 1], vxy[e_vertex, 0] - centers[e_circle, 0])
        order = np.lexsort((e_theta, e_circle))
        s_circle, s_vertex, s_theta = e_circle[order], e_vertex[order], e_theta[order]
        count = np.bincount(s_circle, minlength=m) if m else np.zeros(0, dtype=np.int64)
        start = np.concatenate([[0], np.cumsum(count)[:-1]]) if m else np.zeros(0, dtype=np.int64)
        self.circle_start = start
        self.circle_count = count
        self.sorted_theta = s_theta

        na_v = len(s_circle)
        pos = np.arange(na_v)
        last = start[s_circle] + count[s_circle] - 1 if na_v else pos
        nxt_pos = np.where(pos == last, start[s_circle] if na_v else pos, pos + 1)
        prv_pos = np.where(pos == start[s_circle] if na_v else pos, last, pos - 1)

        full = np.flatnonzero(count == 0)
        self.full_arc_of = np.full(m, -1, dtype=np.int64)
        self.full_arc_of[full] = na_v + np.arange(len(full))
        na = na_v + len(full)
        self.arc_circle = np.concatenate([s_circle, full]).astype(np.int64)
        self.arc_start = np.concatenate([s_vertex, np.full(len(full), -1)]).astype(np.int64)
        self.arc_end = np.concatenate([s_vertex[nxt_pos], np.full(len(full), -1)]).astype(np.int64)
        t0 = s_theta
        t1 = s_theta[nxt_pos] if na_v else s_theta
        t1 = np.where(t1 <= t0, t1 + TWO_PI, t1)
        self.arc_t0 = np.concatenate([t0, np.zeros(len(full))])
        self.arc_t1 = np.concatenate([t1, np.full(len(full), TWO_PI)])
        self.na = na

        # half-edge 2a runs counter-clockwise (disk interior on its left), 2a+1 is its twin
        nh = 2 * na
        nxt = np.arange(nh)
        if nv:
            inv = np.empty(2 * nv, dtype=np.int64)
            inv[order] = np.arange(2 * nv)
            p1, p2 = inv[:nv], inv[nv:]
            out = np.stack([2 * p1, 2 * prv_pos[p1] + 1, 2 * p2, 2 * prv_pos[p2] + 1], axis=1)
            th1, th2 = s_theta[p1], s_theta[p2]
            half = 0.5 * math.pi
            dirs = np.mod(np.stack([th1 + half, th1 - half, th2 + half, th2 - half], axis=1), TWO_PI)
            ordr = np.argsort(dirs, axis=1)
            ring = np.take_along_axis(out, ordr, axis=1)
            cw = np.empty(nh, dtype=np.int64)
            cw[ring] = np.roll(ring, 1, axis=1)
            hv = np.arange(2 * na_v)
            nxt[hv] = cw[hv ^ 1]
        self.next = nxt
        self.vertex_out = ring if nv else np.empty((0, 4), dtype=np.int64)

        if nh:
            graph = csr_matrix((np.ones(nh, dtype=np.int8), (np.arange(nh), nxt)), shape=(nh, nh))
            ncyc, cycle = connected_components(graph, directed=True, connection="weak")
        else:
            ncyc, cycle = 0, np.zeros(0, dtype=np.int64)
        self._assign_faces(ncyc, cycle)
        self._assign_depths()
        self._assign_representatives()

    # -- arc lookup -----------------------------------------------------
    def arc_at(self, circle: int, theta: float) -> int:
        """Arc of ``circle`` whose angular interval contains ``theta`` (radians)."""
        if self.circle_count[circle] == 0:
            return int(self.full_arc_of[circle])
        s, c = int(self.circle_start[circle]), int(self.circle_count[circle])
        idx = int(np.searchsorted(self.sorted_theta[s : s + c], theta, side="right")) - 1
        if idx < 0:
            idx = c - 1
        return s + idx

    def shoot_left(self, px: float, py: float, exclude: np.ndarray | None = None) -> int | None:
        """Half-edge facing ``(px, py)`` along the leftward horizontal ray, or None."""
        c, r = self.centers, self.radii
        dy = py - c[:, 1]
        ok = np.abs(dy) < r
        if exclude is not None:
            ok[exclude] = False
        idx = np.flatnonzero(ok)
        if len(idx) == 0:
            return None
        w = np.sqrt(r[idx] ** 2 - dy[idx] ** 2)
        xs = np.concatenate([c[idx, 0] - w, c[idx, 0] + w])
        who = np.concatenate([idx, idx])
        left = xs < px
        if not left.any():
            return None
        k = int(np.argmax(np.where(left, xs, -np.inf)))
        hit, hx = int(who[k]), float(xs[k])
        arc = self.arc_at(hit, math.atan2(py - c[hit, 1], hx - c[hit, 0]))
        inside = math.hypot(px - c[hit, 0], py - c[hit, 1]) < r[hit]
        return 2 * arc if inside else 2 * arc + 1

    # -- construction stages -----------------------------------------------
    def _assign_faces(self, ncyc: int, cycle: np.ndarray) -> None:
        m = self.m
        inf = ncyc
        links_a, links_b = [inf], [inf]
        if m:
            cp = self.crossing_pairs
            g = coo_matrix((np.ones(len(cp)), (cp[:, 0], cp[:, 1])), shape=(m, m)) if len(cp) else csr_matrix((m, m))
            ncomp, comp = connected_components(g, directed=False)
            left = self.centers[:, 0] - self.radii
            order = np.lexsort((left, comp))
            first = np.concatenate([[True], comp[order][1:] != comp[order][:-1]])
            members = np.split(order, np.flatnonzero(first)[1:])
            for group in members:
                lead = int(group[0])
                px, py = float(left[lead]), float(self.centers[lead, 1])
                outer = 2 * self.arc_at(lead, math.pi) + 1
                hit = self.shoot_left(px, py, exclude=group)
                links_a.append(int(cycle[outer]))
                links_b.append(inf if hit is None else int(cycle[hit]))
        g = coo_matrix((np.ones(len(links_a)), (links_a, links_b)), shape=(ncyc + 1, ncyc + 1))
        _, label = connected_components(g, directed=False)
        # unbounded face first, then in order of first cycle
        _, first_seen = np.unique(label, return_index=True)
        rank = np.empty(len(first_seen), dtype=np.int64)
        inf_label = label[inf]
        keys = np.where(np.arange(len(first_seen)) == inf_label, -1, first_seen)
        rank[np.argsort(keys, kind="stable")] = np.arange(len(first_seen))
        face_of_cycle = rank[label]
        self.nf = len(first_seen)
        self.he_face = face_of_cycle[cycle] if len(cycle) else np.zeros(0, dtype=np.int64)
        self.arc_inside = self.he_face[0::2]
        self.arc_outside = self.he_face[1::2]

    def _assign_depths(self) -> None:
        nf = self.nf
        depth = np.zeros(nf, dtype=np.int64)
        if nf > 1:
            fi, fo = self.arc_inside, self.arc_outside
            rows = np.concatenate([fo, fi])
            cols = np.concatenate([fi, fo])
            vals = np.concatenate([np.ones(len(fi)), -np.ones(len(fi))])
            signed = csr_matrix((vals, (rows, cols)), shape=(nf, nf))
            signed.sum_duplicates()
            order, pred = breadth_first_order(signed, 0, directed=False, return_predecessors=True)
            if len(order) != nf:
                raise RuntimeError("face graph is disconnected; arrangement construction failed")
            child = order[1:]
            step = np.sign(np.asarray(signed[pred[child], child]).ravel()).astype(np.int64)
            parent = pred[child]
            d = depth.tolist()
            for f, p, s in zip(child.tolist(), parent.tolist(), step.tolist()):
                d[f] = d[p] + s
            depth = np.asarray(d, dtype=np.int64)
        self.depth = depth

    def _assign_representatives(self) -> None:
        nf = self.nf
        reps = np.zeros((nf, 2))
        if self.na == 0:
            self.reps = reps
            return
        he = np.arange(2 * self.na)
        arc = he // 2
        length = self.radii[self.arc_circle[arc]] * (self.arc_t1[arc] - self.arc_t0[arc])
        order = np.lexsort((he, -length, self.he_face))
        faces = self.he_face[order]
        first = np.concatenate([[True], faces[1:] != faces[:-1]])
        best = order[first]
        owner = faces[first]
        a = best // 2
        c = self.arc_circle[a]
        tm = 0.5 * (self.arc_t0[a] + self.arc_t1[a])
        radial = np.stack([np.cos(tm), np.sin(tm)], axis=1)
        mid = self.centers[c] + self.radii[c][:, None] * radial
        direction = np.where((best % 2 == 0)[:, None], -radial, radial)
        clearance = self._clearance(mid, c)
        step = 0.5 * np.minimum(clearance, self.radii[c])
        reps[owner] = mid + step[:, None] * direction
        self.reps = reps

    def _dense(self, pts: np.ndarray):
        """Chunks of (offset, point-to-center distance matrix)."""
        chunk = max(1, _CHUNK // max(self.m, 1))
        for s in range(0, len(pts), chunk):
            p = pts[s : s + chunk]
            yield s, np.hypot(p[:, None, 0] - self.centers[None, :, 0], p[:, None, 1] - self.centers[None, :, 1])

    def _near(self, pts: np.ndarray, reach: float):
        """Chunks of (point, circle, center distance) with center distance <= ``reach``."""
        ctree = self._center_tree
        chunk = 20_000
        for s in range(0, len(pts), chunk):
            res = cKDTree(pts[s : s + chunk]).sparse_distance_matrix(ctree, reach, output_type="ndarray")
            yield res["i"].astype(np.int64) + s, res["j"].astype(np.int64), res["v"]

    @cached_property
    def _center_tree(self) -> cKDTree:
        return cKDTree(self.centers)

    def _clearance(self, pts: np.ndarray, own: np.ndarray) -> np.ndarray:
        """Distance from each point to the nearest circle other than ``own``, capped at the smallest radius."""
        cap = float(self.radii.min()) if self.m else math.inf
        out = np.full(len(pts), cap)
        if self.m <= _DENSE_LIMIT:
            for s, d in self._dense(pts):
                gap = np.abs(d - self.radii[None, :])
                gap[np.arange(len(d)), own[s : s + len(d)]] = np.inf
                out[s : s + len(d)] = np.minimum(out[s : s + len(d)], gap.min(axis=1))
            return out
        reach = float(self.radii.max()) + cap
        for pi, ci, d in self._near(pts, reach):
            gap = np.abs(d - self.radii[ci])
            gap[ci == own[pi]] = np.inf
            np.minimum.at(out, pi, gap)
        return out

    def cover_pairs(self, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(row, circle) incidences, sorted, for circles covering ``faces[row]``."""
        faces = np.asarray(faces, dtype=np.int64)
        rows, cols = [], []
        dense = self.m <= _DENSE_LIMIT
        if self.m and len(faces) and dense:
            # chunks arrive in row order and nonzero is row-major, so output is already sorted
            for s, d in self._dense(self.reps[faces]):
                pi, ci = np.nonzero(d <= self.radii[None, :])
                rows.append(pi + s)
                cols.append(ci)
        elif self.m and len(faces):
            for pi, ci, d in self._near(self.reps[faces], float(self.radii.max())):
                hit = d <= self.radii[ci]
                rows.append(pi[hit])
                cols.append(ci[hit])
        if not rows:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        r, c = np.concatenate(rows), np.concatenate(cols)
        if dense:
            return r, c
        order = np.lexsort((c, r))
        return r[order], c[order]

    def cover_matrix(self, faces: np.ndarray) -> np.ndarray:
        """Boolean matrix: row i marks the circles covering face ``faces[i]``."""
        out = np.zeros((len(faces), self.m), dtype=bool)
        r, c = self.cover_pairs(faces)
        out[r, c] = True
        return out

    def boundary_circles(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique (face, circle) pairs where the face lies inside the circle along some arc."""
        if self.na == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        key = np.unique(self.arc_inside * max(self.m, 1) + self.arc_circle)
        return key // max(self.m, 1), key % max(self.m, 1)


class Arrangement:
    """Planar arrangement of disk boundary circles, optionally capped at depth ``cap``.

    With a cap, every face of depth at most ``cap`` keeps its own identity,
    depth and adjacency; each connected region of deeper faces is collapsed
    into a single placeholder face with ``hole=True``.
    """

    def __init__(self, disks: Sequence[Disk], topo: _Topology, cap: int | None = None):
        self.disks = tuple(disks)
        self.cap = cap
        self._topo = topo
        self._ids = np.array([d.id for d in self.disks], dtype=np.int64)
        t = topo
        if cap is None:
            self._face_map = np.arange(t.nf)
            self._keep_arc = np.ones(t.na, dtype=bool)
            self._keep_vertex = np.ones(len(t.vert_xy), dtype=bool)
            self._holes = np.zeros(t.nf, dtype=bool)
        else:
            deep = t.depth > cap
            fi, fo = t.arc_inside, t.arc_outside
            both = deep[fi] & deep[fo]
            g = coo_matrix((np.ones(int(both.sum())), (fi[both], fo[both])), shape=(t.nf, t.nf))
            _, region = connected_components(g, directed=False)
            key = np.where(deep, t.nf + region, np.arange(t.nf))
            _, first, fmap = np.unique(key, return_index=True, return_inverse=True)
            # preserve original face order for ids
            rank = np.empty(len(first), dtype=np.int64)
            rank[np.argsort(first, kind="stable")] = np.arange(len(first))
            self._face_map = rank[fmap]
            holes = np.zeros(len(first), dtype=bool)
            holes[self._face_map[deep]] = True
            self._holes = holes
            self._keep_arc = t.depth[fo] <= cap
            if len(t.vert_xy):
                vmin = t.depth[t.he_face[t.vertex_out]].min(axis=1)
                self._keep_vertex = vmin <= cap
            else:
                self._keep_vertex = np.zeros(0, dtype=bool)
        self._arc_ids = np.full(t.na, -1, dtype=np.int64)
        self._arc_ids[self._keep_arc] = np.arange(int(self._keep_arc.sum()))
        self._vertex_ids = np.full(len(t.vert_xy), -1, dtype=np.int64)
        self._vertex_ids[self._keep_vertex] = np.arange(int(self._keep_vertex.sum()))

    # -- sizes -------------------------------------------------------------
    @property
    def n_faces(self) -> int:
        return len(self._holes)

    @property
    def n_arcs(self) -> int:
        return int(self._keep_arc.sum())

    @property
    def n_vertices(self) -> int:
        return int(self._keep_vertex.sum())

    @property
    def unbounded_face(self) -> int:
        return int(self._face_map[0])

    @property
    def scale(self) -> float:
        return self._topo.scale

    # -- materialized records -------------------------------------------------
    @cached_property
    def vertices(self) -> tuple[ArrangementVertex, ...]:
        t = self._topo
        idx = np.flatnonzero(self._keep_vertex)
        return tuple(
            ArrangementVertex(k, Point(float(t.vert_xy[v, 0]), float(t.vert_xy[v, 1])),
                              (int(self._ids[t.vert_circles[v, 0]]), int(self._ids[t.vert_circles[v, 1]])))
            for k, v in enumerate(idx)
        )

    @cached_property
    def arcs(self) -> tuple[Arc, ...]:
        t = self._topo
        out = []
        for k, a in enumerate(np.flatnonzero(self._keep_arc)):
            s, e = int(t.arc_start[a]), int(t.arc_end[a])
            out.append(Arc(
                k, int(self._ids[t.arc_circle[a]]),
                None if s < 0 else int(self._vertex_ids[s]) if self._vertex_ids[s] >= 0 else None,
                None if e < 0 else int(self._vertex_ids[e]) if self._vertex_ids[e] >= 0 else None,
                float(t.arc_t0[a]), float(t.arc_t1[a]),
            ))
        return tuple(out)

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        t = self._topo
        nf = self.n_faces
        fmap = self._face_map
        rep_src = self._rep_src
        depth = t.depth[rep_src]

        fi, fo = fmap[t.arc_inside], fmap[t.arc_outside]
        adj: list[set[int]] = [set() for _ in range(nf)]
        arcs: list[list[int]] = [[] for _ in range(nf)]
        keep = self._keep_arc
        for a, (x, y) in enumerate(zip(fi.tolist(), fo.tolist())):
            if x != y:
                adj[x].add(y)
                adj[y].add(x)
            if keep[a]:
                k = int(self._arc_ids[a])
                arcs[x].append(k)
                if y != x:
                    arcs[y].append(k)
        return tuple(
            Face(f, Point(float(t.reps[rep_src[f], 0]), float(t.reps[rep_src[f], 1])), int(depth[f]),
                 tuple(sorted(adj[f])), tuple(sorted(set(arcs[f]))), bool(self._holes[f]))
            for f in range(nf)
        )

    # -- queries ------------------------------------------------------------
    def depths(self) -> np.ndarray:
        return np.array([f.depth for f in self.faces], dtype=np.int64)

    def face_at(self, p: Point) -> int:
        """Id of the face containing ``p``.

        Raises ValueError for points within tolerance of a circle; perturb
        the query point and retry.
        """
        t = self._topo
        if t.m:
            gap = np.abs(np.hypot(t.centers[:, 0] - p.x, t.centers[:, 1] - p.y) - t.radii)
            if gap.min() <= TOL * t.scale:
                raise ValueError("query point lies on a circle boundary; perturb query point")
        he = t.shoot_left(p.x, p.y)
        full = 0 if he is None else int(t.he_face[he])
        return int(self._face_map[full])

    def covering_set(self, face: int) -> tuple[int, ...]:
        """Ids of disks covering the face's representative point."""
        row = self._topo.cover_matrix(self._rep_src[[face]])[0]
        return tuple(sorted(int(i) for i in self._ids[row]))

    def covering_matrix(self) -> np.ndarray:
        """Faces x disks boolean incidence (columns follow ``disks`` order)."""
        return self._topo.cover_matrix(self._rep_src)

    @cached_property
    def _rep_src(self) -> np.ndarray:
        # a merged face is represented by its shallowest member (lowest id on ties)
        t = self._topo
        fmap = self._face_map
        order = np.lexsort((np.arange(t.nf), t.depth, fmap))
        head = np.concatenate([[True], fmap[order][1:] != fmap[order][:-1]])
        out = np.empty(self.n_faces, dtype=np.int64)
        out[fmap[order][head]] = order[head]
        return out

    def arc_faces(self) -> tuple[np.ndarray, np.ndarray]:
        """(inside face, outside face) per arc of the full arrangement, mapped to this view."""
        t = self._topo
        return self._face_map[t.arc_inside], self._face_map[t.arc_outside]

    def curve_components(self) -> int:
        t = self._topo
        if t.m == 0:
            return 0
        cp = t.crossing_pairs
        g = coo_matrix((np.ones(len(cp)), (cp[:, 0], cp[:, 1])), shape=(t.m, t.m))
        return int(connected_components(g, directed=False)[0])


def _prepare(disks, validate: bool) -> tuple[tuple[Disk, ...], _Topology]:
    if isinstance(disks, DiskInstance):
        seq = disks.disks
    else:
        seq = tuple(disks)
    if validate:
        require_general_position(seq)
    centers, radii, _ = as_arrays(seq)
    return seq, _Topology(centers, radii)


def build_arrangement(disks: Sequence[Disk] | DiskInstance, cap: int | None = None, *, validate: bool = True) -> Arrangement:
    """Arrangement of the disks' boundary circles, capped at depth ``cap`` if given.

    Raises GeneralPositionError when validation finds degenerate input.
    """
    seq, topo = _prepare(disks, validate)
    return Arrangement(seq, topo, cap)


# ---------------------------------------------------------------------------
# shallow edges


def _shallow_candidates(topo: _Topology, k: int, side: np.ndarray | None = None):
    """Local (i, j, face) triples, one per pair, at the pair's shallowest face.

    The shallowest face of a lens has no shallower neighbour inside the
    lens, so it only touches the two lens circles from the inside.  Faces
    bounded from the inside by three or more circles are therefore never
    the witness of any pair and are skipped.
    """
    m = topo.m
    empty = (np.zeros(0, dtype=np.int64),) * 3
    if m < 2 or topo.nf == 0:
        return empty
    depth = topo.depth
    face_ok = (depth >= 2) & (depth <= k)
    bf, bc = topo.boundary_circles()
    n_in = np.bincount(bf, minlength=topo.nf)
    parts_i, parts_j, parts_f = [], [], []

    # faces touched from inside by exactly two circles: the pair is those two circles
    two = face_ok & (n_in == 2)
    sel = two[bf]
    if sel.any():
        f2, c2 = bf[sel], bc[sel]
        parts_i.append(c2[0::2])
        parts_j.append(c2[1::2])
        parts_f.append(f2[0::2])

    one = np.flatnonzero(face_ok & (n_in == 1))
    if len(one):
        inner = np.full(topo.nf, -1, dtype=np.int64)
        s1 = n_in[bf] == 1
        inner[bf[s1]] = bc[s1]
        rows, cols = topo.cover_pairs(one)
        a = inner[one[rows]]
        keep = cols != a
        parts_i.append(a[keep])
        parts_j.append(cols[keep])
        parts_f.append(one[rows[keep]])

    zero = np.flatnonzero(face_ok & (n_in == 0))
    if len(zero):
        rows, cols = topo.cover_pairs(zero)
        for d in np.unique(depth[zero]):
            pick = np.flatnonzero(depth[zero] == d)
            grp = zero[pick]
            members = cols[np.isin(rows, pick)].reshape(len(grp), int(d))
            ii, jj = np.triu_indices(int(d), 1)
            parts_i.append(members[:, ii].ravel())
            parts_j.append(members[:, jj].ravel())
            parts_f.append(np.repeat(grp, len(ii)))

    if not parts_i:
        return empty
    i = np.concatenate(parts_i)
    j = np.concatenate(parts_j)
    f = np.concatenate(parts_f)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    if side is not None:
        cross = side[lo] != side[hi]
        lo, hi, f = lo[cross], hi[cross], f[cross]
    if len(f) == 0:
        return empty
    key = lo * m + hi
    order = np.lexsort((f, depth[f], key))
    key, f = key[order], f[order]
    first = np.concatenate([[True], key[1:] != key[:-1]])
    return key[first] // m, key[first] % m, f[first]


def _witnessed(topo: _Topology, ids: np.ndarray, i, j, f) -> list[WitnessedEdge]:
    a, b = ids[i], ids[j]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    order = np.lexsort((hi, lo))
    reps, depth = topo.reps, topo.depth
    return [
        WitnessedEdge(int(lo[k]), int(hi[k]), Point(float(reps[f[k], 0]), float(reps[f[k], 1])), int(depth[f[k]]))
        for k in order
    ]


def shallow_edges(disks: Sequence[Disk] | DiskInstance, k: int, *, validate: bool = True) -> list[WitnessedEdge]:
    """Disk pairs sharing a point of depth at most ``k``, each with its shallowest witness.

    Output is sorted by id pair.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    seq, topo = _prepare(disks, validate)
    ids = np.array([d.id for d in seq], dtype=np.int64)
    i, j, f = _shallow_candidates(topo, k)
    return _witnessed(topo, ids, i, j, f)


def shallow_edges_bipartite(d1: Sequence[Disk], d2: Sequence[Disk], k: int, *, validate: bool = True) -> list[WitnessedEdge]:
    """k-shallow pairs with one disk from each side; depth counts both sides."""
    if k < 1:
        raise ValueError("k must be at least 1")
    d1, d2 = list(d1), list(d2)
    overlap = {d.id for d in d1} & {d.id for d in d2}
    if overlap:
        raise ValueError(f"disk ids appear on both sides: {sorted(overlap)[:10]}")
    if not d1 or not d2:
        return []
    seq, topo = _prepare(d1 + d2, validate)
    ids = np.array([d.id for d in seq], dtype=np.int64)
    side = np.concatenate([np.zeros(len(d1), dtype=np.int8), np.ones(len(d2), dtype=np.int8)])
    i, j, f = _shallow_candidates(topo, k, side)
    return _witnessed(topo, ids, i, j, f)


def shallow_pairs(centers: np.ndarray, radii: np.ndarray, k: int, side: np.ndarray | None = None,
                  pairs: np.ndarray | None = None, topo: _Topology | None = None) -> np.ndarray:
    """Local index pairs (i < j) that are k-shallow, without witnesses.

    Skips the arrangement entirely when no point can be deeper than ``k``:
    any point inside disk ``a`` lies in at most ``1 + deg(a)`` disks.
    """
    if pairs is None:
        pairs = intersecting_pairs(centers, radii)
    if side is not None and len(pairs):
        pairs = pairs[side[pairs[:, 0]] != side[pairs[:, 1]]]
    if len(pairs) == 0:
        return np.empty((0, 2), dtype=np.int64)
    m = len(radii)
    full_pairs = intersecting_pairs(centers, radii) if side is not None else pairs
    deg = np.bincount(full_pairs.ravel(), minlength=m)
    if deg.max() + 1 <= k:
        return pairs
    if topo is None:
        topo = _Topology(centers, radii)
    i, j, _ = _shallow_candidates(topo, k, side)
    out = np.stack([i, j], axis=1)
    return out[np.lexsort((out[:, 1], out[:, 0]))]


# ---------------------------------------------------------------------------
# brute-force lens oracle


class LensOracle:
    """Candidate witness points meeting every face of the arrangement.

    Independent of the arrangement builder: uses only pairwise circle
    intersections and point-in-disk tests.  Candidates are each crossing
    vertex pushed into its four surrounding quadrants, points just inside
    and just outside every circle, and every disk center.  Only the first
    ``counted`` disks contribute to depth (default: all).
    """

    def __init__(self, disks: Sequence[Disk], counted: int | None = None):
        self.disks = list(disks)
        centers, radii, _ = as_arrays(self.disks)
        self.centers, self.radii = centers, radii
        m = len(self.disks)
        pts = [centers]
        for x in range(m):
            for y in range(x + 1, m):
                for v in circle_intersection_points(self.disks[x], self.disks[y]):
                    pts.append(self._quadrants(v, x, y))
        for x in range(m):
            theta = 0.123 + 0.001 * x
            u = np.array([math.cos(theta), math.sin(theta)])
            on = centers[x] + radii[x] * u
            s = 0.25 * min(self._clearance(on, (x,)), radii[x])
            pts.append(np.stack([on - s * u, on + s * u]))
        self.points = np.concatenate(pts)
        self.cover = (
            np.hypot(self.points[:, None, 0] - centers[None, :, 0], self.points[:, None, 1] - centers[None, :, 1])
            <= radii[None, :]
        )
        counted = m if counted is None else counted
        self.depth = self.cover[:, :counted].sum(axis=1)

    def _clearance(self, p: np.ndarray, own: tuple[int, ...]) -> float:
        dist = np.abs(np.hypot(self.centers[:, 0] - p[0], self.centers[:, 1] - p[1]) - self.radii)
        dist[list(own)] = np.inf
        return float(dist.min())

    def _quadrants(self, v: Point, x: int, y: int) -> np.ndarray:
        p = np.array([v.x, v.y])
        n1 = (p - self.centers[x]) / self.radii[x]
        n2 = (p - self.centers[y]) / self.radii[y]
        sin_cross = abs(n1[0] * n2[1] - n1[1] * n2[0])
        s = min(0.25 * self._clearance(p, (x, y)), 0.1 * min(self.radii[x], self.radii[y]) * sin_cross ** 2)
        return np.stack([p + s * (s1 * n1 + s2 * n2) for s1 in (-1.0, 1.0) for s2 in (-1.0, 1.0)])

    def min_depth(self, x: int, y: int) -> tuple[int, Point]:
        """Minimum depth over the lens of disks at positions ``x`` and ``y``."""
        idx = np.flatnonzero(self.cover[:, x] & self.cover[:, y])
        if len(idx) == 0:
            raise ValueError("no candidate inside the lens")
        best = idx[np.argmin(self.depth[idx])]
        return int(self.depth[best]), Point(float(self.points[best, 0]), float(self.points[best, 1]))


def min_depth_in_lens(a: Disk, b: Disk, disks: Sequence[Disk]) -> tuple[int, Point]:
    """Brute-force minimum depth (in ``disks``) over the closed lens of ``a`` and ``b``."""
    if not disks_intersect(a, b):
        raise ValueError(f"disks {a.id} and {b.id} do not intersect")
    pool = list(disks)
    counted = len(pool)
    for d in (a, b):
        if d not in pool:
            pool.append(d)
    oracle = LensOracle(pool, counted)
    return oracle.min_depth(pool.index(a), pool.index(b))
