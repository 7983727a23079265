"""Disk primitives: points, disks, instances and general-position checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

# Absolute coincidence tolerance for an instance normalized to a unit bounding box.
TOL = 1e-9


class GeneralPositionError(ValueError):
    """Raised when disks violate the general-position assumption."""

    def __init__(self, message: str, offending: Sequence[tuple] = ()):
        super().__init__(message)
        self.offending = list(offending)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point coordinates ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float
    id: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    @classmethod
    def of(cls, x: float, y: float, r: float, id: int = 0) -> "Disk":
        return cls(Point(float(x), float(y)), float(r), id)


def disks_intersect(a: Disk, b: Disk) -> bool:
    """Closed-disk intersection test (containment counts)."""
    d = math.hypot(a.center.x - b.center.x, a.center.y - b.center.y)
    return d <= a.radius + b.radius


def contains(d: Disk, p: Point) -> bool:
    return math.hypot(p.x - d.center.x, p.y - d.center.y) <= d.radius


def circle_intersection_points(a: Disk, b: Disk, tol: float = TOL) -> list[Point]:
    """Points where the boundary circles of ``a`` and ``b`` cross.

    Disjoint and nested circles give an empty list.  Identical and tangent
    circles are general-position violations and raise.
    """
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    d = math.hypot(dx, dy)
    ra, rb = a.radius, b.radius
    if d <= tol and abs(ra - rb) <= tol:
        raise GeneralPositionError("identical circles", [("duplicate", a.id, b.id)])
    if abs(d - (ra + rb)) <= tol or abs(d - abs(ra - rb)) <= tol:
        raise GeneralPositionError("tangent circles", [("tangent", a.id, b.id)])
    if d > ra + rb or d < abs(ra - rb):
        return []
    along = (d * d + ra * ra - rb * rb) / (2.0 * d)
    h = math.sqrt(max(ra * ra - along * along, 0.0))
    ux, uy = dx / d, dy / d
    bx = a.center.x + along * ux
    by = a.center.y + along * uy
    return [Point(bx - h * uy, by + h * ux), Point(bx + h * uy, by - h * ux)]


def depth_at(p: Point, disks: Iterable[Disk] | "DiskInstance") -> int:
    if isinstance(disks, DiskInstance):
        c, r = disks.centers, disks.radii
        if len(r) == 0:
            return 0
        return int(np.count_nonzero(np.hypot(c[:, 0] - p.x, c[:, 1] - p.y) <= r))
    return sum(1 for d in disks if contains(d, p))


@dataclass(frozen=True)
class DiskInstance:
    """An immutable, id-ordered list of disks plus how it was generated."""

    disks: tuple[Disk, ...]
    seed: int | None = None
    generator: str | None = None
    centers: np.ndarray = field(init=False, repr=False, compare=False)
    radii: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        disks = tuple(self.disks)
        for i, d in enumerate(disks):
            if d.id != i:
                raise ValueError(f"disk at position {i} has id {d.id}")
        object.__setattr__(self, "disks", disks)
        centers = np.array([[d.center.x, d.center.y] for d in disks], dtype=float).reshape(-1, 2)
        radii = np.array([d.radius for d in disks], dtype=float)
        centers.flags.writeable = False
        radii.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)

    @classmethod
    def from_arrays(cls, centers, radii, seed=None, generator=None) -> "DiskInstance":
        disks = tuple(
            Disk(Point(float(x), float(y)), float(r), i)
            for i, ((x, y), r) in enumerate(zip(np.asarray(centers, float), np.asarray(radii, float)))
        )
        return cls(disks, seed=seed, generator=generator)

    def __len__(self) -> int:
        return len(self.disks)

    def __iter__(self):
        return iter(self.disks)

    def __getitem__(self, i: int) -> Disk:
        return self.disks[i]

    @property
    def n(self) -> int:
        return len(self.disks)

    def scale(self) -> float:
        return instance_scale(self.centers, self.radii)


def as_arrays(disks: Sequence[Disk] | DiskInstance) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(centers, radii, ids) arrays for a disk sequence."""
    if isinstance(disks, DiskInstance):
        return np.asarray(disks.centers), np.asarray(disks.radii), np.arange(len(disks))
    disks = list(disks)
    centers = np.array([[d.center.x, d.center.y] for d in disks], dtype=float).reshape(-1, 2)
    radii = np.array([d.radius for d in disks], dtype=float)
    ids = np.array([d.id for d in disks], dtype=np.int64)
    return centers, radii, ids


def instance_scale(centers: np.ndarray, radii: np.ndarray) -> float:
    """Bounding-box diagonal of the union of disks (1.0 for empty input)."""
    if len(radii) == 0:
        return 1.0
    lo = (centers - radii[:, None]).min(axis=0)
    hi = (centers + radii[:, None]).max(axis=0)
    return max(float(np.hypot(*(hi - lo))), 1e-300)


def intersecting_pairs(centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """All index pairs (i < j) of intersecting closed disks, lexicographically sorted."""
    n = len(radii)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    tree = cKDTree(centers)
    cand = tree.query_pairs(2.0 * float(radii.max()), output_type="ndarray")
    if len(cand) == 0:
        return np.empty((0, 2), dtype=np.int64)
    i, j = cand[:, 0], cand[:, 1]
    d = np.hypot(*(centers[i] - centers[j]).T)
    keep = d <= radii[i] + radii[j]
    pairs = np.sort(cand[keep], axis=1).astype(np.int64)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def crossing_vertices(centers: np.ndarray, radii: np.ndarray, pairs: np.ndarray):
    """Boundary intersection points for the crossing subset of ``pairs``.

    Returns ``(crossing_pairs, points)`` where ``points`` has shape
    ``(2 * len(crossing_pairs), 2)``; vertices ``2k`` and ``2k + 1`` belong to
    pair ``k``.
    """
    if len(pairs) == 0:
        return np.empty((0, 2), dtype=np.int64), np.empty((0, 2))
    i, j = pairs[:, 0], pairs[:, 1]
    delta = centers[j] - centers[i]
    d = np.hypot(delta[:, 0], delta[:, 1])
    ri, rj = radii[i], radii[j]
    crossing = (d < ri + rj) & (d > np.abs(ri - rj))
    pairs = pairs[crossing]
    delta, d, ri, rj = delta[crossing], d[crossing], ri[crossing], rj[crossing]
    along = (d * d + ri * ri - rj * rj) / (2.0 * d)
    h = np.sqrt(np.maximum(ri * ri - along * along, 0.0))
    u = delta / d[:, None]
    base = centers[pairs[:, 0]] + along[:, None] * u
    perp = np.stack([-u[:, 1], u[:, 0]], axis=1)
    pts = np.empty((2 * len(pairs), 2))
    pts[0::2] = base + h[:, None] * perp
    pts[1::2] = base - h[:, None] * perp
    return pairs, pts


@dataclass
class PositionReport:
    ok: bool
    duplicates: list[tuple[int, int]] = field(default_factory=list)
    tangencies: list[tuple[int, int]] = field(default_factory=list)
    concurrent: list[tuple[int, ...]] = field(default_factory=list)
    close_vertices: list[tuple[int, ...]] = field(default_factory=list)

    def offending(self) -> list[tuple]:
        out: list[tuple] = []
        out += [("duplicate",) + t for t in self.duplicates]
        out += [("tangent",) + t for t in self.tangencies]
        out += [("concurrent",) + t for t in self.concurrent]
        out += [("close_vertices",) + t for t in self.close_vertices]
        return out

    def describe(self, limit: int = 10) -> str:
        items = self.offending()
        head = ", ".join(str(t) for t in items[:limit])
        more = f" (+{len(items) - limit} more)" if len(items) > limit else ""
        return f"general-position violations: {head}{more}"


def validate_general_position(instance: DiskInstance | Sequence[Disk], tol: float = TOL) -> PositionReport:
    """Report duplicates, tangencies, concurrent triples and near-coincident vertices.

    ``tol`` is absolute for a unit bounding box and is scaled by the
    instance's bounding-box diagonal.
    """
    centers, radii, ids = as_arrays(instance)
    report = PositionReport(ok=True)
    if len(radii) < 2:
        return report
    eps = tol * instance_scale(centers, radii)
    tree = cKDTree(centers)
    cand = tree.query_pairs(2.0 * float(radii.max()) + eps, output_type="ndarray")
    if len(cand):
        cand = np.sort(cand, axis=1)
        i, j = cand[:, 0], cand[:, 1]
        d = np.hypot(*(centers[i] - centers[j]).T)
        dup = (d <= eps) & (np.abs(radii[i] - radii[j]) <= eps)
        tang = ~dup & (
            (np.abs(d - (radii[i] + radii[j])) <= eps) | (np.abs(d - np.abs(radii[i] - radii[j])) <= eps)
        )
        report.duplicates = sorted((int(ids[a]), int(ids[b])) for a, b in cand[dup])
        report.tangencies = sorted((int(ids[a]), int(ids[b])) for a, b in cand[tang])
        clean = cand[~dup & ~tang]
        cpairs, pts = crossing_vertices(centers, radii, clean)
        if len(pts):
            owner = np.repeat(cpairs, 2, axis=0)
            close = cKDTree(pts).query_pairs(eps, output_type="ndarray")
            for a, b in close:
                circles = tuple(sorted({int(ids[c]) for c in (*owner[a], *owner[b])}))
                if len(circles) >= 3:
                    report.concurrent.append(circles)
                else:
                    report.close_vertices.append(circles)
            report.concurrent = sorted(set(report.concurrent))
            report.close_vertices = sorted(set(report.close_vertices))
    report.ok = not (report.duplicates or report.tangencies or report.concurrent or report.close_vertices)
    return report


def require_general_position(instance, tol: float = TOL) -> None:
    report = validate_general_position(instance, tol)
    if not report.ok:
        raise GeneralPositionError(report.describe(), report.offending())
