"""Attack sets, eps-safe zones and end-to-end verification of a spanner."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .arrangement import Arrangement, build_arrangement
from .geometry import DiskInstance, Point
from .unionfind import UnionFind
from .util import as_fraction

STRATEGIES = ("random_fraction", "neighborhood_kill", "deepest_point", "ids")


@dataclass(frozen=True)
class AttackSet:
    ids: frozenset
    strategy: str = "ids"
    params: tuple = ()
    seed: int | None = None

    def __contains__(self, i) -> bool:
        return i in self.ids

    def __len__(self) -> int:
        return len(self.ids)

    def mask(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=bool)
        if self.ids:
            out[sorted(self.ids)] = True
        return out


def _as_attack(attack) -> AttackSet:
    return attack if isinstance(attack, AttackSet) else AttackSet(frozenset(int(i) for i in attack))


def generate_attack(instance: DiskInstance, strategy: str, params: dict | None = None,
                    rng: np.random.Generator | None = None, seed: int | None = None) -> AttackSet:
    """Build an attack set.

    Strategies: ``random_fraction`` (``rho``), ``neighborhood_kill``
    (``target``, ``edges``), ``deepest_point`` (``count``) and ``ids``
    (``ids``).
    """
    params = dict(params or {})
    n = instance.n
    if rng is None:
        rng = np.random.default_rng(seed)
    if strategy == "random_fraction":
        rho = float(params.get("rho", 0.0))
        if not 0.0 <= rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        ids = np.flatnonzero(rng.random(n) < rho) if rho < 1.0 else np.arange(n)
        chosen = frozenset(int(i) for i in ids)
        key = (("rho", rho),)
    elif strategy == "neighborhood_kill":
        target = int(params["target"])
        if not 0 <= target < n:
            raise ValueError(f"invalid target {target}")
        edges = params["edges"]
        chosen = frozenset(v if u == target else u for u, v in edges if target in (u, v))
        key = (("target", target),)
    elif strategy == "deepest_point":
        count = int(params.get("count", 1))
        arr = params.get("arrangement") or build_arrangement(instance)
        depths = arr.depths()
        deepest = int(np.argmax(depths))
        cover = np.array(arr.covering_set(deepest), dtype=np.int64)
        count = min(count, len(cover))
        chosen = frozenset(int(i) for i in rng.choice(cover, count, replace=False)) if count else frozenset()
        key = (("count", count), ("face", deepest))
    elif strategy == "ids":
        chosen = frozenset(int(i) for i in params.get("ids", ()))
        bad = [i for i in chosen if not 0 <= i < n]
        if bad:
            raise ValueError(f"invalid disk ids {bad[:10]}")
        key = ()
    else:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
    return AttackSet(chosen, strategy, key, seed)


def _covered_count(p: Point, instance: DiskInstance, alive: np.ndarray | None = None) -> int:
    c, r = np.asarray(instance.centers), np.asarray(instance.radii)
    inside = np.hypot(c[:, 0] - p.x, c[:, 1] - p.y) <= r
    if alive is not None:
        inside &= alive
    return int(inside.sum())


def _safe(survivors, depth, eps) -> np.ndarray:
    """Exact test surviving >= eps * depth; uncovered points are never safe."""
    e = as_fraction(eps)
    survivors = np.asarray(survivors, dtype=np.int64)
    depth = np.asarray(depth, dtype=np.int64)
    return (depth > 0) & (survivors * e.denominator >= e.numerator * depth)


def is_safe_point(p: Point, instance: DiskInstance, attack: AttackSet | Iterable[int], eps: float) -> bool:
    attack = _as_attack(attack)
    alive = ~attack.mask(instance.n)
    return bool(_safe(_covered_count(p, instance, alive), _covered_count(p, instance), eps))


@dataclass
class SafeZoneReport:
    safe: np.ndarray  # per face
    component: np.ndarray  # per face, -1 for unsafe faces
    n_components: int
    depth: np.ndarray
    survivors: np.ndarray

    def safe_faces(self) -> np.ndarray:
        return np.flatnonzero(self.safe)

    def components(self) -> list[np.ndarray]:
        order = np.argsort(self.component, kind="stable")
        comp = self.component[order]
        keep = comp >= 0
        order, comp = order[keep], comp[keep]
        if len(comp) == 0:
            return []
        cuts = np.flatnonzero(np.diff(comp)) + 1
        return np.split(order, cuts)


def safe_zone(instance: DiskInstance, attack: AttackSet | Iterable[int], eps: float, *,
              arrangement: Arrangement | None = None, cover: np.ndarray | None = None) -> SafeZoneReport:
    """Per-face safety and the connected components of the safe zone.

    Two safe faces are joined when they share an arc whose own covering
    set is safe; the arc is covered by the shallower of its two faces.
    """
    attack = _as_attack(attack)
    arr = arrangement if arrangement is not None else build_arrangement(instance)
    if cover is None:
        cover = arr.covering_matrix()
    alive = ~attack.mask(instance.n)
    depth = cover.sum(axis=1)
    survivors = (cover & alive[None, :]).sum(axis=1)
    safe = _safe(survivors, depth, eps)
    fi, fo = arr.arc_faces()
    # an arc's depth is the smaller of its two faces', i.e. the outer face's
    link = safe[fi] & safe[fo]
    nf = arr.n_faces
    g = coo_matrix((np.ones(int(link.sum())), (fi[link], fo[link])), shape=(nf, nf))
    _, label = connected_components(g, directed=False)
    comp = np.full(nf, -1, dtype=np.int64)
    safe_idx = np.flatnonzero(safe)
    if len(safe_idx):
        _, dense = np.unique(label[safe_idx], return_inverse=True)
        comp[safe_idx] = dense
    return SafeZoneReport(safe, comp, int(comp.max() + 1) if len(safe_idx) else 0, depth, survivors)


def components_after_attack(n: int, edges: Iterable[tuple[int, int]], attack: AttackSet | Iterable[int]) -> dict[int, int]:
    """Component label (smallest member id) of every surviving vertex."""
    attack = _as_attack(attack)
    dead = attack.ids
    uf = UnionFind(n)
    for u, v in edges:
        if u not in dead and v not in dead:
            uf.union(u, v)
    return {v: uf.find(v) for v in range(n) if v not in dead}


@dataclass
class Counterexample:
    face_a: int
    face_b: int
    reason: str


@dataclass
class VerificationReport:
    ok: bool
    n_components: int
    checked_pairs: int
    component_ok: list[bool] = field(default_factory=list)
    counterexamples: list[Counterexample] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)
    labels: dict[int, int] = field(default_factory=dict)

    def summary(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} components={self.n_components} checked_pairs={self.checked_pairs}"


def verify_spanner(instance: DiskInstance, spanner, attack: AttackSet | Iterable[int], eps: float, *,
                   arrangement: Arrangement | None = None, cover: np.ndarray | None = None) -> VerificationReport:
    """Check that safely connected faces stay connected in the attacked spanner.

    Each safe face is labelled with the components, in the spanner after
    deleting the attacked disks, of its surviving covering disks.  A safe component passes when every two of
    its faces share a label; a label common to the whole component settles
    this at once, otherwise distinct label sets are compared pairwise.
    """
    attack = _as_attack(attack)
    n_graph = getattr(spanner, "n", None)
    if n_graph is not None and n_graph != instance.n:
        raise ValueError(f"spanner has {n_graph} vertices, instance has {instance.n}")
    edges = spanner.edges if hasattr(spanner, "edges") else list(spanner)
    arr = arrangement if arrangement is not None else build_arrangement(instance)
    if cover is None:
        cover = arr.covering_matrix()
    zone = safe_zone(instance, attack, eps, arrangement=arr, cover=cover)
    labels = components_after_attack(instance.n, edges, attack)
    alive = ~attack.mask(instance.n)
    label_arr = np.full(instance.n, -1, dtype=np.int64)
    for v, l in labels.items():
        label_arr[v] = l

    report = VerificationReport(True, zone.n_components, 0, labels=labels)
    for comp in zone.components():
        sets: dict[frozenset, int] = {}
        for f in comp.tolist():
            disks = np.flatnonzero(cover[f] & alive)
            if len(disks) == 0:
                report.anomalies.append(f"safe face {f} has no surviving covering disk")
                continue
            key = frozenset(label_arr[disks].tolist())
            sets.setdefault(key, f)
        size = len(comp)
        report.checked_pairs += size * (size - 1) // 2
        keys = list(sets)
        ok = True
        if keys and not frozenset.intersection(*keys):
            for x in range(len(keys)):
                for y in range(x + 1, len(keys)):
                    if not keys[x] & keys[y]:
                        ok = False
                        report.counterexamples.append(Counterexample(
                            sets[keys[x]], sets[keys[y]],
                            "no surviving covering disks connected in spanner minus attack"))
        report.component_ok.append(ok)
    report.ok = not report.counterexamples
    return report


def write_counterexample_bundle(path: str | Path, instance: DiskInstance, cfg, attack: AttackSet, eps: float,
                                report: VerificationReport) -> Path:
    """Write a JSON bundle with everything needed to replay a failed verification."""
    path = Path(path)
    bundle = {
        "instance": [[d.center.x, d.center.y, d.radius] for d in instance.disks],
        "instance_seed": instance.seed,
        "generator": instance.generator,
        "config": {k: getattr(cfg, k) for k in ("eps", "c_alpha", "c_exp_size", "c_exp_rep", "seed", "preset")},
        "attack": {"strategy": attack.strategy, "params": list(attack.params), "seed": attack.seed,
                   "ids": sorted(attack.ids)},
        "eps": eps,
        "counterexamples": [vars(c) for c in report.counterexamples],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(bundle, indent=1))
    return path


def load_counterexample_bundle(path: str | Path):
    """(instance, config, attack, eps) from a bundle written by ``write_counterexample_bundle``."""
    from .sparsifier import SpannerConfig

    data = json.loads(Path(path).read_text())
    rows = np.asarray(data["instance"], dtype=float).reshape(-1, 3)
    inst = DiskInstance.from_arrays(rows[:, :2], rows[:, 2], seed=data.get("instance_seed"),
                                    generator=data.get("generator"))
    cfg = SpannerConfig(**data["config"])
    a = data["attack"]
    attack = AttackSet(frozenset(a["ids"]), a["strategy"], tuple(tuple(p) for p in a["params"]), a["seed"])
    return inst, cfg, attack, data["eps"]


def brute_force_components(n: int, edges: Sequence[tuple[int, int]], deleted: Iterable[int]) -> list[set[int]]:
    """Breadth-first components of the graph after deleting ``deleted`` (test oracle)."""
    dead = set(deleted)
    nbrs: dict[int, list[int]] = {v: [] for v in range(n) if v not in dead}
    for u, v in edges:
        if u in nbrs and v in nbrs:
            nbrs[u].append(v)
            nbrs[v].append(u)
    seen: set[int] = set()
    out = []
    for s in nbrs:
        if s in seen:
            continue
        comp, queue = {s}, [s]
        seen.add(s)
        while queue:
            x = queue.pop()
            for y in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        out.append(comp)
    return out
