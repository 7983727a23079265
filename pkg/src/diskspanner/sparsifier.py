"""Spanner construction: shallow base edges plus rounds of random colorings."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arrangement import Arrangement, _Topology, build_arrangement, shallow_pairs
from .connector import sampled_violation_rate
from .geometry import DiskInstance, intersecting_pairs, require_general_position
from .util import ceil_real, substream

PRESETS = {
    # proof constants
    "paper": dict(c_alpha=1.0, c_exp_size=640.0, c_exp_rep=2600.0),
    # each constant scaled down 50x for desk-scale runs; carries no guarantee
    "calibration": dict(c_alpha=1.0, c_exp_size=12.8, c_exp_rep=52.0),
}
DEFAULT_PRESET = "calibration"
MAX_SAMPLED_FACES = 10_000
THREADS_ENV = "DISKSPANNER_THREADS"

BASE = "base"


@dataclass(frozen=True)
class SpannerConfig:
    eps: float = 0.5
    c_alpha: float = 1.0
    c_exp_size: float = 12.8
    c_exp_rep: float = 52.0
    seed: int = 0
    preset: str = DEFAULT_PRESET

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if min(self.c_alpha, self.c_exp_size, self.c_exp_rep) <= 0:
            raise ValueError("constants must be positive")

    @classmethod
    def from_preset(cls, name: str = DEFAULT_PRESET, eps: float = 0.5, seed: int = 0) -> "SpannerConfig":
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        return cls(eps=eps, seed=seed, preset=name, **PRESETS[name])

    @property
    def calibration(self) -> bool:
        return self.preset == "calibration"

    @property
    def repetitions(self) -> int:
        return ceil_real(self.c_exp_rep / self.eps**2)


def compute_alpha(n: float, cfg: SpannerConfig) -> int:
    """Shallowness threshold ceil(c_alpha * c_exp_size * (eps^-2 + 4 ln n))."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return ceil_real(cfg.c_alpha * cfg.c_exp_size * (cfg.eps**-2 + 4.0 * math.log(n)))


def round_count(n: int, alpha: int) -> int:
    if alpha >= n:
        return 0
    return 1 + int(math.ceil(math.log2(n / alpha)))


@dataclass
class SpannerGraph:
    n: int
    provenance: dict[tuple[int, int], object] = field(default_factory=dict)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.provenance)

    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.provenance)

    def add(self, pair: tuple[int, int], source) -> bool:
        if pair in self.provenance:
            return False
        self.provenance[pair] = source
        return True


@dataclass
class RoundReport:
    index: int
    alpha_i: int
    edges_added: int = 0
    ignored_faces: list[int] = field(default_factory=list)  # per repetition
    sampled_faces: int = 0
    slow_unions: int = 0  # color-class unions that needed an arrangement


@dataclass
class BuildReport:
    n: int
    alpha: int
    repetitions: int
    preset: str
    eps: float
    seed: int
    base_edges: int = 0
    full_graph_edges: int = 0
    rounds: list[RoundReport] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def round_count(self) -> int:
        return len(self.rounds)

    @property
    def total_ignored(self) -> int:
        return sum(sum(r.ignored_faces) for r in self.rounds)


def _workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, workers)


def _consecutive_t(cu: np.ndarray, cv: np.ndarray, n_colors: int) -> np.ndarray:
    """Block index t (1-based) of the class pair (t-1, t) joining colors cu, cv; 0 if none.

    Class 0 is class ``n_colors``.  With two colors the single block is t = 1;
    with one color there are no blocks.
    """
    t = np.zeros(len(cu), dtype=np.int64)
    if n_colors == 1:
        return t
    if n_colors == 2:
        return np.where(cu != cv, 1, 0)
    up = np.mod(cv - cu, n_colors) == 1
    down = np.mod(cu - cv, n_colors) == 1
    t[up] = cv[up]
    t[down] = cu[down]
    return t


class _RoundContext:
    """Shared immutable inputs for the repetitions of one round."""

    def __init__(self, instance, pairs, alpha, alpha_i, seed, index, sample_cover):
        self.centers = np.asarray(instance.centers)
        self.radii = np.asarray(instance.radii)
        self.n = len(self.radii)
        self.pairs = pairs
        self.alpha = alpha
        self.alpha_i = alpha_i
        self.seed = seed
        self.index = index
        self.sample_cover = sample_cover  # (rows, disks) of sampled faces, or None

    def coloring(self, j: int) -> np.ndarray:
        return substream(self.seed, self.index, j).integers(1, self.alpha_i + 1, size=self.n)

    def repetition(self, j: int):
        """Edges (pairs, t) contributed by coloring j, plus telemetry."""
        n_colors, alpha = self.alpha_i, self.alpha
        colors = self.coloring(j)
        sizes = np.bincount(colors, minlength=n_colors + 1)
        sizes[0] = sizes[n_colors]
        union = sizes[:-1] + sizes[1:]  # union[t-1] = |D_{t-1}| + |D_t|
        p = self.pairs
        t = _consecutive_t(colors[p[:, 0]], colors[p[:, 1]], n_colors) if len(p) else np.zeros(0, dtype=np.int64)
        hit = t > 0
        pairs, ts = p[hit], t[hit]
        slow = 0
        if len(ts):
            fast = union[ts - 1] <= alpha
            keep = [pairs[fast]]
            tk = [ts[fast]]
            for tt in np.unique(ts[~fast]).tolist():
                slow += 1
                prev = n_colors if tt == 1 else tt - 1
                members = np.flatnonzero((colors == prev) | (colors == tt))
                side = (colors[members] == tt).astype(np.int8)
                loc = shallow_pairs(self.centers[members], self.radii[members], alpha, side=side)
                if len(loc):
                    glob = np.sort(members[loc], axis=1)
                    keep.append(glob)
                    tk.append(np.full(len(glob), tt))
            pairs = np.concatenate(keep)
            ts = np.concatenate(tk)
        ignored = self._ignored(colors, union)
        return pairs, ts, ignored, slow

    def _ignored(self, colors: np.ndarray, union: np.ndarray) -> int:
        if self.sample_cover is None or self.alpha_i == 1 or union.max(initial=0) <= self.alpha:
            return 0
        rows, disks, nrows = self.sample_cover
        n_colors = self.alpha_i
        counts = np.zeros((nrows, n_colors + 1), dtype=np.int64)
        np.add.at(counts, (rows, colors[disks]), 1)
        counts[:, 0] = counts[:, n_colors]
        deep = (counts[:, :-1] + counts[:, 1:]) > self.alpha
        return int(deep.any(axis=1).sum())


def _sample_faces(topo: _Topology, lo: float, hi: int, seed: int, index: int):
    depth = topo.depth
    cand = np.flatnonzero((depth > lo) & (depth <= hi))
    if len(cand) > MAX_SAMPLED_FACES:
        cand = np.sort(substream(seed, index, 0, 1).choice(cand, MAX_SAMPLED_FACES, replace=False))
    if len(cand) == 0:
        return None, 0
    rows, cols = topo.cover_pairs(cand)
    return (rows, cols, len(cand)), len(cand)


def round_edges(instance: DiskInstance, i: int, alpha: int, repetitions: int, seed: int, *, pairs=None,
                topo: _Topology | None = None, workers: int | None = 1):
    """Edges of round ``i`` as ``{pair: (i, j, t)}`` (earliest repetition wins) and telemetry."""
    alpha_i = (2 ** (i - 1)) * alpha
    report = RoundReport(i, alpha_i)
    if pairs is None:
        pairs = intersecting_pairs(np.asarray(instance.centers), np.asarray(instance.radii))
    sample = None
    if topo is not None:
        sample, report.sampled_faces = _sample_faces(topo, alpha_i / 2, alpha_i, seed, i)
    ctx = _RoundContext(instance, pairs, alpha, alpha_i, seed, i, sample)
    reps = range(1, repetitions + 1)
    w = _workers(workers)
    if w > 1 and repetitions > 1:
        with ThreadPoolExecutor(max_workers=w) as pool:
            results = list(pool.map(ctx.repetition, reps))
    else:
        results = [ctx.repetition(j) for j in reps]
    edges: dict[tuple[int, int], tuple[int, int, int]] = {}
    for j, (prs, ts, ignored, slow) in zip(reps, results):
        report.ignored_faces.append(ignored)
        report.slow_unions += slow
        for (u, v), t in zip(prs.tolist(), ts.tolist()):
            key = (u, v)
            if key not in edges:
                edges[key] = (i, j, t)
    return edges, report


def build_spanner(instance: DiskInstance, cfg: SpannerConfig, *, workers: int | None = None,
                  arrangement: Arrangement | None = None, validate: bool = True):
    """Build the spanner graph and its build report.

    ``arrangement`` may supply a prebuilt full arrangement of ``instance``
    (reused for deep-face telemetry); it is otherwise built on demand.
    """
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    if validate:
        require_general_position(instance)
    n = instance.n
    centers, radii = np.asarray(instance.centers), np.asarray(instance.radii)
    pairs = intersecting_pairs(centers, radii)
    timings["pairs"] = time.perf_counter() - t0
    alpha = compute_alpha(max(n, 1), cfg)
    repetitions = cfg.repetitions
    report = BuildReport(n, alpha, repetitions, cfg.preset, cfg.eps, cfg.seed, full_graph_edges=len(pairs))
    graph = SpannerGraph(n)

    t0 = time.perf_counter()
    if alpha >= n:
        base = pairs
    else:
        base = shallow_pairs(centers, radii, alpha, pairs=pairs,
                             topo=arrangement._topo if arrangement is not None else None)
    for u, v in base.tolist():
        graph.add((u, v), BASE)
    report.base_edges = len(graph)
    timings["base"] = time.perf_counter() - t0

    rounds = round_count(n, alpha)
    if rounds:
        deg = np.bincount(pairs.ravel(), minlength=n) if len(pairs) else np.zeros(n, dtype=np.int64)
        depth_bound = int(deg.max()) + 1 if n else 0
        topo = None
        for i in range(1, rounds + 1):
            t0 = time.perf_counter()
            alpha_i = 2 ** (i - 1) * alpha
            if topo is None and depth_bound > alpha_i / 2:
                topo = arrangement._topo if arrangement is not None else _Topology(centers, radii)
            edges, rr = round_edges(instance, i, alpha, repetitions, cfg.seed, pairs=pairs,
                                    topo=topo if depth_bound > alpha_i / 2 else None, workers=workers)
            for key in sorted(edges):
                if graph.add(key, edges[key]):
                    rr.edges_added += 1
            report.rounds.append(rr)
            timings[f"round{i}"] = time.perf_counter() - t0
    report.timings = timings
    return graph, report


def full_intersection_graph(instance: DiskInstance) -> SpannerGraph:
    g = SpannerGraph(instance.n)
    for u, v in intersecting_pairs(np.asarray(instance.centers), np.asarray(instance.radii)).tolist():
        g.add((u, v), BASE)
    return g


@dataclass
class SpotCheck:
    face: int
    depth: int
    kind: str  # "clique" or "sampled"
    ok: bool
    violation_rate: float = 0.0


def spot_check_connectors(instance: DiskInstance, graph: SpannerGraph, cfg: SpannerConfig, *, faces: int = 20,
                          trials: int = 2000, seed: int = 0, arrangement: Arrangement | None = None) -> list[SpotCheck]:
    """Check the spanner restricted to the disks covering sampled faces.

    Faces no deeper than alpha must induce a clique; deeper faces are
    checked for the eps/4 connector property by sampling.
    """
    arr = arrangement if arrangement is not None else build_arrangement(instance)
    alpha = compute_alpha(max(instance.n, 1), cfg)
    depths = arr.depths()
    cand = np.flatnonzero(depths >= 2)
    rng = substream(seed, 7)
    if len(cand) > faces:
        cand = np.sort(rng.choice(cand, faces, replace=False))
    edges = graph.edge_array()
    out = []
    for f in cand.tolist():
        cover = np.array(arr.covering_set(f), dtype=np.int64)
        d = len(cover)
        pos = {int(x): k for k, x in enumerate(cover)}
        adj = np.zeros((d, d), dtype=bool)
        inside = np.isin(edges[:, 0], cover) & np.isin(edges[:, 1], cover) if len(edges) else np.zeros(0, bool)
        for u, v in edges[inside].tolist():
            adj[pos[u], pos[v]] = adj[pos[v], pos[u]] = True
        if d <= alpha:
            ok = bool(adj[np.triu_indices(d, 1)].all())
            out.append(SpotCheck(f, d, "clique", ok))
        else:
            rate = sampled_violation_rate(adj, cfg.eps / 4, trials, rng)
            out.append(SpotCheck(f, d, "sampled", rate == 0.0, rate))
    return out
