"""Random-coloring connector graphs and exhaustive / sampled connector checks.

A connector over ``n_items`` items is the union, over ``repetitions``
independent uniform colorings with ``n_colors`` colors, of all pairs whose
colors are consecutive modulo ``n_colors``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .util import as_fraction, ceil_fraction, ceil_real, substream

EXHAUSTIVE_LIMIT = 24


@dataclass(frozen=True)
class Coloring:
    colors: np.ndarray  # 1-based color per item
    n_colors: int

    def __post_init__(self):
        c = np.asarray(self.colors)
        if len(c) and (c.min() < 1 or c.max() > self.n_colors):
            raise ValueError("colors must lie in 1..n_colors")


@dataclass(frozen=True)
class ConnectorParams:
    n_items: int
    n_colors: int
    repetitions: int
    eps: float = 0.5
    c_exp_size: float = 640.0
    c_exp_rep: float = 2600.0

    def __post_init__(self):
        if not (self.n_items <= self.n_colors <= 2 * self.n_items):
            raise ValueError(f"need n_items <= n_colors <= 2 n_items, got {self.n_items} and {self.n_colors}")
        if self.repetitions < 0:
            raise ValueError("repetitions must be non-negative")

    @classmethod
    def for_eps(cls, n_items: int, eps: float, n_colors: int | None = None, c_exp_rep: float = 2600.0,
                c_exp_size: float = 640.0) -> "ConnectorParams":
        """Parameters with ``ceil(c_exp_rep / eps^2)`` repetitions."""
        colors = n_items if n_colors is None else n_colors
        return cls(n_items, colors, ceil_real(c_exp_rep / eps**2), eps, c_exp_size, c_exp_rep)


@dataclass(frozen=True)
class ConnectorGraph:
    n_items: int
    edges: frozenset
    colorings: np.ndarray = field(repr=False)  # shape (repetitions, n_items)
    n_colors: int = 1

    @property
    def repetitions(self) -> int:
        return len(self.colorings)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_items, self.n_items), dtype=bool)
        if self.edges:
            e = np.array(sorted(self.edges))
            a[e[:, 0], e[:, 1]] = True
            a[e[:, 1], e[:, 0]] = True
        return a


@dataclass(frozen=True)
class ConnectorCheck:
    ok: bool
    subset: tuple[int, ...] = ()
    unreached: tuple[int, ...] = ()  # items outside the neighborhood of subset

    def __bool__(self) -> bool:
        return self.ok


def random_coloring(n_items: int, n_colors: int, rng: np.random.Generator) -> Coloring:
    if n_items < 1 or n_colors < 1:
        raise ValueError("n_items and n_colors must be positive")
    return Coloring(rng.integers(1, n_colors + 1, size=n_items), n_colors)


def _consecutive(diff_mod: np.ndarray, n_colors: int) -> np.ndarray:
    """Mask of color differences (already reduced mod n_colors) that count as consecutive."""
    if n_colors == 1:
        return np.zeros(diff_mod.shape, dtype=bool)
    if n_colors == 2:
        return diff_mod == 1
    return (diff_mod == 1) | (diff_mod == n_colors - 1)


def consecutive_color_edges(c: Coloring) -> set[tuple[int, int]]:
    """All pairs ``u < v`` whose colors differ by one modulo ``n_colors``."""
    colors = np.asarray(c.colors)
    n_colors = c.n_colors
    if n_colors == 1:
        return set()
    classes = {t: np.flatnonzero(colors == t) for t in range(1, n_colors + 1)}
    blocks = [(t, t + 1) for t in range(1, n_colors)]
    if n_colors >= 3:
        blocks.append((n_colors, 1))
    out: set[tuple[int, int]] = set()
    for s, t in blocks:
        for u in classes[s].tolist():
            for v in classes[t].tolist():
                out.add((u, v) if u < v else (v, u))
    return out


def _union_edges(colorings: np.ndarray, n_colors: int, n_items: int) -> frozenset:
    iu, iv = np.triu_indices(n_items, 1)
    hit = np.zeros(len(iu), dtype=bool)
    chunk = max(1, 2_000_000 // max(len(iu), 1))
    for s in range(0, len(colorings), chunk):
        c = colorings[s : s + chunk]
        diff = np.mod(c[:, iu] - c[:, iv], n_colors)
        hit |= _consecutive(diff, n_colors).any(axis=0)
    return frozenset(zip(iu[hit].tolist(), iv[hit].tolist()))


def build_connector(params: ConnectorParams, seed: int) -> ConnectorGraph:
    """Union of consecutive-color edges over ``params.repetitions`` seeded colorings.

    Coloring ``j`` is drawn from substream ``(seed, 0, j)``, so any single
    coloring can be replayed on its own.
    """
    n_items, n_colors = params.n_items, params.n_colors
    colorings = np.empty((params.repetitions, n_items), dtype=np.int64)
    for j in range(params.repetitions):
        colorings[j] = random_coloring(n_items, n_colors, substream(seed, 0, j)).colors
    return ConnectorGraph(n_items, _union_edges(colorings, n_colors, n_items), colorings, n_colors)


def neighborhood(g: ConnectorGraph, subset: Iterable[int]) -> set[int]:
    subset = set(subset)
    return {x for (u, v) in g.edges for x, y in ((u, v), (v, u)) if y in subset}


def check_connector(g: ConnectorGraph, eps: float) -> ConnectorCheck:
    """Exhaustive test that every item set of size at least ``eps * n_items``
    has a neighborhood larger than ``(1 - eps) * n_items``.

    Only feasible for ``n_items <= 24``; larger graphs raise ValueError and
    should go through ``monte_carlo_connector``.
    """
    n_items = g.n_items
    if n_items > EXHAUSTIVE_LIMIT:
        raise ValueError(f"n_items={n_items} too large for exhaustive mode; use monte_carlo_connector")
    e = as_fraction(eps)
    nb = [0] * n_items
    for u, v in g.edges:
        nb[u] |= 1 << v
        nb[v] |= 1 << u
    nbhd = np.zeros(1, dtype=np.uint32)
    for k in range(n_items):
        nbhd = np.concatenate([nbhd, nbhd | np.uint32(nb[k])])
    sizes = np.bitwise_count(np.arange(1 << n_items, dtype=np.uint32))
    reach = np.bitwise_count(nbhd)
    big = sizes.astype(np.int64) * e.denominator >= e.numerator * n_items
    small_nbhd = reach.astype(np.int64) * e.denominator <= (e.denominator - e.numerator) * n_items
    bad = np.flatnonzero(big & small_nbhd)
    if len(bad) == 0:
        return ConnectorCheck(True)
    mask = int(bad[0])
    subset = tuple(i for i in range(n_items) if mask >> i & 1)
    unreached = tuple(i for i in range(n_items) if not int(nbhd[mask]) >> i & 1)
    return ConnectorCheck(False, subset, unreached)


def monte_carlo_connector(g: ConnectorGraph, eps: float, trials: int, rng: np.random.Generator,
                          batch: int = 10_000) -> float:
    """Fraction of random disjoint (subset, unreached), each of n_items ceil(eps n_items), with no subset-unreached edge."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    return sampled_violation_rate(g.adjacency(), eps, trials, rng, batch)


def sampled_violation_rate(adj: np.ndarray, eps: float, trials: int, rng: np.random.Generator,
                           batch: int = 10_000) -> float:
    n_items = len(adj)
    s = ceil_fraction(as_fraction(eps) * n_items)
    if s < 1 or 2 * s > n_items:
        raise ValueError(f"cannot draw two disjoint sets of n_items {s} from {n_items} items")
    bad = 0
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        perm = np.argsort(rng.random((b, n_items)), axis=1)
        left, right = perm[:, :s], perm[:, s : 2 * s]
        linked = adj[left[:, :, None], right[:, None, :]].any(axis=(1, 2))
        bad += int((~linked).sum())
        done += b
    return bad / trials


def distinct_colors(c: Coloring, subset: Iterable[int]) -> int:
    idx = list(subset)
    if not idx:
        raise ValueError("subset must be nonempty")
    return len(set(np.asarray(c.colors)[idx].tolist()))
