"""Brute-force cross-checks of the arrangement-based routines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arrangement import LensOracle, shallow_edges
from .attack import brute_force_components, components_after_attack
from .generators import GENERATORS, generate
from .geometry import DiskInstance, intersecting_pairs

STACKED_CAP = 30  # stacked instances have ~n^2 faces


@dataclass
class OracleCase:
    label: str
    n: int
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def oracle_instances(count: int = 100, max_n: int = 60, seed: int = 0):
    """Seeded mix of every generator with ``2 <= n <= max_n``."""
    rng = np.random.default_rng(seed)
    for s in range(count):
        name = GENERATORS[s % len(GENERATORS)]
        hi = min(max_n, STACKED_CAP) if name == "stacked" else max_n
        n = int(rng.integers(max(2, hi // 2), hi + 1)) if hi >= 2 else 1
        yield f"{name}/n={n}/seed={seed + s}", generate(name, n, seed + s)


def lens_depths(instance: DiskInstance) -> dict[tuple[int, int], int]:
    """Minimum lens depth of every intersecting pair, by brute force."""
    oracle = LensOracle(list(instance))
    pairs = intersecting_pairs(np.asarray(instance.centers), np.asarray(instance.radii))
    return {(int(a), int(b)): oracle.min_depth(int(a), int(b))[0] for a, b in pairs.tolist()}


def check_shallow(instance: DiskInstance, ks=None, case: OracleCase | None = None) -> OracleCase:
    """shallow_edges against the lens oracle, plus saturation and monotonicity in k."""
    n = instance.n
    case = case or OracleCase("instance", n)
    ks = sorted(set(ks or (2, 5, n)))
    expected = lens_depths(instance)
    previous: set | None = None
    for k in ks:
        got = {e.pair: e.depth for e in shallow_edges(instance, k, validate=False)}
        want = {p: d for p, d in expected.items() if d <= k}
        if set(got) != set(want):
            diff = sorted(set(got) ^ set(want))[:5]
            case.mismatches.append(f"k={k}: edge sets differ at {diff}")
        else:
            bad = [p for p in got if got[p] != want[p]]
            if bad:
                case.mismatches.append(f"k={k}: witness depth differs at {bad[:5]}")
        if previous is not None and not previous <= set(got):
            case.mismatches.append(f"k={k}: not a superset of the previous k")
        previous = set(got)
    full = {e.pair for e in shallow_edges(instance, max(n, 1), validate=False)}
    if full != set(expected):
        case.mismatches.append("k=n: does not equal the full intersection graph")
    return case


def check_components(instance: DiskInstance, rng: np.random.Generator, trials: int = 3,
                     case: OracleCase | None = None) -> OracleCase:
    """Union-find labels against breadth-first search under random deletions."""
    n = instance.n
    case = case or OracleCase("instance", n)
    edges = [tuple(p) for p in intersecting_pairs(np.asarray(instance.centers), np.asarray(instance.radii)).tolist()]
    for _ in range(trials):
        dead = set(np.flatnonzero(rng.random(n) < rng.uniform(0, 0.5)).tolist())
        labels = components_after_attack(n, edges, dead)
        got = {}
        for v, l in labels.items():
            got.setdefault(l, set()).add(v)
        want = brute_force_components(n, edges, dead)
        if sorted(map(sorted, got.values())) != sorted(map(sorted, want)):
            case.mismatches.append(f"components differ with {len(dead)} deletions")
    return case


def run_suite(count: int = 100, max_n: int = 60, seed: int = 0, ks=None) -> list[OracleCase]:
    rng = np.random.default_rng([seed, 1])
    out = []
    for label, inst in oracle_instances(count, max_n, seed):
        case = OracleCase(label, inst.n)
        check_shallow(inst, ks, case)
        check_components(inst, rng, case=case)
        out.append(case)
    return out
