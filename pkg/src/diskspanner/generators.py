"""Random disk-instance generators, all jittered into general position."""

from __future__ import annotations

import math

import numpy as np

from .geometry import DiskInstance, instance_scale, validate_general_position

GENERATORS = ("uniform_unit", "clustered", "stacked", "corridor")

JITTER = 1e-6
MAX_JITTER_ATTEMPTS = 25


def _uniform_unit(n, rng, r_min=0.02, r_max=0.08):
    centers = rng.uniform(0.0, 1.0, size=(n, 2))
    radii = rng.uniform(r_min, r_max, size=n)
    return centers, radii


def _stacked(n, rng):
    # every disk covers (0.5, 0.5): offsets stay well below the smallest radius
    offsets = rng.normal(0.0, 0.01, size=(n, 2))
    offsets = np.clip(offsets, -0.04, 0.04)
    radii = 0.3 + rng.uniform(-0.02, 0.02, size=n)
    return 0.5 + offsets, radii


def _corridor(n, rng):
    spacing = 1.0 / n
    x = (np.arange(n) + 0.5) * spacing
    y = 0.5 + rng.uniform(-0.05, 0.05, size=n) * spacing
    radii = spacing * (0.75 + rng.uniform(-0.05, 0.05, size=n))
    return np.stack([x, y], axis=1), radii


def _clustered(n, rng, sigma=0.04, bridge_radius=0.02):
    k = max(1, min(n // 40, 8))
    hubs = rng.uniform(0.15, 0.85, size=(k, 2))
    centers, radii = [], []
    step = 1.5 * bridge_radius
    for a, b in zip(hubs[:-1], hubs[1:]):
        m = max(1, int(math.ceil(np.hypot(*(b - a)) / step)) - 1)
        if len(centers) + m > n // 2:
            break
        for s in range(1, m + 1):
            centers.append(a + (b - a) * s / (m + 1))
            radii.append(bridge_radius)
    rest = n - len(centers)
    which = rng.integers(0, k, size=rest)
    pts = hubs[which] + rng.normal(0.0, sigma, size=(rest, 2))
    centers.extend(pts)
    radii.extend(rng.uniform(0.02, 0.05, size=rest))
    return np.asarray(centers, dtype=float).reshape(-1, 2), np.asarray(radii, dtype=float)


_BASES = {
    "uniform_unit": _uniform_unit,
    "clustered": _clustered,
    "stacked": _stacked,
    "corridor": _corridor,
}


def generate(name: str, n: int, seed: int, **params) -> DiskInstance:
    """Build an ``n``-disk instance from the named generator.

    Centers and radii receive independent uniform jitter of relative
    magnitude ``JITTER`` (of the bounding-box diagonal); the result is
    re-jittered until it validates as being in general position.
    """
    if name not in _BASES:
        raise ValueError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    centers, radii = _BASES[name](n, rng, **params)
    scale = instance_scale(centers, radii)
    for _ in range(MAX_JITTER_ATTEMPTS):
        mag = JITTER * scale
        c = centers + rng.uniform(-mag, mag, size=centers.shape)
        r = radii + rng.uniform(-mag, mag, size=radii.shape)
        inst = DiskInstance.from_arrays(c, r, seed=seed, generator=name)
        if validate_general_position(inst).ok:
            return inst
    raise RuntimeError(f"{name}: could not reach general position after {MAX_JITTER_ATTEMPTS} jitters")
