"""Seeded substreams and exact-ratio helpers shared across modules."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator addressed by ``(seed, *key)``.

    The same address always yields the same stream, regardless of the
    order or thread in which streams are requested.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def as_fraction(x) -> Fraction:
    """Exact rational for a user-facing ratio; floats go through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def ceil_real(x: float, slack: float = 1e-9) -> int:
    """Ceiling that ignores floating noise just above an integer."""
    return int(math.ceil(x - slack))
