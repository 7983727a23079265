import math

import numpy as np
import pytest

from diskspanner.geometry import Disk, DiskInstance


def brute_depth(p, centers, radii) -> int:
    """Point-in-disk count written without any library helper."""
    count = 0
    for (cx, cy), r in zip(np.asarray(centers).tolist(), np.asarray(radii).tolist()):
        if math.hypot(p[0] - cx, p[1] - cy) <= r:
            count += 1
    return count


def brute_pairs(centers, radii) -> set:
    c, r = np.asarray(centers).tolist(), np.asarray(radii).tolist()
    out = set()
    for i in range(len(r)):
        for j in range(i + 1, len(r)):
            if math.hypot(c[i][0] - c[j][0], c[i][1] - c[j][1]) <= r[i] + r[j]:
                out.add((i, j))
    return out


def make_instance(rows) -> DiskInstance:
    arr = np.asarray(rows, dtype=float).reshape(-1, 3)
    return DiskInstance.from_arrays(arr[:, :2], arr[:, 2])


@pytest.fixture
def lens():
    return [Disk.of(0.0, 0.0, 1.0, 0), Disk.of(1.0, 0.0, 1.0, 1)]


@pytest.fixture
def bridged_clusters():
    """Two dense clusters joined by a single chain disk (id 0)."""
    rows = [(0.5, 0.5, 0.33)]
    rng = np.random.default_rng(11)
    for cx in (0.0, 1.0):
        for _ in range(6):
            x, y = rng.normal(0, 0.03, 2)
            rows.append((cx + x, 0.5 + y, 0.2 + rng.uniform(0, 0.02)))
    return make_instance(rows)


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one summary line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
