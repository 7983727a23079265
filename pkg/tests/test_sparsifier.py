import math

import numpy as np
import pytest

from conftest import brute_pairs
from diskspanner.arrangement import shallow_edges
from diskspanner.attack import brute_force_components
from diskspanner.generators import generate
from diskspanner.sparsifier import (
    BASE,
    PRESETS,
    SpannerConfig,
    build_spanner,
    compute_alpha,
    full_intersection_graph,
    round_count,
    round_edges,
    spot_check_connectors,
)

# small constants so desk-sized instances exercise the round machinery
TINY = dict(c_alpha=1.0, c_exp_size=0.5, c_exp_rep=1.0)


def _partition(n, edges):
    return sorted(sorted(c) for c in brute_force_components(n, list(edges), []))


def test_alpha_formula():
    cfg = SpannerConfig.from_preset("paper", eps=0.5)
    want = math.ceil(640 * (4 + 4 * math.log(100)))
    assert compute_alpha(100, cfg) == want
    cal = SpannerConfig.from_preset("calibration", eps=0.5)
    assert compute_alpha(1000, cal) == math.ceil(12.8 * (4 + 4 * math.log(1000)))


def test_alpha_ignores_float_noise():
    cfg = SpannerConfig(eps=0.5, c_alpha=1.0, c_exp_size=0.25, c_exp_rep=1.0)
    # 0.25 * (4 + 4 ln 1) is exactly 1
    assert compute_alpha(1, cfg) == 1


def test_repetitions():
    assert SpannerConfig.from_preset("paper", 0.5).repetitions == 10400
    assert SpannerConfig.from_preset("calibration", 0.5).repetitions == 208
    assert SpannerConfig.from_preset("calibration", 0.3).repetitions == math.ceil(52 / 0.09 - 1e-9)


def test_round_count():
    assert round_count(100, 100) == 0
    assert round_count(101, 100) == 2
    assert round_count(1000, 100) == 1 + math.ceil(math.log2(10))


def test_presets_and_validation():
    assert set(PRESETS) == {"paper", "calibration"}
    with pytest.raises(ValueError):
        SpannerConfig(eps=1.0)
    with pytest.raises(ValueError):
        SpannerConfig.from_preset("huge")


def test_small_instance_gives_full_graph():
    inst = generate("uniform_unit", 80, 1)
    g, rep = build_spanner(inst, SpannerConfig.from_preset("calibration", 0.5, 1))
    assert set(g.edges) == brute_pairs(inst.centers, inst.radii)
    assert rep.round_count == 0 and all(src == BASE for src in g.provenance.values())


def test_base_layer_is_alpha_shallow():
    inst = generate("stacked", 40, 2)
    cfg = SpannerConfig(eps=0.5, seed=3, **TINY)
    g, rep = build_spanner(inst, cfg)
    alpha = compute_alpha(40, cfg)
    base = {p for p, src in g.provenance.items() if src == BASE}
    assert base == {e.pair for e in shallow_edges(inst, alpha)}
    assert rep.base_edges == len(base)


def test_round_edges_carry_valid_provenance():
    inst = generate("stacked", 60, 4)
    cfg = SpannerConfig(eps=0.5, seed=5, **TINY)
    g, rep = build_spanner(inst, cfg)
    full = brute_pairs(inst.centers, inst.radii)
    assert set(g.edges) <= full
    assert rep.round_count == round_count(60, rep.alpha) > 0
    repetitions = cfg.repetitions
    for (u, v), src in g.provenance.items():
        if src != BASE:
            i, j, t = src
            assert 1 <= i <= rep.round_count and 1 <= j <= repetitions and 1 <= t <= 2 ** (i - 1) * rep.alpha
    assert sum(r.edges_added for r in rep.rounds) + rep.base_edges == len(g)


def test_round_edges_direct():
    inst = generate("uniform_unit", 100, 6)
    edges, rep = round_edges(inst, 1, 3, 4, seed=2)
    assert rep.alpha_i == 3 and len(rep.ignored_faces) == 4
    assert set(edges) <= brute_pairs(inst.centers, inst.radii)
    again, _ = round_edges(inst, 1, 3, 4, seed=2, workers=3)
    assert again == edges


@pytest.mark.parametrize("seed", range(4))
def test_components_preserved_with_small_constants(seed):
    inst = generate("clustered", 120, seed)
    g, _ = build_spanner(inst, SpannerConfig(eps=0.5, seed=seed, **TINY))
    assert _partition(120, g.edges) == _partition(120, brute_pairs(inst.centers, inst.radii))


def test_threads_do_not_change_output(monkeypatch):
    inst = generate("stacked", 50, 7)
    cfg = SpannerConfig(eps=0.5, seed=1, **TINY)
    g1, r1 = build_spanner(inst, cfg, workers=1)
    g4, r4 = build_spanner(inst, cfg, workers=4)
    assert g1.provenance == g4.provenance
    assert [r.ignored_faces for r in r1.rounds] == [r.ignored_faces for r in r4.rounds]
    monkeypatch.setenv("DISKSPANNER_THREADS", "3")
    g3, _ = build_spanner(inst, cfg)
    assert g3.provenance == g1.provenance


def test_telemetry_samples_faces_in_round_range():
    inst = generate("stacked", 60, 3)
    cfg = SpannerConfig(eps=0.5, seed=2, **TINY)
    _, rep = build_spanner(inst, cfg)
    assert any(r.sampled_faces > 0 for r in rep.rounds)
    assert rep.total_ignored >= 0


def test_full_intersection_graph():
    inst = generate("corridor", 20, 0)
    assert set(full_intersection_graph(inst).edges) == brute_pairs(inst.centers, inst.radii)


def test_spot_checks_on_full_graph_pass():
    inst = generate("stacked", 30, 1)
    cfg = SpannerConfig(eps=0.5, seed=0, **TINY)
    checks = spot_check_connectors(inst, full_intersection_graph(inst), cfg, faces=10, trials=200)
    assert checks and all(c.ok for c in checks)
    kinds = {c.kind for c in checks}
    assert kinds <= {"clique", "sampled"}


def test_empty_graph_fails_clique_spot_check():
    from diskspanner.sparsifier import SpannerGraph

    inst = generate("uniform_unit", 60, 2)
    cfg = SpannerConfig.from_preset("calibration", 0.5)
    checks = spot_check_connectors(inst, SpannerGraph(60), cfg, faces=5)
    assert checks and not any(c.ok for c in checks)
