"""Command-line entry point: ``diskspanner <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .arrangement import build_arrangement
from .attack import STRATEGIES, generate_attack, verify_spanner, write_counterexample_bundle
from .generators import GENERATORS, generate
from .geometry import GeneralPositionError, intersecting_pairs
from .oracle import run_suite
from .plotting import loglog_fit, scaling_plot
from .sparsifier import DEFAULT_PRESET, PRESETS, THREADS_ENV, SpannerConfig, build_spanner

log = logging.getLogger("diskspanner")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _manifest(args, command: str, **extra) -> io.RunManifest:
    params = {k: v for k, v in extra.items() if v is not None}
    inputs = {k: getattr(args, k) for k in ("instance", "spanner", "attack") if getattr(args, k, None)}
    outputs = {k: getattr(args, k) for k in ("out", "report") if getattr(args, k, None)}
    return io.RunManifest(command, params, getattr(args, "seed", None), inputs, outputs)


def _check_digest(path, instance_digest: str, what: str) -> None:
    pairs = io.read_manifest_pairs(Path(path).read_text())
    recorded = pairs.get("param.instance_sha256")
    if recorded is not None and recorded != instance_digest:
        raise UsageError(f"{what} {path} was produced for a different instance")


# -- commands ----------------------------------------------------------------

def cmd_gen(args) -> int:
    inst = generate(args.generator, args.n, args.seed)
    io.write_instance(args.out, inst, _manifest(args, "gen", generator=args.generator, n=args.n))
    log.info("wrote %d disks to %s", inst.n, args.out)
    return EXIT_OK


def _config(args) -> SpannerConfig:
    return SpannerConfig.from_preset(args.preset, args.eps, args.seed)


def cmd_build(args) -> int:
    inst = io.read_instance(args.instance)
    cfg = _config(args)
    graph, report = build_spanner(inst, cfg)
    args.report = args.report or f"{args.out}.report"
    digest = io.instance_digest(inst)
    params = dict(eps=repr(cfg.eps), preset=cfg.preset, c_alpha=cfg.c_alpha, c_exp_size=cfg.c_exp_size,
                  c_exp_rep=cfg.c_exp_rep, instance_sha256=digest)
    io.write_spanner(args.out, graph, _manifest(args, "build", **params))
    io.write_build_report(args.report, report, len(graph), _manifest(args, "build", **params))
    print(f"edges={len(graph)} full={report.full_graph_edges} alpha={report.alpha} rounds={report.round_count}")
    return EXIT_OK


def cmd_attack(args) -> int:
    inst = io.read_instance(args.instance)
    params: dict = {}
    if args.strategy == "random_fraction":
        params["rho"] = args.rho
    elif args.strategy == "neighborhood_kill":
        if args.spanner is None or args.target is None:
            raise UsageError("neighborhood_kill needs --spanner and --target")
        _check_digest(args.spanner, io.instance_digest(inst), "spanner")
        params.update(target=args.target, edges=io.read_spanner(args.spanner).edges)
    elif args.strategy == "deepest_point":
        params["count"] = args.count
    else:
        params["ids"] = [int(x) for x in (args.ids or "").replace(",", " ").split()]
    attack = generate_attack(inst, args.strategy, params, seed=args.seed)
    io.write_attack(args.out, attack, _manifest(args, "attack", instance_sha256=io.instance_digest(inst)))
    print(f"deleted={len(attack)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = io.read_instance(args.instance)
    digest = io.instance_digest(inst)
    _check_digest(args.spanner, digest, "spanner")
    spanner = io.read_spanner(args.spanner)
    if spanner.n != inst.n:
        raise UsageError(f"spanner has {spanner.n} vertices, instance has {inst.n}")
    if args.attack:
        _check_digest(args.attack, digest, "attack file")
        attack = io.read_attack(args.attack)
    else:
        attack = generate_attack(inst, "ids", {"ids": []})
    bad = [i for i in attack.ids if not 0 <= i < inst.n]
    if bad:
        raise UsageError(f"attack file names unknown disks {sorted(bad)[:10]}")
    report = verify_spanner(inst, spanner, attack, args.eps)
    if args.out:
        io.write_verification(args.out, report,
                              _manifest(args, "verify", eps=repr(args.eps), instance_sha256=digest))
    if not report.ok and args.bundle:
        m = io.read_manifest_pairs(Path(args.spanner).read_text())
        cfg = SpannerConfig(eps=float(m.get("param.eps", args.eps)),
                            c_alpha=float(m.get("param.c_alpha", 1.0)),
                            c_exp_size=float(m.get("param.c_exp_size", PRESETS[DEFAULT_PRESET]["c_exp_size"])),
                            c_exp_rep=float(m.get("param.c_exp_rep", PRESETS[DEFAULT_PRESET]["c_exp_rep"])),
                            seed=int(m.get("seed", 0)), preset=m.get("param.preset", DEFAULT_PRESET))
        write_counterexample_bundle(args.bundle, inst, cfg, attack, args.eps, report)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_FAIL


def _degree_summary(n: int, edges) -> tuple[dict, np.ndarray]:
    e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    deg = np.bincount(e.ravel(), minlength=n) if n else np.zeros(0, dtype=np.int64)
    stats = {
        "degree.min": int(deg.min()) if n else 0,
        "degree.median": float(np.median(deg)) if n else 0.0,
        "degree.mean": round(float(deg.mean()), 6) if n else 0.0,
        "degree.max": int(deg.max()) if n else 0,
    }
    return stats, deg


def cmd_stats(args) -> int:
    inst = io.read_instance(args.instance)
    full = intersecting_pairs(np.asarray(inst.centers), np.asarray(inst.radii))
    values: dict = {"n": inst.n, "full_edges": len(full)}
    edges = full.tolist()
    if args.spanner:
        _check_digest(args.spanner, io.instance_digest(inst), "spanner")
        edges = io.read_spanner(args.spanner).edges
        values["spanner_edges"] = len(edges)
    if not args.no_arrangement:
        arr = build_arrangement(inst)
        values["faces"] = arr.n_faces
        values["max_depth"] = int(arr.depths().max())
    summary, deg = _degree_summary(inst.n, edges)
    values.update(summary)
    if args.degree_csv:
        hist = np.bincount(deg) if len(deg) else np.zeros(0, dtype=np.int64)
        with open(args.degree_csv, "w", newline="") as fh:
            for line in _manifest(args, "stats").lines():
                fh.write(line + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["degree", "count"])
            w.writerows([d, int(c)] for d, c in enumerate(hist.tolist()) if c)
    if args.out:
        io.write_keyvalue(args.out, values, _manifest(args, "stats"))
    for k, v in values.items():
        print(f"{k}: {v}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    t0 = time.perf_counter()
    cases = run_suite(args.count, args.max_n, args.seed)
    failed = [c for c in cases if not c.ok]
    for c in failed:
        for m in c.mismatches:
            print(f"MISMATCH {c.label}: {m}")
    print(f"{'PASS' if not failed else 'FAIL'} instances={len(cases)} mismatches={len(failed)} "
          f"seconds={time.perf_counter() - t0:.1f}")
    return EXIT_FAIL if failed else EXIT_OK


BENCH_FIELDS = ["generator", "n", "eps", "preset", "seed", "alpha", "rounds", "full_edges", "spanner_edges",
                "ratio", "build_seconds"]


def run_bench(sizes, eps_values, generator: str, preset: str, seed: int) -> list[dict]:
    rows = []
    for eps in eps_values:
        for n in sizes:
            inst = generate(generator, n, seed)
            cfg = SpannerConfig.from_preset(preset, eps, seed)
            t0 = time.perf_counter()
            graph, report = build_spanner(inst, cfg)
            dt = time.perf_counter() - t0
            full = report.full_graph_edges
            rows.append(dict(generator=generator, n=n, eps=eps, preset=preset, seed=seed, alpha=report.alpha,
                             rounds=report.round_count, full_edges=full, spanner_edges=len(graph),
                             ratio=round(len(graph) / full, 6) if full else 1.0, build_seconds=round(dt, 4)))
            log.info("bench n=%d eps=%s edges=%d/%d %.2fs", n, eps, len(graph), full, dt)
    return rows


def cmd_bench(args) -> int:
    sizes = [int(x) for x in args.sizes.split(",")]
    eps_values = [float(x) for x in args.eps_list.split(",")] if args.eps_list else [args.eps]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_bench(sizes, eps_values, args.generator, args.preset, args.seed)
    manifest = _manifest(args, "bench", sizes=args.sizes, eps=",".join(map(repr, eps_values)),
                         generator=args.generator, preset=args.preset)
    with open(out / "bench.csv", "w", newline="") as fh:
        for line in manifest.lines():
            fh.write(line + "\n")
        w = csv.DictWriter(fh, BENCH_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    edges, times = {}, {}
    for eps in eps_values:
        sel = [r for r in rows if r["eps"] == eps]
        ns = [r["n"] for r in sel]
        edges[f"spanner eps={eps}"] = (ns, [r["spanner_edges"] for r in sel])
        edges[f"full eps={eps}"] = (ns, [r["full_edges"] for r in sel])
        times[f"eps={eps}"] = (ns, [r["build_seconds"] for r in sel])
        slope, _ = loglog_fit(ns, [r["spanner_edges"] for r in sel])
        print(f"eps={eps} edge_exponent={slope:.3f}")
    scaling_plot(out / "bench_edges.svg", edges, ylabel="edges", title=f"edge count ({args.generator})")
    scaling_plot(out / "bench_time.svg", times, ylabel="build seconds", title=f"build time ({args.generator})")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def _add_common(p, *, seed=True, eps=True, preset=False):
    if seed:
        p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    if eps:
        p.add_argument("--eps", type=float, default=0.5, help="safety fraction in (0, 1) (default: 0.5)")
    if preset:
        p.add_argument("--preset", choices=sorted(PRESETS), default=DEFAULT_PRESET,
                       help=f"constant preset (default: {DEFAULT_PRESET})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diskspanner",
        description="Sparse attack-resilient subgraphs of disk intersection graphs.",
        epilog=f"Set {THREADS_ENV}=<k> to run round repetitions on k threads (default: 1). "
               "Exit codes: 0 success, 1 verification/oracle failure, 2 usage error, 3 I/O error.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True, help="number of disks")
    p.add_argument("--generator", choices=GENERATORS, default="uniform_unit", help="default: uniform_unit")
    p.add_argument("--out", required=True, help="instance file to write")
    _add_common(p, eps=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build a spanner")
    p.add_argument("--in", dest="instance", required=True, help="instance file")
    p.add_argument("--out", required=True, help="spanner file to write")
    p.add_argument("--report", help="build report path (default: <out>.report)")
    _add_common(p, preset=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("attack", help="generate an attack set")
    p.add_argument("--in", dest="instance", required=True, help="instance file")
    p.add_argument("--out", required=True, help="attack file to write")
    p.add_argument("--strategy", choices=STRATEGIES, default="random_fraction", help="default: random_fraction")
    p.add_argument("--rho", type=float, default=0.25, help="deletion probability for random_fraction (default: 0.25)")
    p.add_argument("--target", type=int, help="disk id for neighborhood_kill")
    p.add_argument("--spanner", help="graph whose neighborhood neighborhood_kill deletes")
    p.add_argument("--count", type=int, default=1, help="disks to delete for deepest_point (default: 1)")
    p.add_argument("--ids", help="comma separated disk ids for the ids strategy")
    _add_common(p, eps=False)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("verify", help="verify safe connectivity of a spanner under an attack")
    p.add_argument("--in", dest="instance", required=True, help="instance file")
    p.add_argument("--spanner", required=True, help="spanner file")
    p.add_argument("--attack", help="attack file (default: no deletions)")
    p.add_argument("--out", help="verification report to write")
    p.add_argument("--bundle", help="counterexample bundle to write on failure")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="instance and spanner statistics")
    p.add_argument("--in", dest="instance", required=True, help="instance file")
    p.add_argument("--spanner", help="spanner file (default: full intersection graph)")
    p.add_argument("--out", help="key: value file to write")
    p.add_argument("--degree-csv", help="degree histogram CSV to write")
    p.add_argument("--no-arrangement", action="store_true", help="skip face count and max depth")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("oracle", help="brute-force cross-checks on random instances")
    p.add_argument("--count", type=int, default=100, help="number of instances (default: 100)")
    p.add_argument("--max-n", type=int, default=60, help="largest instance size (default: 60)")
    _add_common(p, eps=False)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="edge-count and build-time sweep over n")
    p.add_argument("--sizes", default="100,300,1000,3000", help="comma separated n values (default: 100,300,1000,3000)")
    p.add_argument("--eps-list", help="comma separated eps values (default: --eps)")
    p.add_argument("--generator", choices=GENERATORS, default="uniform_unit", help="default: uniform_unit")
    p.add_argument("--out", required=True, help="output directory for bench.csv and SVG plots")
    _add_common(p, preset=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, GeneralPositionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, io.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
