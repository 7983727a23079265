"""Plain-text file formats with a leading run-manifest comment block.

Every file starts with ``# manifest.<key>: <value>`` lines.  Keys under
``time.`` hold wall-clock data and are ignored by ``strip_volatile``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Iterable

import numpy as np

from .attack import AttackSet, VerificationReport
from .geometry import DiskInstance
from .sparsifier import BASE, BuildReport, SpannerGraph

MANIFEST_PREFIX = "# manifest."
VOLATILE_PREFIX = "time."


class FormatError(ValueError):
    pass


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


@dataclass
class RunManifest:
    command: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    version: str = field(default_factory=tool_version)

    def lines(self) -> list[str]:
        out = [f"{MANIFEST_PREFIX}command: {self.command}", f"{MANIFEST_PREFIX}version: {self.version}"]
        if self.seed is not None:
            out.append(f"{MANIFEST_PREFIX}seed: {self.seed}")
        for group, d in (("param", self.params), ("in", self.inputs), ("out", self.outputs)):
            for k in sorted(d):
                out.append(f"{MANIFEST_PREFIX}{group}.{k}: {d[k]}")
        return out

    @classmethod
    def parse(cls, text: str) -> "RunManifest":
        m = cls("", version="")
        for key, value in read_manifest_pairs(text).items():
            if key == "command":
                m.command = value
            elif key == "version":
                m.version = value
            elif key == "seed":
                m.seed = int(value)
            else:
                group, _, name = key.partition(".")
                target = {"param": m.params, "in": m.inputs, "out": m.outputs}.get(group)
                if target is not None:
                    target[name] = value
        return m


def read_manifest_pairs(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.startswith(MANIFEST_PREFIX):
            key, _, value = line[len(MANIFEST_PREFIX):].partition(": ")
            out[key] = value
    return out


def read_manifest(path: str | Path) -> RunManifest:
    return RunManifest.parse(Path(path).read_text())


def strip_volatile(text: str) -> str:
    """Drop timing lines so two runs can be compared byte for byte."""
    keep = []
    for line in text.splitlines(keepends=True):
        body = line[len(MANIFEST_PREFIX):] if line.startswith(MANIFEST_PREFIX) else line
        if not body.startswith(VOLATILE_PREFIX):
            keep.append(line)
    return "".join(keep)


def _write(path: str | Path, manifest: RunManifest, body: Iterable[str]) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for line in manifest.lines():
            fh.write(line + "\n")
        for line in body:
            fh.write(line + "\n")
    return path


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


# -- instances --------------------------------------------------------------

def instance_rows(instance: DiskInstance) -> list[str]:
    c, r = np.asarray(instance.centers), np.asarray(instance.radii)
    return [f"{x:.17g} {y:.17g} {rr:.17g}" for (x, y), rr in zip(c.tolist(), r.tolist())]


def instance_digest(instance: DiskInstance) -> str:
    h = hashlib.sha256()
    for row in instance_rows(instance):
        h.update(row.encode() + b"\n")
    return h.hexdigest()


def write_instance(path, instance: DiskInstance, manifest: RunManifest) -> Path:
    manifest.params.setdefault("n", instance.n)
    manifest.params.setdefault("instance_sha256", instance_digest(instance))
    return _write(path, manifest, instance_rows(instance))


def parse_instance(text: str) -> DiskInstance:
    rows = []
    for lineno, line in _data_lines(text):
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 'x y r', got {line!r}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    pairs = read_manifest_pairs(text)
    seed = pairs.get("seed")
    arr = np.asarray(rows, dtype=float).reshape(-1, 3)
    try:
        return DiskInstance.from_arrays(arr[:, :2], arr[:, 2], seed=int(seed) if seed is not None else None,
                                        generator=pairs.get("param.generator"))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_instance(path) -> DiskInstance:
    return parse_instance(Path(path).read_text())


# -- edge lists -------------------------------------------------------------

def write_witnessed_edges(path, edges, manifest: RunManifest) -> Path:
    body = [f"{e.a} {e.b} {e.witness.x:.17g} {e.witness.y:.17g} {e.depth}" for e in edges]
    return _write(path, manifest, body)


def write_connector(path, graph, manifest: RunManifest) -> Path:
    return _write(path, manifest, [f"{u} {v}" for u, v in sorted(graph.edges)])


def _provenance_token(source) -> str:
    if source == BASE:
        return BASE
    i, j, t = source
    return f"layer:{i}:{j}:{t}"


def _parse_provenance(token: str):
    if token == BASE:
        return BASE
    head, *rest = token.split(":")
    if head != "layer" or len(rest) != 3:
        raise FormatError(f"bad provenance {token!r}")
    return tuple(int(x) for x in rest)


def write_spanner(path, graph: SpannerGraph, manifest: RunManifest) -> Path:
    manifest.params.setdefault("n", graph.n)
    body = [f"{u} {v} {_provenance_token(graph.provenance[(u, v)])}" for u, v in graph.edges]
    return _write(path, manifest, body)


def parse_spanner(text: str) -> SpannerGraph:
    pairs = read_manifest_pairs(text)
    if "param.n" not in pairs:
        raise FormatError("spanner file lacks the manifest.param.n line")
    g = SpannerGraph(int(pairs["param.n"]))
    for lineno, line in _data_lines(text):
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FormatError(f"line {lineno}: expected 'id1 id2 [provenance]'")
        u, v = sorted((int(parts[0]), int(parts[1])))
        if u == v or u < 0 or v >= g.n:
            raise FormatError(f"line {lineno}: invalid edge {u} {v}")
        g.add((u, v), _parse_provenance(parts[2]) if len(parts) == 3 else BASE)
    return g


def read_spanner(path) -> SpannerGraph:
    return parse_spanner(Path(path).read_text())


# -- reports ----------------------------------------------------------------

def build_report_lines(report: BuildReport, spanner_edges: int) -> list[str]:
    lines = [
        f"n: {report.n}",
        f"preset: {report.preset}",
        f"eps: {report.eps!r}",
        f"seed: {report.seed}",
        f"alpha: {report.alpha}",
        f"repetitions: {report.repetitions}",
        f"rounds: {report.round_count}",
        f"full_graph_edges: {report.full_graph_edges}",
        f"base_edges: {report.base_edges}",
        f"spanner_edges: {spanner_edges}",
        f"ignored_faces: {report.total_ignored}",
    ]
    for r in report.rounds:
        p = f"round.{r.index}."
        lines += [
            f"{p}alpha_i: {r.alpha_i}",
            f"{p}edges_added: {r.edges_added}",
            f"{p}sampled_faces: {r.sampled_faces}",
            f"{p}ignored_faces: {sum(r.ignored_faces)}",
            f"{p}slow_unions: {r.slow_unions}",
        ]
    for k in sorted(report.timings):
        lines.append(f"{VOLATILE_PREFIX}{k}: {report.timings[k]:.6f}")
    return lines


def write_build_report(path, report: BuildReport, spanner_edges: int, manifest: RunManifest) -> Path:
    return _write(path, manifest, build_report_lines(report, spanner_edges))


def write_keyvalue(path, values: dict, manifest: RunManifest) -> Path:
    return _write(path, manifest, [f"{k}: {v}" for k, v in values.items()])


def read_keyvalue(path) -> dict[str, str]:
    out = {}
    for _, line in _data_lines(Path(path).read_text()):
        k, sep, v = line.partition(": ")
        if sep:
            out[k] = v
    return out


# -- attacks and verification -------------------------------------------------

def write_attack(path, attack: AttackSet, manifest: RunManifest) -> Path:
    manifest.params.setdefault("strategy", attack.strategy)
    for k, v in attack.params:
        manifest.params.setdefault(k, v)
    body = [f"# strategy: {attack.strategy}"] + [str(i) for i in sorted(attack.ids)]
    return _write(path, manifest, body)


def parse_attack(text: str) -> AttackSet:
    strategy = "ids"
    ids = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("# strategy:"):
            strategy = line.split(":", 1)[1].strip()
    for lineno, line in _data_lines(text):
        try:
            ids.append(int(line))
        except ValueError:
            raise FormatError(f"line {lineno}: expected a disk id, got {line!r}") from None
    return AttackSet(frozenset(ids), strategy)


def read_attack(path) -> AttackSet:
    return parse_attack(Path(path).read_text())


def verification_lines(report: VerificationReport) -> list[str]:
    lines = [
        f"verdict: {'PASS' if report.ok else 'FAIL'}",
        f"components: {report.n_components}",
        f"checked_pairs: {report.checked_pairs}",
        f"failed_components: {sum(1 for ok in report.component_ok if not ok)}",
        f"counterexamples: {len(report.counterexamples)}",
        f"anomalies: {len(report.anomalies)}",
    ]
    for k, c in enumerate(report.counterexamples):
        lines += ["", f"[counterexample {k}]", f"face_a: {c.face_a}", f"face_b: {c.face_b}", f"reason: {c.reason}"]
    for k, a in enumerate(report.anomalies):
        lines += ["", f"[anomaly {k}]", f"detail: {a}"]
    lines += ["", report.summary()]
    return lines


def write_verification(path, report: VerificationReport, manifest: RunManifest) -> Path:
    return _write(path, manifest, verification_lines(report))
