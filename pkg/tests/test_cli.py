import subprocess
import sys

import pytest

from diskspanner import io
from diskspanner.cli import main


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_gen_single_disk(workdir):
    assert main(["gen", "--n", "1", "--out", "one.txt"]) == 0
    body = [line for line in (workdir / "one.txt").read_text().splitlines() if not line.startswith("#")]
    assert len(body) == 1


def test_gen_is_deterministic(workdir):
    main(["gen", "--n", "40", "--generator", "clustered", "--seed", "5", "--out", "a.txt"])
    first = (workdir / "a.txt").read_bytes()
    main(["gen", "--n", "40", "--generator", "clustered", "--seed", "5", "--out", "a.txt"])
    assert (workdir / "a.txt").read_bytes() == first


def test_stats_reports_stacked_depth(workdir, capsys):
    main(["gen", "--n", "50", "--generator", "stacked", "--seed", "2", "--out", "s.txt"])
    capsys.readouterr()
    assert main(["stats", "--in", "s.txt", "--out", "stats.txt"]) == 0
    assert "max_depth: 50" in capsys.readouterr().out
    assert io.read_keyvalue(workdir / "stats.txt")["faces"].isdigit()


def test_build_without_overlaps_has_no_edges(workdir):
    (workdir / "far.txt").write_text("0 0 1\n10 0 1\n20 0 1\n")
    assert main(["build", "--in", "far.txt", "--out", "sp.txt"]) == 0
    assert io.read_spanner(workdir / "sp.txt").edges == []


def test_pipeline_and_empty_attack(workdir, capsys):
    main(["gen", "--n", "120", "--seed", "1", "--out", "i.txt"])
    assert main(["build", "--in", "i.txt", "--seed", "1", "--out", "sp.txt"]) == 0
    assert (workdir / "sp.txt.report").exists()
    assert main(["verify", "--in", "i.txt", "--spanner", "sp.txt", "--out", "v.txt"]) == 0
    assert capsys.readouterr().out.strip().endswith("checked_pairs=" + io.read_keyvalue(workdir / "v.txt")["checked_pairs"])
    assert main(["attack", "--in", "i.txt", "--rho", "0.3", "--seed", "2", "--out", "a.txt"]) == 0
    assert main(["verify", "--in", "i.txt", "--spanner", "sp.txt", "--attack", "a.txt", "--eps", "0.3"]) == 0


@pytest.mark.parametrize("strategy,extra", [
    ("neighborhood_kill", ["--target", "3", "--spanner", "sp.txt"]),
    ("deepest_point", ["--count", "4"]),
    ("ids", ["--ids", "1,2,5"]),
])
def test_attack_strategies(workdir, strategy, extra):
    main(["gen", "--n", "30", "--generator", "corridor", "--out", "i.txt"])
    main(["build", "--in", "i.txt", "--out", "sp.txt"])
    assert main(["attack", "--in", "i.txt", "--strategy", strategy, *extra, "--out", "a.txt"]) == 0
    ids = io.read_attack(workdir / "a.txt").ids
    if strategy == "deepest_point":
        # corridor faces are at most two deep, which caps the deletion count
        assert len(ids) == 2
    else:
        assert ids == {"neighborhood_kill": {2, 4}, "ids": {1, 2, 5}}[strategy]


def test_verify_failure_writes_bundle(workdir):
    (workdir / "i.txt").write_text("0 0 1\n1 0 1\n")
    (workdir / "sp.txt").write_text("# manifest.param.n: 2\n")
    code = main(["verify", "--in", "i.txt", "--spanner", "sp.txt", "--bundle", "cx.json"])
    assert code == 1 and (workdir / "cx.json").exists()


def test_exit_codes(workdir):
    main(["gen", "--n", "20", "--seed", "1", "--out", "a.txt"])
    main(["gen", "--n", "20", "--seed", "2", "--out", "b.txt"])
    main(["build", "--in", "a.txt", "--out", "sp.txt"])
    assert main(["verify", "--in", "b.txt", "--spanner", "sp.txt"]) == 2
    assert main(["verify", "--in", "missing.txt", "--spanner", "sp.txt"]) == 3
    assert main(["build", "--in", "a.txt", "--eps", "1.5", "--out", "x.txt"]) == 2
    (workdir / "bad.txt").write_text("0 0\n")
    assert main(["build", "--in", "bad.txt", "--out", "x.txt"]) == 3
    (workdir / "tangent.txt").write_text("0 0 1\n2 0 1\n")
    assert main(["build", "--in", "tangent.txt", "--out", "x.txt"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_oracle_command(capsys):
    assert main(["oracle", "--count", "8", "--max-n", "20"]) == 0
    assert capsys.readouterr().out.startswith("PASS instances=8 mismatches=0")


def test_bench_writes_csv_and_svg(workdir):
    assert main(["bench", "--sizes", "50,100", "--eps-list", "0.5,0.4", "--out", "b"]) == 0
    csv_text = (workdir / "b" / "bench.csv").read_text()
    rows = [line for line in csv_text.splitlines() if not line.startswith("#")]
    assert rows[0].startswith("generator,n,eps") and len(rows) == 5
    assert (workdir / "b" / "bench_edges.svg").read_text().lstrip().startswith("<?xml")


def test_module_entry_point_help():
    out = subprocess.run([sys.executable, "-m", "diskspanner", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "DISKSPANNER_THREADS" in out.stdout
