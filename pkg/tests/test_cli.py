import csv
import json

import pytest

from ccnramp.control_plane import generate_anchors, generate_topology
from ccnramp.expcli import main


@pytest.fixture
def files(tmp_path):
    topo = generate_topology(20, 28, 1)
    anchors = generate_anchors(topo, 3, 4, 1)
    (tmp_path / "net.topo").write_text(topo.dumps())
    (tmp_path / "net.anchors").write_text(anchors.dumps())
    consumers = sorted(set(topo.routers) - set(anchors.anchors))[:5]
    settings = {"consumers": consumers, "catalog": 120, "cos_per_prefix": 10, "horizon": 0.6}
    (tmp_path / "run.json").write_text(json.dumps(settings))
    return tmp_path


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def base_args(d):
    return ["--topology", str(d / "net.topo"), "--anchors", str(d / "net.anchors"),
            "--scenario", str(d / "run.json")]


def test_run_both_modes(files, capsys):
    out = files / "out"
    assert main(["run", *base_args(files), "--mode", "both", "--rate", "40", "--out", str(out)]) == 0
    for name in ("table_sizes.csv", "lookups.csv", "delays.csv", "interests_per_router.csv",
                 "run_info.csv"):
        assert (out / name).exists()
    delays = rows(out / "delays.csv")
    assert sorted(r["mode"] for r in delays) == ["ndn", "ramp"]
    tables = {r["table"] for r in rows(out / "table_sizes.csv")}
    assert tables == {"prt", "fab", "lsat", "lrt", "fib", "pit"}
    printed = capsys.readouterr().out
    assert "[ramp rate=40] table sizes:" in printed
    assert "[ndn rate=40] lookups per retrieval:" in printed


def test_rerun_is_byte_identical(files):
    a, b = files / "a", files / "b"
    args = [*base_args(files), "--mode", "ramp", "--sweep", "20,40", "--trace"]
    assert main(["run", *args, "--out", str(a)]) == 0
    assert main(["run", *args, "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert "trace_ramp_20.txt" in names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_sweep_and_cache_flags(files):
    out = files / "out"
    assert main(["run", *base_args(files), "--mode", "ndn", "--sweep", "10,30", "--cache", "lru:1000",
                 "--seed", "4", "--out", str(out)]) == 0
    info = {(r["rate"], r["setting"]): r["value"] for r in rows(out / "run_info.csv")}
    assert info[("10", "cache")] == "lru:1000"
    assert info[("30", "seed")] == "4"


def test_usage_errors(files, capsys):
    assert main(["run", "--anchors", "x", "--out", "y"]) == 1
    assert main(["run", *base_args(files), "--cache", "fifo", "--out", str(files / "o")]) == 1
    assert main(["run", *base_args(files), "--sweep", "1,x", "--out", str(files / "o")]) == 1
    (files / "bad.json").write_text(json.dumps({"colour": "blue"}))
    assert main(["run", "--topology", str(files / "net.topo"), "--anchors", str(files / "net.anchors"),
                 "--scenario", str(files / "bad.json"), "--out", str(files / "o")]) == 1
    assert "colour" in capsys.readouterr().err
    assert main([]) == 1


def test_unreadable_file_is_runtime_error(files, capsys):
    assert main(["run", "--topology", str(files / "missing.topo"), "--anchors",
                 str(files / "net.anchors"), "--out", str(files / "o")]) == 2
    assert "missing.topo" in capsys.readouterr().err


def test_verify_paths(files, capsys):
    assert main(["verify", "paths", "--topology", str(files / "net.topo"),
                 "--anchors", str(files / "net.anchors")]) == 0
    assert "divergences: 0" in capsys.readouterr().out


def test_verify_loops(capsys):
    assert main(["verify", "loops", "--runs", "3", "--severities", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "loop traversals: 0" in out
    assert main(["verify", "loops", "--runs", "2", "--severities", "0"]) == 0
    assert "loop-coded error messages: 0" in capsys.readouterr().out
    assert main(["verify", "loops", "--severities", "3"]) == 1


def test_verify_multihoming(capsys):
    assert main(["verify", "multihoming"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [l.split("condition=")[1].split()[0] for l in lines] == ["eq1", "eq2", "none"]


def test_bundled_run(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--topology", "bundled", "--anchors", "bundled", "--scenario", "bundled",
                 "--mode", "both", "--rate", "20", "--horizon", "0.3", "--out", str(out)]) == 0
    sizes = rows(out / "table_sizes.csv")
    assert {r["router"] for r in sizes} == {str(i) for i in range(153)}
    assert all(float(r["mean_entries"]) == 10_000 for r in sizes if r["table"] == "prt")
