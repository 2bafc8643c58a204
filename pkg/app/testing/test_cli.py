import json

import pytest

from cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, main
from netlist import Netlist
from simulator import VectorPairs, simulate


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("MULT_OUT_DIR", str(tmp_path / "out"))
    monkeypatch.setenv("MULT_VECTORS", "200")
    monkeypatch.setenv("MULT_SEED", "0")
    monkeypatch.delenv("MULT_COST_MODEL", raising=False)
    monkeypatch.delenv("MULT_LOG_FILE", raising=False)
    return tmp_path / "out"


def netlist_path(out_dir, n, variant):
    return out_dir / str(n) / variant / "netlist.json"


def test_gen_writes_byte_identical_netlists(out_dir, capsys):
    assert main(["gen", "--n", "8", "--variant", "partitioned-hybrid"]) == EXIT_OK
    path = netlist_path(out_dir, 8, "partitioned-hybrid")
    first = path.read_bytes()
    assert main(["gen", "--n", "8", "--variant", "partitioned-hybrid"]) == EXIT_OK
    assert path.read_bytes() == first
    assert "✓ 8:partitioned-hybrid" in capsys.readouterr().out


def test_gen_writes_schedule(out_dir, tmp_path):
    schedule = tmp_path / "schedule.json"
    assert main(["gen", "--n", "8", "--variant", "regular-cla", "--schedule", str(schedule)]) == EXIT_OK
    data = json.loads(schedule.read_text())
    assert data["matrix"]["full_adders"] == 35
    assert data["matrix"]["half_adders"] == 7


def test_gen_rejects_too_narrow_partitioned(out_dir, capsys):
    assert main(["gen", "--n", "2", "--variant", "partitioned-hybrid"]) == EXIT_USAGE
    assert "Error" in capsys.readouterr().err
    assert not netlist_path(out_dir, 2, "partitioned-hybrid").exists()


def test_gen_rejects_non_numeric_width(out_dir):
    assert main(["gen", "--n", "eight", "--variant", "regular-cla"]) == EXIT_USAGE


def test_manifest_records_sha256(out_dir):
    main(["gen", "--n", "8", "--variant", "regular-cla"])
    manifest = json.loads((netlist_path(out_dir, 8, "regular-cla").parent / "manifest.json").read_text())
    (output,) = manifest["runs"]["gen"]["outputs"]
    assert output["path"] == "netlist.json"
    assert len(output["sha256"]) == 64
    assert manifest["runs"]["gen"]["flags"]["n"] == "8"


def test_verify_exhaustive_passes(out_dir, capsys):
    main(["gen", "--n", "8", "--variant", "partitioned-hybrid"])
    path = netlist_path(out_dir, 8, "partitioned-hybrid")
    assert main(["verify", "--in", str(path), "--exhaustive"]) == EXIT_OK
    assert "✅ PASS" in capsys.readouterr().out


def test_verify_reports_counterexample_for_corrupted_netlist(out_dir, tmp_path, capsys):
    main(["gen", "--n", "8", "--variant", "regular-cla"])
    data = json.loads(netlist_path(out_dir, 8, "regular-cla").read_text())
    p0 = data["outputs"][0]["bits"][0]
    gate = next(g for g in data["gates"] if g["out"] == p0)
    gate["kind"] = "OR2"
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(data))

    assert main(["verify", "--in", str(broken), "--exhaustive"]) == EXIT_VERIFY_FAILED
    assert "❌ FAIL: a=1 b=0 got=1 want=0" in capsys.readouterr().out


def test_random_verify_reports_are_identical(out_dir, tmp_path):
    main(["gen", "--n", "16", "--variant", "partitioned-hybrid"])
    path = netlist_path(out_dir, 16, "partitioned-hybrid")
    first, second = tmp_path / "r1.json", tmp_path / "r2.json"
    for report in (first, second):
        assert main(["verify", "--in", str(path), "--random", "2000", "--seed", "9", "--report", str(report)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text())["passed"] is True


def test_verify_missing_file_is_usage_error(out_dir, tmp_path):
    assert main(["verify", "--in", str(tmp_path / "nope.json"), "--random", "10"]) == EXIT_USAGE


def test_exhaustive_refused_for_wide_designs(out_dir):
    main(["gen", "--n", "16", "--variant", "regular-cla"])
    path = netlist_path(out_dir, 16, "regular-cla")
    assert main(["verify", "--in", str(path), "--exhaustive"]) == EXIT_USAGE


def test_report_for_two_designs(out_dir, capsys):
    main(["gen", "--n", "8", "--variant", "regular-cla"])
    main(["gen", "--n", "8", "--variant", "partitioned-hybrid"])
    capsys.readouterr()
    assert main(["report", "--designs", "8:regular-cla,8:partitioned-hybrid"]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "| 8 by 8 |" in printed
    csv = (out_dir / "report.csv").read_text().splitlines()
    assert len(csv) == 3
    assert (out_dir / "report.md").read_text() in printed
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert {o["path"] for o in manifest["runs"]["report"]["outputs"]} == {"report.csv", "report.md"}


def test_report_for_a_single_design_has_no_comparison(out_dir, capsys):
    main(["gen", "--n", "8", "--variant", "regular-cla"])
    assert main(["report", "--designs", "8:regular-cla"]) == EXIT_OK
    assert "Multiplier N by N" not in capsys.readouterr().out


def test_report_unknown_design_is_usage_error(out_dir):
    assert main(["report", "--designs", "8:booth"]) == EXIT_USAGE
    assert main(["report", "--designs", "12:regular-cla"]) == EXIT_USAGE


def test_emit_verilog_is_deterministic(out_dir, tmp_path):
    main(["gen", "--n", "8", "--variant", "partitioned-cla"])
    path = netlist_path(out_dir, 8, "partitioned-cla")
    first, second = tmp_path / "a.v", tmp_path / "b.v"
    assert main(["emit-verilog", "--in", str(path), "--out", str(first)]) == EXIT_OK
    assert main(["emit-verilog", "--in", str(path), "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().startswith("module mult_8_partitioned_cla")


@pytest.mark.parametrize("n", [8, 16, 32, 64])
def test_generated_netlists_survive_a_round_trip(out_dir, n):
    assert main(["gen", "--n", str(n), "--variant", "partitioned-hybrid"]) == EXIT_OK
    netlist = Netlist.load(netlist_path(out_dir, n, "partitioned-hybrid"))
    pairs = VectorPairs.random({"a": n, "b": n}, 100, seed=n)
    a_vals, b_vals = pairs.first["a"], pairs.first["b"]
    assert simulate(netlist, {"a": a_vals, "b": b_vals})["p"] == [a * b for a, b in zip(a_vals, b_vals)]


def test_gen_in_part_adder_defaults_to_prefix(out_dir):
    main(["gen", "--n", "8", "--variant", "partitioned-cla"])
    netlist = Netlist.load(netlist_path(out_dir, 8, "partitioned-cla"))
    assert netlist.metadata["config"]["in_part_adder"] == "prefix"

    main(["gen", "--n", "8", "--variant", "partitioned-cla", "--in-part-adder", "rca"])
    netlist = Netlist.load(netlist_path(out_dir, 8, "partitioned-cla"))
    assert netlist.metadata["config"]["in_part_adder"] == "rca"


def test_report_writes_a_row_into_each_design_directory(out_dir):
    main(["gen", "--n", "8", "--variant", "regular-cla"])
    main(["gen", "--n", "8", "--variant", "partitioned-hybrid"])
    assert main(["report", "--designs", "8:regular-cla,8:partitioned-hybrid"]) == EXIT_OK
    for variant, name in (("regular-cla", "regular_cla"), ("partitioned-hybrid", "partitioned_hybrid")):
        design_dir = out_dir / "8" / variant
        lines = (design_dir / "report.csv").read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith(f"8,{name},")
        manifest = json.loads((design_dir / "manifest.json").read_text())
        assert [o["path"] for o in manifest["runs"]["report"]["outputs"]] == ["report.csv"]
        assert [o["path"] for o in manifest["runs"]["gen"]["outputs"]] == ["netlist.json"]
