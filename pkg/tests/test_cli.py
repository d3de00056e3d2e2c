import io
import json
import subprocess
import sys

import pytest

from rainbowap.cli import cache_key, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_count_json_golden():
    code, out, _ = call("count", "--n", "4", "--r", "3", "--k", "3", "--stable")
    assert code == 0
    assert json.loads(out) == {
        "count": "51", "ground": {"kind": "interval", "n": 4}, "k_or_pattern": 3,
        "method": "pruned", "nodes": 84, "r": 3}


def test_count_csv_golden():
    code, out, _ = call("count", "--n", "5", "--r", "3", "--k", "3", "--method", "ie",
                        "--format", "csv", "--stable")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "ground,r,k_or_pattern,method,count,nodes"
    assert lines[1].startswith("[5],3,3,inclusion_exclusion,105,")


def test_output_is_byte_identical_across_workers():
    outs = {call("count", "--n", "9", "--r", "4", "--k", "3", "--workers", w, "--stable")[1]
            for w in ("1", "2", "4")}
    assert len(outs) == 1


@pytest.mark.parametrize("argv, key, value", [
    (["gamma", "--n", "10", "--k", "4"], "gamma", 12),
    (["gamma", "--n", "10", "--k", "4"], "closed_form", 12),
    (["gamma", "--n", "7", "--k", "3", "--cyclic"], "gamma", 21),
    (["formula", "--s", "3", "--r", "3", "--k", "3"], "f_below_k", "21"),
    (["formula", "--s", "5", "--t", "3"], "f_exact", "150"),
    (["ratio", "--n", "4", "--r", "3", "--k", "3"], "ratio", "51/16"),
    (["aw", "--n", "4", "--k", "3"], "aw", 4),
    (["aw", "--n", "4", "--k", "3"], "witness", "1:1,2:2,3:2,4:3"),
    (["cyclic", "--n", "4", "--r", "3", "--k", "3"], "g_cyclic", "45"),
    (["pattern", "--n", "4", "--r", "4", "--pattern", "sidon"], "count", "232"),
    (["pattern", "--n", "4", "--r", "4", "--pattern", "sidon"], "solutions", 8),
    (["count", "--set", "1,2,4,5,7", "--r", "3", "--k", "3"], "count", "189"),
    (["template-stat", "--coloring", "1:1,2:2,3:3,4:1", "--k", "3"], "rk", 2),
    (["sidon", "--n", "5", "--r", "4"], "few_color_fraction_exact", "98/101"),
])
def test_subcommand_values(argv, key, value):
    code, out, _ = call(*argv, "--stable")
    assert code == 0
    assert json.loads(out)[key] == value


def test_pattern_file_and_ap_pattern(tmp_path):
    f = tmp_path / "ap3.txt"
    f.write_text("1 3\n1 -2 1\n")
    a = json.loads(call("pattern", "--n", "7", "--r", "3", "--pattern", str(f))[1])
    b = json.loads(call("pattern", "--n", "7", "--r", "3", "--pattern", "ap:3")[1])
    assert a["count"] == b["count"] == "447"


def test_template_file(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("1: 1 2 3\n2: 1 2 3\n3: 1 2 3\n")
    code, out, _ = call("template-stat", "--template", str(f), "--k", "3")
    assert code == 0 and json.loads(out)["rk"] == 6


def test_scan_csv_rows():
    code, out, _ = call("scan", "--n", "5", "--r", "3", "--k", "3", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "subset,count,is_max,violation"
    assert len(lines) == 6


def test_table_format():
    code, out, _ = call("gamma", "--n", "5", "--k", "3", "--format", "table")
    assert code == 0
    assert out.splitlines()[0].split() == ["ground", "k", "gamma", "closed_form"]


@pytest.mark.parametrize("argv", [
    ["count", "--n", "4", "--r", "3"],
    ["count", "--n", "4", "--k", "3"],
    ["count", "--n", "4", "--r", "3", "--k", "3", "--method", "magic"],
    ["count", "--set", "1,x", "--r", "3", "--k", "3"],
    ["count", "--n", "4", "--set", "1,2", "--cyclic", "--r", "3", "--k", "3"],
    ["pattern", "--n", "5", "--cyclic", "--r", "3", "--pattern", "sidon"],
    ["count", "--n", "4", "--r", "3", "--k", "3", "--workers", "0"],
    ["formula", "--s", "3"],
    ["template-stat", "--k", "3"],
    ["aw", "--set", "1,2,4", "--k", "3"],
    ["pattern", "--n", "4", "--r", "3", "--pattern", "/nonexistent/file"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_1(argv):
    code, out, err = call(*argv)
    assert code == 1
    assert out == ""
    assert err.startswith("error:")


def test_budget_exit_2():
    code, out, err = call("count", "--n", "12", "--r", "4", "--k", "3", "--budget-nodes", "1000")
    assert code == 2
    assert out == ""
    assert "budget" in err
    code, _, _ = call("count", "--n", "20", "--r", "4", "--k", "3", "--method", "bruteforce")
    assert code == 2


def test_cache_hit_and_verify(tmp_path):
    cache = tmp_path / "cache.jsonl"
    argv = ["count", "--n", "6", "--r", "3", "--k", "3", "--cache", str(cache), "--stable"]
    code, first, err = call(*argv)
    assert code == 0 and "cache hit" not in err
    assert len(cache.read_text().splitlines()) == 1
    assert json.loads(cache.read_text())["role"] == "count"
    code, second, err = call(*argv)
    assert code == 0 and "cache hit" in err
    assert json.loads(second)["nodes"] == 0
    assert json.loads(second)["count"] == json.loads(first)["count"]
    code, _, err = call(*argv, "--verify")
    assert code == 0 and "verified" in err
    assert len(cache.read_text().splitlines()) == 1


def test_cache_keys_separate_methods(tmp_path):
    cache = tmp_path / "cache.jsonl"
    for method in ("pruned", "symmetry"):
        assert call("count", "--n", "5", "--r", "3", "--k", "3", "--method", method,
                    "--cache", str(cache))[0] == 0
    assert len(cache.read_text().splitlines()) == 2


def test_cache_tampered_value_is_a_conflict(tmp_path):
    cache = tmp_path / "cache.jsonl"
    argv = ["count", "--n", "5", "--r", "3", "--k", "3", "--cache", str(cache)]
    call(*argv)
    rec = json.loads(cache.read_text())
    rec["report"]["count"] = "106"
    cache.write_text(json.dumps(rec) + "\n")
    code, _, err = call(*argv, "--verify")
    assert code == 1 and "disagrees" in err
    # two lines with one key and different values
    good = dict(rec, report=dict(rec["report"], count="105"))
    cache.write_text(json.dumps(good) + "\n" + json.dumps(rec) + "\n")
    code, _, err = call(*argv)
    assert code == 1 and "conflicting" in err


def test_cache_skips_corrupt_lines(tmp_path, caplog):
    cache = tmp_path / "cache.jsonl"
    cache.write_text('{"not json\n{"key": 1}\n')
    code, out, _ = call("count", "--n", "5", "--r", "3", "--k", "3", "--cache", str(cache))
    assert code == 0 and json.loads(out)["count"] == "105"
    assert "corrupt" in caplog.text
    assert len(cache.read_text().splitlines()) == 3


def test_cache_key_is_canonical():
    assert cache_key({"a": 1, "b": [1, 2]}) == cache_key({"b": [1, 2], "a": 1})
    assert cache_key({"a": 1}) != cache_key({"a": 2})


def test_scan_rows_survive_cache_hit(tmp_path):
    cache = tmp_path / "c.jsonl"
    argv = ["scan", "--n", "5", "--r", "3", "--k", "3", "--format", "csv", "--cache", str(cache)]
    first = call(*argv)[1]
    code, second, err = call(*argv)
    assert "cache hit" in err and second == first


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rainbowap", "gamma", "--n", "5", "--k", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["gamma"] == 4
    proc = subprocess.run([sys.executable, "-m", "rainbowap", "count", "--n", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
