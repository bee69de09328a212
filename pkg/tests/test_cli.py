import json
import subprocess
import sys
from pathlib import Path

import pytest

from relvar import calculi
from relvar.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_gerevini_renz(capsys):
    code, out, _ = run(capsys, "check", SAMPLES / "gerevini_renz.qsr")
    assert (code, out.strip()) == (1, "INCONSISTENT")


def test_check_topology_only(capsys, tmp_path):
    code, out, _ = run(capsys, "check", SAMPLES / "gerevini_renz_topology.qsr")
    assert code == 0
    assert out.startswith("FIXPOINT\n")
    assert "topo 0 2 : EQ TPP" in out

    # same file with the size lines deleted
    text = (SAMPLES / "gerevini_renz.qsr").read_text().splitlines()
    kept = [l for l in text if "size" not in l]
    path = tmp_path / "no_size.qsr"
    path.write_text("\n".join(kept) + "\n")
    assert run(capsys, "check", path)[0] == 0


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", "--json", SAMPLES / "topo_dir.qsr")
    report = json.loads(out)
    assert code == 0 and report["status"] == "fixpoint"
    dirs = {tuple(d["objects"]): d["relations"] for d in report["domains"] if d["aspect"] == "dir"}
    assert dirs["ecuador", "southamerica"] == ["B"]


@pytest.mark.parametrize("text", ["aspect topo rcc8\nobjects\n", "objects a\nrel topo a a { EQ }\n"])
def test_bad_files_exit_2(capsys, tmp_path, text):
    path = tmp_path / "bad.qsr"
    path.write_text(text)
    code, out, err = run(capsys, "check", path)
    assert code == 2 and "line" in err
    assert run(capsys, "decide", path)[0] == 2


def test_missing_file_exit_2(capsys, tmp_path):
    assert run(capsys, "check", tmp_path / "nope.qsr")[0] == 2


def test_decide_all_three_regions(capsys):
    code, out, _ = run(capsys, "decide", "--all", SAMPLES / "three_regions.qsr")
    assert code == 0
    assert out.count("scenario ") == 193


def test_decide_all_two_regions(capsys, tmp_path):
    path = tmp_path / "two.qsr"
    path.write_text("aspect topo rcc8\nobjects a b\n")
    code, out, _ = run(capsys, "decide", "--all", path)
    assert code == 0
    assert out.count("scenario ") == len(calculi.load_rcc8().relations) == 8
    code, out, _ = run(capsys, "decide", "--all", "--json", path)
    assert len(out.splitlines()) == 8


def test_decide_inconsistent_prints_nothing(capsys):
    code, out, _ = run(capsys, "decide", SAMPLES / "gerevini_renz.qsr")
    assert (code, out) == (1, "")


def test_decide_growth(capsys):
    code, out, _ = run(capsys, "decide", SAMPLES / "growth.qsr")
    assert code == 0
    assert "topo a b @1 = EC" in out.splitlines()


def test_validate_tables(capsys):
    code, out, _ = run(capsys, "validate-tables")
    assert code == 0
    assert "FAIL" not in out
    assert "ok   valid direction sets = 218" in out


def test_validate_tables_with_corrupted_file(capsys, tmp_path):
    text = calculi.dump_calculus(calculi.load_rcc8())
    path = tmp_path / "rcc8.txt"
    path.write_text(text.replace("NTPP EC -> DC\n", "NTPP EC -> DC EC\n"))
    code, out, _ = run(capsys, "validate-tables", "--rcc8", path)
    assert code == 1
    assert "FAIL rcc8 axioms" in out and "converse-composition law" in out


def test_verify_vacuous(capsys):
    code, out, _ = run(capsys, "verify", "--instances", "0")
    assert code == 0 and "PASS" in out


def test_verify_is_deterministic(capsys):
    args = ("verify", "--instances", "25", "--max-n", "5", "--seed", "3", "--json")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second
    report = json.loads(first[1])
    assert report["pass"] and report["pc_gac_equal"] == 25


def test_verify_rejects_bad_range(capsys):
    assert run(capsys, "verify", "--min-n", "5", "--max-n", "3")[0] == 2


@pytest.mark.parametrize("table", ["cyc", "size", "pointcd", "dirsets"])
def test_derive_is_byte_stable(capsys, tmp_path, table):
    code, out, _ = run(capsys, "derive", table)
    assert code == 0 and out
    path = tmp_path / f"{table}.txt"
    assert run(capsys, "derive", table, "--out", path)[0] == 0
    assert path.read_text() == out


def test_derived_size_table_parses_back(capsys):
    _, out, _ = run(capsys, "derive", "size")
    assert calculi.validate_calculus(calculi.parse_calculus(out)) == []


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "relvar", "check", str(SAMPLES / "gerevini_renz.qsr")],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert proc.stdout.strip() == "INCONSISTENT"
