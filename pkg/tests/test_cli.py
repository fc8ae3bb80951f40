import json
import subprocess
import sys

import pytest

from shtuka_forge import cli, fixtures, oracles
from shtuka_forge import graded_rees as gr
from shtuka_forge import textfmt
from shtuka_forge.chain import make_chain


def run_json(capsys, argv, code=0):
    assert cli.run(argv) == code
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def chain_files(tmp_path):
    A = make_chain("witt", 2, 2)
    good = tmp_path / "good.txt"
    good.write_text(textfmt.dump_graded(
        gr.filtered_direct_sum(gr.filtered_twist(A, 0), gr.filtered_twist(A, 1))))
    bad = tmp_path / "bad.txt"
    bad.write_text(textfmt.dump_graded(gr.mutate_torsion_cokernel(gr.filtered_twist(A, 0), -1)))
    rees_bad = tmp_path / "rees_bad.txt"
    rees_bad.write_text(textfmt.dump_graded(gr.mutate_break_flag(gr.twisted_sum(A, [1, 0]))))
    return good, bad, rees_bad


def test_count_groups(capsys):
    rec = run_json(capsys, ["count-groups", "--q", "2", "--h", "2", "--mu", "1,0", "--N", "2"])
    assert rec["schema"] == cli.RUN_SCHEMA
    assert rec["subcommand"] == "count-groups"
    assert rec["payload"]["count"] == rec["payload"]["predicted_count"] == 64
    assert rec["payload"]["kernel_count"] == 16
    assert rec["fixture_hash"] == fixtures.fixture_hash("groups")


def test_count_groups_level_one(capsys):
    rec = run_json(capsys, ["count-groups", "--q", "2", "--h", "2", "--mu", "1,0", "--N", "1"])
    assert rec["payload"]["count"] == rec["payload"]["e1_count"] == 4


def test_cutoff_bound(capsys):
    rec = run_json(capsys, ["cutoff-bound", "--h", "2", "--S", "(1,0)"])
    assert rec["payload"] == {"C": 1, "isogeny": 2, "isomorphism": 3}
    assert rec["fixture_hash"] is None


def test_check_bundle_verdicts(capsys, chain_files):
    good, bad, rees_bad = chain_files
    rec = run_json(capsys, ["check-bundle", "--file", str(good)])
    assert rec["payload"]["verdict"]["ok"] and rec["payload"]["twists"] == [1, 0]
    rec = run_json(capsys, ["check-bundle", "--file", str(bad)], code=2)
    assert rec["payload"]["verdict"]["condition"] == "(ii)"
    rec = run_json(capsys, ["check-bundle", "--file", str(rees_bad)], code=2)
    assert rec["payload"]["verdict"]["condition"] == "(b)"


def test_check_bundle_hecke(capsys, tmp_path):
    f = tmp_path / "phi.txt"
    f.write_text("hecke\nq 2\nprecision 10\nrow 0 | z\nrow z^3 | 0\n")
    rec = run_json(capsys, ["check-bundle", "--file", str(f)])
    assert rec["payload"]["type"] == [3, 1]


def test_csv_output(capsys):
    assert cli.run(["--csv", "classify-zips", "--q", "2", "--h", "2", "--d", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "class,orbit_size"
    assert sum(int(l.split(",")[1]) for l in lines[1:]) == \
        oracles.zip_set_oracle(2, 2, 1)["zips"]
    assert cli.run(["--csv", "cutoff-bound", "--h", "2", "--S", "(1,0)"]) == 0
    assert capsys.readouterr().out.splitlines()[1:] == ["C,1", "isogeny,2", "isomorphism,3"]


def test_usage_errors_exit_one(capsys):
    assert cli.run(["count-groups", "--q", "2"]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "MissingParameter"
    assert cli.run(["count-groups", "--q", "2", "--h", "2", "--mu", "1,0,0", "--N", "1"]) == 1
    assert cli.run(["count-groups", "--q", "2", "--h", "2", "--mu", "0,1", "--N", "1"]) == 1
    assert json.loads(capsys.readouterr().err.splitlines()[-1])["error"] == "NotDominant"


def test_regen_requires_confirmation(capsys, tmp_path):
    assert cli.run(["regen", "--scope", "hecke", "--out", str(tmp_path)]) == 1
    assert not (tmp_path / "hecke.json").exists()
    rec = run_json(capsys, ["regen", "--scope", "hecke", "--regen-oracle", "--out", str(tmp_path)])
    assert rec["payload"]["written"]["hecke"] == fixtures.fixture_hash("hecke")


def test_explain_has_no_reference_labels(capsys):
    for name in sorted(cli.EXPLAIN):
        text = run_json(capsys, ["explain", name])["payload"]["statement"]
        assert text
        for word in ("Lemma", "Theorem", "Proposition", "Example", "Remark", "Section", "—"):
            assert word not in text


def test_seed_is_echoed(capsys):
    argv = ["--seed", "11", "hecke-sample", "--q", "3", "--h", "2", "--samples", "5"]
    rec = run_json(capsys, argv)
    assert rec["parameters"]["seed"] == 11
    assert rec["payload"]["recovered"] == 5 and rec["payload"]["misses"] == []
    again = run_json(capsys, argv)
    assert again["payload"] == rec["payload"]


def test_jobs_do_not_change_the_scan(capsys):
    base = ["cutoff-scan", "--q", "2", "--h", "2", "--mu", "1,0", "--N-max", "2", "--tower", "1,2"]
    one = run_json(capsys, base)
    two = run_json(capsys, ["--jobs", "2"] + base)
    assert one["payload"] == two["payload"]
    assert [r["class_counts"] for r in one["payload"]["rows"]] == [[2, 8, 32], [4, 18, 76]]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "shtuka_forge", "cutoff-bound", "--h", "3",
                          "--S", "(2,1,0)"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["payload"]["C"] == 2
    bad = subprocess.run([sys.executable, "-m", "shtuka_forge", "nope"], capture_output=True,
                         text=True)
    assert bad.returncode == 1


def test_group_budget(capsys):
    argv = ["count-groups", "--q", "2", "--h", "2", "--mu", "1,0", "--N", "2"]
    assert cli.run(["--max-group", "63"] + argv) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "BudgetExceeded"
    assert cli.run(["--max-group", "64"] + argv) == 0
    assert cli.run(["--max-states", "10", "classify-shtukas", "--q", "2", "--h", "2", "--mu", "1,0",
                    "--N", "3"]) == 1
