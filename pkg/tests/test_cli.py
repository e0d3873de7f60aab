import json

import pytest

from cstarlab.cli import run
from cstarlab.simplex import SimplexTower


def strip_header(path):
    with open(path) as handle:
        return [ln for ln in handle if not ln.startswith("#")]


def read_config_line(path):
    return json.loads(strip_header(path)[0])["config"]


class TestDeterminism:
    @pytest.mark.parametrize("argv_stub", [
        ["walk", "--p", "0.6", "--start", "1", "--length", "50", "--trials", "20"],
        ["sample", "--p", "0.4", "--scheme", "barycenter", "--trials", "200",
         "--horizon", "100"],
        ["simplex", "--p", "0.7", "--scheme", "faces", "--horizon", "40"],
        ["weyl", "--n", "3", "--trials", "5", "--ensemble", "hermitian"],
        ["cuntz", "--max-size", "5"],
        ["ktheory", "--max-size", "4"],
    ])
    def test_reports_byte_identical_modulo_timestamp(self, tmp_path, argv_stub):
        out = str(tmp_path / "report.out")
        argv = argv_stub + ["--seed", "11", "--output", out]
        assert run(argv) == 0
        first = strip_header(out)
        assert run(argv) == 0
        assert strip_header(out) == first

    def test_different_seed_changes_monte_carlo_report(self, tmp_path):
        out1 = str(tmp_path / "a.out")
        out2 = str(tmp_path / "b.out")
        run(["walk", "--p", "0.5", "--length", "100", "--trials", "10",
             "--seed", "1", "--output", out1])
        run(["walk", "--p", "0.5", "--length", "100", "--trials", "10",
             "--seed", "2", "--output", out2])
        assert strip_header(out1) != strip_header(out2)


class TestValidation:
    def test_zero_trials_exits_2(self, tmp_path, capsys):
        rc = run(["sample", "--p", "0.4", "--trials", "0",
                  "--output", str(tmp_path / "x.jsonl")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "trials" in json.loads(err.strip())["error"]

    def test_bad_probability_exits_2(self, tmp_path):
        rc = run(["walk", "--p", "1.5", "--output", str(tmp_path / "x.jsonl")])
        assert rc == 2

    def test_missing_p_exits_2(self, tmp_path):
        rc = run(["sample", "--output", str(tmp_path / "x.jsonl")])
        assert rc == 2

    def test_unknown_command_exits_2(self):
        assert run(["frobnicate"]) == 2

    def test_nonconvergence_flag_exits_3(self, tmp_path):
        # an unattainable gradient tolerance leaves every start flagged; the
        # report is still written and the exit status signals the flags
        out = tmp_path / "w.csv"
        rc = run(["weyl", "--n", "3", "--trials", "2", "--seed", "2",
                  "--tol", "1e-30", "--output", str(out)])
        assert rc == 3
        assert out.exists()

    def test_no_report_written_on_validation_failure(self, tmp_path):
        out = tmp_path / "x.jsonl"
        run(["sample", "--p", "0.4", "--trials", "0", "--output", str(out)])
        assert not out.exists()


class TestConfigFile:
    def test_flags_win_over_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"p": 0.3, "trials": 7, "length": 30}))
        out = str(tmp_path / "r.jsonl")
        rc = run(["walk", "--config", str(cfg), "--p", "0.6", "--output", out,
                  "--seed", "0"])
        assert rc == 0
        resolved = read_config_line(out)
        assert resolved["p"] == 0.6       # flag wins
        assert resolved["trials"] == 7    # config supplies the rest
        assert resolved["length"] == 30

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"p": 0.3, "nope": 1}))
        assert run(["walk", "--config", str(cfg), "--output",
                    str(tmp_path / "r.jsonl")]) == 2


class TestReports:
    def test_sample_report_schema(self, tmp_path):
        out = str(tmp_path / "s.jsonl")
        run(["sample", "--p", "0.4", "--scheme", "vertices", "--trials", "300",
             "--horizon", "200", "--seed", "3", "--output", out])
        body = strip_header(out)
        record = json.loads(body[1])
        for key in ("params", "scheme", "horizon", "trials", "estimate", "ci", "diagnostics"):
            assert key in record
        assert record["trace_space_class"] == "jiang_su"

    def test_weyl_csv_columns(self, tmp_path):
        out = str(tmp_path / "w.csv")
        rc = run(["weyl", "--n", "2", "--trials", "4", "--seed", "5", "--output", out])
        assert rc == 0
        body = strip_header(out)
        assert body[0].strip() == "trial,delta,d_u,gap,converged"
        assert len(body) == 5

    def test_simplex_tower_roundtrips(self, tmp_path):
        out = str(tmp_path / "t.jsonl")
        run(["simplex", "--p", "0.8", "--scheme", "barycenter", "--horizon", "30",
             "--seed", "9", "--output", out])
        record = json.loads(strip_header(out)[1])
        tower = SimplexTower.from_json(json.dumps(record["tower"]))
        assert len(tower.dims) == 31

    def test_ktheory_report_values(self, tmp_path):
        out = str(tmp_path / "k.jsonl")
        run(["ktheory", "--max-size", "4", "--output", out])
        records = [json.loads(ln) for ln in strip_header(out)[1:]]
        assert records[0] == {"model": "toeplitz", "k0": "Z", "k1": "0",
                              "index_of_shift": -1}
        by_pair = {(r["p"], r["q"]): r for r in records[1:]}
        assert by_pair[(2, 3)]["k0"] == "Z" and by_pair[(2, 3)]["k1"] == "0"
        assert by_pair[(2, 4)]["k1"] == "Z/2"


class TestSummary:
    def test_weyl_summary(self, tmp_path, capsys):
        out = str(tmp_path / "w.csv")
        run(["weyl", "--n", "2", "--trials", "4", "--seed", "5", "--output", out])
        assert run(["summary", out]) == 0
        printed = capsys.readouterr().out
        assert "4 records" in printed
        assert "max |gap|" in printed

    def test_sample_summary(self, tmp_path, capsys):
        out = str(tmp_path / "s.jsonl")
        run(["sample", "--p", "0.4", "--trials", "100", "--horizon", "100",
             "--seed", "2", "--output", out])
        assert run(["summary", out]) == 0
        printed = capsys.readouterr().out
        assert "estimate" in printed

    def test_idempotent(self, tmp_path, capsys):
        out = str(tmp_path / "s.jsonl")
        run(["sample", "--p", "0.5", "--trials", "50", "--horizon", "50",
             "--seed", "2", "--output", out])
        run(["summary", out])
        first = capsys.readouterr().out
        run(["summary", out])
        assert capsys.readouterr().out == first

    def test_empty_report(self, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("# generated_at=now\n")
        assert run(["summary", str(empty)]) == 0
        assert "0 records" in capsys.readouterr().out

    def test_unreadable_exits_2(self, tmp_path):
        assert run(["summary", str(tmp_path / "missing.jsonl")]) == 2
