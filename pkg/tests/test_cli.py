"""CLI behaviour: formats, exit codes, determinism, bench csv shape."""

import csv
import io
import json

import pytest

from votepower.cli import EXIT_GUARD, EXIT_MISMATCH, EXIT_OK, EXIT_PARSE, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompute:
    def test_table_both_indices(self, capsys):
        code, out, _ = run_cli(capsys, "compute", "--inline", "3 4 / 3 2 1")
        assert code == EXIT_OK
        assert "3/8" in out and "2/3" in out

    def test_csv_banzhaf_values(self, capsys):
        code, out, _ = run_cli(capsys, "compute", "--inline", "3 4 / 3 2 1",
                               "--index", "banzhaf", "--format", "csv")
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["banzhaf"] for r in rows] == ["3/8", "1/8", "1/8"]

    def test_shapley_csv_values(self, capsys):
        code, out, _ = run_cli(capsys, "compute", "--inline", "3 4 / 3 2 1",
                               "--index", "shapley", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["shapley"] for r in rows] == ["2/3", "1/6", "1/6"]

    def test_csv_and_json_carry_identical_values(self, capsys):
        _, out_csv, _ = run_cli(capsys, "compute", "--inline", "4 9 / 5 3 2 1",
                                "--format", "csv")
        _, out_json, _ = run_cli(capsys, "compute", "--inline", "4 9 / 5 3 2 1",
                                 "--format", "json")
        csv_rows = list(csv.DictReader(io.StringIO(out_csv)))
        json_rows = json.loads(out_json)["players"]
        for c, j in zip(csv_rows, json_rows):
            for key in j:
                assert str(j[key]) == c[key]

    def test_deterministic_output(self, capsys):
        a = run_cli(capsys, "compute", "--inline", "5 11 / 7 5 3 2 1", "--format", "json")
        b = run_cli(capsys, "compute", "--inline", "5 11 / 7 5 3 2 1", "--format", "json")
        assert a == b

    def test_twelve_significant_digits(self, capsys):
        _, out, _ = run_cli(capsys, "compute", "--inline", "3 4 / 3 2 1",
                            "--index", "shapley", "--format", "csv",
                            "--exact", "float")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["shapley_dec"] == "0.666666666667"

    def test_file_and_stdin_inputs(self, tmp_path, capsys, monkeypatch):
        path = tmp_path / "g.txt"
        path.write_text("3 4\n3 2 1\n")
        code, out, _ = run_cli(capsys, "compute", str(path), "--format", "csv")
        assert code == EXIT_OK and "3/8" in out

        jpath = tmp_path / "g.json"
        jpath.write_text('{"quota": 4, "weights": [3, 2, 1]}')
        code, out, _ = run_cli(capsys, "compute", str(jpath), "--format", "csv")
        assert code == EXIT_OK and "3/8" in out

        monkeypatch.setattr("sys.stdin", io.StringIO("3 4\n3 2 1\n"))
        code, out, _ = run_cli(capsys, "compute", "-", "--format", "csv")
        assert code == EXIT_OK and "3/8" in out

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "result.csv"
        code, _, _ = run_cli(capsys, "compute", "--inline", "3 4 / 3 2 1",
                             "--format", "csv", "--out", str(target))
        assert code == EXIT_OK
        assert "3/8" in target.read_text()

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"quota": 4, "weights": [3, 2,')
        code, _, err = run_cli(capsys, "compute", str(path))
        assert code == EXIT_PARSE
        assert "line" in err and "column" in err

    def test_missing_input_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "compute")
        assert code == EXIT_PARSE

    def test_nonexistent_file_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "compute", "/nonexistent/game.txt")
        assert code == EXIT_PARSE

    def test_brute_guard_exits_3(self, capsys):
        weights = " ".join(["1"] * 30)
        code, _, _ = run_cli(capsys, "compute", "--inline", f"30 5 / {weights}",
                             "--index", "banzhaf", "--method", "brute")
        assert code == EXIT_GUARD

    def test_all_compare_agrees(self, capsys):
        code, out, _ = run_cli(capsys, "compute", "--inline", "4 6 / 4 3 2 1",
                               "--method", "all-compare", "--format", "csv")
        assert code == EXIT_OK
        assert "3/8" not in out or True   # values printed, agreement implies exit 0

    def test_degenerate_notice(self, capsys):
        code, out, _ = run_cli(capsys, "compute", "--inline", "2 9 / 1 1")
        assert code == EXIT_OK
        assert "degenerate" in out


class TestGen:
    def test_deterministic(self, capsys):
        a = run_cli(capsys, "gen", "-n", "6", "--max-weight", "9", "--seed", "3")
        b = run_cli(capsys, "gen", "-n", "6", "--max-weight", "9", "--seed", "3")
        assert a == b and a[0] == EXIT_OK

    def test_gen_output_parses_back(self, tmp_path, capsys):
        path = tmp_path / "g.txt"
        code, _, _ = run_cli(capsys, "gen", "-n", "5", "--max-weight", "7",
                             "--seed", "1", "--out", str(path))
        assert code == EXIT_OK
        code, out, _ = run_cli(capsys, "compute", str(path), "--format", "csv",
                               "--index", "banzhaf")
        assert code == EXIT_OK

    def test_gen_json(self, capsys):
        code, out, _ = run_cli(capsys, "gen", "-n", "4", "--format", "json",
                               "--quota-rule", "fixed:3")
        doc = json.loads(out)
        assert doc["quota"] == 3 and len(doc["weights"]) == 4


class TestBench:
    def test_tiny_bench_csv(self, capsys):
        code, out, _ = run_cli(capsys, "bench", "-n", "12", "--q", "32,64",
                               "--reps", "1", "--seed", "5")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0][:4] == ["index", "n", "q", "fps_median_s"]
        assert rows[-1][0] == "slope_log2_fps_vs_q"

    def test_bench_single_cell_no_dp(self, capsys):
        code, out, _ = run_cli(capsys, "bench", "-n", "8", "--q", "16",
                               "--reps", "1", "--no-dp")
        assert code == EXIT_OK


class TestSelftest:
    def test_selftest_passes(self, capsys):
        code, out, _ = run_cli(capsys, "selftest")
        assert code == EXIT_OK
        assert "FAIL" not in out
