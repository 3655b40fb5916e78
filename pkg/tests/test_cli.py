import json

import pytest

from feasilab.cli import main, parse_set_json
from feasilab.errors import ParseError


@pytest.fixture
def ball_files(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text('{"type":"ball","center":[0,0],"radius":1}')
    b.write_text('{"type":"ball","center":[4,0],"radius":1}')
    return str(a), str(b)


class TestParseSetJson:
    def test_ball(self):
        s = parse_set_json('{"type":"ball","center":[0,0],"radius":1}')
        assert s.dim == 2

    def test_motzkin(self):
        s = parse_set_json(
            '{"type":"motzkin","points":[[0,0]],"rays":[[1,0],[1,1]]}')
        assert s.rays.shape == (2, 2)

    def test_invalid_bound_pointer(self):
        with pytest.raises(ParseError) as e:
            parse_set_json('{"type":"box","lower":[0,0],"upper":[-1,1]}')
        assert "/upper" in str(e.value)

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            parse_set_json("{not json")


class TestSolveCommand:
    def test_disjoint_balls(self, ball_files, capsys):
        a, b = ball_files
        code = main(["solve", "--a", a, "--b", b, "--no-trace"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["distance"] == pytest.approx(2.0, abs=1e-9)
        assert out["status"] == "converged"

    def test_output_file(self, ball_files, tmp_path):
        a, b = ball_files
        dest = tmp_path / "report.json"
        code = main(["solve", "--a", a, "--b", b, "--out", str(dest)])
        assert code == 0
        obj = json.loads(dest.read_text())
        assert "trace" in obj


class TestExampleCommand:
    def test_nonconvex_distance_column(self, tmp_path, capsys):
        code = main(["example", "nonconvex", "--n-range", "2..8",
                     "--format", "csv"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "n,distance,expected,passed"
        assert len(lines) == 8  # header + 7 rows
        for line in lines[1:]:
            n, dist, exp, ok = line.split(",")
            assert abs(float(dist) - 1.0 / int(n)) < 1e-6
            assert ok == "true"

    def test_cone_hyperplane_rows(self, capsys):
        code = main(["example", "cone-hyperplane", "--n-range", "2..4",
                     "--truncation", "8"])
        assert code == 0
        obj = json.loads(capsys.readouterr().out)
        for row in obj["rows"]:
            assert row["passed"]


class TestCheckCommand:
    def test_gamma17_pass(self, capsys):
        code = main(["check", "gamma17", "--trials", "2000", "--seed", "42",
                     "--format", "csv"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "trial,observed,bound,passed"

    def test_thm_lur_small(self, capsys):
        code = main(["check", "thm-lur", "--dim", "6", "--steps", "12"])
        assert code == 0

    def test_failing_check_returns_one(self, capsys):
        # too few steps: the rotundity experiments cannot reach 1e-4
        code = main(["check", "thm-lur", "--dim", "6", "--steps", "4"])
        assert code == 1


class TestExitStatusContract:
    def test_usage_error_is_two(self):
        with pytest.raises(SystemExit) as e:
            main(["frobnicate"])
        assert e.value.code == 2

    def test_unknown_flag_is_two(self, ball_files):
        a, b = ball_files
        with pytest.raises(SystemExit) as e:
            main(["solve", "--a", a, "--b", b, "--frob"])
        assert e.value.code == 2

    def test_parse_error_is_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"type":"box","lower":[0,0],"upper":[-1,1]}')
        code = main(["solve", "--a", str(bad), "--b", str(bad)])
        assert code == 1
        diag = json.loads(capsys.readouterr().out)
        assert diag["error"] == "ParseError"


class TestDeterminism:
    def test_byte_identical_csv(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["check", "gamma17", "--trials", "1500", "--seed", "42",
                "--format", "csv"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_env_override(self, tmp_path, monkeypatch, capsys):
        from feasilab.cli import build_parser

        monkeypatch.setenv("FEASILAB_SEED", "7")
        args = build_parser().parse_args(["check", "gamma17"])
        assert args.seed == 7

    def test_example_csv_deterministic(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["example", "two-cones", "--n-range", "3..5",
                "--truncation", "8", "--format", "csv"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
