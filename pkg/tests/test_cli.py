"""End-to-end CLI behavior: formats, exit codes, determinism."""

import json
import subprocess
import sys

from richlines.cli import main
from richlines.io import canonical_json, read_ground_set, read_lines, write_ground_set, write_lines
from richlines.grid import GroundSet
from richlines.scalar import RationalField, prime_field
from richlines.affine import AffineMap


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstructFolner:
    def test_builds_grid_and_lines(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        lines = tmp_path / "l.json"
        code, out, _ = run_cli(
            [
                "construct", "folner",
                "--N", "3", "--eps", "2/5",
                "--out", str(grid), "--lines-out", str(lines),
            ],
            capsys,
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["ground_size"] == 81
        assert summary["line_count"] == 1
        assert summary["escape_counts"] == [31]
        ground = read_ground_set(str(grid))
        assert len(ground) == 81
        family = read_lines(str(lines), ground.field)
        assert family == [AffineMap.of(RationalField, 3, 9)]

    def test_ground_file_matches_canonical_json(self, tmp_path):
        ground = GroundSet(RationalField, [3, 1, 2])
        path = tmp_path / "y.json"
        write_ground_set(str(path), ground)
        assert path.read_text() == canonical_json(ground.to_json())


class TestConstructKlawe:
    def test_planner_run(self, tmp_path, capsys):
        out_path = tmp_path / "lines.json"
        code, out, _ = run_cli(
            ["construct", "klawe", "--x", "3", "--bmax", "40", "--out", str(out_path)],
            capsys,
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["k"] == 2
        assert summary["q"] == 6
        assert summary["slope_count"] == len(read_lines(str(out_path), RationalField))
        assert summary["general_position"] is True


class TestVerify:
    def test_csv_output(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        lines = tmp_path / "l.json"
        write_ground_set(str(grid), GroundSet(RationalField, range(4)))
        write_lines(str(lines), [AffineMap.of(RationalField, 1, 1)])
        code, out, _ = run_cli(
            ["verify", "--grid", str(grid), "--lines", str(lines), "--alpha", "1/2",
             "--jobs", "1"],
            capsys,
        )
        assert code == 0
        assert out.splitlines() == [
            "a,b,richness,deficiency,alpha_rich",
            "1,1,3,1,1",
        ]

    def test_parallel_matches_serial(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        lines = tmp_path / "l.json"
        write_ground_set(str(grid), GroundSet(RationalField, range(30)))
        write_lines(
            str(lines),
            [AffineMap.of(RationalField, a, b) for a in (1, 2, 3) for b in (0, 1)],
        )
        base = ["verify", "--grid", str(grid), "--lines", str(lines), "--alpha", "1/3"]
        code1, serial, _ = run_cli(base + ["--jobs", "1"], capsys)
        code2, parallel, _ = run_cli(base + ["--jobs", "2"], capsys)
        assert code1 == code2 == 0
        assert serial == parallel


class TestSym:
    def test_csv(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        write_ground_set(str(grid), GroundSet(RationalField, [0, 1, 2]))
        code, out, _ = run_cli(
            ["sym", "--grid", str(grid), "--alpha", "1", "--report", "csv"], capsys
        )
        assert code == 0
        assert out.splitlines() == ["a,b,richness", "-1,2,3", "1,0,3"]

    def test_json_includes_bounds(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        write_ground_set(str(grid), GroundSet(RationalField, [0, 1, 2, 3]))
        code, out, _ = run_cli(
            ["sym", "--grid", str(grid), "--alpha", "1/2", "--report", "json"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["bounds"]["universal_bound"] == 4**4
        assert payload["entries"]


class TestGrowthCommands:
    def test_triple(self, tmp_path, capsys):
        lines = tmp_path / "l.json"
        write_lines(str(lines), [AffineMap.of(RationalField, 1, i) for i in range(5)])
        code, out, _ = run_cli(["growth", "triple", "--lines", str(lines)], capsys)
        assert code == 0
        assert json.loads(out) == {"cube_size": 13, "tripling": "13/5"}

    def test_dichotomy(self, tmp_path, capsys):
        lines = tmp_path / "l.json"
        write_lines(str(lines), [AffineMap.of(RationalField, 2**i, 0) for i in range(8)])
        code, out, _ = run_cli(["growth", "dichotomy", "--lines", str(lines)], capsys)
        assert code == 0
        assert json.loads(out)["branch"] == "torus_third"

    def test_ruzsa_deterministic(self, capsys):
        argv = ["growth", "ruzsa", "--p", "101", "--size", "6", "--trials", "25",
                "--seed", "11"]
        code1, out1, _ = run_cli(argv, capsys)
        code2, out2, _ = run_cli(argv, capsys)
        assert code1 == code2 == 0
        assert out1 == out2
        assert json.loads(out1)["all_hold"] is True

    def test_expander(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        write_ground_set(str(path), GroundSet(RationalField, [1, 2, 3]))
        code, out, _ = run_cli(
            ["growth", "expander", "--A", str(path), "--B", str(path), "--C", str(path)],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["lhs"] == 11


class TestBsgAndSumprod:
    def test_bsg_pipeline_run(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        lines = tmp_path / "l.json"
        write_ground_set(str(grid), GroundSet(RationalField, range(40)))
        write_lines(str(lines), [AffineMap.of(RationalField, 1, b) for b in range(20)])
        code, out, _ = run_cli(
            ["bsg", "--grid", str(grid), "--lines", str(lines),
             "--alpha", "1/2", "--J", "1"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["coset"] == {"kind": "translation_coset", "slope": "1"}
        assert payload["overlap"] == 20
        assert payload["certificates_ok"] is True

    def test_sumprod(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        bc = tmp_path / "bc.json"
        write_ground_set(str(a), GroundSet(RationalField, range(1, 9)))
        write_ground_set(str(bc), GroundSet(RationalField, [1, 2]))
        code, out, _ = run_cli(
            ["sumprod", "--A", str(a), "--B", str(bc), "--C", str(bc),
             "--J", "2", "--K", "3/2"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["sum_size"] == 9
        assert payload["min_richness"] >= 8


class TestOracleCommands:
    def test_rlgp(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        write_ground_set(str(grid), GroundSet(RationalField, [0, 1]))
        code, out, _ = run_cli(
            ["oracle", "rlgp", "--grid", str(grid), "--alpha", "1"], capsys
        )
        assert code == 0
        assert json.loads(out)["value"] == 2

    def test_symfp(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        write_ground_set(str(grid), GroundSet(prime_field(7), [1, 2, 4]))
        code, out, _ = run_cli(
            ["oracle", "symfp", "--grid", str(grid), "--alpha", "2/3"], capsys
        )
        assert code == 0
        assert out.startswith("a,b,richness\n")


class TestPrimesCommand:
    def test_x10(self, capsys):
        code, out, _ = run_cli(["primes", "--x", "10"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["k"] == 4
        assert payload["q"] == 210
        assert payload["s"] == 44
        assert payload["delta"] == "1/16"


class TestExitCodes:
    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(["primes", "--x", "10", "--bogus"], capsys)
        assert code == 1
        assert "usage error" in err

    def test_unknown_command(self, capsys):
        code, _, _ = run_cli(["frobnicate"], capsys)
        assert code == 1

    def test_missing_file(self, capsys):
        code, _, err = run_cli(
            ["sym", "--grid", "/nonexistent/g.json", "--alpha", "1/2"], capsys
        )
        assert code == 1

    def test_bad_alpha(self, tmp_path, capsys):
        grid = tmp_path / "g.json"
        write_ground_set(str(grid), GroundSet(RationalField, [0, 1, 2]))
        code, _, err = run_cli(["sym", "--grid", str(grid), "--alpha", "1/9"], capsys)
        assert code == 1  # below the 2/|Y| floor: an input error

    def test_nonprime_modulus(self, capsys):
        code, _, _ = run_cli(
            ["growth", "ruzsa", "--p", "10", "--trials", "1", "--seed", "0"], capsys
        )
        assert code == 1


class TestDeterminism:
    def test_file_outputs_byte_identical(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        first.mkdir()
        second.mkdir()
        for target in (first, second):
            code = main(
                [
                    "construct", "folner", "--N", "3", "--eps", "2/5",
                    "--out", str(target / "g.json"),
                    "--lines-out", str(target / "l.json"),
                ]
            )
            assert code == 0
            write_ground_set(str(target / "small.json"), GroundSet(RationalField, range(8)))
            code = main(
                [
                    "sym", "--grid", str(target / "small.json"), "--alpha", "1/2",
                    "--out", str(target / "sym.csv"),
                ]
            )
            assert code == 0
        for name in ("g.json", "l.json", "sym.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_entry_point_subprocess(self, tmp_path):
        # the installed console script goes through the same main()
        result = subprocess.run(
            [sys.executable, "-m", "richlines.cli", "primes", "--x", "4"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert json.loads(result.stdout)["k"] == 2
