import subprocess
import sys

import pytest

from dkl.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


class TestSolveQ:
    def test_zero_kappa_supercritical(self, capsys):
        code, out = run_cli(
            ["solve-q", "--alpha", "1.5", "--beta", "1,1,0,0", "--kappa", "0"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "alpha,beta1,beta2,beta3,beta4,kappa,q,residual"
        fields = lines[1].split(",")
        assert float(fields[6]) == 0.5

    def test_zero_kappa_subcritical(self, capsys):
        code, out = run_cli(
            ["solve-q", "--alpha", "0.5", "--beta", "1,1,0,0", "--kappa", "0"], capsys
        )
        assert code == 0
        assert float(out.strip().splitlines()[1].split(",")[6]) == 0.0

    def test_round_trip_via_cli(self, capsys):
        code, out = run_cli(
            ["solve-q", "--alpha", "1.0", "--beta", "1,0,0,0", "--kappa", "2.1182623"],
            capsys,
        )
        assert code == 0
        fields = out.strip().splitlines()[1].split(",")
        assert abs(float(fields[6]) - 1.2) < 1e-4
        assert float(fields[7]) < 1e-6


class TestHke:
    def test_breakdown_row(self, capsys):
        code, out = run_cli(
            [
                "hke",
                "--alpha", "0.5", "--beta", "1,2,0,0", "--dim", "1",
                "--t", "0.01", "--x", "0.001", "--y", "5.001", "--q", "0",
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        assert row["regime"] == "TwoJumpStrict"
        assert float(row["free_value"]) > 0.0
        assert float(row["killed_value"]) == float(row["free_value"])


class TestMap:
    def test_regime_guard(self, capsys):
        code, _ = run_cli(
            ["map", "--alpha", "1.0", "--beta", "1,1,0,0", "--dim", "2", "--x", "0,1"],
            capsys,
        )
        assert code == 2

    def test_map_rows(self, capsys):
        code, out = run_cli(
            [
                "map",
                "--alpha", "0.5", "--beta", "0,1.5,0,0", "--dim", "2",
                "--t", "0.001", "--x", "0,0.0001", "--grid-n", "4", "--extent", "3",
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("y1,y2,tag")
        assert len(lines) == 17
        tags = {line.split(",")[2] for line in lines[1:]}
        assert tags <= {"OneJumpDominant", "TwoJumpDominant"}


class TestGreenCommands:
    def test_closed_estimate(self, capsys):
        code, out = run_cli(
            [
                "green",
                "--alpha", "1.5", "--beta", "1,1,0,0", "--dim", "1",
                "--x", "0.1", "--y", "5.1", "--q", "0.7",
            ],
            capsys,
        )
        assert code == 0
        row = out.strip().splitlines()[1].split(",")
        assert float(row[1]) == pytest.approx(0.1**0.5 * (0.1 / 5.0) ** 0.2, rel=1e-12)

    def test_integrate_close_to_closed(self, capsys):
        args = [
            "--alpha", "0.9", "--beta", "1,1,0,0", "--dim", "2",
            "--x", "0,0.4", "--y", "1,1.1", "--q", "1.1",
        ]
        code1, out1 = run_cli(["green"] + args, capsys)
        code2, out2 = run_cli(["green-integrate"] + args, capsys)
        assert code1 == 0 and code2 == 0
        v1 = float(out1.strip().splitlines()[1].split(",")[1])
        v2 = float(out2.strip().splitlines()[1].split(",")[1])
        assert 0.2 < v2 / v1 < 5.0

    def test_divergence_exit_code(self, capsys):
        code, _ = run_cli(
            [
                "green-integrate",
                "--alpha", "1.5", "--beta", "0,0,0,0", "--dim", "1",
                "--x", "1", "--y", "2", "--q", "0.2",
            ],
            capsys,
        )
        assert code == 1


class TestCheck:
    def test_unknown_lemma_exit_2(self, capsys):
        code, _ = run_cli(["check", "--lemma", "not_a_lemma"], capsys)
        assert code == 2

    def test_single_lemma_passes(self, capsys):
        code, out = run_cli(
            ["check", "--lemma", "slowly_varying", "--budget", "100"], capsys
        )
        assert code == 0
        assert out.strip().splitlines()[1].split(",")[0] == "slowly_varying"


class TestConfigFile:
    def test_file_values_and_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text(
            "# sweep configuration\nalpha = 1.5\nbeta = 1,1,0,0\nkappa = 0\n"
        )
        code, out = run_cli(["solve-q", "--config", str(cfg)], capsys)
        assert code == 0
        assert float(out.strip().splitlines()[1].split(",")[6]) == 0.5
        # flag overrides the file
        code, out = run_cli(
            ["solve-q", "--config", str(cfg), "--alpha", "0.5"], capsys
        )
        assert float(out.strip().splitlines()[1].split(",")[6]) == 0.0

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.conf"
        cfg.write_text("nonsense = 1\n")
        code, _ = run_cli(["solve-q", "--config", str(cfg)], capsys)
        assert code == 2


class TestDeterminism:
    def test_map_byte_identical(self, tmp_path):
        args = [
            "map", "--alpha", "0.5", "--beta", "0.5,2,0,0", "--dim", "2",
            "--t", "0.01", "--x", "0,1", "--grid-n", "5", "--extent", "2",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_check_byte_identical(self, tmp_path):
        args = ["check", "--lemma", "cal_3", "--budget", "40", "--seed", "11"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestConsoleEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [
                sys.executable, "-m", "dkl.cli",
                "solve-q", "--alpha", "1.5", "--beta", "2,3,1,1", "--kappa", "0",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[1].split(",")[6] == "0.5"


class TestCShape:
    def test_grid_csv_and_verdict(self, capsys):
        code, out = run_cli(
            ["c-shape", "--alpha", "1.5", "--beta", "0,0,0,0", "--grid-size", "16"],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "q,c_value"
        assert len(lines) == 17


class TestThreadCap:
    def test_parallel_report_identical_to_serial(self, monkeypatch):
        from dkl.inequalities import check
        from dkl.quadrature import QuadratureSpec

        spec = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-12)
        serial = check("cal_3", sampler_seed=9, budget=40, spec=spec)
        monkeypatch.setenv("DKL_THREADS", "4")
        parallel = check("cal_3", sampler_seed=9, budget=40, spec=spec)
        assert serial == parallel
