"""
Unit Tests for Command-Line Front End

Runs each subcommand through main() and checks stdout payloads, written
reports and exit codes.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import json
import math

import pytest

from src.cli import build_parser, main, parse_int_list, parse_mesh
from src.config import DEFAULT_SETTINGS
from src.errors import DomainError

NEGATIVE_WEIGHT_OFF = (
    "OFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0.3 0.3 0.05\n"
    "3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n"
)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParsers:
    """Test argument helpers"""

    def test_parse_mesh_torus(self):
        assert parse_mesh("torus:5", DEFAULT_SETTINGS).num_vertices == 25

    def test_parse_mesh_unknown(self):
        with pytest.raises(DomainError):
            parse_mesh("cube:3", DEFAULT_SETTINGS)

    def test_parse_mesh_non_integer(self):
        with pytest.raises(DomainError):
            parse_mesh("torus:x", DEFAULT_SETTINGS)

    def test_parse_int_list(self):
        assert parse_int_list("0,1,2", "--p-list") == [0, 1, 2]
        with pytest.raises(DomainError):
            parse_int_list("0,,2", "--p-list")

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestBoundCommand:
    """Test the bound subcommand"""

    def test_torus_hodge_bound(self, capsys):
        code, out, _ = run(capsys, [
            "bound", "--source", "thm1.2", "--n", "2", "--xi", "0",
            "--D", repr(math.sqrt(2) * math.pi), "--rH", repr(math.pi), "--k", "1", "--p", "0",
        ])
        assert code == 0
        payload = json.loads(out)
        assert payload["value"] == pytest.approx(2.343837, abs=1e-5)
        assert payload["regime"] == "LargeK"

    def test_connection_laplacian(self, capsys):
        code, out, _ = run(capsys, ["bound", "--source", "cor3.7", "--p", "1", "--rH", repr(math.pi)])
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(32.0, rel=1e-11)

    def test_sigma_lists_results(self, capsys):
        code, out, _ = run(capsys, [
            "bound", "--source", "sigma", "--n", "3", "--xi", "1", "--rH", "inf",
            "--convention", "neg-lower", "--p", "1",
        ])
        assert code == 0
        assert isinstance(json.loads(out), list)

    def test_missing_hypothesis_exit_code(self, capsys):
        code, _, err = run(capsys, ["bound", "--source", "thm1.2", "--rH", "1.0"])
        assert code == 2
        assert "hypothesis: diameter D" in err

    def test_local_dirichlet_needs_radius(self, capsys):
        code, _, err = run(capsys, ["bound", "--source", "lem3.1", "--rH", "1.0"])
        assert code == 2
        assert "--r" in err


class TestBallEigCommand:
    """Test the ball-eig subcommand"""

    def test_flat_three_ball(self, capsys):
        code, out, _ = run(capsys, ["ball-eig", "--n", "3", "--xi", "0", "--r", "1"])
        assert code == 0
        payload = json.loads(out)
        assert payload["lambda"] == pytest.approx(math.pi ** 2, rel=1e-11)
        assert payload["method"] == "ClosedForm"

    def test_radius_beyond_cap(self, capsys):
        code, _, _ = run(capsys, ["ball-eig", "--n", "2", "--xi", "1", "--r", "4"])
        assert code == 2


class TestSpectrumCommand:
    """Test the spectrum subcommand"""

    def test_torus_spectrum(self, capsys):
        code, out, _ = run(capsys, ["spectrum", "--mesh", "torus:8", "--p", "0", "--num", "5", "--seed", "3"])
        assert code == 0
        payload = json.loads(out)
        assert payload["mesh"] == "torus:8"
        assert payload["kernel_dim"] == 1
        assert payload["seed"] == 3
        assert len(payload["eigenvalues"]) == 5

    def test_negative_weights_exit_code(self, capsys, tmp_path):
        path = tmp_path / "flat.off"
        path.write_text(NEGATIVE_WEIGHT_OFF)
        code, _, _ = run(capsys, ["spectrum", "--mesh", f"off:{path}", "--p", "0", "--num", "2"])
        assert code == 3

    def test_negative_weights_admitted(self, capsys, tmp_path):
        path = tmp_path / "flat.off"
        path.write_text(NEGATIVE_WEIGHT_OFF)
        code, out, _ = run(capsys, [
            "spectrum", "--mesh", f"off:{path}", "--p", "0", "--num", "2", "--allow-indefinite",
        ])
        assert code == 0
        assert json.loads(out)["warnings"]

    def test_missing_off_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, ["spectrum", "--mesh", f"off:{tmp_path / 'none.off'}", "--p", "0", "--num", "2"])
        assert code == 2

    def test_config_overrides(self, capsys, tmp_path):
        config = tmp_path / "settings.json"
        config.write_text(json.dumps({"residual_tol": 1e-9}))
        code, out, _ = run(capsys, ["--config", str(config), "spectrum", "--mesh", "torus:6", "--p", "2", "--num", "3"])
        assert code == 0
        assert json.loads(out)["tol"] == pytest.approx(1e-9)

    def test_unknown_config_key(self, capsys, tmp_path):
        config = tmp_path / "settings.json"
        config.write_text(json.dumps({"colour": 1}))
        code, _, _ = run(capsys, ["--config", str(config), "spectrum", "--mesh", "torus:6", "--p", "0", "--num", "3"])
        assert code == 2


class TestNetCommand:
    """Test the net subcommand"""

    def test_torus_net(self, capsys):
        code, out, _ = run(capsys, ["net", "--mesh", "torus:16", "--eps", repr(math.pi / 4)])
        assert code == 0
        payload = json.loads(out)
        assert payload["separation_ok"] and payload["covering_ok"]
        assert payload["bishop_ok"]
        assert payload["area"] == pytest.approx(4 * math.pi ** 2)


class TestVerifyCommand:
    """Test the verify subcommand"""

    def test_main_suite(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run(capsys, [
            "verify", "--mesh", "torus:8", "--suite", "main", "--k-max", "3",
            "--p-list", "0,2", "--out", str(out_path),
        ])
        assert code == 0
        assert json.loads(out)["summary"] == {"rows": 6, "passed": 6, "failed": 0}
        report = json.loads(out_path.read_text())
        assert report["suite"] == "main"
        assert [(row["k"], row["p"]) for row in report["rows"]][:2] == [(1, 0), (1, 2)]

    def test_decomposition_suite_csv(self, capsys, tmp_path):
        out_path = tmp_path / "report.csv"
        code, _, _ = run(capsys, [
            "verify", "--mesh", "torus:8", "--suite", "decomp", "--p-list", "0,1",
            "--out", str(out_path), "--format", "csv",
        ])
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert len(lines) == 5
        assert "Cor 2.6" in lines[1]

    def test_failing_rows_exit_code(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, _, _ = run(capsys, [
            "verify", "--mesh", "torus:8", "--k-max", "2", "--p-list", "0",
            "--xi", "0", "--D", "100", "--rH", "100", "--out", str(out_path),
        ])
        assert code == 4
        assert json.loads(out_path.read_text())["summary"]["failed"] == 2

    def test_malformed_p_list(self, capsys, tmp_path):
        code, _, _ = run(capsys, ["verify", "--mesh", "torus:8", "--p-list", "0,x", "--out", str(tmp_path / "r.json")])
        assert code == 2

    def test_p_out_of_range(self, capsys, tmp_path):
        code, _, _ = run(capsys, ["verify", "--mesh", "torus:8", "--p-list", "3", "--out", str(tmp_path / "r.json")])
        assert code == 2

    def test_sphere_without_harmonic_radius(self, capsys, tmp_path):
        code, _, err = run(capsys, ["verify", "--mesh", "icosphere:1", "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "harmonic radius" in err


class TestDocumentedExamples:
    """Run the documented command lines as written"""

    def test_bound_hodge_rounded_inputs(self, capsys):
        code, out, _ = run(capsys, [
            "bound", "--source", "thm1.2", "--n", "2", "--xi", "0",
            "--D", "4.4429", "--rH", "3.1416", "--k", "1", "--p", "0",
        ])
        assert code == 0
        payload = json.loads(out)
        assert payload["value"] == pytest.approx(2.3438, abs=5e-4)
        assert payload["regime"] == "LargeK"

    def test_bound_connection_laplacian(self, capsys):
        code, out, _ = run(capsys, ["bound", "--source", "cor3.7", "--n", "2", "--rH", "3.1416", "--p", "1"])
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(32.0, rel=1e-4)

    def test_ball_eig_flat_disc(self, capsys):
        code, out, _ = run(capsys, ["ball-eig", "--n", "2", "--xi", "0", "--r", "1"])
        assert code == 0
        assert json.loads(out)["lambda"] == pytest.approx(5.783185962947, rel=1e-10)

    def test_spectrum_torus_32(self, capsys):
        code, out, _ = run(capsys, ["spectrum", "--mesh", "torus:32", "--p", "0", "--num", "6"])
        assert code == 0
        values = json.loads(out)["eigenvalues"]
        assert values[0] == pytest.approx(0.0, abs=1e-9)
        assert values[1:] == pytest.approx([1, 1, 1, 1, 2], rel=0.02)

    def test_spectrum_icosphere_one_forms(self, capsys):
        code, out, _ = run(capsys, ["spectrum", "--mesh", "icosphere:4", "--p", "1", "--num", "6"])
        assert code == 0
        payload = json.loads(out)
        assert payload["kernel_dim"] == 0
        assert payload["eigenvalues"] == pytest.approx([2.0] * 6, rel=0.02)

    def test_net_single_center(self, capsys):
        code, out, _ = run(capsys, ["net", "--mesh", "torus:32", "--eps", "10"])
        assert code == 0
        payload = json.loads(out)
        assert payload["size"] == 1
        assert payload["separation_ok"] and payload["covering_ok"]

    def test_net_torus_quarter_pi(self, capsys):
        code, out, _ = run(capsys, ["net", "--mesh", "torus:32", "--eps", "0.7854"])
        assert code == 0
        payload = json.loads(out)
        assert payload["separation_ok"] and payload["covering_ok"]

    def test_net_icosphere_bishop(self, capsys):
        code, out, _ = run(capsys, ["net", "--mesh", "icosphere:3", "--eps", "0.5"])
        assert code == 0
        payload = json.loads(out)
        assert payload["size"] >= payload["bishop_lower_bound"]
        assert payload["bishop_ok"]

    def test_verify_main_torus_32(self, capsys, tmp_path):
        out_path = tmp_path / "r.json"
        code, _, _ = run(capsys, [
            "verify", "--mesh", "torus:32", "--suite", "main", "--k-max", "20",
            "--p-list", "0,1,2", "--out", str(out_path),
        ])
        assert code == 0
        assert json.loads(out_path.read_text())["summary"] == {"rows": 60, "passed": 60, "failed": 0}

    def test_verify_decomp_defaults(self, capsys, tmp_path):
        out_path = tmp_path / "r.json"
        code, _, _ = run(capsys, ["verify", "--mesh", "torus:8", "--suite", "decomp", "--out", str(out_path)])
        assert code == 0
        report = json.loads(out_path.read_text())
        assert sorted({round(row["eps"], 9) for row in report["rows"]}) == [round(math.pi / 3, 9), round(math.pi / 2, 9)]
        assert {row["p"] for row in report["rows"]} == {0, 1, 2}
        assert any(row.get("outcome") == "no usable balls" for row in report["rows"])


class TestDeterminism:
    """Repeated runs write identical bytes"""

    def test_verify_reports_identical(self, capsys, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["verify", "--mesh", "torus:8", "--suite", "all", "--k-max", "5", "--seed", "3"]
        assert run(capsys, argv + ["--out", str(first)])[0] == 0
        assert run(capsys, argv + ["--out", str(second)])[0] == 0
        assert first.read_bytes() == second.read_bytes()

    def test_csv_reports_identical(self, capsys, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["verify", "--mesh", "torus:8", "--k-max", "4", "--p-list", "0,1", "--format", "csv"]
        assert run(capsys, argv + ["--out", str(first)])[0] == 0
        assert run(capsys, argv + ["--out", str(second)])[0] == 0
        assert first.read_bytes() == second.read_bytes()

    def test_spectrum_stdout_identical(self, capsys):
        argv = ["spectrum", "--mesh", "torus:8", "--p", "1", "--num", "5", "--seed", "11"]
        assert run(capsys, argv)[1] == run(capsys, argv)[1]
