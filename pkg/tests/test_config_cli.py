import json
import subprocess
import sys
from pathlib import Path

import pytest

from fracdiff.config import parse_config
from fracdiff.errors import ParseError, ValidationError

MINIMAL_DIRECT = """
mode: direct
problem:
  epsilon: 0.5
  zetas: [1.0, 0.6]
  final_time: 1.0
  phis: [{profile: bump, scale: 0.2}]
  source: {type: space_only, profile: sin}
numerics: {k_max: 8, n_time: 64, tol: 1.0e-8}
output: {directory: out, format: csv}
"""


class TestParse:
    def test_minimal_document(self):
        cfg = parse_config(MINIMAL_DIRECT)
        assert cfg.mode == "direct"
        assert cfg.problem.epsilon == 0.5
        assert cfg.problem.zetas == (1.0, 0.6)
        assert cfg.numerics.k_max == 8

    def test_epsilon_invariant_named(self):
        with pytest.raises(ValidationError) as exc:
            parse_config("mode: direct\nproblem: {epsilon: 1.2}\n")
        assert any("|epsilon| < 1" in v for v in exc.value.violations)

    def test_inverse_total_order_invariant(self):
        with pytest.raises(ValidationError) as exc:
            parse_config("mode: inverse-space\nproblem: {zetas: [1.0, 0.9, 0.5]}\n")
        assert any("0 < total order < 1" in v for v in exc.value.violations)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError) as exc:
            parse_config("mode: direct\nbogus: 1\nproblem: {shape: x}\n")
        joined = " ".join(exc.value.violations)
        assert "bogus" in joined and "problem.shape" in joined

    def test_all_violations_reported(self):
        with pytest.raises(ValidationError) as exc:
            parse_config(
                "mode: direct\nproblem: {epsilon: 2.0, zetas: [0.2, 0.2]}\n"
            )
        assert len(exc.value.violations) >= 2

    def test_malformed_document(self):
        with pytest.raises(ParseError):
            parse_config("mode: [unclosed\n")

    def test_round_trip(self):
        cfg = parse_config(MINIMAL_DIRECT)
        again = parse_config(cfg.to_document())
        assert again == cfg
        assert again.to_document() == cfg.to_document()


def _run_cli(args):
    return subprocess.run(
        [sys.executable, "-m", "fracdiff.cli", *args],
        capture_output=True,
        text=True,
        cwd=Path(__file__).resolve().parents[1],
    )


@pytest.fixture()
def write_cfg(tmp_path):
    def _write(text, name="cfg.yaml"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write


class TestCli:
    def test_mlf_single_row(self, write_cfg, tmp_path):
        cfg = write_cfg(
            "mode: mlf\nmlf: {beta: 1.0, zeta: 1.0, z: 1.0}\n"
            f"output: {{directory: {tmp_path/'o'}}}\n"
        )
        res = _run_cli(["mlf", "--config", str(cfg), "--quiet"])
        assert res.returncode == 0, res.stderr
        rows = (tmp_path / "o" / "mlf.csv").read_text().splitlines()
        assert rows[0] == "beta,zeta,z,value,abs_error_estimate,method"
        value = float(rows[1].split(",")[3])
        assert abs(value - 2.718281828459045) <= 1e-9

    def test_invalid_config_exit_code(self, write_cfg):
        cfg = write_cfg("mode: direct\nproblem: {epsilon: 1.2}\n")
        res = _run_cli(["direct", "--config", str(cfg)])
        assert res.returncode == 2
        assert "|epsilon| < 1" in res.stderr

    def test_mode_mismatch_rejected(self, write_cfg):
        cfg = write_cfg("mode: mlf\nmlf: {beta: 1.0}\n")
        res = _run_cli(["reduce", "--config", str(cfg)])
        assert res.returncode == 2

    def test_direct_fixture_report(self, write_cfg, tmp_path):
        cfg = write_cfg(
            "mode: direct\n"
            "problem:\n"
            "  epsilon: 0.5\n"
            "  zetas: [1.0, 0.6]\n"
            "  final_time: 1.0\n"
            "  phis: [{profile: bump, scale: 0.2}]\n"
            "  source: {type: space_only, profile: sin}\n"
            "numerics: {k_max: 8, n_time: 64}\n"
            f"output: {{directory: {tmp_path/'d'}}}\n"
        )
        res = _run_cli(["direct", "--config", str(cfg), "--quiet"])
        assert res.returncode == 0, res.stderr
        report = json.loads((tmp_path / "d" / "report.json").read_text())
        assert report["all_passed"] is True
        assert "u.csv" in report["artifacts"]
        header = (tmp_path / "d" / "u.csv").read_text().splitlines()[0]
        assert header == "x,t,value"

    def test_determinism_byte_identical(self, write_cfg, tmp_path):
        body = (
            "mode: inverse-time\n"
            "problem:\n"
            "  epsilon: 0.3\n"
            "  zetas: [1.0, 0.7]\n"
            "  final_time: 0.2\n"
            "  phis: [{profile: bump, scale: 0.2}]\n"
            "  source: {type: separable, profile: sin, amplitude: one_plus_t}\n"
            "numerics: {k_max: 6, n_time: 512, seed: 5}\n"
        )
        cfg_a = write_cfg(body + f"output: {{directory: {tmp_path/'a'}}}\n", "a.yaml")
        cfg_b = write_cfg(body + f"output: {{directory: {tmp_path/'b'}}}\n", "b.yaml")
        ra = _run_cli(["inverse-time", "--config", str(cfg_a), "--quiet"])
        rb = _run_cli(["inverse-time", "--config", str(cfg_b), "--quiet"])
        assert ra.returncode == 0 and rb.returncode == 0, ra.stderr + rb.stderr
        for name in ("recovered_a.csv", "picard_trace.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_failed_hard_check_gives_exit_one(self, write_cfg, tmp_path):
        # a grid this coarse cannot meet the round-trip hard check
        cfg = write_cfg(
            "mode: inverse-time\n"
            "problem:\n"
            "  epsilon: 0.3\n"
            "  zetas: [1.0, 0.7]\n"
            "  final_time: 0.2\n"
            "  source: {type: separable, profile: sin, amplitude: one_plus_t}\n"
            "numerics: {k_max: 4, n_time: 64}\n"
            f"output: {{directory: {tmp_path/'f'}}}\n"
        )
        res = _run_cli(["inverse-time", "--config", str(cfg), "--quiet"])
        assert res.returncode == 1
        report = json.loads((tmp_path / "f" / "report.json").read_text())
        assert report["all_passed"] is False

    def test_reduce_mode_classifies(self, write_cfg, tmp_path):
        cfg = write_cfg(
            "mode: reduce\nproblem: {zetas: [1.0, 0.3]}\n"
            f"output: {{directory: {tmp_path/'r'}}}\n"
        )
        res = _run_cli(["reduce", "--config", str(cfg), "--quiet"])
        assert res.returncode == 0, res.stderr
        row = (tmp_path / "r" / "reduce.csv").read_text().splitlines()[1]
        assert "Caputo" in row

    def test_dn_apply_mode_agrees_with_power_rule(self, write_cfg, tmp_path):
        cfg = write_cfg(
            "mode: dn-apply\nproblem: {zetas: [1.0, 0.6]}\n"
            "operator: {mu: 2.0}\nnumerics: {n_time: 512}\n"
            f"output: {{directory: {tmp_path/'dn'}}}\n"
        )
        res = _run_cli(["dn-apply", "--config", str(cfg), "--quiet"])
        assert res.returncode == 0, res.stderr
        report = json.loads((tmp_path / "dn" / "report.json").read_text())
        assert report["metrics"]["power_rule_rel_err"] <= 1e-3

    def test_laplace_mode_verifies_identity(self, write_cfg, tmp_path):
        cfg = write_cfg(
            "mode: laplace-check\nproblem: {zetas: [0.9, 1.0, 0.8]}\n"
            "operator: {mu: 2.0, s_samples: [1, 2, 5, 10]}\n"
            f"output: {{directory: {tmp_path/'lp'}}}\n"
        )
        res = _run_cli(["laplace-check", "--config", str(cfg), "--quiet"])
        assert res.returncode == 0, res.stderr
        report = json.loads((tmp_path / "lp" / "report.json").read_text())
        assert report["metrics"]["max_rel_err"] <= 1e-6
