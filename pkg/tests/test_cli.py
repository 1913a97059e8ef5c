"""Tests for scenario parsing, the catalog, and the command-line front end."""

import os
import stat
import subprocess
import sys

import numpy as np
import pytest

from gcflow.cli import CATALOG, catalog, catalog_text, main, parse_config, run_scenario
from gcflow.errors import ConfigError

MINIMAL = """
[scenario]
initial = sphere 2
[flow]
alpha = 4
"""


class TestParse:
    def test_minimal_defaults(self):
        spec = parse_config(MINIMAL)
        assert spec.N == 512
        assert spec.n == 1
        assert spec.cfl == 0.2
        assert spec.residual_tol == 1e-6
        assert spec.alpha == 4
        assert spec.initial == ("sphere", [2.0])
        assert spec.mode == "normalized"

    def test_default_phi0_rule_follows_alpha(self):
        g = parse_config(MINIMAL).grid()
        assert parse_config(MINIMAL).flow_config(g).phi0_rule == "bracket"
        text = MINIMAL.replace("alpha = 4", "alpha = 2")
        assert parse_config(text).flow_config(g).phi0_rule == "aleksandrov"
        text = MINIMAL.replace("alpha = 4", "alpha = 0.5")
        assert parse_config(text).flow_config(g).phi0_rule == "iq_matching"

    def test_unknown_key_names_line(self):
        text = "[scenario]\ninitial = sphere 1\n[flow]\nalpha = 2\nbogus = 3\n"
        with pytest.raises(ConfigError, match="line 5.*unknown key 'bogus'"):
            parse_config(text)

    def test_malformed_number_names_line(self):
        text = "[scenario]\ninitial = sphere 1\n[flow]\nalpha = fast\n"
        with pytest.raises(ConfigError, match="line 4.*malformed number 'fast'"):
            parse_config(text)

    def test_iq_matching_at_critical_alpha_rejected(self):
        text = ("[scenario]\ninitial = sphere 1\nn = 1\n"
                "[flow]\nalpha = 2\nphi0_rule = iq_matching\n")
        with pytest.raises(ConfigError, match="iq_matching requires alpha != n\\+1"):
            parse_config(text)

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[stuff]\na = 1\n")

    def test_comments_and_blank_lines(self):
        text = "# hello\n\n[scenario]\ninitial = sphere 1  # inline\n[flow]\nalpha = 2\n"
        assert parse_config(text).initial == ("sphere", [1.0])

    def test_axisymmetric_fourier_restriction(self):
        text = ("[scenario]\nn = 2\nN = 65\ninitial = fourier 1 0 0.3\n"
                "[flow]\nalpha = 3\n")
        with pytest.raises(ConfigError, match="cosine terms only"):
            parse_config(text)


class TestCatalog:
    def test_contains_counterexample(self):
        assert "thm_D_counterexample" in catalog()

    def test_length(self):
        assert len(catalog()) == 9

    def test_every_entry_parses(self):
        for name in catalog():
            spec = parse_config(catalog_text(name))
            assert spec.name == name

    def test_golden_isotropic_scenario(self):
        spec = parse_config(catalog_text("thm_A_isotropic"))
        assert spec.n == 1 and spec.N == 512
        assert spec.initial == ("ellipse", [2.0, 1.0])
        assert spec.alpha == 2.0
        assert spec.phi0_rule == "aleksandrov"
        assert spec.expect == "converged"
        assert spec.t_max == 15.0
        cfg = spec.flow_config(spec.grid())
        assert cfg.mode == "normalized"


FAST_SCENARIO = """
[scenario]
name = mini
initial = sphere 1
expect = converged
[flow]
alpha = 2
t_max = 0.5
[output]
directory = mini_out
snapshot_every = 0
"""


class TestRunScenario:
    def test_artifacts_written(self, tmp_path):
        spec = parse_config(FAST_SCENARIO)
        code = run_scenario(spec, output_root=str(tmp_path))
        assert code == 0
        out = tmp_path / "mini_out"
        assert (out / "diagnostics.csv").exists()
        assert (out / "summary.txt").exists()
        assert (out / "snapshot_0.txt").exists()
        summary = (out / "summary.txt").read_text()
        assert "outcome: converged" in summary
        header = (out / "diagnostics.csv").read_text().splitlines()[0]
        assert header.startswith("t,J_alpha,I_q,log_r_integral,u_min,u_max")

    def test_unexpected_outcome_is_nonzero(self, tmp_path):
        spec = parse_config(FAST_SCENARIO.replace("expect = converged",
                                                  "expect = blowup"))
        assert run_scenario(spec, output_root=str(tmp_path)) == 1

    def test_unwritable_output_dir(self, tmp_path, capsys):
        # a regular file in the way of the output path fails mkdir even as root
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        spec = parse_config(FAST_SCENARIO)
        spec.directory = str(blocker / "sub")
        code = run_scenario(spec, output_root=str(tmp_path))
        assert code == 3
        assert str(blocker) in capsys.readouterr().err

    def test_readonly_output_dir(self, tmp_path, capsys):
        if os.geteuid() == 0:
            pytest.skip("running as root: read-only directories are writable")
        locked = tmp_path / "locked"
        locked.mkdir()
        locked.chmod(stat.S_IRUSR | stat.S_IXUSR)
        spec = parse_config(FAST_SCENARIO)
        spec.directory = str(locked / "sub")
        code = run_scenario(spec, output_root=str(tmp_path))
        assert code == 3
        assert str(locked) in capsys.readouterr().err

    def test_deterministic_diagnostics(self, tmp_path):
        spec = parse_config(FAST_SCENARIO.replace("sphere 1", "random-fourier 0.2 4"))
        run_scenario(spec, output_root=str(tmp_path / "a"))
        run_scenario(spec, output_root=str(tmp_path / "b"))
        csv_a = (tmp_path / "a" / "mini_out" / "diagnostics.csv").read_bytes()
        csv_b = (tmp_path / "b" / "mini_out" / "diagnostics.csv").read_bytes()
        assert csv_a == csv_b

    def test_counterexample_scenario_expected_blowup(self, tmp_path):
        spec = parse_config(catalog_text("thm_D_counterexample"))
        spec.N = 256  # keep the unit test quick; acceptance reruns at 512
        code = run_scenario(spec, output_root=str(tmp_path))
        assert code == 0
        summary = (tmp_path / "thm_D_counterexample" / "summary.txt").read_text()
        assert "outcome: blowup" in summary

    def test_snapshot_cadence_and_from_file_round_trip(self, tmp_path):
        text = FAST_SCENARIO.replace("snapshot_every = 0", "snapshot_every = 50")
        text = text.replace("sphere 1", "ellipse 1.2 1")
        text = text.replace("t_max = 0.5", "t_max = 0.02")
        text = text.replace("expect = converged", "expect = timeout")
        spec = parse_config(text)
        assert run_scenario(spec, output_root=str(tmp_path)) == 0
        out = tmp_path / "mini_out"
        snaps = sorted(out.glob("snapshot_*.txt"))
        assert len(snaps) >= 2
        follow = parse_config(FAST_SCENARIO)
        follow.initial = ("from-file", [str(snaps[0])])
        follow.directory = "follow_out"
        follow.expect = ""  # short horizon: accept converged-or-timeout
        assert run_scenario(follow, output_root=str(tmp_path)) == 0


class TestMainEntry:
    def test_catalog_listing(self, capsys):
        assert main(["catalog"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out == list(CATALOG)

    def test_check_ok(self, tmp_path, capsys):
        cfg = tmp_path / "s.cfg"
        cfg.write_text(FAST_SCENARIO)
        assert main(["check", str(cfg)]) == 0
        assert "mini" in capsys.readouterr().out

    def test_check_parse_error_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[flow]\nalpha = nope\n")
        assert main(["check", str(cfg)]) == 2
        assert "malformed number" in capsys.readouterr().err

    def test_missing_file_exit_3(self, capsys):
        assert main(["run", "/no/such/file.cfg"]) == 3

    def test_run_via_env_root(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("GCFLOW_OUT_ROOT", str(tmp_path))
        cfg = tmp_path / "s.cfg"
        cfg.write_text(FAST_SCENARIO)
        assert main(["run", str(cfg)]) == 0
        assert (tmp_path / "mini_out" / "summary.txt").exists()

    def test_console_script_usage_error(self):
        proc = subprocess.run([sys.executable, "-m", "gcflow.cli", "frobnicate"],
                              capture_output=True)
        assert proc.returncode == 2
