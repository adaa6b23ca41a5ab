"""CLI integration tests; runs the actual ``resilgrid`` commands."""
import csv
import json
import subprocess
import sys

import pytest
import yaml

pytestmark = pytest.mark.integration

SHORT_RUN = {
    "scenario": {
        "name": "short",
        "defender_mode": "pi_only",
        "stages": [{"duration": 1.0, "attack": {"kind": "none"}}],
        "initial": {"kind": "random_omega", "max_omega_hz": 0.2},
    },
}

SMALL_SWEEP = {
    "epidemic": {
        "k_max": 20,
        "zetas": [0.3, 0.5],
        "t_end": 1.0,
        "dt": 0.01,
        "record_every": 10,
    },
}


def _cli(*args, timeout=120):
    return subprocess.run(
        [sys.executable, "-m", "resilgrid", *args],
        capture_output=True, text=True, timeout=timeout,
    )


def _write_config(tmp_path, data, name="config.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestCLIBasics:
    def test_version(self):
        result = _cli("--version")
        assert result.returncode == 0
        assert "resilgrid" in result.stdout

    def test_list_presets(self):
        result = _cli("--list-presets")
        assert result.returncode == 0
        assert "load-switch" in result.stdout.split()
        assert "fig7b -> constant-attack" in result.stdout

    def test_dump_preset_round_trips(self):
        result = _cli("--dump-preset", "cyber-equilibrium")
        assert result.returncode == 0
        data = yaml.safe_load(result.stdout)
        assert data["scenario"]["name"] == "cyber-equilibrium"

    def test_dump_preset_alias(self):
        result = _cli("--dump-preset", "fig4")
        assert result.returncode == 0
        assert yaml.safe_load(result.stdout)["scenario"]["name"] == "cyber-equilibrium"

    def test_dump_unknown_preset(self):
        result = _cli("--dump-preset", "nope")
        assert result.returncode == 2
        assert "nope" in result.stderr

    def test_no_command_prints_help(self):
        result = _cli()
        assert result.returncode == 0
        assert "usage" in result.stdout.lower()


class TestCLIValidate:
    def test_default_config(self):
        result = _cli("validate")
        assert result.returncode == 0
        gates = [line.split() for line in result.stdout.splitlines() if "Riccati" in line]
        assert [g[:3] for g in gates] == [["defender", "Riccati", "ok"],
                                          ["attacker", "Riccati", "ok"]]
        assert "per_unit" in result.stdout
        assert result.stdout.rstrip().endswith("ok")

    def test_weak_attack_cost_fails(self, tmp_path):
        config = _write_config(tmp_path, {"weights": {"r_a": 1e-6}})
        result = _cli("validate", "--config", config)
        assert result.returncode == 2
        assert "FAILED" in result.stdout

    def test_unknown_key(self, tmp_path):
        config = _write_config(tmp_path, {"grid": {"sampling": 0.1}})
        result = _cli("validate", "--config", config)
        assert result.returncode == 2
        assert "Config error" in result.stderr

    def test_missing_config(self, tmp_path):
        result = _cli("validate", "--config", str(tmp_path / "missing.yaml"))
        assert result.returncode == 2

    def test_unknown_preset(self):
        assert _cli("validate", "--preset", "nope").returncode == 2


class TestCLIEpidemic:
    def test_sweep(self, tmp_path):
        config = _write_config(tmp_path, SMALL_SWEEP)
        out = tmp_path / "out"
        result = _cli("epidemic", "--config", config, "--out", str(out), "--jobs", "2")
        assert result.returncode == 0, result.stderr
        series = _rows(out / "epidemic_timeseries.csv")
        assert series[0] == ["t", "I_zeta_0.3", "I_zeta_0.5"]
        assert len(series) == 1 + 11
        steady = _rows(out / "steady_state.csv")
        assert steady[0] == ["zeta", "I_discrete", "I_continuum"]
        assert len(steady) == 3
        assert float(steady[2][1]) > float(steady[1][1])


class TestCLICyberNE:
    def test_case_equilibrium(self, tmp_path):
        result = _cli("cyber-ne", "--preset", "cyber-equilibrium", "--out", str(tmp_path))
        assert result.returncode == 0, result.stderr
        ne = _rows(tmp_path / "nash_equilibrium.csv")
        assert ne[0][:3] == ["u_d", "u_a", "I_bar"]
        assert float(ne[1][0]) == pytest.approx(0.58, abs=0.02)
        assert float(ne[1][1]) == pytest.approx(0.76, abs=0.02)
        curves = _rows(tmp_path / "best_response.csv")
        assert len(curves) == 1 + 61
        trace = [float(r[1]) for r in _rows(tmp_path / "ne_trace.csv")[1:]]
        assert trace[-1] <= 1e-8
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["R_bar"] == pytest.approx(500.0 * summary["I_bar"])
        assert summary["converged"] is True

    def test_zero_effort(self, tmp_path):
        result = _cli("cyber-ne", "--preset", "zero-effort", "--out", str(tmp_path))
        assert result.returncode == 0, result.stderr
        ne = _rows(tmp_path / "nash_equilibrium.csv")
        assert float(ne[1][0]) == pytest.approx(0.0, abs=1e-6)
        assert float(ne[1][1]) == pytest.approx(0.0, abs=1e-6)


class TestCLIRun:
    def test_short_run(self, tmp_path):
        config = _write_config(tmp_path, SHORT_RUN)
        result = _cli("run", "--config", config, "--out", str(tmp_path), "--seed", "4")
        assert result.returncode == 0, result.stderr
        rows = _rows(tmp_path / "trajectory.csv")
        assert rows[0][:2] == ["t", "f_G30"]
        assert rows[0][-3:] == ["stage", "I_bar", "R_bar"]
        assert len(rows) == 1 + 11
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["safety"]["safe"] is True
        assert summary["records"] == 11
        assert len(summary["stages"]) == 1

    def test_seed_changes_start(self, tmp_path):
        config = _write_config(tmp_path, SHORT_RUN)
        firsts = []
        for seed in ("1", "2"):
            out = tmp_path / seed
            assert _cli("run", "--config", config, "--out", str(out), "--seed", seed).returncode == 0
            firsts.append(_rows(out / "trajectory.csv")[1])
        assert firsts[0] != firsts[1]

    def test_solver_failure_keeps_partial_output(self, tmp_path):
        config = _write_config(tmp_path, {
            "weights": {"barrier_max_iter": 1, "barrier_tol": 1e-30},
            "scenario": {
                "name": "cut-short",
                "defender_mode": "pi_only",
                "stages": [{"duration": 1.0, "attack": {"kind": "none"}},
                           {"duration": 1.0, "attack": {"kind": "strategic"}}],
            },
        })
        result = _cli("run", "--config", config, "--out", str(tmp_path))
        assert result.returncode == 3
        rows = _rows(tmp_path / "trajectory.csv")
        assert len(rows) == 1 + 10
        assert float(rows[-1][0]) == pytest.approx(0.9)
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["aborted_at_step"] == 10
        assert summary["records"] == 10
        assert summary["safety"]["safe"] is True

    def test_finished_run_has_no_abort_step(self, tmp_path):
        config = _write_config(tmp_path, SHORT_RUN)
        assert _cli("run", "--config", config, "--out", str(tmp_path)).returncode == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["aborted_at_step"] is None

    @pytest.mark.slow
    def test_load_switch_fails_assertion(self, tmp_path):
        result = _cli("run", "--preset", "load-switch", "--out", str(tmp_path), "--assert",
                      timeout=600)
        assert result.returncode == 4
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["safety"]["safe"] is False

    @pytest.mark.slow
    def test_no_attack_is_safe(self, tmp_path):
        result = _cli("run", "--preset", "no-attack", "--out", str(tmp_path), "--assert",
                      timeout=600)
        assert result.returncode == 0, result.stderr
