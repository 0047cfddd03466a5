"""
Tests for the command line interface
"""

import json

from click.testing import CliRunner

from dickepulse.cli import EXIT_INPUT, EXIT_NOT_ACHIEVED, EXIT_NUMERICAL, main
from dickepulse.core.chain import PulseSequence, SystemConfig
from dickepulse.utils.storage import save_sequence


def _run(*args):
    return CliRunner().invoke(main, list(args))


def test_init_config(tmp_path):
    path = tmp_path / "dickepulse.yaml"
    result = _run("init-config", "--output", str(path))
    assert result.exit_code == 0
    assert path.exists()
    assert _run("replay", "--paper-row", "dicke:4", "--config", str(path)).exit_code == 0


def test_timing_total_area():
    result = _run("timing", "--total-area", "2", "--trap-frequency", "4e6")
    assert result.exit_code == 0
    assert "15.708 us" in result.output
    assert "7.854 us" in result.output


def test_timing_from_table_row_alias(tmp_path):
    out = tmp_path / "timing.json"
    result = _run("timing", "--table-row", "noon:6", "--out", str(out))
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    assert report["n_ions"] == 6
    assert report["noon_bound_us"] is not None


def test_replay_table_row():
    result = _run("replay", "--paper-row", "dicke:5")
    assert result.exit_code == 0
    assert "Target:   dicke:2" in result.output
    fidelity = float(result.output.split("Fidelity: ")[1].split()[0])
    assert fidelity >= 0.98


def _value(output, prefix):
    return float(output.split(prefix)[1].split()[0])


def test_replay_noon_reports_both_fidelities():
    result = _run("replay", "--paper-row", "noon:6")
    assert result.exit_code == 0
    assert "Target:   noon:free" in result.output
    fixed = _value(result.output, "Fixed-phase fidelity: ")
    maximized = _value(result.output, "Phase-maximized fidelity: ")
    assert maximized >= 0.98
    assert fixed <= maximized
    assert _value(result.output, "Fidelity: ") == maximized


def test_replay_noon_target_scores_fixed_phase():
    result = _run("replay", "--paper-row", "noon:6", "--target", "noon")
    assert result.exit_code == 0
    assert "Target:   noon (" in result.output
    assert _value(result.output, "Fidelity: ") == _value(result.output, "Fixed-phase fidelity: ")


def test_replay_zero_area_file(tmp_path):
    path = tmp_path / "zero.json"
    save_sequence(PulseSequence.from_pairs([(0.0, 0.0)]), path, SystemConfig(3))
    result = _run("replay", str(path), "--target", "dicke:0")
    assert result.exit_code == 0
    assert "Fidelity: 1.000000" in result.output


def test_replay_fidelity_goal_not_met():
    result = _run("replay", "--paper-row", "dicke:4", "--target", "dicke:0", "--fidelity-goal", "0.9")
    assert result.exit_code == EXIT_NOT_ACHIEVED


def test_replay_malformed_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"pulses": [{"area": 0.5,}]}')
    result = _run("replay", str(path), "--ions", "2")
    assert result.exit_code == EXIT_INPUT
    assert "line 1" in result.output


def test_missing_sequence_source():
    assert _run("replay").exit_code == EXIT_INPUT
    assert _run("replay", "--paper-row", "dicke:4", "--ions", "5").exit_code == EXIT_INPUT


def test_unknown_option_is_usage_error():
    assert _run("replay", "--bogus").exit_code == 2


def test_verify_table_row(tmp_path):
    out = tmp_path / "report.json"
    result = _run("verify", "--paper-row", "dicke:3", "--out", str(out))
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert report["factorization"]["max_amplitude_discrepancy"] < 1e-8
    assert report["symmetry"]["n_ions"] == 3


def test_verify_random_sequence_off_lamb_dicke():
    assert _run("verify", "--ions", "2", "--eta", "0.2", "--seed", "4").exit_code == 0


def test_verify_cutoff_error():
    result = _run("verify", "--paper-row", "dicke:3", "--phonon-cutoff", "1")
    assert result.exit_code == EXIT_NUMERICAL
    assert "cutoff" in result.output


def test_robustness_csv_to_stdout():
    result = _run("robustness", "--paper-row", "noon:4", "--sigma", "0", "--sigma", "0.01",
                  "--trials", "20")
    assert result.exit_code == 0
    assert "sigma,mean_fidelity,std_fidelity,min_fidelity" in result.output


def test_robustness_csv_file(tmp_path):
    out = tmp_path / "curve.csv"
    result = _run("robustness", "--paper-row", "dicke:3", "--sigma", "0.02", "--trials", "10",
                  "--mode", "relative_both", "--out", str(out))
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "sigma,mean_fidelity,std_fidelity,min_fidelity"
    assert lines[1].startswith("0.02,")


def test_synthesize_trivial_target(tmp_path):
    out = tmp_path / "solutions.json"
    result = _run("synthesize", "--ions", "1", "--target", "dicke:0", "--out", str(out))
    assert result.exit_code == 0
    data = json.loads(out.read_text())
    assert data["solutions"][0]["total_area"] == 0.0
    assert "Best A_tot: 0.000 pi" in result.output


def test_synthesize_then_replay(tmp_path):
    out = tmp_path / "solutions.json"
    result = _run("synthesize", "--ions", "1", "--target", "dicke:1", "--restarts", "4",
                  "--out", str(out))
    assert result.exit_code == 0
    stored = json.loads(out.read_text())["solutions"][0]["fidelity"]
    replay = _run("replay", str(out), "--index", "0")
    assert replay.exit_code == 0
    assert f"Fidelity: {stored:.6f}" in replay.output


def _synthesize_and_replay(tmp_path, target):
    out = tmp_path / "solutions.json"
    result = _run("synthesize", "--ions", "2", "--target", target, "--restarts", "3",
                  "--max-iterations", "40", "--out", str(out))
    assert result.exit_code in (0, EXIT_NOT_ACHIEVED)
    data = json.loads(out.read_text())
    replay = _run("replay", str(out))
    assert replay.exit_code == 0
    return data, replay.output


def test_fixed_phase_noon_replays_to_stored_fidelity(tmp_path):
    data, output = _synthesize_and_replay(tmp_path, "noon")
    assert data["target"]["phase_free"] is False
    assert "Target:   noon (" in output
    assert f"Fidelity: {data['solutions'][0]['fidelity']:.6f}" in output


def test_custom_target_replays_to_stored_fidelity(tmp_path):
    target_file = tmp_path / "target.json"
    target_file.write_text(json.dumps([0.6, 0.0, 0.8]))
    data, output = _synthesize_and_replay(tmp_path, f"custom:{target_file}")
    assert "Target:   custom:target.json" in output
    assert f"Fidelity: {data['solutions'][0]['fidelity']:.6f}" in output


def test_stored_custom_label_without_amplitudes(tmp_path):
    path = tmp_path / "seq.json"
    save_sequence(PulseSequence.from_pairs([(0.5, 0.0)]), path, SystemConfig(2), target="custom")
    assert _run("replay", str(path)).exit_code == EXIT_INPUT


def test_synthesize_goal_not_reached(tmp_path):
    out = tmp_path / "solutions.json"
    result = _run("synthesize", "--ions", "3", "--target", "dicke:1", "--restarts", "1",
                  "--max-iterations", "0", "--fidelity-goal", "1.0", "--out", str(out))
    assert result.exit_code == EXIT_NOT_ACHIEVED
    assert json.loads(out.read_text())["solutions"][0]["qualified"] is False


def test_synthesize_bad_target():
    result = _run("synthesize", "--ions", "3", "--target", "ghz")
    assert result.exit_code == EXIT_INPUT


def test_tables_command():
    result = _run("tables")
    assert result.exit_code == 0
    assert "noon" in result.output
    assert "FAIL" not in result.output
