"""End-to-end tests of the command line interface, run as subprocesses."""

import json
import math
import os
import subprocess
import sys

from pawclock.cli import ScenarioConfig

BASE = [sys.executable, "-m", "pawclock"]
SPIN3 = ["--two-j", "6", "--m", "1", "--kappa-r", "3/4"]


def run_cli(*argv, threads="2", check=False):
    """Run the CLI with a pinned thread count and capture both streams."""
    env = dict(os.environ, PAW_THREADS=threads)
    result = subprocess.run(BASE + list(argv), capture_output=True,
                            text=True, env=env)
    if check:
        assert result.returncode == 0, result.stderr or result.stdout
    return result


# ---------------------------------------------------------------------------
# enumerate
# ---------------------------------------------------------------------------

def test_enumerate_golden_table():
    """The two allowed pairs for kappa*r = 3/4 at 2J = 6, formatted exactly."""
    result = run_cli("enumerate", "--kappa-r", "3/4", "--two-j", "6", check=True)
    assert result.stdout.splitlines() == [
        "kappa*r = 3/4 = (2*1+1)/(2*2), 2J = 6",
        "   l    m+J        m        n",
        "   0      2       -1        1",
        "   1      6        3        4",
        "2 pair(s); entanglement admissible: yes",
    ]


def test_enumerate_half_integer_m_not_admissible():
    result = run_cli("enumerate", "--kappa-r", "3/4", "--two-j", "5", check=True)
    lines = result.stdout.splitlines()
    assert "   0      2     -1/2        1" in lines
    assert lines[-1] == "1 pair(s); entanglement admissible: no"


def test_enumerate_rejected_ratio_is_diagnostic_not_error():
    """A ratio with no odd/even form explains itself and still exits 0."""
    result = run_cli("enumerate", "--kappa-r", "2/3", "--two-j", "40")
    assert result.returncode == 0
    assert result.stdout.startswith("no allowed pairs:")
    assert "odd/even" in result.stdout


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_malformed_rational_exits_two():
    result = run_cli("enumerate", "--kappa-r", "abc", "--two-j", "6")
    assert result.returncode == 2


def test_stray_state_flag_exits_two():
    result = run_cli("build", "--kappa-r", "3/4")
    assert result.returncode == 2
    assert "error:" in result.stderr


def test_unknown_config_key_exits_two(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"stat": {"two_J": 6}}))
    result = run_cli("build", "--config", str(path))
    assert result.returncode == 2
    assert "stat" in result.stderr


def test_unknown_figure_exits_three():
    result = run_cli("figure", "no-such-plot")
    assert result.returncode == 3
    assert "choose from" in result.stderr


def test_inadmissible_state_exits_four():
    """2J = 3 leaves a single allowed pair: no entanglement is possible."""
    result = run_cli("build", "--two-j", "3", "--m", "1", "--kappa-r", "3/4")
    assert result.returncode == 4
    assert "not admissible" in result.stderr


def test_degenerate_theta_exits_one():
    result = run_cli("conditional", "--two-j", "510", "--m", "170",
                     "--kappa-r", "1/2", "--coeff", "171=1", "--coeff", "341=1",
                     "--theta", "0.05")
    assert result.returncode == 1
    assert "error:" in result.stderr


# ---------------------------------------------------------------------------
# build and serialization
# ---------------------------------------------------------------------------

def test_build_summary_and_state_file(tmp_path):
    result = run_cli("build", *SPIN3, "--out", str(tmp_path), check=True)
    # the summary JSON is followed by a "wrote ..." status line
    summary = json.loads(result.stdout[:result.stdout.rfind("}") + 1])
    assert summary["two_J"] == 6
    assert summary["M"] == 1
    assert summary["epsilon_over_omega"] == [3, 4]
    assert summary["kappa"] == [9, 4]
    assert summary["constraint_residual"] == 0.0
    assert [b["m_plus_J"] for b in summary["branches"]] == [2, 6]
    assert [b["n"] for b in summary["branches"]] == [1, 4]
    for branch in summary["branches"]:
        assert abs(branch["weight"] - 0.5) < 1e-15

    document = json.loads((tmp_path / "state.json").read_text())
    assert set(document) == {"two_J", "epsilon_over_omega", "M", "coefficients"}
    assert document["epsilon_over_omega"] == [3, 4]
    coeff = {entry["m_plus_J"]: complex(entry["re"], entry["im"])
             for entry in document["coefficients"]}
    assert set(coeff) == {2, 6}
    assert abs(abs(coeff[2]) ** 2 - 0.5) < 1e-15
    assert coeff[2].imag == 0.0


def test_build_reads_back_its_own_state_file(tmp_path):
    run_cli("build", *SPIN3, "--out", str(tmp_path), check=True)
    document = json.loads((tmp_path / "state.json").read_text())
    config = tmp_path / "scenario.json"
    config.write_text(json.dumps({"state": document}))
    result = run_cli("build", "--config", str(config), "--out",
                     str(tmp_path / "again"), check=True)
    summary = json.loads(result.stdout[:result.stdout.rfind("}") + 1])
    assert summary["two_J"] == 6
    assert (tmp_path / "again" / "state.json").exists()


# ---------------------------------------------------------------------------
# conditional and verify
# ---------------------------------------------------------------------------

def test_conditional_golden_amplitudes():
    result = run_cli("conditional", *SPIN3, "--theta", str(math.pi / 2),
                     "--phi", "0", check=True)
    lines = result.stdout.splitlines()
    assert lines[-1] == "norm = 1.000000000000000"
    rows = {int(line.split()[0]): float(line.split()[3])
            for line in lines if line.lstrip()[0].isdigit()}
    assert abs(rows[1] - 15.0 / 16.0) < 1e-14
    assert abs(rows[4] - 1.0 / 16.0) < 1e-14


def test_verify_passes_on_valid_state():
    result = run_cli("verify", *SPIN3)
    assert result.returncode == 0
    report = json.loads(result.stdout)
    assert report["all_passed"] is True
    names = {check["name"] for check in report["checks"]}
    assert names == {"constraint_residual_zero", "pair_enumeration_matches_search",
                     "chi_squared_normalized", "conditional_norm_unit",
                     "schrodinger_order_two", "beta_normalized"}


def test_verify_detects_tampered_levels():
    result = run_cli("verify", *SPIN3, "--tamper-shift-n", "1")
    assert result.returncode == 1
    report = json.loads(result.stdout)
    assert report["all_passed"] is False
    failed = {c["name"] for c in report["checks"] if not c["passed"]}
    assert "constraint_residual_zero" in failed
    assert "pair_enumeration_matches_search" in failed


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def test_figure_chi2_header_and_shape(tmp_path):
    run_cli("figure", "chi2-j3", "--out", str(tmp_path), check=True)
    lines = (tmp_path / "chi2-j3.csv").read_text().splitlines()
    assert lines[0] == "theta,term_k2,term_k6,chi2"
    assert len(lines) == 1001
    sidecar = json.loads((tmp_path / "chi2-j3.json").read_text())
    assert sidecar["figure"] == "chi2-j3"


def test_figure_orbits_radii_ladder(tmp_path):
    run_cli("figure", "orbits-pq", "--m", "8", "--samples", "16",
            "--out", str(tmp_path), check=True)
    assert (tmp_path / "orbits-pq.csv").read_text().splitlines()[0] == "E,t,q,p,Q,P"
    sidecar = json.loads((tmp_path / "orbits-pq.json").read_text())
    # dense family at M = 8: levels n = 0..11, radii sqrt(2n/M)
    assert sidecar["radii"] == [math.sqrt(2.0 * n / 8.0) for n in range(12)]


def test_figure_runs_are_deterministic_across_thread_counts(tmp_path):
    """Byte-identical CSV output no matter how the work is chunked."""
    args = ("figure", "marg-qt", "--m", "10", "--grid", "q_count=101",
            "--grid", "t_count=16")
    run_cli(*args, "--out", str(tmp_path / "a"), threads="1", check=True)
    run_cli(*args, "--out", str(tmp_path / "b"), threads="7", check=True)
    first = (tmp_path / "a" / "marg-qt.csv").read_bytes()
    second = (tmp_path / "b" / "marg-qt.csv").read_bytes()
    assert first == second
    reports = [json.loads((tmp_path / d / "marg-qt.json").read_text())
               for d in ("a", "b")]
    assert reports[0]["interference"] == reports[1]["interference"]


# ---------------------------------------------------------------------------
# configuration files
# ---------------------------------------------------------------------------

def test_config_round_trip_is_byte_stable(tmp_path):
    config = ScenarioConfig(
        state={"two_J": 6, "epsilon_over_omega": [3, 4], "M": 1,
               "coefficients": [{"m_plus_J": 2, "re": 1.0, "im": 0.0},
                                {"m_plus_J": 6, "re": 1.0, "im": 0.0}]},
        experiment="chi2",
        grids={"theta_count": 64},
        out_dir=str(tmp_path),
    )
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    config.save(first)
    ScenarioConfig.load(first).save(second)
    assert first.read_bytes() == second.read_bytes()


def test_config_drives_chi2_run(tmp_path):
    config = ScenarioConfig(
        state={"two_J": 6, "epsilon_over_omega": [3, 4], "M": 1,
               "coefficients": [{"m_plus_J": 2, "re": 1.0, "im": 0.0},
                                {"m_plus_J": 6, "re": 1.0, "im": 0.0}]},
        grids={"theta_count": 64},
        out_dir=str(tmp_path),
    )
    path = tmp_path / "scenario.json"
    config.save(path)
    result = run_cli("chi2", "--config", str(path), check=True)
    assert "integral of chi^2 over the sphere measure: 1.000000" in result.stdout
    lines = (tmp_path / "chi2.csv").read_text().splitlines()
    assert len(lines) == 65


def test_help_exits_zero():
    result = run_cli("--help")
    assert result.returncode == 0
    for name in ("enumerate", "build", "chi2", "conditional", "schrodinger",
                 "beta", "figure", "orbits", "verify"):
        assert name in result.stdout
