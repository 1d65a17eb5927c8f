import json
import subprocess
import sys

import pytest

from crownkit.campaign import CampaignConfig, ConfigError, run
from crownkit.cli import main


def _without_timing(report):
    return {k: v for k, v in report.items() if k != "timing"}


def test_fixture_passes(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["fixture", "moore3", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["kind"] == "fixture_report"
    assert report["ok"] and report["failures"] == []
    assert set(report["checks"]) == {"homology", "round_trip", "realize_R", "hocolim_crown",
                                     "R(M(x)M)", "R(M)(x)R(M)", "kunneth"}
    assert "PASS moore3 homology" in capsys.readouterr().err


def test_corrupted_fixture_fails_with_minimized_artifact(tmp_path, capsys):
    out, arts = tmp_path / "report.json", tmp_path / "artifacts"
    assert main(["fixture", "moore3", "--corrupt", "--out", str(out), "--artifacts", str(arts)]) == 1
    report = json.loads(out.read_text())
    (art,) = report["failures"]
    assert art["kind"] == "failure"
    assert "homology" in art["failed"]
    assert art["inputs"]["m"]["ranks"] == [0, 0]
    files = sorted(arts.iterdir())
    assert len(files) == 1
    capsys.readouterr()
    assert main(["replay", str(files[0])]) == 1
    assert "reproduced" in capsys.readouterr().out
    assert main(["replay", str(out)]) == 1


def test_campaign_report_is_deterministic(capsys):
    args = ["campaign", "--seed", "3", "--period", "4", "--trials", "2", "--checks", "main,kunneth,disks"]
    assert main(args) == 0
    first = json.loads(capsys.readouterr().out)
    assert main(args + ["--jobs", "2"]) == 0
    second = json.loads(capsys.readouterr().out)
    assert _without_timing(first) == _without_timing(second)
    assert first["rng"].startswith("philox4x64-10")
    assert first["counts"] == {"disks": {"pass": 2, "fail": 0}, "main": {"pass": 2, "fail": 0},
                               "kunneth": {"pass": 2, "fail": 0}}
    assert "total_seconds" in first["timing"]


def test_failing_campaign_replays(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["campaign", "--seed", "1", "--period", "2", "--trials", "1", "--checks", "disks",
                 "--out", str(out)]) == 1
    report = json.loads(out.read_text())
    assert not report["ok"]
    assert report["failures"][0]["failed"] == ["restriction_in_L"]
    capsys.readouterr()
    assert main(["replay", str(out)]) == 1
    assert "disks: reproduced" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["campaign", "--seed", "1", "--period", "1", "--trials", "1"],
    ["campaign", "--seed", "-1", "--period", "2", "--trials", "1"],
    ["campaign", "--seed", "1", "--period", "2", "--trials", "0"],
])
def test_bad_configuration_exits_two(argv, capsys):
    assert main(argv) == 2
    assert "verify: error" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["campaign", "--seed", "1", "--period", "2", "--trials", "1", "--checks", "bogus"],
    ["fixture", "nosuch"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_malformed_replay_file_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "failure",\n "check": }')
    assert main(["replay", str(bad)]) == 2
    assert "line 2 column" in capsys.readouterr().err
    assert main(["replay", str(tmp_path / "missing.json")]) == 2


def test_replay_rejects_non_artifacts(tmp_path):
    f = tmp_path / "complex.json"
    f.write_text(json.dumps({"kind": "periodic_complex"}))
    assert main(["replay", str(f)]) == 2


def test_config_validation():
    with pytest.raises(ConfigError):
        CampaignConfig(seed=0, period=2, trials=1, checks=("nope",))
    cfg = CampaignConfig(seed=0, period=2, trials=1, checks=("kunneth", "theoremA"))
    assert cfg.checks == ("theoremA", "kunneth")


def test_run_counts_every_trial():
    report = run(CampaignConfig(seed=9, period=3, trials=3, checks=("kunneth",)))
    assert report["counts"]["kunneth"]["pass"] + report["counts"]["kunneth"]["fail"] == 3


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "crownkit.cli", "fixture", "moore3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"]
