import json

import pytest

from towbombe import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_oracle_reference_probs(capsys, tmp_path):
    code, out = run(capsys, "oracle", "--probs", "0.03,0.05,0.1,0.2,0.9", "--users", "3",
                    "--csv", str(tmp_path / "t.csv"))
    assert code == 0
    assert "social maxima (6), total 1.2" in out.out
    assert "(E,E,E) -> 0.3, 0.3, 0.3" in out.out
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 126


def test_simulate_twice_identical(capsys, tmp_path):
    outs = []
    for name in ("a", "b"):
        code, _ = run(capsys, "simulate", "--seed", "42", "--horizon", "200", "--samples", "30",
                      "--per-step", "--output-dir", str(tmp_path / name))
        assert code == 0
        outs.append({f: (tmp_path / name / f).read_bytes()
                     for f in ("scores.csv", "summary.csv", "timeseries.csv")})
    assert outs[0] == outs[1]


def test_flags_override_config_file(capsys, tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"horizon": 50, "samples": 7, "seed": 3, "_note": "ignored"}))
    code, _ = run(capsys, "simulate", "--config", str(conf), "--samples", "4",
                  "--output-dir", str(tmp_path / "o"))
    assert code == 0
    echo = json.loads((tmp_path / "o" / "config.json").read_text())
    assert echo["horizon"] == 50 and echo["samples"] == 4 and echo["seed"] == 3


def test_sweep_omega_grid(capsys, tmp_path):
    code, out = run(capsys, "sweep-omega", "--grid", "0.0:0.2:0.02", "--horizon", "30",
                    "--samples", "3", "--output-dir", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "sweep_omega.csv").read_text().splitlines()
    assert lines[0] == "omega,mean_total" and len(lines) == 12
    assert "omega0 for these probabilities: 0.0811" in out.out


def test_baseline_defaults_to_ucb1t(capsys, tmp_path):
    code, out = run(capsys, "baseline", "--horizon", "30", "--samples", "3", "--output-dir", str(tmp_path))
    assert code == 0 and "policy=INDEPENDENT_UCB1T" in out.out


def test_baseline_rejects_bombe(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["baseline", "--policy", "BOMBE"])
    assert exc.value.code != 0


@pytest.mark.parametrize("argv", [["bogus"], ["simulate", "--frobnicate"], []])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_invalid_values_exit_nonzero(capsys, tmp_path):
    code, out = run(capsys, "simulate", "--horizon", "0", "--output-dir", str(tmp_path))
    assert code != 0 and "horizon" in out.err
