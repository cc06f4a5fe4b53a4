import json

import numpy as np
import pytest

from solitonlab import cli
from solitonlab import phase_space as ps
from solitonlab import sampling
from solitonlab.entanglement import Bipartition, log_negativity

SMALL = """\
# tiny run for tests
n_sites = 4
gamma = -1.0
n_target = 3.0
epochs = 60
history_stride = 20
seed = 7
"""


def write_config(tmp_path, text, name="run.cfg"):
    out = tmp_path / "out"
    path = tmp_path / name
    path.write_text(text + f"output_dir = {out}\n")
    return path, out


def test_parse_defaults_and_overrides():
    c = cli.parse_config("n_sites = 5  # comment\n\ngamma = -0.01\n")
    assert c.n_sites == 5 and c.gamma == -0.01
    assert c.epochs == 30000 and c.n_target == 10.0 and c.site_a is None


def test_config_text_round_trip():
    c = cli.ExperimentConfig(n_sites=10, loss_variant="bound", site_a=2, site_b=7,
                             n_target=40.0, gamma=-0.3)
    assert cli.parse_config(c.to_text()) == c


@pytest.mark.parametrize("text, field", [
    ("colour = red", "colour"),
    ("n_sites = 3\nn_sites = 4", "n_sites"),
    ("n_sites = three", "n_sites"),
    ("n_sites = 0", "n_sites"),
    ("n_target = -1", "n_target"),
    ("loss_variant = triple", "loss_variant"),
    ("loss_variant = bound\nsite_a = 2", "site_b"),
    ("loss_variant = bound\nn_sites = 6\nsite_a = 2\nsite_b = 7", "site_b"),
    ("weight_number = -2", "weight_number"),
    ("grad_mode = guess", "grad_mode"),
    ("epochs = 0", "epochs"),
    ("just words", "line 1"),
])
def test_config_errors_name_the_field(text, field):
    with pytest.raises(cli.ConfigError) as info:
        cli.parse_config(text)
    assert info.value.field == field
    assert f"'{field}'" in str(info.value)


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "file.txt"
    cli.atomic_write(target, "first")
    cli.atomic_write(target, "second")
    assert target.read_text() == "second"
    assert [p.name for p in target.parent.iterdir()] == ["file.txt"]


def test_train_writes_artifacts(tmp_path, capsys):
    cfg, out = write_config(tmp_path, SMALL)
    assert cli.main(["train", "--config", str(cfg)]) == 0
    for name in ("history.csv", "final_params.json", "final_state.json", "site_profile.csv",
                 "entanglement.json", "checkpoint_params.json"):
        assert (out / name).exists(), name
    rows = (out / "history.csv").read_text().strip().split("\n")
    assert rows[0] == "epoch,loss,mean_H,mean_N,log_negativity"
    assert [r.split(",")[0] for r in rows[1:]] == ["0", "20", "40", "60"]
    assert json.loads((out / "checkpoint_params.json").read_text())["epoch"] == 60
    state = ps.GaussianState.from_json((out / "final_state.json").read_text())
    report = json.loads((out / "entanglement.json").read_text())
    assert report["alice_modes"] == [3]
    assert report["log_negativity"] == log_negativity(state, Bipartition([3]))
    assert "artifacts written" in capsys.readouterr().out


def test_train_is_reproducible_byte_for_byte(tmp_path):
    a, out_a = write_config(tmp_path, SMALL, "a.cfg")
    b = tmp_path / "b.cfg"
    out_b = tmp_path / "out_b"
    b.write_text(SMALL + f"output_dir = {out_b}\n")
    assert cli.main(["train", "--config", str(a)]) == 0
    assert cli.main(["train", "--config", str(b)]) == 0
    for name in ("history.csv", "final_params.json", "final_state.json", "site_profile.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_train_config_error_exit_code(tmp_path, capsys):
    cfg, _ = write_config(tmp_path, SMALL + "bogus = 1\n")
    assert cli.main(["train", "--config", str(cfg)]) == cli.EXIT_CONFIG
    assert "'bogus'" in capsys.readouterr().err
    assert cli.main(["train", "--config", str(tmp_path / "missing.cfg")]) == cli.EXIT_CONFIG


def test_train_divergence_exit_code(tmp_path):
    cfg, out = write_config(tmp_path, SMALL.replace("history_stride = 20", "history_stride = 1")
                            + "learning_rate = 500\n")
    code = cli.main(["train", "--config", str(cfg)])
    assert code == cli.EXIT_DIVERGED
    saved = json.loads((out / "checkpoint_params.json").read_text())
    assert np.all(np.isfinite(np.ravel(saved["deltas"])))
    assert not (out / "final_state.json").exists()


def coherent_file(tmp_path, alphas):
    d = np.ravel([[np.sqrt(2) * a.real, np.sqrt(2) * a.imag] for a in np.asarray(alphas, complex)])
    n = len(alphas)
    path = tmp_path / "state.json"
    path.write_text(ps.GaussianState(n, np.eye(2 * n), d).to_json())
    return path


def test_analyze_reports_photons_and_negativity(tmp_path, capsys):
    path = coherent_file(tmp_path, [1.0, 0.5j, 0.0])
    out = tmp_path / "analysis"
    assert cli.main(["analyze", "--state", str(path), "--alice", "0,2", "--gamma", "-1",
                     "--output-dir", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["alice_modes"] == [0, 2]
    assert summary["mean_photon"] == pytest.approx([1.0, 0.25, 0.0], abs=1e-12)
    assert summary["log_negativity"] == 0.0
    assert "mean_H" in summary
    assert (out / "entanglement.json").exists() and (out / "site_profile.csv").exists()


def test_analyze_rejects_bad_alice(tmp_path, capsys):
    path = coherent_file(tmp_path, [1.0, 0.0])
    assert cli.main(["analyze", "--state", str(path), "--alice", "5"]) == cli.EXIT_CONFIG
    assert cli.main(["analyze", "--state", str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG


def test_sample_writes_pair_scan(tmp_path, capsys):
    path = coherent_file(tmp_path, [0.8, 0.0, 0.6j])
    assert cli.main(["sample", "--state", str(path), "--total", "2"]) == 0
    text = (tmp_path / "pair_scan.csv").read_text()
    state = ps.GaussianState.from_json(path.read_text())
    assert text == sampling.pair_scan_csv(sampling.pair_probability_scan(state, 2))
    assert "max probability" in capsys.readouterr().out


def test_sample_rejects_odd_total(tmp_path):
    path = coherent_file(tmp_path, [0.8])
    with pytest.raises(SystemExit):
        cli.main(["sample", "--state", str(path), "--total", "3"])


def test_validate_quick(tmp_path, capsys):
    assert cli.main(["validate", "--quick", "--output-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "validation_report.json").read_text())
    assert report
    assert "all checks passed" in capsys.readouterr().out
