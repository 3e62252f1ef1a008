import json
import subprocess
import sys

import numpy as np
import pytest

from eigenorient.cli import main, read_csv, write_csv
from eigenorient.errors import ParseError
from eigenorient.synthkit import random_orthonormal


def run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def error_of(capsys, argv):
    assert main(argv) == 2
    return json.loads(capsys.readouterr().err)


@pytest.fixture
def reflected_qr_csv(tmp_path):
    A = np.eye(3)
    A[:, 0] = 1.0 / np.sqrt(3)
    V, _ = np.linalg.qr(A)
    path = tmp_path / "v.csv"
    write_csv(str(path), V @ np.diag([1.0, -1.0, 1.0]))
    return path


@pytest.fixture
def panel(tmp_path):
    path = tmp_path / "panel.csv"
    assert main(["synth", "--axes", "3,2,1", "--theta", "30,-20,25", "--m", "480",
                 "--beta", "1,-0.7,0.5", "--y-noise", "0.1", "--seed", "3", "-o", str(path)]) == 0
    return path


def test_csv_round_trip(tmp_path):
    M = np.array([[1.5, -2.0], [3.25, 4.0]])
    write_csv(str(tmp_path / "m.csv"), M, ["a", "b"])
    data, header = read_csv(str(tmp_path / "m.csv"))
    np.testing.assert_array_equal(data, M)
    assert header == ["a", "b"]
    (tmp_path / "bad.csv").write_text("1,2\n3\n")
    with pytest.raises(ParseError, match="differing numbers of fields"):
        read_csv(str(tmp_path / "bad.csv"))


def test_orient_command(capsys, reflected_qr_csv):
    doc = run_json(capsys, ["orient", str(reflected_qr_csv)])
    assert doc["signs"] == [-1, 1, 1]
    assert doc["theta_unit"] == "deg"
    np.testing.assert_allclose(doc["theta"], [[0, 45, 35.2643896828], [0, 0, -30], [0, 0, 0]], atol=1e-8)
    rad = run_json(capsys, ["orient", str(reflected_qr_csv), "--angle-unit", "rad"])
    np.testing.assert_allclose(rad["theta"][0][1], np.pi / 4, atol=1e-11)


def test_orient_then_generate_round_trip(capsys, tmp_path):
    V = random_orthonormal(6, seed=4)
    write_csv(str(tmp_path / "v.csv"), V)
    lam = np.array([0.5, 6.0, 2.0, -3.0, 1.0, 4.0])
    write_csv(str(tmp_path / "e.csv"), lam[None, :])
    out = tmp_path / "o.json"
    assert main(["orient", str(tmp_path / "v.csv"), "--eigenvalues", str(tmp_path / "e.csv"), "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["sort_indices"] == [1, 5, 3, 2, 4, 0]
    gen = run_json(capsys, ["generate", str(out)])
    np.testing.assert_allclose(gen["Vor"], doc["Vor"], atol=1e-9)


def test_generate_from_csv_and_upto(capsys, tmp_path):
    theta = np.zeros((3, 3))
    theta[0, 1] = 90.0
    write_csv(str(tmp_path / "t.csv"), theta)
    doc = run_json(capsys, ["generate", str(tmp_path / "t.csv"), "--upto", "1"])
    np.testing.assert_allclose(doc["Vor"], [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-12)
    assert doc["upto"] == 1


def test_track_dispersion_pipeline(capsys, panel, tmp_path):
    series = tmp_path / "series"
    track = tmp_path / "track.json"
    assert main(["track", str(panel), "--y-column", "y", "--window-len", "48", "-o", str(track),
                 "--series-dir", str(series), "--inject-flips", "5"]) == 0
    doc = json.loads(track.read_text())
    assert len(doc["windows"]) == 10
    assert doc["oriented"] is True
    betas = np.array([w["beta"] for w in doc["windows"]])
    assert np.all(np.sign(betas) == np.sign(betas[0]))
    data, header = read_csv(str(series / "theta.csv"))
    assert header == ["window", "t1_2", "t1_3", "t2_3"] and data.shape == (10, 4)
    assert (series / "beta.csv").exists() and (series / "signs.csv").exists()
    disp = run_json(capsys, ["dispersion", str(track), "--series-dir", str(series), "--refine"])
    assert disp["count"] == 10
    assert disp["kappa_capped"] == [False, False, True]
    np.testing.assert_allclose(disp["theta_bar"][0][1:], [30, -20], atol=5)
    assert (series / "kappa.csv").exists()


def test_track_baseline_shows_flips(capsys, panel):
    doc = run_json(capsys, ["track", str(panel), "--y-column", "y", "--window-len", "48",
                            "--inject-flips", "5", "--no-orient"])
    betas = np.array([w["beta"] for w in doc["windows"]])
    assert np.any(np.sign(betas) != np.sign(betas[0]))


def test_regress_with_prediction(capsys, panel, tmp_path):
    data, _ = read_csv(str(panel))
    write_csv(str(tmp_path / "out.csv"), data[:5, :3])
    doc = run_json(capsys, ["regress", str(panel), "--y-column", "y", "--predict", str(tmp_path / "out.csv")])
    P = data[:, :3] - data[:, :3].mean(axis=0)
    oracle, *_ = np.linalg.lstsq(P @ np.array(doc["Vor"]), data[:, 3] - data[:, 3].mean(), rcond=None)
    np.testing.assert_allclose(doc["beta"], oracle, atol=1e-8)
    np.testing.assert_allclose(doc["beta"], [1.0, -0.7, 0.5], atol=0.15)
    np.testing.assert_allclose(doc["predictions"], data[:5, 3], atol=0.5)
    trunc = run_json(capsys, ["regress", str(panel), "--y-column", "y", "--q", "2"])
    assert trunc["q"] == 2 and len(trunc["beta"]) == 2


def test_orient_from_panel(capsys, panel):
    doc = run_json(capsys, ["orient", str(panel), "--from-panel"])
    assert doc["n"] == 4


def test_error_reporting(capsys, tmp_path, panel):
    write_csv(str(tmp_path / "bad.csv"), 1.01 * np.eye(3))
    err = error_of(capsys, ["orient", str(tmp_path / "bad.csv")])
    assert err["error"] == "ValidationError" and err["type"] == "NonOrthonormalInput"
    (tmp_path / "ragged.csv").write_text("1,0\n0\n")
    assert error_of(capsys, ["orient", str(tmp_path / "ragged.csv")])["error"] == "ParseError"
    assert error_of(capsys, ["orient", str(tmp_path / "missing.csv")])["error"] == "IOError"
    assert error_of(capsys, ["regress", str(panel)])["error"] == "ParseError"
    assert error_of(capsys, ["regress", str(panel), "--y-column", "nope"])["error"] == "ParseError"
    assert error_of(capsys, ["synth", "--axes", "1,2,3"])["error"] == "ValidationError"
    assert error_of(capsys, ["synth", "--axes", "3,x"])["error"] == "ParseError"


def test_error_names_failing_window(capsys, tmp_path):
    rows = np.random.default_rng(0).standard_normal((60, 3))
    rows[30:, 1] = 0.0
    rows[30:, 2] = 0.0
    write_csv(str(tmp_path / "p.csv"), rows, ["p1", "p2", "y"])
    err = error_of(capsys, ["track", str(tmp_path / "p.csv"), "--y-column", "y", "--window-len", "30"])
    assert err["window"] == 1 and err["type"] == "SingularDesign"


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "eigenorient", "synth", "--axes", "2,1", "--m", "5",
                          "--seed", "1"], capture_output=True, text=True, check=True)
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "p1,p2" and len(lines) == 6


def test_orient_identity_and_schema(capsys, tmp_path):
    write_csv(str(tmp_path / "i.csv"), np.eye(4))
    doc = run_json(capsys, ["orient", str(tmp_path / "i.csv")])
    assert {"n", "signs", "theta", "theta_unit", "sort_indices", "Vor"} <= set(doc)
    assert doc["signs"] == [1, 1, 1, 1]
    assert np.all(np.array(doc["theta"]) == 0)


def test_track_beta_csv_has_no_sign_changes(capsys, panel, tmp_path):
    series = tmp_path / "s"
    doc = run_json(capsys, ["track", str(panel), "--y-column", "y", "--window-len", "48",
                            "--inject-flips", "9", "--series-dir", str(series)])
    assert {"k", "signs", "theta", "beta", "eigenvalues"} <= set(doc["windows"][0])
    beta, header = read_csv(str(series / "beta.csv"))
    assert header == ["window", "beta1", "beta2", "beta3"]
    s = np.sign(beta[:, 1:])
    assert np.all(s[1:] * s[:-1] > 0)
    track = tmp_path / "t.json"
    track.write_text(json.dumps(doc))
    disp = run_json(capsys, ["dispersion", str(track)])
    assert {"r_bar", "circular_variance", "kappa_basis", "lambda_bar", "theta_bar"} <= set(disp)
