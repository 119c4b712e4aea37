import json
import subprocess
import sys

import pytest

from bergman_offdiag.cli import main, parse_grid
from bergman_offdiag.serialize import jet_to_dict
from bergman_offdiag.oracles import fubini_study_jet
from bergman_offdiag.series import make_jet


@pytest.fixture
def fs_file(tmp_path):
    path = tmp_path / "fs.json"
    path.write_text(json.dumps(jet_to_dict(fubini_study_jet(1, 6))))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_grid():
    assert parse_grid("64..512") == [64, 128, 256, 512]
    assert parse_grid("10,20,40") == [10, 20, 40]


def test_coeffs_json(capsys, fs_file):
    code, out, _ = run(capsys, "coeffs", "--input", fs_file, "--max-r", "4")
    assert code == 0
    payload = json.loads(out)
    assert list(payload["bs"]) == ["b1", "b2", "b3", "b4"]


def test_coeffs_text_and_output_file(capsys, fs_file, tmp_path):
    target = tmp_path / "out.txt"
    code, out, _ = run(capsys, "coeffs", "--input", fs_file, "--max-r", "3", "--format", "text",
                       "--output", str(target))
    assert code == 0 and out == ""
    text = target.read_text()
    assert text.startswith("b1 = 0") and "b3 = 0" in text


def test_b6_rejected(capsys, fs_file):
    code, _, err = run(capsys, "coeffs", "--input", fs_file, "--max-r", "6")
    assert code == 2
    assert "b6 requires alpha3 (out of scope)" in err


def test_normalize_and_curvature(capsys, tmp_path):
    jet = make_jet(1, 5, {((2,), (1,)): 1, ((1,), (2,)): 1}, identity_quadratic=True)
    path = tmp_path / "cubic.json"
    path.write_text(json.dumps(jet_to_dict(jet)))
    code, out, _ = run(capsys, "normalize", "--input", str(path), "--order", "5")
    assert code == 0 and json.loads(out)["k_form"] is True
    code, out, _ = run(capsys, "curvature", "--input", str(path))
    assert code == 0 and "scalars" in json.loads(out)


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "curvature", "--input", str(tmp_path / "missing.json"))
    assert code == 2 and err.startswith("error: ValidationError")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"m": 1, "order": 4, "terms": [{"J": [2], "K": [2], "re": "0", "im": "1"}]}))
    code, _, err = run(capsys, "curvature", "--input", str(bad))
    assert code == 2 and "RealityViolation" in err
    code, _, err = run(capsys, "coeffs")
    assert code == 2


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "cross", "--count", "3", "--format", "text")
    assert code == 0 and out.startswith("cross: PASS (3 checks")


def test_oracle_flat_is_exact(capsys):
    code, out, _ = run(capsys, "oracle", "flat", "--experiment", "fit", "--r", "4", "--N", "64,128")
    assert code == 0 and json.loads(out)["fit"]["exact"] is True


def test_oracle_fs_short_fit(capsys):
    code, out, _ = run(capsys, "oracle", "fubini-study", "--r", "2", "--N", "256..1024")
    payload = json.loads(out)
    assert code == 0 and payload["expected"] == -2.0


def test_module_entry_point(fs_file):
    proc = subprocess.run([sys.executable, "-m", "bergman_offdiag", "coeffs", "--input", fs_file,
                           "--max-r", "2", "--method", "closed"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["method"] == "closed"


def test_normalize_order_too_high(capsys, fs_file):
    code, _, err = run(capsys, "normalize", "--input", fs_file, "--order", "9")
    assert code == 2 and "OrderTooLow" in err


def test_runs_are_byte_identical(capsys, tmp_path):
    outs = []
    for k in range(2):
        target = tmp_path / f"run{k}.json"
        assert main(["verify", "homogeneity", "--seed", "4", "--count", "2", "--t", "2",
                     "--output", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
