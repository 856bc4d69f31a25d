import json
import subprocess
import sys

import numpy as np
import pytest

from chandef import corpus
from chandef.cli import EXIT_DIM, EXIT_OK, EXIT_PARSE, main
from chandef.hmap import identity_map
from chandef.jsonio import map_to_json


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def id2(tmp_path):
    return _write(tmp_path / "id2.json", map_to_json(identity_map(2)))


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_norm_of_identity(id2, capsys):
    code, rep = _run(["norm", "--family", "cp", "--map", id2], capsys)
    assert code == EXIT_OK
    assert rep["value_lo"] == pytest.approx(1, abs=1e-9) and rep["value_hi"] == pytest.approx(1, abs=1e-9)


def test_dual_norm_of_identity(id2, capsys):
    # Paired with itself the identity gives s(id) = d² = 4.
    code, rep = _run(["dual-norm", "--map", id2], capsys)
    assert code == EXIT_OK and rep["value_hi"] == pytest.approx(4, abs=1e-6)


def test_post_deficiency_reflexive(tmp_path, capsys):
    phi = _write(tmp_path / "phi.json", map_to_json(corpus.random_channel(3, 2, 2)))
    code, rep = _run(["deficiency-post", "--family", "cp", "--phi", phi, "--psi", phi], capsys)
    assert code == EXIT_OK and rep["eps_hi"] <= 1e-7 and rep["zero_within_tol"]


def test_pre_deficiency_with_decision_algebra(tmp_path, capsys):
    phi = _write(tmp_path / "phi.json", map_to_json(identity_map(2)))
    psi = _write(tmp_path / "psi.json", map_to_json(corpus.depolarizing(2, 0.5)))
    code, rep = _run(["deficiency-pre", "--phi", phi, "--psi", psi, "--decision-alg", "1,1"], capsys)
    assert code == EXIT_OK and rep["eps_lo"] == pytest.approx(0.25, abs=1e-6)
    assert not rep["zero_within_tol"]


def test_cleanness_and_experiment(tmp_path, capsys):
    M = _write(tmp_path / "m.json", [np.diag([1.0, 0.0]).tolist(), np.diag([0.0, 1.0]).tolist()])
    code, rep = _run(["cleanness", "--M", M, "--N", M], capsys)
    assert code == EXIT_OK and rep["eps_hi"] <= 1e-7
    E = _write(tmp_path / "e.json", [np.diag([1.0, 0.0]).tolist(), (np.eye(2) / 2).tolist()])
    code, rep = _run(["experiment", "--E", E, "--F", E, "--direction", "pre"], capsys)
    assert code == EXIT_OK and rep["eps_hi"] <= 1e-7


def test_ovs_command(tmp_path, capsys):
    sec = _write(tmp_path / "s.json", {"cone": {"generators": np.eye(2).tolist()},
                                       "base_functional": [1, 1], "x": [1, -2]})
    code, rep = _run(["ovs", "--section", sec], capsys)
    assert code == EXIT_OK and rep["norm"] == pytest.approx(3) and rep["dual_norm"] == pytest.approx(2)


def test_missing_file_is_parse_error(capsys):
    assert main(["norm", "--map", "/nonexistent/x.json"]) == EXIT_PARSE


def test_bad_json_is_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["norm", "--map", str(p)]) == EXIT_PARSE


def test_bad_choi_shape_is_dimension_error(tmp_path, capsys):
    p = _write(tmp_path / "m.json", {"in_blocks": [2], "out_blocks": [2], "choi": np.eye(3).tolist()})
    assert main(["norm", "--map", p]) == EXIT_DIM


def test_bad_seed_is_rejected():
    with pytest.raises(SystemExit):
        main(["verify", "--seed", "-1"])


def test_verify_is_deterministic(capsys):
    code1, _ = _run(["verify", "--seed", "42", "--suite", "matops", "--suite", "ovs"], capsys)
    out1 = capsys.readouterr().out
    main(["verify", "--seed", "42", "--suite", "matops", "--suite", "ovs"])
    a = capsys.readouterr().out
    main(["verify", "--seed", "42", "--suite", "matops", "--suite", "ovs"])
    b = capsys.readouterr().out
    assert code1 == EXIT_OK and a == b and out1 == ""


def test_verify_full_build_as_subprocess(tmp_path):
    out = tmp_path / "v.json"
    res = subprocess.run([sys.executable, "-m", "chandef.cli", "verify", "--seed", "42", "--out", str(out)],
                         capture_output=True, text=True, timeout=300)
    assert res.returncode == 0, res.stderr
    rep = json.loads(out.read_text())
    assert rep["failed"] == 0 and rep["passed"] > 20
