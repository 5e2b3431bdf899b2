import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pqnorm.cli import main, parse_exponent
from pqnorm.matrix_io import matrix_to_json, parse_matrix_json, read_matrix, write_matrix


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text else None), text


@pytest.fixture
def mat3(tmp_path):
    path = tmp_path / "a.csv"
    write_matrix(path, np.random.default_rng(0).standard_normal((3, 3)))
    return str(path)


class TestExponents:
    @pytest.mark.parametrize("text, value", [("inf", math.inf), ("4/3", 4 / 3), ("2", 2.0), (" Infinity", math.inf)])
    def test_parse(self, text, value):
        assert parse_exponent(text) == value

    def test_bad(self):
        code, _, _ = run("certify", "--p", "x", "--q", "1")
        assert code == 2


class TestMatrixIO:
    def test_json_round_trip(self, tmp_path):
        A = np.arange(6.0).reshape(2, 3)
        path = tmp_path / "m.json"
        write_matrix(path, A)
        np.testing.assert_array_equal(read_matrix(path), A)
        assert matrix_to_json(A) == {"m": 2, "n": 3, "entries": [0, 1, 2, 3, 4, 5]}

    def test_csv_round_trip(self, tmp_path):
        A = np.random.default_rng(1).standard_normal((2, 2))
        path = tmp_path / "m.csv"
        write_matrix(path, A)
        np.testing.assert_array_equal(read_matrix(path), A)

    def test_bad_json(self):
        with pytest.raises(ValueError):
            parse_matrix_json({"m": 2, "n": 2, "entries": [1, 2, 3]})
        with pytest.raises(ValueError):
            parse_matrix_json({"entries": []})

    def test_ragged_csv(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(ValueError):
            read_matrix(path)


class TestNorm:
    @pytest.mark.parametrize("method", ["power", "grid", "cp", "round"])
    def test_methods(self, mat3, method):
        code, doc, _ = run("norm", mat3, "--p", "inf", "--q", "1", "--method", method)
        assert code == 0
        assert doc["schema"] == "pqnorm/1" and doc["method"] == method
        assert doc["value"] > 0

    def test_identity_grid(self, tmp_path):
        path = tmp_path / "id.json"
        path.write_text(json.dumps({"m": 2, "n": 2, "entries": [1, 0, 0, 1]}))
        code, doc, _ = run("norm", str(path), "--p", "inf", "--q", "1", "--method", "grid")
        assert code == 0 and doc["value"] == 2.0
        assert doc["p"] == "inf"

    def test_ordering(self, mat3):
        vals = {m: run("norm", mat3, "--p", "4", "--q", "4/3", "--method", m)[1]["value"]
                for m in ("power", "cp", "round")}
        assert vals["round"] <= vals["power"] + 1e-9 <= vals["cp"] + 2e-9

    def test_missing_file(self, tmp_path):
        code, doc, _ = run("norm", str(tmp_path / "nope.csv"), "--p", "2", "--q", "2")
        assert code == 1 and doc["error"] == "FileNotFoundError"

    def test_bad_exponents(self, mat3):
        code, doc, _ = run("norm", mat3, "--p", "1.5", "--q", "2", "--method", "cp")
        assert code == 1 and doc["error"] == "ValueError"


class TestCertify:
    def test_grothendieck(self):
        code, doc, _ = run("certify", "--p", "inf", "--q", "1")
        assert code == 0
        assert doc["ratio"] == pytest.approx(1.7822, abs=1e-4)
        assert doc["c1c2_ok"] is True

    def test_sign_grid(self):
        code, doc, _ = run("certify", "--p", "4", "--q", "4/3", "--grid-step", "0.25", "--certified")
        assert code == 0 and doc["certified"] is True and doc["sign_pattern"]["ok"] is True


class TestRound:
    def test_round(self, mat3):
        code, doc, _ = run("round", mat3, "--p", "4", "--q", "4/3", "--trials", "50", "--seed", "3")
        assert code == 0
        assert doc["rounded"]["seed"] == 3
        assert doc["rounded"]["value"] >= doc["guarantee"] / 1.05


class TestVerify:
    def test_coeffs(self):
        code, doc, _ = run("verify", "coeffs", "--kmax", "9", "--grid-step", "0.25")
        assert code == 0 and doc["pass"] is True and len(doc["per_k"]) == 5

    def test_identity(self):
        code, doc, _ = run("verify", "identity", "--a", "0.3", "--b", "0.7", "--rho", "0.5", "--samples", "20000")
        assert code == 0 and doc["pass"] is True

    def test_duality(self):
        code, doc, _ = run("verify", "duality", "--count", "3")
        assert code == 0 and doc["pass"] is True and len(doc["reports"]) == 3

    def test_kron(self):
        code, doc, _ = run("verify", "kron", "--count", "2")
        assert code == 0 and doc["pass"] is True

    def test_kron_refused(self):
        code, doc, _ = run("verify", "kron", "--p", "4", "--q", "2")
        assert code == 1 and "p <= q" in doc["message"]

    def test_embedding(self):
        code, doc, _ = run("verify", "embedding", "--n", "2", "--m", "2000", "--trials", "20")
        assert code == 0 and doc["q"] == 4.0

    def test_unknown(self):
        assert run("verify", "nothing")[0] == 2


class TestSeeds:
    def test_env_seed(self, mat3, monkeypatch):
        monkeypatch.setenv("PQNORM_SEED", "17")
        _, doc, _ = run("norm", mat3, "--p", "2", "--q", "2")
        assert doc["seed"] == 17

    def test_explicit_seed_wins(self, mat3, monkeypatch):
        monkeypatch.setenv("PQNORM_SEED", "17")
        _, doc, _ = run("norm", mat3, "--p", "2", "--q", "2", "--seed", "4")
        assert doc["seed"] == 4

    def test_byte_identical_subprocess(self, mat3):
        cmd = [sys.executable, "-m", "pqnorm", "round", mat3, "--p", "inf", "--q", "1", "--trials", "30", "--seed", "5"]
        a = subprocess.run(cmd, capture_output=True, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, check=True).stdout
        assert a == b and a

    def test_usage_exit(self):
        proc = subprocess.run([sys.executable, "-m", "pqnorm"], capture_output=True)
        assert proc.returncode == 2
