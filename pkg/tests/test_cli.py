import json
import math

import numpy as np
import pytest

from seqprod import Effect
from seqprod.cli import main
from seqprod.serialize import document_to_matrix, dumps, matrix_to_document

import helpers


def write_doc(path, matrix):
    path.write_text(dumps(matrix_to_document(matrix)) + "\n")
    return str(path)


@pytest.fixture(autouse=True)
def clear_seed_env(monkeypatch):
    monkeypatch.delenv("SEQPROD_SEED", raising=False)


# ---------------------------------------------------------------------------
# matrix documents
# ---------------------------------------------------------------------------

def test_document_round_trip_is_exact():
    # document -> Effect -> document must not drift on Hermitian input
    rng = np.random.default_rng(0)
    m = helpers.random_effect(rng, 3).matrix
    doc = matrix_to_document(m)
    effect = Effect(document_to_matrix(doc))
    assert np.array_equal(effect.matrix, m)
    assert matrix_to_document(effect.matrix) == doc


def test_document_json_round_trip_17_digits():
    rng = np.random.default_rng(1)
    m = helpers.random_effect(rng, 2).matrix
    text = dumps(matrix_to_document(m))
    back = document_to_matrix(json.loads(text))
    assert np.array_equal(back, m)


def test_document_rejects_non_hermitian_and_malformed():
    from seqprod import ValidationError
    with pytest.raises(ValidationError):
        document_to_matrix({"dim": 2, "entries": [[0, 0], [1, 0], [0, 0], [0, 0]]})
    with pytest.raises(ValidationError):
        document_to_matrix({"dim": 2, "entries": [[0, 0]]})
    with pytest.raises(ValidationError):
        document_to_matrix({"entries": []})
    with pytest.raises(ValidationError):
        document_to_matrix({"dim": 1, "entries": [[math.nan, 0]]})


def test_dumps_formats_floats_deterministically():
    assert dumps(0.45) == "0.45000000000000001"
    assert dumps({"a": 1, "b": [True, None, "x"]}) == (
        '{\n  "a": 1,\n  "b": [\n    true,\n    null,\n    "x"\n  ]\n}'
    )


# ---------------------------------------------------------------------------
# product command
# ---------------------------------------------------------------------------

def test_product_identity_echoes_operand(tmp_path, capsys):
    rng = np.random.default_rng(2)
    b = helpers.random_effect(rng, 2).matrix
    a_file = write_doc(tmp_path / "a.json", np.eye(2))
    b_file = write_doc(tmp_path / "b.json", b)
    code = main(["product", a_file, b_file, "--form", "phased", "--t", "1"])
    assert code == 0
    out = document_to_matrix(json.loads(capsys.readouterr().out))
    assert np.abs(out - b).max() < 1e-12


def test_product_phased_vs_luders_off_diagonal(tmp_path, capsys):
    a = np.diag([0.81, 0.25])
    b = np.array([[0.5, 0.2], [0.2, 0.5]])
    a_file = write_doc(tmp_path / "a.json", a)
    b_file = write_doc(tmp_path / "b.json", b)

    assert main(["product", a_file, b_file, "--form", "phased", "--t", "1"]) == 0
    phased = document_to_matrix(json.loads(capsys.readouterr().out))
    theta = math.log(0.81) - math.log(0.25)
    expected = 0.45 * complex(math.cos(theta), math.sin(theta)) * 0.2
    assert abs(phased[0, 1] - expected) < 1e-12

    assert main(["product", a_file, b_file, "--form", "luders"]) == 0
    luders = document_to_matrix(json.loads(capsys.readouterr().out))
    assert abs(luders[0, 1] - 0.45 * 0.2) < 1e-12


def test_product_invalid_input_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    ok = write_doc(tmp_path / "ok.json", np.eye(2))
    assert main(["product", str(bad), ok]) == 2
    assert "error" in capsys.readouterr().err

    non_effect = write_doc(tmp_path / "neg.json", np.diag([-0.2, 0.5]))
    assert main(["product", non_effect, ok]) == 2
    err = capsys.readouterr().err
    assert "spectrum" in err

    non_hermitian = tmp_path / "nh.json"
    non_hermitian.write_text(dumps({"dim": 2, "entries": [[0, 0], [1, 0], [0, 0], [0, 0]]}))
    assert main(["product", str(non_hermitian), ok]) == 2
    assert "Hermitian" in capsys.readouterr().err

    missing = str(tmp_path / "missing.json")
    assert main(["product", missing, ok]) == 2
    capsys.readouterr()


def test_json_out_writes_same_bytes(tmp_path, capsys):
    a_file = write_doc(tmp_path / "a.json", np.eye(2))
    out_path = tmp_path / "result.json"
    code = main(["product", a_file, a_file, "--json-out", str(out_path)])
    assert code == 0
    assert out_path.read_text() == capsys.readouterr().out


# ---------------------------------------------------------------------------
# axioms command
# ---------------------------------------------------------------------------

def test_axioms_exit_zero_and_replay_determinism(capsys):
    argv = ["axioms", "--product", "phased", "--trials", "40",
            "--dims", "2,3", "--t", "0,1", "--seed", "4"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    payload = json.loads(first)
    assert payload["all_passed"] is True
    assert [g["t"] for g in payload["groups"]] == [0.0, 1.0]
    axioms = [r["axiom"] for r in payload["groups"][0]["reports"]]
    assert axioms == ["S1", "S2", "S3", "S4", "S5", "commutativity"]


def test_axioms_luders_single_group(capsys):
    assert main(["axioms", "--product", "luders", "--trials", "20",
                 "--dims", "2", "--seed", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["groups"]) == 1
    assert payload["groups"][0]["label"] == "luders"


def test_axioms_trivial_scalar_config(capsys):
    assert main(["axioms", "--trials", "1", "--dims", "1"]) == 0
    capsys.readouterr()


def test_axioms_broken_product_exits_three(capsys):
    code = main(["axioms", "--product", "raw", "--trials", "40",
                 "--dims", "3,4", "--seed", "0"])
    assert code == 3
    payload = json.loads(capsys.readouterr().out)
    assert payload["all_passed"] is False
    assert payload["groups"][0]["failures"] > 0


def test_axioms_seed_env_override(capsys, monkeypatch):
    assert main(["axioms", "--trials", "10", "--dims", "2", "--seed", "5"]) == 0
    baseline = json.loads(capsys.readouterr().out)
    assert baseline["config"]["seed"] == 5
    monkeypatch.setenv("SEQPROD_SEED", "99")
    assert main(["axioms", "--trials", "10", "--dims", "2", "--seed", "5"]) == 0
    overridden = json.loads(capsys.readouterr().out)
    assert overridden["config"]["seed"] == 99
    monkeypatch.setenv("SEQPROD_SEED", "not-a-number")
    assert main(["axioms", "--trials", "10", "--dims", "2"]) == 2
    capsys.readouterr()


def test_tol_override_flag(capsys):
    # an absurdly strict ceiling makes rounding noise count as failure
    code = main(["axioms", "--product", "phased", "--trials", "20",
                 "--dims", "4", "--tol", "defect=1e-18"])
    assert code == 3
    capsys.readouterr()
    assert main(["axioms", "--trials", "5", "--dims", "2",
                 "--tol", "bogus=1"]) == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# nonuniqueness command
# ---------------------------------------------------------------------------

def test_nonuniqueness_finds_witness(capsys):
    code = main(["nonuniqueness", "--trials", "100", "--dims", "2",
                 "--t", "1", "--seed", "0"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["found"] and payload["gap"] > 0.01
    assert payload["theta"] is not None


def test_nonuniqueness_commuting_restriction_exits_four(capsys):
    code = main(["nonuniqueness", "--kind", "commuting", "--trials", "50",
                 "--dims", "2", "--t", "1"])
    assert code == 4
    assert json.loads(capsys.readouterr().out)["gap"] <= 1e-9


def test_nonuniqueness_t_zero_exits_four(capsys):
    code = main(["nonuniqueness", "--trials", "50", "--dims", "2", "--t", "0"])
    assert code == 4
    assert json.loads(capsys.readouterr().out)["gap"] == 0.0


# ---------------------------------------------------------------------------
# channel command
# ---------------------------------------------------------------------------

def test_channel_identity_decomposition(tmp_path, capsys):
    d_file = tmp_path / "d.json"
    d_file.write_text(dumps([matrix_to_document(np.eye(2))]))
    rho = np.array([[0.7, 0.1j], [-0.1j, 0.3]])
    rho_file = write_doc(tmp_path / "rho.json", rho)
    assert main(["channel", str(d_file), rho_file, "--t", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["trace"] - 1.0) < 1e-12
    out = document_to_matrix(payload["output"])
    assert np.abs(out - rho).max() < 1e-12


def test_channel_two_effect_decomposition(tmp_path, capsys):
    rng = np.random.default_rng(3)
    a = helpers.random_effect(rng, 2).matrix
    d_file = tmp_path / "d.json"
    d_file.write_text(dumps([matrix_to_document(a),
                             matrix_to_document(np.eye(2) - a)]))
    rho_file = write_doc(tmp_path / "rho.json", helpers.random_density(rng, 2).matrix)
    assert main(["channel", str(d_file), rho_file, "--t", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["trace"] - 1.0) <= 1e-11
    assert payload["min_choi_eigenvalue"] >= -1e-10


def test_channel_invalid_decomposition_exits_two(tmp_path, capsys):
    rng = np.random.default_rng(4)
    a = helpers.random_effect(rng, 2).matrix
    d_file = tmp_path / "d.json"
    d_file.write_text(dumps([matrix_to_document(a), matrix_to_document(a)]))
    rho_file = write_doc(tmp_path / "rho.json", np.eye(2) / 2)
    assert main(["channel", str(d_file), rho_file]) == 2
    assert "identity" in capsys.readouterr().err


def test_usage_error_exits_two(capsys):
    assert main(["no-such-command"]) == 2
    capsys.readouterr()
