import json

import pytest

from ladderlab.cli import main
from ladderlab.ladders import spec_to_json
from ladderlab.modarith import Ring
from ladderlab.modexp import masked_semi_spec


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exp_montgomery_example(capsys):
    code, out, _ = run_cli(capsys, "exp", "--algo", "montgomery", "--a", "2", "--k", "5", "--n", "1000")
    assert code == 0
    doc = json.loads(out)
    assert doc["x"] == "32"
    assert doc["y"] == "64"


def test_exp_accepts_hex_and_counts_ops(capsys):
    code, out, _ = run_cli(
        capsys, "exp", "--algo", "semi", "--a", "0x7", "--k", "0x3e8", "--n", "99991",
        "--mask", "fresh", "--count-ops",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["cost_per_bit"] == {"mul": "5/1", "sq": "2/1", "add": "3/1"}


def test_exp_fully_with_explicit_constant(capsys):
    code, out, _ = run_cli(
        capsys, "exp", "--algo", "fully", "--a", "2", "--k", "5", "--n", "7", "--ell", "3", "--trace",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc == json.loads(out)  # parse sanity
    assert doc["x"] == "4"
    assert doc["y"] == "5"
    assert doc["constants"]["ell"] == "3"
    assert doc["trace"]["x"][0] == "1"


def test_exp_fully_rejects_bad_constant(capsys):
    code, _, err = run_cli(
        capsys, "exp", "--algo", "fully", "--a", "5", "--k", "3", "--n", "13", "--ell", "7",
    )
    assert code == 3
    assert "constraint" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["exp", "--algo", "warp", "--a", "1", "--k", "1", "--n", "7"])
    assert exc.value.code == 2


def test_verify_roundtrip(tmp_path, capsys):
    ring = Ring(101)
    doc = spec_to_json(ring, masked_semi_spec(ring, 5, 17))
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "verify", "--spec", str(path))
    assert code == 0
    result = json.loads(out)
    assert result == {"kind": "semi", "n": "101", "ok": True, "counterexamples": []}

    doc["f"]["c11"] = str((int(doc["f"]["c11"]) + 1) % 101)
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "verify", "--spec", str(path))
    assert code == 0
    result = json.loads(out)
    assert result["ok"] is False
    assert 0 < len(result["counterexamples"]) <= 16


def test_attack_subcommand_full_accuracy(capsys):
    code, out, _ = run_cli(
        capsys, "--seed", "9", "attack", "--model", "2", "--target", "montgomery",
        "--bits", "8", "--trials", "3",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["aggregate"]["accuracy"] == 1.0
    assert len(doc["trials"]) == 3
    assert all(t["recovered"] == t["key"] for t in doc["trials"])


def test_prob_dsa_exact(capsys):
    code, out, _ = run_cli(capsys, "prob", "--mode", "dsa-exact", "--n", "13")
    assert code == 0
    doc = json.loads(out)
    assert doc["exact"] == "84/90"
    assert doc["formula"] == "14/15"
    assert doc["match"] is True


def test_prob_gauss(capsys):
    code, out, _ = run_cli(capsys, "prob", "--mode", "gauss", "--p", "13", "--r", "3")
    doc = json.loads(out)
    assert doc["residue_count"] == 4
    assert doc["roots_per_residue"] == {"1": 3, "5": 3, "8": 3, "12": 3}


def test_prob_rsa_bound_and_sample(capsys):
    code, out, _ = run_cli(capsys, "prob", "--mode", "rsa-bound", "--p", "11", "--q", "13")
    assert json.loads(out)["bound"] == "106/139"
    code, out, _ = run_cli(
        capsys, "--seed", "5", "prob", "--mode", "rsa-sample", "--p", "65537", "--q", "65539",
        "--samples", "500",
    )
    doc = json.loads(out)
    assert doc["samples"] == 500


def test_ecc_subcommand(capsys, small_curve):
    curve, A, N = small_curve
    base = ["ecc", "--p", str(curve.p), "--a", str(curve.a), "--b", str(curve.b),
            "--Ax", str(A.x), "--Ay", str(A.y), "--order", str(N), "--k", "29"]
    code, out, _ = run_cli(capsys, *base, "--algo", "daa")
    want = json.loads(out)["result"]
    for algo in ("montgomery", "semi", "fully"):
        code, out, _ = run_cli(capsys, *base, "--algo", algo)
        assert code == 0
        doc = json.loads(out)
        assert doc["result"] == want
        assert doc["invariant_ok"] is True
        assert doc["point_adds"] > 0


def test_byte_identical_output_for_same_seed(capsys):
    argv = ["--seed", "123", "attack", "--model", "3", "--target", "fully",
            "--bits", "6", "--trials", "2"]
    _, out1, _ = run_cli(capsys, *argv)
    _, out2, _ = run_cli(capsys, *argv)
    assert out1 == out2


def test_env_seed_default(capsys, monkeypatch):
    monkeypatch.setenv("LADDERLAB_SEED", "123")
    argv = ["attack", "--model", "3", "--target", "montgomery", "--bits", "6", "--trials", "1"]
    _, out1, _ = run_cli(capsys, *argv)
    monkeypatch.delenv("LADDERLAB_SEED")
    _, out2, _ = run_cli(capsys, "--seed", "123", *argv)
    assert out1 == out2


def test_jsonl_and_csv_formats(capsys):
    argv = ["--seed", "1", "attack", "--model", "3", "--target", "montgomery",
            "--bits", "4", "--trials", "2"]
    _, out, _ = run_cli(capsys, "--format", "jsonl", *argv[2:])
    lines = [json.loads(line) for line in out.strip().split("\n")]
    assert len(lines) == 2

    _, out, _ = run_cli(capsys, "--format", "csv", *argv[2:])
    header = out.splitlines()[0]
    assert header.startswith("trial,")


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    code, out, _ = run_cli(capsys, "--out", str(path), "prob", "--mode", "dsa-formula", "--n", "13")
    assert code == 0
    assert out == ""
    assert json.loads(path.read_text())["formula"] == "14/15"
