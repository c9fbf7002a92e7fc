import json

import pytest

from sqzero.cli import main
from sqzero.counterexample import build_counterexample_T
from sqzero.exactmat import Matrix, matmul
from sqzero.matio import parse_matrix_text, write_matrix_file
from sqzero.squarezero import SquareZeroWitness, verify_witness


@pytest.fixture
def files(tmp_path):
    paths = {}
    mats = {
        "e13": Matrix.elementary(3, 0, 2),
        "e12": Matrix.elementary(3, 0, 1),
        "e23": Matrix.elementary(3, 1, 2),
        "e21": Matrix.elementary(3, 1, 0),
        "identity": Matrix.identity(3),
        "t11": build_counterexample_T(),
        "small": Matrix.elementary(2, 0, 1),
    }
    for name, mat in mats.items():
        p = tmp_path / f"{name}.mat"
        write_matrix_file(p, mat)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestAnalyze:
    def test_yes_with_witness(self, capsys, files):
        code, doc = run(capsys, "analyze", files["e13"])
        assert code == 0
        assert doc["verdict"]["answer"] == "yes"
        w = doc["verdict"]["witness"]
        m = parse_matrix_text("3 3\n" + "\n".join(" ".join(r) for r in w["M"]["entries"]))
        n = parse_matrix_text("3 3\n" + "\n".join(" ".join(r) for r in w["N"]["entries"]))
        target = Matrix.elementary(3, 0, 2)
        assert verify_witness(SquareZeroWitness(m, n), target).all_hold

    def test_counterexample_is_no(self, capsys, files):
        code, doc = run(capsys, "analyze", files["t11"])
        assert code == 1
        assert doc["necessary_condition_holds"] is True
        assert doc["verdict"]["nonneg_rank_bounds"]["lower"] == 4
        assert len(doc["verdict"]["partition"]["i2"]) == 3
        assert "4 > dim L2 = 3" in doc["verdict"]["obstruction"]

    def test_identity_obstruction(self, capsys, files):
        code, doc = run(capsys, "analyze", files["identity"])
        assert code == 1
        assert doc["verdict"]["obstruction"] == "T^2 != 0"

    def test_malformed_input(self, capsys, tmp_path):
        bad = tmp_path / "bad.mat"
        bad.write_text("2 2\n1 2\n")
        code = main(["analyze", str(bad)])
        capsys.readouterr()
        assert code == 64

    def test_negative_entry(self, capsys, tmp_path):
        bad = tmp_path / "neg.mat"
        bad.write_text("2 2\n0 -1\n0 0\n")
        code = main(["analyze", str(bad)])
        capsys.readouterr()
        assert code == 64


class TestVerify:
    def test_good_triple(self, capsys, files):
        code, doc = run(capsys, "verify", files["e13"], files["e12"], files["e23"])
        assert code == 0
        assert doc["all_hold"]

    def test_swapped_factors(self, capsys, files):
        code, doc = run(capsys, "verify", files["e13"], files["e23"], files["e12"])
        assert code == 1
        assert doc["identities"]["T=MN"] is False

    def test_dimension_mismatch(self, capsys, files):
        code = main(["verify", files["e13"], files["e12"], files["small"]])
        capsys.readouterr()
        assert code == 64


class TestCommutator:
    def test_nonnegative(self, capsys, files):
        code, doc = run(capsys, "commutator", files["e12"], files["e23"])
        assert code == 0
        assert doc["analysis"]["necessary_condition_holds"]

    def test_negative_commutator(self, capsys, files):
        code, doc = run(capsys, "commutator", files["e23"], files["e12"])
        assert code == 3
        assert doc["analysis"]["is_nonnegative"] is False

    def test_square_zero_pair_with_sign_indefinite_commutator(self, capsys, files):
        # E12 and E21 are both square-zero, so the precondition holds and the
        # indefinite commutator E11 - E22 reports exit 3, not 64
        code, doc = run(capsys, "commutator", files["e12"], files["e21"])
        assert code == 3

    def test_precondition_failure(self, capsys, files):
        code = main(["commutator", files["identity"], files["e12"]])
        capsys.readouterr()
        assert code == 64


class TestCounterexampleCommand:
    def test_default_run(self, capsys):
        code, doc = run(capsys, "counterexample", "--lemma-trials", "200")
        assert code == 0
        assert doc["all_claims_reproduced"]
        assert doc["claims"]["rank_t13_is_3"]
        assert doc["t13_bounds"]["lower"] == 4 and doc["t13_bounds"]["upper"] == 4
        assert doc["lemma_fuzz"]["failures"] == 0

    def test_lemma_skipped(self, capsys):
        code, doc = run(capsys, "counterexample", "--lemma-trials", "0")
        assert code == 0
        assert doc["lemma_fuzz"] == {"skipped": True}


class TestFuzz:
    def write_config(self, tmp_path, **overrides):
        cfg = {"seed": 4, "dims": [2, 2, 2], "inner_dim": 2, "cases": 30, "commutator_cases": 10}
        cfg.update(overrides)
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg))
        return str(p)

    def test_clean_run(self, capsys, tmp_path):
        code, doc = run(capsys, "fuzz", self.write_config(tmp_path), "--out-dir", str(tmp_path))
        assert code == 0
        assert doc["violations"] == []
        assert doc["commutator_cases_accepted"] >= 1

    def test_deterministic_reports(self, capsys, tmp_path):
        cfg = self.write_config(tmp_path)
        _, doc1 = run(capsys, "fuzz", cfg, "--out-dir", str(tmp_path))
        _, doc2 = run(capsys, "fuzz", cfg, "--out-dir", str(tmp_path))
        doc1.pop("timing_seconds")
        doc2.pop("timing_seconds")
        assert doc1 == doc2

    def test_self_test_mutant_caught(self, capsys, tmp_path):
        code, doc = run(
            capsys,
            "fuzz",
            self.write_config(tmp_path),
            "--self-test-mutate",
            "--out-dir",
            str(tmp_path),
        )
        assert code != 0
        assert doc["violations"]
        repro = doc["violations"][0]["reproducer"]
        assert repro and all((tmp_path / p.split("/")[-1]).exists() for p in repro)

    def test_invalid_config(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"dims": [1, 1]}')
        code = main(["fuzz", str(p)])
        capsys.readouterr()
        assert code == 64
