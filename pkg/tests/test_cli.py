import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from parskit import serialize
from parskit.cli import main
from parskit.corpus import builtin


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--json")
    return code, json.loads(text)


@pytest.fixture
def coin_file(tmp_path):
    p = tmp_path / "coin.json"
    p.write_text(serialize(builtin("coin_b").system))
    return str(p)


class TestValidate:
    def test_ok(self, coin_file):
        assert run("validate", coin_file)[0] == 0

    def test_sum_violation(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"kind": "pars", "states": ["0", "a"],
                                 "rules": [{"from": "0", "to": "a", "p": "1/2"}]}))
        code, rep = run_json("validate", str(p))
        assert code == 2
        assert "DistributionSum" in json.dumps(rep["results"])

    def test_missing_file(self, tmp_path):
        code, rep = run_json("validate", str(tmp_path / "absent.json"))
        assert code == 1 and rep["results"]["error"] == "IOError"
        assert rep["results"]["message"].startswith("cannot read")

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "junk.json"
        p.write_text("{")
        assert run("validate", str(p))[0] == 2


class TestAnalyze:
    @pytest.mark.parametrize("name,row", [("hindley_c", "+----+"),
                                          ("coin_b", "++-+++"), ("loop_a", "++----")])
    def test_rows(self, name, row):
        code, rep = run_json("analyze", f"corpus:{name}")
        assert code == 0 and rep["results"]["row"] == row

    def test_generated_needs_depth(self):
        assert run("analyze", "corpus:ladder_d")[0] == 3

    def test_generated_window(self):
        code, rep = run_json("analyze", "corpus:ladder_dprime", "--depth", "40")
        assert code == 0 and rep["results"]["row"] == "++-+++"

    def test_unknown_property(self):
        assert run("analyze", "corpus:coin_b", "--properties", "bogus")[0] == 1

    def test_file_input(self, coin_file):
        code, rep = run_json("analyze", coin_file, "--properties", "confluence,termination")
        assert code == 0 and set(rep["results"]["properties"]) == {"confluence", "termination"}


class TestProb:
    def test_hindley(self):
        code, rep = run_json("prob", "corpus:hindley_c", "--from", "0")
        assert code == 0
        assert rep["results"]["reach"] == {"a": "2/3", "b": "1/3"}
        assert rep["results"]["divergence"] == "0"

    def test_reducible_target(self):
        code, rep = run_json("prob", "corpus:loop_a", "--from", "0", "--to", "1")
        assert code == 3 and rep["results"]["error"] == "TargetNotNormalForm"
        assert "1 + 1 + 1" in rep["results"]["explanation"]

    def test_ladder_bracket(self):
        code, rep = run_json("prob", "corpus:ladder_d", "--from", "0", "--depth", "80", "--iterate", "60")
        assert code == 0
        div = rep["results"]["divergence"]
        lo = float(Fraction(div["lo"]))
        assert abs(lo - 0.68854) < 1e-5


class TestSimulate:
    def test_hindley(self):
        code, rep = run_json("simulate", "corpus:hindley_c", "--from", "0", "--seed", "7")
        assert code == 0 and abs(rep["results"]["estimates"]["a"] - 2 / 3) < 0.005

    def test_normal_form_start(self):
        code, rep = run_json("simulate", "corpus:hindley_c", "--from", "a", "--samples", "1")
        assert rep["results"]["counts"] == {"a": 1} and rep["results"]["censored"] == 0

    def test_bad_flags(self):
        assert run("simulate", "corpus:hindley_c", "--from", "0", "--samples", "0")[0] == 1

    def test_env_seed(self, monkeypatch):
        monkeypatch.setenv("PARSKIT_SEED", "12")
        _, a = run_json("simulate", "corpus:hindley_c", "--from", "0", "--samples", "5000")
        _, b = run_json("simulate", "corpus:hindley_c", "--from", "0", "--samples", "5000", "--seed", "12")
        assert a == b


class TestCertifyTransform:
    def test_random_walk(self):
        code, rep = run_json("certify", "corpus:random_walk", "--certificate", "corpus:random_walk",
                             "--depth", "200")
        assert code == 0 and rep["results"]["verdict"] == "evidence(depth 200)"
        assert rep["results"]["min_margin"] == {"state": "0", "margin": "1/3"}

    def test_certificate_file(self, tmp_path, coin_file):
        cert = tmp_path / "v.json"
        cert.write_text(json.dumps({"valuation": {"0": "3", "1": "2", "a": "0"}, "epsilon": "1/2"}))
        code, rep = run_json("certify", coin_file, "--certificate", str(cert))
        assert code == 0 and rep["results"]["verdict"] == "yes"

    def test_missing_valuation(self, tmp_path, coin_file):
        cert = tmp_path / "v.json"
        cert.write_text(json.dumps({"valuation": {"0": "3"}, "epsilon": "1"}))
        assert run("certify", coin_file, "--certificate", str(cert))[0] == 3

    def test_herman(self):
        code, rep = run_json("transform", "corpus:herman3_pruned/source", "corpus:herman3_pruned/target",
                             "--map", "corpus:herman3_pruned", "--as-term-cert", "corpus:herman3_pruned")
        assert code == 0 and rep["results"]["conclusion"] == "source_as_convergent"

    def test_partial_mapping(self, tmp_path):
        m = tmp_path / "m.json"
        m.write_text(json.dumps({"G": {"0": "0"}, "mode": "C"}))
        code = run("transform", "corpus:sec4_example", "corpus:sec4_example/target", "--map", str(m))[0]
        assert code == 3


class TestExportDot:
    def test_coin(self):
        code, text = run("export-dot", "corpus:coin_b")
        assert code == 0 and text.startswith("digraph pars {")
        assert text.count("->") == 3 and text.count("label=") == 3

    def test_herman(self):
        _, text = run("export-dot", "corpus:herman3")
        s = builtin("herman3").system
        assert text.count("->") == len(s.rules)
        for st in s.states:
            assert f'"{st}"' in text

    def test_empty(self, tmp_path):
        p = tmp_path / "e.json"
        p.write_text(json.dumps({"kind": "ars", "states": [], "rules": []}))
        _, text = run("export-dot", str(p))
        assert "->" not in text and text.strip().endswith("}")


class TestReports:
    def test_byte_reproducible(self):
        a = run("analyze", "corpus:hindley_c", "--json")[1]
        b = run("analyze", "corpus:hindley_c", "--json")[1]
        assert a == b and "timing" not in json.loads(a)

    def test_timing_opt_in(self):
        _, rep = run_json("analyze", "corpus:coin_b", "--timing")
        assert "seconds" in rep["timing"]

    def test_envelope(self):
        _, rep = run_json("validate", "corpus:coin_b")
        assert rep["schema"] == 1 and rep["tool"] == "parskit" and len(rep["input_digest"]) == 64

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "parskit.cli", "analyze", "corpus:coin_b"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and "row: ++-+++" in proc.stdout
