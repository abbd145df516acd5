import io
import json
import subprocess
import sys
from fractions import Fraction

import jsonschema
import pytest

from tameds import kostov
from tameds.cli import REPORT_SCHEMAS, run, weights_pipeline
from tameds.multgroup import MultElement
from tameds.parsing import load_problem, parse_eigenvalue, problem_document
from tameds.spectral import ClassSpec, ValidationError

HYPERGEOMETRIC = {
    "description": "three generic GL2 classes",
    "symbols": ["s0", "s1", "s2", "s3", "s4"],
    "classes": [
        {"eigenvalues": ["s0", "s1"], "multiplicities": [1, 1]},
        {"eigenvalues": ["s2", "s3"], "multiplicities": [1, 1]},
        {"eigenvalues": ["s4", "(s0*s1*s2*s3*s4)^-1"], "multiplicities": [1, 1]},
    ],
}

# four GL2 classes with eigenvalues 1 and -1: the anchor sits on rank-one walls
SIGNS = {"classes": [{"eigenvalues": [1, -1], "multiplicities": [1, 1]}] * 4}

# two unipotent Jordan blocks: every weight coordinate is pinned at zero
UNIPOTENT = {"classes": [{"eigenvalues": [1, 1], "ranks": [2, 1]}] * 2}


def kostov_doc(name, m, l):
    return problem_document(kostov.family(name, m, l).classes)


@pytest.fixture
def cli(tmp_path, capsys):
    def call(*argv, doc=None, json_out=False):
        argv = list(argv)
        if doc is not None:
            path = tmp_path / "problem.json"
            path.write_text(json.dumps(doc))
            argv.append(str(path))
        if json_out:
            argv.append("--json")
        code = run(argv)
        out, err = capsys.readouterr()
        if json_out and code in (0, 3):
            payload = json.loads(out)
            jsonschema.validate(payload, REPORT_SCHEMAS[argv[0]])
            return code, payload, err
        return code, out, err

    return call


class TestAnalyze:
    def test_solvable(self, cli):
        code, payload, _ = cli("analyze", doc=HYPERGEOMETRIC, json_out=True)
        assert code == 0 and payload["verdict"] == "SOLVABLE"
        assert payload["d"] == [2, 1, 1, 1]

    def test_unsolvable_family(self, cli):
        code, payload, _ = cli("analyze", doc=kostov_doc("D4t", 2, 1), json_out=True)
        assert code == 3 and payload["verdict"] == "UNSOLVABLE"
        assert payload["classification"]["kind"] == "Aff"

    def test_text_output(self, cli):
        code, out, _ = cli("analyze", doc=HYPERGEOMETRIC)
        assert code == 0 and out.startswith("verdict: SOLVABLE")

    def test_theta_file(self, cli, tmp_path):
        theta = tmp_path / "theta.json"
        theta.write_text(json.dumps({"*": "1/2", "1.1": -1}))
        code, payload, _ = cli("analyze", "--theta", str(theta), doc=HYPERGEOMETRIC, json_out=True)
        assert code in (0, 3) and payload["graph"]["theta"][:2] == ["1/2", "-1"]

    def test_bad_theta_value(self, cli, tmp_path):
        theta = tmp_path / "theta.json"
        theta.write_text(json.dumps({"*": "half"}))
        code, _, err = cli("analyze", "--theta", str(theta), doc=HYPERGEOMETRIC)
        assert code == 2 and "/*" in err


class TestExitCodes:
    def test_missing_file(self, cli):
        code, _, err = cli("analyze", "/nonexistent/problem.json")
        assert code == 1 and err.startswith("usage error")

    def test_no_command(self, cli):
        assert cli()[0] == 1

    def test_unknown_command(self, cli):
        assert cli("plot")[0] == 1

    def test_bad_json(self, cli, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{ not json")
        code, _, err = cli("analyze", str(path))
        assert code == 2 and "invalid JSON" in err

    def test_float_eigenvalue(self, cli):
        doc = {"classes": [{"eigenvalues": ["0.5", "2"], "multiplicities": [1, 1]}]}
        code, _, err = cli("analyze", doc=doc)
        assert code == 2 and "/classes/0/eigenvalues/0" in err

    def test_unknown_field(self, cli):
        doc = {"classes": [{"eigenvalues": [1], "multiplicities": [1], "colour": "red"}]}
        code, _, err = cli("analyze", doc=doc)
        assert code == 2 and "/classes/0" in err

    def test_mismatched_sizes(self, cli):
        doc = {"classes": [{"eigenvalues": [1], "multiplicities": [2]}, {"eigenvalues": [1], "multiplicities": [3]}]}
        code, _, err = cli("analyze", doc=doc)
        assert code == 2 and "/classes/1" in err


class TestOtherCommands:
    def test_classify(self, cli):
        code, payload, _ = cli("classify", doc=kostov_doc("E6t", 2, 1), json_out=True)
        assert code == 0 and payload["classification"]["kind"] == "Aff" and payload["p"] == 1

    def test_decompose(self, cli):
        code, payload, _ = cli("decompose", doc=kostov_doc("D4t", 2, 1), json_out=True)
        assert code == 0 and payload["moduli_dimension"] == 4
        assert payload["factorization"].startswith("Sym^2")

    def test_decompose_without_decomposition(self, cli):
        doc = {"classes": [{"eigenvalues": ["a"], "multiplicities": [1]}, {"eigenvalues": ["b"], "multiplicities": [1]}]}
        assert cli("decompose", doc=doc)[0] == 2

    def test_roots_by_legs(self, cli):
        code, payload, _ = cli("roots", "--legs", "1,1,1,1", "--bound", "2,1,1,1,1", json_out=True)
        assert code == 0 and len(payload["roots"]) == 25

    def test_roots_from_problem(self, cli):
        code, payload, _ = cli("roots", doc=HYPERGEOMETRIC, json_out=True)
        assert code == 0 and payload["bound"] == [2, 1, 1, 1]

    @pytest.mark.parametrize("argv", [["--legs", "1,1"], ["--legs", "1,1", "--bound", "1,1"], ["--legs", "a,b", "--bound", "1"]])
    def test_roots_usage(self, cli, argv):
        assert cli("roots", *argv)[0] == 1

    def test_kostov_usage(self, cli):
        assert cli("kostov", "--diagram", "A3t")[0] == 1
        assert cli("kostov", "--diagram", "D4t", "--m", "3", "--l", "2")[0] == 2

    @pytest.mark.parametrize("mode", ["generic", "almost-generic"])
    def test_weights(self, cli, mode):
        code, payload, _ = cli("weights", "--mode", mode, doc=SIGNS, json_out=True)
        assert code == 0 and payload["certified"] and payload["note"] == ""
        assert payload["e"] == -2 and payload["anchor"] == [["0", "1/2"]] * 4
        assert payload["weight"] != payload["anchor"]

    def test_weights_divisible_generic(self, cli):
        code, _, err = cli("weights", "--mode", "generic", doc=kostov_doc("D4t", 2, 1))
        assert code == 2 and "divisible" in err

    def test_weights_single_point(self, cli):
        code, payload, _ = cli("weights", doc=UNIPOTENT, json_out=True)
        assert code == 0 and payload["weight"] is None and not payload["certified"]
        assert "single point" in payload["note"]

    def test_search(self, cli):
        code, payload, _ = cli("search", "--restarts", "10", doc=HYPERGEOMETRIC, json_out=True)
        assert code == 0 and payload["found"] and payload["witness"]["burnside_dim"] == 4

    def test_search_needs_two_classes(self, cli):
        doc = {"classes": [{"eigenvalues": [1], "multiplicities": [1]}]}
        assert cli("search", doc=doc)[0] == 2


def test_kostov_through_stdin(cli, monkeypatch):
    code, out, _ = cli("kostov", "--diagram", "E8t", "--m", "2", "--l", "1")
    assert code == 0
    monkeypatch.setattr(sys, "stdin", io.StringIO(out))
    code, payload, _ = cli("analyze", "-", json_out=True)
    assert code == 3 and payload["classification"]["m"] == 2


def test_module_pipeline():
    gen = subprocess.run([sys.executable, "-m", "tameds", "kostov", "--diagram", "D4t", "--m", "2"], capture_output=True, text=True)
    assert gen.returncode == 0
    res = subprocess.run([sys.executable, "-m", "tameds", "analyze", "-"], input=gen.stdout, capture_output=True, text=True)
    assert res.returncode == 0 and "SOLVABLE" in res.stdout


def test_weights_pipeline_degree():
    payload = weights_pipeline(load_problem(kostov_doc("D4t", 1, 1))[0])
    assert payload["e"] + sum(Fraction(a) for leg in payload["anchor"] for a in leg[1:]) == 0


# ---------------------------------------------------------------------------
# parsing

x = MultElement.symbol("x")
Z = MultElement.root_of_unity


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2*x^-1", MultElement.from_rational(2) / x),
        ("zeta(8)^3", Z(8, 3)),
        ("-1", Z(2)),
        ("-x", Z(2) * x),
        ("1/2", MultElement.from_rational(Fraction(1, 2))),
        ("x**2", x * x),
        ("(2*x)^2", MultElement.from_rational(4) * x * x),
        (3, MultElement.from_rational(3)),
    ],
)
def test_parse_eigenvalue(text, expected):
    assert parse_eigenvalue(text) == expected


@pytest.mark.parametrize("text", ["0.5", "0", "zeta", "zeta(0)", "foo(2)", "x^y", "x +1", "1/0", "x.real", True])
def test_parse_rejects(text):
    with pytest.raises(ValidationError):
        parse_eigenvalue(text)


def test_undeclared_symbol():
    with pytest.raises(ValidationError) as err:
        parse_eigenvalue("y", {"x"}, "/classes/0/eigenvalues/1")
    assert err.value.pointer == "/classes/0/eigenvalues/1"


@pytest.mark.parametrize(
    "classes",
    [
        kostov.family("E7t", 2, 1).classes,
        [ClassSpec((x, x, Z(3)), (3, 2, 1)), ClassSpec.from_multiplicities([x.inverse(), Z(3, 2)], [2, 1])],
    ],
)
def test_document_round_trip(classes):
    doc = json.loads(json.dumps(problem_document(classes, {"*": Fraction(1, 3)})))
    loaded, theta = load_problem(doc)
    assert loaded == list(classes) and theta == {"*": Fraction(1, 3)}
