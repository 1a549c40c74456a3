import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from fuchsian_cf.cli import main
from fuchsian_cf.hypergeometric import HypergeomParams, f21_logderiv
from fuchsian_cf.jsonio import load_schema, operator_to_json, validate


@pytest.fixture
def gauss_file(tmp_path, gauss):
    path = tmp_path / "gauss.json"
    path.write_text(json.dumps(operator_to_json(gauss)))
    return str(path)


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    text = buf.getvalue()
    return code, text


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_singular(gauss_file):
    code, doc = run_json("singular", "--op", gauss_file)
    assert code == 0 and doc["points"] == ["0", "1"] and doc["fuchsian"]
    assert doc["local"][0]["genericity"]["status"] == "Generic"
    assert sorted(doc["local"][0]["exponents"]) == ["0", "3/4"]


def test_regions_line_and_grid(gauss_file):
    code, doc = run_json("regions", "--op", gauss_file, "--grid=-1,2,-1,1,7,3")
    assert code == 0
    assert doc["lines"] == [{"midpoint": "1/2", "direction": [0.0, 1.0], "pair": [0, 1]}]
    for cell in doc["cells"]:
        re = cell["z"] if isinstance(cell["z"], float) else cell["z"][0]
        if cell.get("at_singularity"):
            continue
        if re == 0.5:
            assert cell["is_tie"]
        else:
            assert cell["nearest"] == (0 if re < 0.5 else 1)
    code, csv_text = run("regions", "--op", gauss_file, "--grid", "0,1,0,0,3,1", "--out", "csv")
    assert csv_text.splitlines()[0] == "re,im,nearest,is_tie,distance_to_bisectors"


def test_logderiv(gauss_file):
    code, doc = run_json("logderiv", "--op", gauss_file, "--z", "0.2")
    assert code == 0 and doc["history"][0]["n"] == 2
    params = HypergeomParams(Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))
    assert abs(doc["value"] - f21_logderiv(params, 0.2).real) < 1e-8
    code, text = run("logderiv", "--op", gauss_file, "--z", "0.2", "--out", "csv")
    assert text.startswith("n,value_re,value_im")


def test_refusal_exit_codes(gauss_file):
    code, doc = run_json("logderiv", "--op", gauss_file, "--z", "1/2,1")
    assert code == 3 and doc["reason"] == "on_bisector"
    code, doc = run_json("series-ratio", "--op", gauss_file, "--z0", "0")
    assert code == 3 and doc["status"] == "error"
    code, doc = run_json("series-ratio", "--op", gauss_file, "--z0", "1/5", "--N", "60", "--tol", "1e-12")
    assert code == 4 and doc["reason"] == "non_convergence"


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n "form": "standard",\n "coeffs": [\n')
    code, doc = run_json("singular", "--op", str(bad))
    assert code == 2 and doc["reason"] == "parse_error" and doc["line"] >= 3
    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"form": "standard", "coeffs": []}))
    code, doc = run_json("singular", "--op", str(invalid))
    assert code == 2 and doc["reason"] == "invalid_operator"


def test_series_ratio(gauss_file):
    code, doc = run_json("series-ratio", "--op", gauss_file, "--z0", "1/5")
    assert code == 0
    assert abs(doc["limit"] + 5) < 5e-3
    assert doc["matched_singularity"] == "0"


def test_cf_and_convergents(gauss_file, tmp_path):
    conv = tmp_path / "conv.csv"
    code, doc = run_json("cf", "--op", gauss_file, "--z", "0.8", "--emit-convergents", str(conv), "--depth", "50")
    assert code == 0 and doc["method"] == "three_term"
    assert conv.read_text().splitlines()[0] == "n,A,B"


def test_hypergeom_check():
    code, doc = run_json("hypergeom-check", "--a", "1/2", "--b", "1/3", "--c", "1/4", "--z", "4/5")
    assert code == 0 and doc["side"] == "right" and doc["error"] < 1e-6
    code, doc = run_json("hypergeom-check", "--a", "1/2", "--b", "1/3", "--c", "2", "--z", "0.2")
    assert code == 2


def test_chain_verify(gauss_file):
    code, doc = run_json("chain-verify", "--op", gauss_file, "--z", "1/5")
    assert code == 0 and all(r["exact_zero"] for r in doc["rows"])
    assert [r["n"] for r in doc["rows"]] == list(range(2, 11))


@pytest.mark.parametrize("argv", [
    ("singular",),
    ("regions", "--grid=-1,2,-1,1,5,5"),
    ("series-ratio", "--z0", "1/5", "--N", "400", "--tol", "1e-3"),
    ("logderiv", "--z", "1/5,1/7"),
    ("cf", "--z", "1/5"),
    ("chain-verify", "--z", "1/5"),
])
def test_reports_validate_and_are_deterministic(gauss_file, argv):
    cmd, rest = argv[0], list(argv[1:])
    args = [cmd, "--op", gauss_file, *rest]
    code1, text1 = run(*args)
    code2, text2 = run(*args)
    assert code1 == code2 == 0 and text1 == text2
    validate(json.loads(text1), cmd)


def test_float_backend_is_deterministic(gauss_file):
    args = ("logderiv", "--op", gauss_file, "--z", "0.2", "--backend", "float", "--precision-bits", "80")
    assert run(*args) == run(*args)


def test_schema_flag():
    code, doc = run_json("--schema", "logderiv")
    assert code == 0 and doc == load_schema("logderiv")
    code, doc = run_json("--schema", "nope")
    assert code == 2


def test_console_entry_point(gauss_file):
    proc = subprocess.run([sys.executable, "-m", "fuchsian_cf.cli", "singular", "--op", gauss_file],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["points"] == ["0", "1"]
