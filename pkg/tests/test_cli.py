import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from tropfglm import cli
from tropfglm.documents import DocumentError, MatrixDocument, SystemDocument
from tropfglm.errors import PrecisionExhausted
from tropfglm.experiment import CSV_HEADER, ExperimentReport, InstanceRecord, loss_ratios
from tropfglm.valued_field import agrees_with, parse_scalar

FIELD = {"kind": "p-adic", "p": 2, "default_precision": 20}
WEIGHTED = {
    "field": FIELD,
    "variables": ["x", "y"],
    "order": {"weight": [0, 1], "tiebreak": "grevlex"},
    "polynomials": [[["1", [1, 0]], ["1/2", [0, 1]]], [["1", [0, 2]], ["1", [0, 0]]]],
}
SMALL = {
    "field": FIELD,
    "variables": ["x", "y"],
    "order": {"weight": [0, 0], "tiebreak": "grevlex"},
    "polynomials": [[["1", [0, 1]], ["2", [1, 0]]], [["1", [2, 0]], ["4", [0, 0]]]],
}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def read_basis(path):
    doc = SystemDocument.parse(open(path).read())
    cfg = doc.field_config()
    return {tuple(t[1]): parse_scalar(t[0], cfg) for p in doc.polynomials for t in p}, doc


def test_change_order_on_weighted_example(tmp_path):
    src = write(tmp_path, "in.json", WEIGHTED)
    out = str(tmp_path / "out.json")
    assert cli.main(["change-order", "--input", src, "--target-weight", "0,0", "--verify", "--output", out]) == 0
    coeffs, doc = read_basis(out)
    assert doc.order == {"weight": [0, 0], "tiebreak": "grevlex"}
    assert set(coeffs) == {(0, 1), (1, 0), (2, 0), (0, 0)}
    assert agrees_with(coeffs[(1, 0)], 2) and agrees_with(coeffs[(0, 0)], Fraction(1, 4))
    assert {"delta", "D", "xi", "cond", "observed_loss"} <= set(doc.diagnostics)


def test_negative_weights_on_the_command_line(tmp_path):
    src = write(tmp_path, "in.json", WEIGHTED)
    out = str(tmp_path / "out.json")
    assert cli.main(["change-order", "--input", src, "--target-weight", "-2,4", "--output", out]) == 0
    assert SystemDocument.parse(open(out).read()).order["weight"] == [-2, 4]


def test_same_order_is_a_byte_identical_no_op(tmp_path):
    src = write(tmp_path, "in.json", SMALL)
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert cli.main(["change-order", "--input", src, "--target-weight", "0,0", "--output", a]) == 0
    assert cli.main(["change-order", "--input", a, "--target-weight", "0,0", "--output", b]) == 0
    assert json.loads(open(a).read())["polynomials"] == json.loads(open(b).read())["polynomials"]
    assert open(a).read() == open(b).read()


def test_lex_target_and_strategy(tmp_path):
    src = write(tmp_path, "in.json", SMALL)
    out = str(tmp_path / "out.json")
    code = cli.main(["change-order", "--input", src, "--target-tiebreak", "lex", "--strategy", "general", "--verify", "--output", out])
    assert code == 0
    coeffs, doc = read_basis(out)
    assert agrees_with(coeffs[(0, 0)], 16) and agrees_with(coeffs[(0, 1)], Fraction(1, 2))
    assert doc.order["weight"] is None


def test_document_round_trip():
    text = SystemDocument.from_polynomials(
        SystemDocument.parse(json.dumps(SMALL)).to_polynomials(),
        ["x", "y"],
        SystemDocument.parse(json.dumps(SMALL)).term_order(),
        SystemDocument.parse(json.dumps(SMALL)).field_config(),
    ).serialize()
    assert SystemDocument.parse(text).serialize() == text
    for kind in ({"kind": "rational", "p": 3}, {"kind": "t-adic", "default_precision": 5}):
        doc = dict(SMALL, field=kind)
        t = SystemDocument.parse(json.dumps(doc)).serialize()
        assert SystemDocument.parse(t).serialize() == t


def test_document_errors():
    with pytest.raises(DocumentError):
        SystemDocument.parse("{")
    with pytest.raises(DocumentError):
        SystemDocument.parse(json.dumps({"field": FIELD, "variables": ["x"]}))
    with pytest.raises(DocumentError):
        SystemDocument.parse(json.dumps(dict(SMALL, polynomials=[[["1", [1]]]])))
    with pytest.raises(DocumentError):
        SystemDocument.parse(json.dumps(dict(SMALL, polynomials=[[["x", [1, 0]]]])))
    with pytest.raises(DocumentError):
        SystemDocument.parse(json.dumps(dict(SMALL, field={"kind": "p-adic", "p": 4})))


@pytest.mark.parametrize(
    "doc, code",
    [
        ("not json", cli.EXIT_PARSE),
        (dict(SMALL, polynomials=[[["3", [0, 1]], ["2", [1, 0]]], [["1", [2, 0]], ["4", [0, 0]]]]), cli.EXIT_NOT_REDUCED),
        (dict(SMALL, polynomials=[[["1", [2, 0]]]]), cli.EXIT_NOT_ZERO_DIM),
    ],
)
def test_exit_codes(tmp_path, doc, code):
    src = write(tmp_path, "in.json", doc)
    assert cli.main(["change-order", "--input", src, "--target-weight", "0,0", "--output", str(tmp_path / "o")]) == code


def test_precision_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise PrecisionExhausted("test")

    monkeypatch.setattr(cli, "change_ordering", boom)
    src = write(tmp_path, "in.json", SMALL)
    assert cli.main(["change-order", "--input", src]) == cli.EXIT_PRECISION


def test_missing_file_and_bad_flags(tmp_path):
    assert cli.main(["verify", "--input", str(tmp_path / "nope.json")]) == cli.EXIT_PARSE
    with pytest.raises(SystemExit) as e:
        cli.main(["change-order", "--input", "x", "--target-weight", "a,b"])
    assert e.value.code == cli.EXIT_PARSE
    src = write(tmp_path, "in.json", SMALL)
    assert cli.main(["change-order", "--input", src, "--target-weight", "0,0,0"]) == cli.EXIT_PARSE


def test_verify_command(tmp_path, capsys):
    src = write(tmp_path, "src.json", WEIGHTED)
    good = dict(SMALL, polynomials=[[["1", [0, 1]], ["2", [1, 0]]], [["1", [2, 0]], ["1/4", [0, 0]]]])
    bad = dict(SMALL, polynomials=[[["1", [0, 1]], ["2", [1, 0]]], [["1", [2, 0]], ["3/4", [0, 0]]]])
    assert cli.main(["verify", "--input", write(tmp_path, "g.json", good), "--source", src]) == 0
    assert cli.main(["verify", "--input", write(tmp_path, "b.json", bad), "--source", src]) == cli.EXIT_VERIFY
    assert "not verified" in capsys.readouterr().out


def test_multmat_command(tmp_path):
    out = tmp_path / "m.json"
    assert cli.main(["multmat", "--input", write(tmp_path, "in.json", SMALL), "--output", str(out)]) == 0
    body = json.loads(out.read_text())
    assert body["basis"] == [[0, 0], [1, 0]] and body["delta"] == 2
    cfg = SystemDocument.parse(json.dumps(SMALL)).field_config()
    want = {"x": [[0, -4], [1, 0]], "y": [[0, 8], [-2, 0]]}
    for name, M in want.items():
        got = body["matrices"][name]
        assert all(agrees_with(parse_scalar(g, cfg), w) for r, s in zip(got, M) for g, w in zip(r, s))


def test_echelon_command(tmp_path):
    doc = {
        "field": {"kind": "p-adic", "p": 3, "default_precision": 40},
        "variables": ["x", "y"],
        "order": {"weight": [0, 0], "tiebreak": "grevlex"},
        "columns": [[4, 0], [3, 1], [0, 4], [2, 0], [1, 1], [0, 2]],
        "rows": [["1", "0", "3", "0", "0", "0"], ["0", "0", "0", "1", "9", "3"], ["0", "9", "9", "0", "9", "0"], ["0", "9", "9", "3", "1", "-9"]],
    }
    out = tmp_path / "e.json"
    assert cli.main(["echelon", "--input", write(tmp_path, "m.json", doc), "--output", str(out), "--unstable"]) == 0
    res = MatrixDocument.parse(out.read_text())
    assert res.columns == [[4, 0], [2, 0], [3, 1], [1, 1], [0, 4], [0, 2]]
    M = res.to_matrix()
    assert agrees_with(M.rows[1][5], Fraction(-57, 35)) and agrees_with(M.rows[3][3], -35)
    assert res.report["rank"] == 4
    ident = dict(doc, columns=[[1, 0], [0, 1]], rows=[["1", "0"], ["0", "1"]])
    assert cli.main(["echelon", "--input", write(tmp_path, "i.json", ident), "--output", str(out)]) == 0
    M = MatrixDocument.parse(out.read_text()).to_matrix()
    assert M.col_labels == [(1, 0), (0, 1)]
    assert agrees_with(M.rows[0][0], 1) and M.rows[0][1].is_zero()


def test_experiment_command(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert cli.main(["experiment", "--reps", "0", "--output", str(out)]) == 0
    assert out.read_text().strip() == ",".join(CSV_HEADER)
    args = ["experiment", "--prime", "2", "--degrees", "2,2,2", "--reps", "3", "--seed", "4", "--mode", "trop-to-lex"]
    assert cli.main(args + ["--output", str(out)]) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [int(r["seed"]) for r in rows] == [4, 5, 6]
    first = [{k: v for k, v in r.items() if k != "time_s"} for r in rows]
    assert cli.main(args + ["--output", str(out)]) == 0
    again = [{k: v for k, v in r.items() if k != "time_s"} for r in csv.DictReader(out.read_text().splitlines())]
    assert first == again
    assert "completed 3/3" in capsys.readouterr().out


def test_experiment_rejects_bad_prime():
    assert cli.main(["experiment", "--prime", "4", "--reps", "1"]) == cli.EXIT_PARSE


def test_loss_ratio_aggregates():
    num = ExperimentReport(2, "trop-to-lex", 50, [InstanceRecord(0, (2, 2, 2), loss_mean=4.0), InstanceRecord(1, (2, 2, 2), loss_mean=1.0)])
    den = ExperimentReport(2, "trop-to-trop", 50, [InstanceRecord(0, (2, 2, 2), loss_mean=2.0), InstanceRecord(1, (2, 2, 2), loss_mean=2.0)])
    r = loss_ratios(num, den)
    assert r["count"] == 2
    assert r["arithmetic"] == pytest.approx(1.25)
    assert r["geometric"] == pytest.approx(1.0)


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "tropfglm.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "change-order" in res.stdout


def test_thread_pool_gives_the_same_records(monkeypatch):
    from tropfglm.experiment import run_experiment

    def strip(rep):
        return [(r.seed, r.degrees, r.delta, r.loss_mean, r.loss_max, r.cond, r.xi) for r in rep.records]

    serial = run_experiment(2, [(2, 2), (2, 3)], 2, 0, "trop-to-trop", 40, threads=1)
    monkeypatch.setenv("TROPFGLM_THREADS", "3")
    pooled = run_experiment(2, [(2, 2), (2, 3)], 2, 0, "trop-to-trop", 40)
    assert strip(serial) == strip(pooled)
