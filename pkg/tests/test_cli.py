import json
from pathlib import Path

import pytest

from surfacelattice.builtins import builtin_documents
from surfacelattice.cli import expand_range, run

GOLDEN = Path(__file__).parent / "golden" / "report.txt"


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_expand_range():
    assert expand_range("K,N0..N2") == ["K", "N0", "N1", "N2"]
    assert expand_range("1..4") == ["1", "2", "3", "4"]


def test_solve_gram_k9(capsys):
    code, out, _ = call(capsys, "solve-gram", "k9-rational", "--classes", "K,D,F,G,N0..N8")
    assert code == 0
    assert out.strip() == "2^12*(x-8); roots: 8; accepted: 8"


def test_mj_table(capsys):
    code, out, _ = call(capsys, "mj-table", "--k", "9", "--j", "1..4", "--format", "json")
    rows = [(r["KM"], r["DM"], r["MM"]) for r in json.loads(out)]
    assert code == 0 and rows == [(0, 16, 16), (-2, 18, 14), (-4, 20, 8), (-6, 22, -2)]


def test_verify_missing_scenario(capsys):
    code, _, err = call(capsys, "verify", "no-such-file")
    assert code == 2
    assert json.loads(err)["error"] == "SchemaError"


def test_unknown_option_is_usage_error(capsys):
    code, _, err = call(capsys, "classify", "--k", "11", "--colour")
    assert code == 2 and json.loads(err)["error"] == "UsageError"


def test_verify_builtin_and_mismatch(tmp_path, capsys):
    assert call(capsys, "verify", "k11-r2")[0] == 0
    doc = builtin_documents()["k9-rational"]
    doc["checks"][0]["expect"] = "VIOLATION"
    path = tmp_path / "k9-wrong.json"
    path.write_text(json.dumps(doc))
    code, out, err = call(capsys, "verify", str(path))
    assert code == 1
    assert "verdict mismatch" in out and "UnexpectedVerdict" in err


def test_path_overrides_builtin_name(tmp_path, capsys, monkeypatch):
    doc = builtin_documents()["k9-rational"]
    doc["checks"] = doc["checks"][:1]
    (tmp_path / "k9-rational").write_text(json.dumps(doc))
    monkeypatch.chdir(tmp_path)
    code, out, _ = call(capsys, "verify", "k9-rational", "--format", "json")
    assert code == 0 and len(json.loads(out)["steps"]) == 1


def test_classify_json_is_byte_stable(capsys):
    first = call(capsys, "classify", "--k", "11", "--format", "json")[1]
    second = call(capsys, "classify", "--k", "11", "--format", "json")[1]
    assert first == second
    assert len(json.loads(first)["kept"]) == 3


def test_filter_external_list(tmp_path, capsys):
    path = tmp_path / "cands.yaml"
    path.write_text("candidates:\n  - {label: a, branch: [[4, 2], [0, -4]]}\n"
                    "  - {label: b, branch: [[3, -2]]}\n")
    code, out, _ = call(capsys, "filter", "--k", "9", "--input", str(path), "--format", "json")
    table = json.loads(out)
    assert code == 0
    assert [r["label"] for r in table["kept"]] == ["b"]
    assert [r["label"] for r in table["excluded"]] == ["a"]


def test_enumerate_and_fixtures(capsys):
    code, out, _ = call(capsys, "enumerate", "--k", "11", "--format", "json")
    assert code == 0 and len(json.loads(out)["candidates"]) == 4
    code, out, _ = call(capsys, "fixtures", "--format", "json")
    assert code == 0 and len(json.loads(out)) == 24


def test_report_matches_golden(capsys):
    code, out, _ = call(capsys, "report")
    assert code == 0
    assert out == GOLDEN.read_text(encoding="utf-8")


@pytest.mark.parametrize("k", [9, 11])
def test_report_contains_every_kept_row(capsys, k):
    from surfacelattice.branches import classify
    out = call(capsys, "report")[1]
    for row in classify(k).kept:
        assert str(row.candidate) in out
