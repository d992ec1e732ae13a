import pytest

from surfacelattice.errors import InvariantViolation, SchemaError
from surfacelattice.fixtures import FixtureRow, fixture_table, load_fixtures, parse_fixtures, validate_row


def test_all_rows_load_and_validate():
    rows = load_fixtures()
    assert len(rows) == 24
    for r in rows:
        assert validate_row(r).DD == 14


def test_table_sizes():
    assert len(fixture_table("classification")) == 15
    for name in ("four-nodal-cubic", "six-nodal-del-pezzo", "picard-three"):
        assert len(fixture_table(name)) == 3


def test_unknown_existence_kept_verbatim():
    tags = {r.case: r.existence for r in fixture_table()}
    assert tags["(7)(c)"] == "unknown" and tags["(7)(a)"] == "known"


def test_bad_row_rejected():
    row = FixtureRow("t", "x", 9, -2, "q", ((3, 0),), "known", ())
    with pytest.raises(InvariantViolation):
        validate_row(row)


def test_unknown_source_rejected():
    doc = {"sources": {}, "tables": [{"name": "t", "rows": [
        {"case": "x", "k": 9, "KK": -2, "quotient": "q", "branch": [[3, -2]],
         "existence": "known", "sources": ["nowhere"]}]}]}
    with pytest.raises(SchemaError):
        parse_fixtures(doc)
