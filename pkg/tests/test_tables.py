import json

import pytest

from vsr_finsler.cli import main
from vsr_finsler.golden import GOLDEN_ROWS
from vsr_finsler.tables import MATCH, MISMATCH, NOTED, evaluate_row, reproduce_tables, tables_ok, to_markdown


@pytest.fixture(scope="module")
def rows():
    return reproduce_tables()


def test_every_golden_row_is_reported(rows):
    assert [(r.table, r.group) for r in rows] == [(g.table, g.group) for g in GOLDEN_ROWS]


def test_only_recorded_discrepancies(rows):
    bad = [(r.table, r.title, r.checks) for r in rows if r.status == MISMATCH]
    assert bad == []
    noted = sorted((r.table, r.group) for r in rows if r.status == NOTED)
    assert len(noted) == 2
    assert {g for _, g in noted} == {"XDISIM1", "DISIM"}
    assert tables_ok(rows)


def test_match_rows_have_passing_checks(rows):
    for r in rows:
        if r.status == MATCH:
            assert r.checks and all(c.ok for c in r.checks)


def test_markdown_layout(rows):
    md = to_markdown(rows)
    assert md.count("## Table") == 3
    body = [ln for ln in md.splitlines() if ln.startswith("| ") and not ln.startswith("| group")]
    assert len(body) == len(rows)


def test_row_evaluation_is_repeatable():
    row = next(g for g in GOLDEN_ROWS if g.group == "DISIM" and g.table == "III")
    a, b = evaluate_row(row), evaluate_row(row)
    assert a.to_json() == b.to_json()


def test_tables_command(tmp_path, capsys):
    out = tmp_path / "tables.json"
    assert main(["tables", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["ok"] and len(doc["rows"]) == len(GOLDEN_ROWS)
    assert "## Table I" in capsys.readouterr().out
