"""
Tests for JSONL, CSV and text report output.
"""

import io
import json

import pytest

from mahler_lab import (
    ConfigError,
    ReportError,
    ReportLine,
    ReportWriter,
    TextRenderer,
    dirichlet_profile,
    record_scan,
)
from mahler_lab.report import CSV_COLUMNS, csv_rows, stringify_integers

HASH = "a" * 64


@pytest.fixture
def half_profile(half, line_basis):
    """Dirichlet profile of x = 1/2 on Q = 2, 4, 8."""
    return dirichlet_profile(half, line_basis, [2, 4, 8]).to_dict()


@pytest.fixture
def half_records(half, line_basis):
    """Record table of x = 1/2 up to height 4."""
    return record_scan(half, line_basis, 4).to_dict()


class TestStringify:
    """Test integer stringification."""

    def test_nested(self):
        data = {"a": 1, "b": [2, True, None, (3, "x")], "c": {"d": -10**30}}
        assert stringify_integers(data) == {
            "a": "1",
            "b": ["2", True, None, ["3", "x"]],
            "c": {"d": str(-10**30)},
        }

    def test_non_integers_untouched(self):
        assert stringify_integers("7") == "7"
        assert stringify_integers(False) is False


class TestReportLine:
    """Test ReportLine serialization."""

    def test_to_json(self):
        line = ReportLine(HASH, "basis", {"n": 5, "monomials": ["x1"]})
        data = json.loads(line.to_json())
        assert data["config_hash"] == HASH
        assert data["command"] == "basis"
        assert data["payload"] == {"n": "5", "monomials": ["x1"]}
        assert data["timestamp"].endswith("+00:00")
        assert "\n" not in line.to_json()

    def test_payload_json_ignores_timestamp(self):
        a = ReportLine(HASH, "basis", {"n": 5}, timestamp="2026-01-01T00:00:00+00:00")
        b = ReportLine(HASH, "basis", {"n": 5}, timestamp="2026-06-01T00:00:00+00:00")
        assert a.payload_json() == b.payload_json()
        assert a.to_json() != b.to_json()

    def test_big_integers_survive(self):
        big = 3**200
        line = ReportLine(HASH, "records", {"value": big})
        assert json.loads(line.to_json())["payload"]["value"] == str(big)


class TestCsvRows:
    """Test table extraction for CSV output."""

    def test_profile_rows(self, half_profile):
        rows = csv_rows("dirichlet", stringify_integers(half_profile))
        assert [row[:3] for row in rows] == [
            ("2", "1", "1"),
            ("4", "0.5", "0.5"),
            ("8", "0.25", "0.25"),
        ]

    def test_record_rows(self, half_records):
        rows = csv_rows("records", stringify_integers(half_records))
        assert [row[:3] for row in rows] == [("1", "0.5", "0.5"), ("2", "0", "0")]
        assert rows[-1][3] == "2*x1 - 1"

    def test_table_free_payload_rejected(self):
        with pytest.raises(ConfigError):
            csv_rows("basis", {"n": "2"})


class TestTextRenderer:
    """Test Jinja2 text rendering."""

    def test_dirichlet_template(self, half_profile):
        text = TextRenderer().render(ReportLine(HASH, "dirichlet", half_profile))
        assert text.startswith(f"# dirichlet  config={HASH[:12]}")
        assert "Q=8  eps* in [0.25, 0.25]" in text
        assert "verdict: singular-trend" in text

    def test_records_template(self, half_records):
        text = TextRenderer().render(ReportLine(HASH, "records", half_records))
        assert "P = 2*x1 - 1" in text
        assert "(exact zero)" in text

    def test_basis_template(self):
        payload = {"d": 1, "k": 2, "n": 2, "monomials": ["x1", "x1**2"]}
        text = TextRenderer().render(ReportLine(HASH, "basis", payload))
        assert "d=1 k=2 n=2" in text
        assert "2. x1**2" in text

    def test_generic_template(self):
        payload = {"eps": "1/2", "witnesses": [{"H": 1}]}
        text = TextRenderer().render(ReportLine(HASH, "vwa", payload))
        assert "eps: 1/2" in text
        assert 'witnesses: [{"H": "1"}]' in text

    def test_missing_field_raises(self):
        with pytest.raises(ReportError):
            TextRenderer().render(ReportLine(HASH, "records", {"point": "x"}))

    def test_register_filter(self):
        renderer = TextRenderer()
        renderer.register_filter("json", lambda v: "<json>")
        text = renderer.render(ReportLine(HASH, "vwa", {"list": [1, 2]}))
        assert "list: <json>" in text


class TestReportWriter:
    """Test ReportWriter formats."""

    def test_jsonl(self):
        stream = io.StringIO()
        writer = ReportWriter(stream)
        writer.write(ReportLine(HASH, "basis", {"n": 1}))
        writer.write(ReportLine(HASH, "basis", {"n": 2}))
        lines = stream.getvalue().splitlines()
        assert writer.written == 2
        assert [json.loads(line)["payload"]["n"] for line in lines] == ["1", "2"]

    def test_csv(self, half_profile):
        stream = io.StringIO()
        ReportWriter(stream, "csv").write(ReportLine(HASH, "dirichlet", half_profile))
        lines = stream.getvalue().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS) == "Q,eps_lo,eps_hi,witness"
        assert len(lines) == 4
        assert lines[1].startswith("2,1,1,")

    def test_text(self, half_records):
        stream = io.StringIO()
        ReportWriter(stream, "text").write(ReportLine(HASH, "records", half_records))
        assert "c_min:" in stream.getvalue()

    def test_invalid_format(self):
        with pytest.raises(ConfigError):
            ReportWriter(io.StringIO(), "xml")
