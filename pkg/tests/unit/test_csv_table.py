"""Tests for CSV table formatting."""

import math

import pytest

from epbeam.csv_table import CsvTable, CsvTableError, format_number


class TestFormatNumber:
    """Test the number formatting used in every table."""

    @pytest.mark.parametrize(
        "value,expected",
        [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-2.5, "-2.5"),
            (1e22, "1e+22"),
            (math.nan, "nan"),
        ],
    )
    def test_values(self, value, expected):
        """Should write 17 significant digits and a single zero."""
        assert format_number(value) == expected


class TestCsvTable:
    """Test table construction and serialization."""

    def test_to_csv(self):
        """Should write the header and LF-terminated rows."""
        table = CsvTable(["z", "p_0"], [(0.0, 1.0), (0.5, 0.25)])
        assert table.to_csv() == "z,p_0\n0,1\n0.5,0.25\n"

    def test_rejects_ragged_rows(self):
        """Should keep every row as wide as the header."""
        table = CsvTable(["a", "b"])
        with pytest.raises(CsvTableError, match="row has 1 values"):
            table.append([1.0])

    def test_rejects_bad_headers(self):
        """Should refuse empty or duplicate headers."""
        with pytest.raises(CsvTableError):
            CsvTable([])
        with pytest.raises(CsvTableError):
            CsvTable(["a", "a"])

    def test_column(self):
        """Should return one column by name."""
        table = CsvTable(["a", "b"], [(1, 2), (3, 4)])
        assert table.column("b") == [2.0, 4.0]
        with pytest.raises(ValueError):
            table.column("c")

    def test_parse_back(self):
        """Should read its own output back bit for bit."""
        table = CsvTable(["x", "y"], [(0.1, 1 / 3), (-2.0, 1e-17)])
        assert CsvTable.from_csv(table.to_csv()).rows == table.rows

    def test_empty_text(self):
        """Should reject text without a header."""
        with pytest.raises(CsvTableError):
            CsvTable.from_csv("")

    def test_write(self, tmp_path):
        """Should write UTF-8 with LF line endings."""
        path = tmp_path / "table.csv"
        CsvTable(["a"], [(1.5,)]).write(path)
        assert path.read_bytes() == b"a\n1.5\n"
