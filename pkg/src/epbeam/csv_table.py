"""CSV tables with bit-stable number formatting."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

NUMBER_FORMAT = ".17g"


class CsvTableError(ValueError):
    """Raised when rows do not conform to the table header."""


def format_number(value: float) -> str:
    """17 significant digits, '.' decimal point; -0.0 is written as 0."""
    if value == 0:
        return "0"
    if math.isnan(value):
        return "nan"
    return format(value, NUMBER_FORMAT)


@dataclass
class CsvTable:
    """Header plus numeric rows of constant width."""

    header: list[str]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.header:
            raise CsvTableError("header must name at least one column")
        if len(set(self.header)) != len(self.header):
            raise CsvTableError(f"duplicate column names in {self.header}")
        rows, self.rows = self.rows, []
        self.extend(rows)

    @property
    def width(self) -> int:
        return len(self.header)

    def append(self, row: Sequence[float]) -> None:
        if len(row) != self.width:
            raise CsvTableError(
                f"row has {len(row)} values, header has {self.width} columns"
            )
        self.rows.append(tuple(float(value) for value in row))

    def extend(self, rows: Iterable[Sequence[float]]) -> None:
        for row in rows:
            self.append(row)

    def column(self, name: str) -> list[float]:
        index = self.header.index(name)
        return [row[index] for row in self.rows]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([format_number(value) for value in row])
        return buffer.getvalue()

    def write(self, path: str | Path) -> None:
        """Write the table as UTF-8 with LF line endings."""
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> CsvTable:
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration as exc:
            raise CsvTableError("empty CSV text") from exc
        return cls(header=header, rows=[tuple(float(cell) for cell in row) for row in reader])
