"""Parsers for the two CSV schemas the simulation engine emits."""

from __future__ import annotations

import csv
from dataclasses import dataclass

SWEEP_COLUMNS = (
    "percent_squeezing",
    "gain",
    "b_max",
    "theta_a",
    "theta_a_prime",
    "theta_b",
    "theta_b_prime",
)
#: optional trailing column emitted when a fixed-angle comparison was requested
SWEEP_FIXED_COLUMN = "b_fixed_angles"

ESTIMATE_COLUMNS = ("quantity", "value", "std_error", "n_samples")


class ParseError(ValueError):
    """A CSV does not match its documented schema."""


def _check_header(got: list[str], want: tuple[str, ...], path: str,
                  optional_tail: tuple[str, ...] = ()) -> None:
    allowed = (list(want), *(list(want) + [t] for t in optional_tail))
    if got in allowed:
        return
    for k, column in enumerate(want):
        if k >= len(got) or got[k] != column:
            found = got[k] if k < len(got) else "<missing>"
            raise ParseError(
                f"{path}: expected column {k} to be {column!r}, found {found!r}"
            )
    raise ParseError(f"{path}: unexpected extra columns {got[len(want):]!r}")


@dataclass(frozen=True)
class SweepRow:
    percent_squeezing: float
    gain: float
    b_max: float
    theta_a: float
    theta_a_prime: float
    theta_b: float
    theta_b_prime: float
    b_fixed: float | None = None


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]

    @property
    def has_fixed_column(self) -> bool:
        return any(r.b_fixed is not None for r in self.rows)

    @classmethod
    def from_csv(cls, path) -> "SweepTable":
        path = str(path)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{path}: file is empty, no header row") from None
            _check_header(header, SWEEP_COLUMNS, path,
                          optional_tail=(SWEEP_FIXED_COLUMN,))
            with_fixed = len(header) == len(SWEEP_COLUMNS) + 1
            rows = []
            for lineno, record in enumerate(reader, 2):
                if not record:
                    continue
                if len(record) != len(header):
                    raise ParseError(
                        f"{path}:{lineno}: expected {len(header)} fields, "
                        f"got {len(record)}"
                    )
                try:
                    values = [float(v) for v in record]
                except ValueError as err:
                    raise ParseError(f"{path}:{lineno}: {err}") from None
                fixed = values[7] if with_fixed else None
                rows.append(SweepRow(*values[:7], b_fixed=fixed))
        if not rows:
            raise ParseError(f"{path}: no data rows")
        percents = [r.percent_squeezing for r in rows]
        if percents != sorted(percents):
            raise ParseError(f"{path}: rows are not sorted by percent_squeezing")
        return cls(rows=tuple(rows))


@dataclass(frozen=True)
class EstimateRow:
    quantity: str
    value: float
    std_error: float
    n_samples: int


@dataclass(frozen=True)
class EstimateTable:
    rows: tuple[EstimateRow, ...]

    def values(self, quantity: str) -> list[EstimateRow]:
        return [r for r in self.rows if r.quantity == quantity]

    @classmethod
    def from_csv(cls, path) -> "EstimateTable":
        path = str(path)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{path}: file is empty, no header row") from None
            _check_header(header, ESTIMATE_COLUMNS, path)
            rows = []
            for lineno, record in enumerate(reader, 2):
                if not record:
                    continue
                if record == list(ESTIMATE_COLUMNS):
                    continue  # appended runs may repeat the header
                if len(record) != 4:
                    raise ParseError(
                        f"{path}:{lineno}: expected 4 fields, got {len(record)}"
                    )
                try:
                    rows.append(
                        EstimateRow(
                            quantity=record[0],
                            value=float(record[1]),
                            std_error=float(record[2]),
                            n_samples=int(record[3]),
                        )
                    )
                except ValueError as err:
                    raise ParseError(f"{path}:{lineno}: {err}") from None
        if not rows:
            raise ParseError(f"{path}: no data rows")
        return cls(rows=tuple(rows))
