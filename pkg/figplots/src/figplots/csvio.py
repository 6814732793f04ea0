"""Reader for the simulator's CSV tables with '#' metadata headers."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class MissingColumn(KeyError):
    """A required column is absent from the input table."""


class EmptyData(ValueError):
    """The input table has no data rows."""


@dataclass
class Table:
    path: str
    meta: list[str]
    columns: list[str]
    units: dict[str, str]
    data: dict[str, np.ndarray] = field(repr=False)

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.data:
                raise MissingColumn(
                    f"{self.path}: column '{name}' not found "
                    f"(has {', '.join(self.columns)})")

    def column(self, name: str) -> np.ndarray:
        self.require(name)
        return self.data[name]

    def unit(self, name: str) -> str:
        return self.units.get(name, "")


def _parse_units(meta: list[str], columns: list[str]) -> dict[str, str]:
    for line in meta:
        if line.startswith("# units="):
            units = line[len("# units="):].split(",")
            if len(units) == len(columns):
                return dict(zip(columns, units))
    return {}


def read_table(path: str) -> Table:
    """Parse one CSV table; numeric columns become float arrays."""
    meta: list[str] = []
    rows: list[list[str]] = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                meta.append(line.rstrip("\n"))
            elif line.strip():
                rows.append(next(csv.reader([line])))
    if not rows:
        raise EmptyData(f"{path}: no header row")
    columns, body = rows[0], rows[1:]
    if not body:
        raise EmptyData(f"{path}: no data rows")
    if any(len(r) != len(columns) for r in body):
        raise EmptyData(f"{path}: ragged rows")
    data: dict[str, np.ndarray] = {}
    for j, name in enumerate(columns):
        raw = [r[j] for r in body]
        try:
            data[name] = np.array([float(v) for v in raw])
        except ValueError:
            data[name] = np.array(raw, dtype=object)
    return Table(path=path, meta=meta, columns=columns,
                 units=_parse_units(meta, columns), data=data)


def read_tables(paths) -> Table:
    """Concatenate several tables that share one column layout."""
    tables = [read_table(p) for p in paths]
    first = tables[0]
    for t in tables[1:]:
        if t.columns != first.columns:
            raise MissingColumn(
                f"{t.path}: columns {t.columns} do not match "
                f"{first.path}: {first.columns}")
    data = {name: np.concatenate([t.data[name] for t in tables])
            for name in first.columns}
    return Table(path=";".join(p for p in paths), meta=first.meta,
                 columns=first.columns, units=first.units, data=data)
