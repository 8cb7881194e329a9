"""Reading the tab-separated experiment files.

Two error families so the command line can report them precisely: a
ColumnError means a header the caller asked for is not there, an
AlignmentError means the file's shape is wrong (no data, ragged rows).
"""

import csv
from pathlib import Path

import numpy as np


class ColumnError(ValueError):
    """A required named column is missing from a TSV header."""


class AlignmentError(ValueError):
    """Rows are missing or their lengths disagree with the header."""


class Table:
    """One parsed TSV: ordered header names and float column vectors."""

    def __init__(self, path, names, columns):
        self.path = Path(path)
        self.names = list(names)
        self._columns = columns

    def __len__(self):
        return 0 if not self.names else len(self._columns[self.names[0]])

    def has(self, name):
        return name in self._columns

    def column(self, name):
        if name not in self._columns:
            raise ColumnError(
                f"{self.path.name}: no column {name!r} (has {', '.join(self.names)})"
            )
        return self._columns[name]

    def matching(self, predicate):
        """Names, in file order, for which predicate(name) holds."""
        return [name for name in self.names if predicate(name)]


def load_table(path) -> Table:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        rows = [row for row in reader if row]
    if not rows:
        raise AlignmentError(f"{path.name}: file is empty")
    header, data = rows[0], rows[1:]
    if not data:
        raise AlignmentError(f"{path.name}: header but no data rows")
    if len(set(header)) != len(header):
        raise ColumnError(f"{path.name}: duplicate column names in header")
    for lineno, row in enumerate(data, start=2):
        if len(row) != len(header):
            raise AlignmentError(
                f"{path.name}: line {lineno} has {len(row)} cells, "
                f"header has {len(header)}"
            )
    columns = {}
    for j, name in enumerate(header):
        try:
            columns[name] = np.array([float(row[j]) for row in data])
        except ValueError as err:
            raise AlignmentError(f"{path.name}: column {name!r}: {err}") from None
    return Table(path, header, columns)


def theory_constants(table: Table) -> dict:
    """Map k -> asymptotic leading constant from a theory table.

    The table may repeat each k for several problem sizes; the constant
    must be the same in every such row.
    """
    ks = table.column("k")
    consts = table.column("leading_constant")
    out = {}
    for k, c in zip(ks, consts):
        k = int(k)
        if k in out and out[k] != c:
            raise AlignmentError(
                f"{table.path.name}: conflicting leading_constant values for k={k}"
            )
        out[k] = float(c)
    return out
