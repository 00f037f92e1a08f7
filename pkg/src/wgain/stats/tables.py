"""CSV score tables: rows are datasets, columns are methods.

The expected layout is a header row whose first cell labels the dataset
column (any text) followed by method names, then one row per dataset with
the dataset name and one numeric score per method.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ..exceptions import InputError


@dataclass
class ScoreTable:
    datasets: list
    methods: list
    values: np.ndarray  # (n_datasets, n_methods)


def load_score_table(path) -> ScoreTable:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise InputError(f"{path}: need a header row and at least one data row")
    header = [cell.strip() for cell in rows[0]]
    methods = header[1:]
    if len(methods) < 1:
        raise InputError(f"{path}: header row has no method columns")
    datasets = []
    values = []
    for line_no, row in enumerate(rows[1:], start=2):
        cells = [cell.strip() for cell in row]
        if len(cells) != len(header):
            raise InputError(
                f"{path}: row {line_no} has {len(cells)} cells, expected {len(header)}"
            )
        datasets.append(cells[0])
        parsed = []
        for col_no, cell in enumerate(cells[1:], start=2):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise InputError(
                    f"{path}: non-numeric value {cell!r} at row {line_no}, column {col_no}"
                ) from None
        values.append(parsed)
    return ScoreTable(datasets=datasets, methods=methods, values=np.asarray(values, dtype=np.float64))


def save_score_table(path, table: ScoreTable, index_label: str = "dataset") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([index_label, *table.methods])
        for name, row in zip(table.datasets, table.values):
            writer.writerow([name, *[repr(float(v)) for v in row]])
