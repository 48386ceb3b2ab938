"""Readers for the simulator's columnar text formats.

Self-contained on purpose: this package consumes the documented TSV files and
never imports from the simulation code.
"""

import numpy as np


class InputError(ValueError):
    """Missing file content, column, or malformed table."""


def read_table(path):
    """Parse a '#'-headed TSV into (meta dict, column names, float matrix)."""
    meta, columns, rows = {}, None, []
    with open(path, encoding="ascii") as fh:
        for line in fh.read().splitlines():
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("meta "):
                    _, key, value = body.split(None, 2)
                    meta[key] = value
                elif body.startswith("columns:"):
                    columns = body.split(":", 1)[1].split()
                continue
            rows.append([float(v) for v in line.split("\t")])
    if columns is None:
        raise InputError(f"{path}: missing '# columns:' header")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    if rows and data.shape[1] != len(columns):
        raise InputError(f"{path}: {data.shape[1]} columns but header names "
                         f"{len(columns)}")
    return meta, columns, data


class Table:
    """Column access with named errors for anything missing."""

    def __init__(self, path):
        self.path = str(path)
        self.meta, self.columns, self.data = read_table(path)
        if self.data.shape[0] == 0:
            raise InputError(f"{self.path}: no data rows")

    def column(self, name):
        if name not in self.columns:
            raise InputError(f"{self.path}: required column {name!r} missing "
                             f"(has {self.columns})")
        return self.data[:, self.columns.index(name)]

    def has(self, name):
        return name in self.columns


def read_cutoff(path):
    """Cutoff-fit file -> dict with plateau/noise/omega_a/omega_b/omega_cut."""
    table = Table(path)
    row = table.data[0]
    out = {name: row[table.columns.index(name)]
           for name in ("plateau", "noise", "omega_a", "omega_b", "omega_cut")}
    out["degenerate"] = bool(int(table.column("degenerate")[0]))
    return out
