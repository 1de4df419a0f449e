"""Shared CSV/JSON writers: a ``# key: value`` header block, then the table."""

from __future__ import annotations

import csv
import json
import math

import numpy as np


def format_value(v) -> str:
    """Round-trip text for one cell; integral floats drop their trailing '.0'."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isfinite(v) and v.is_integer() and abs(v) < 2**53:
            return str(int(v))
        return repr(v)
    return str(v)


def write_csv(path, columns, rows, header: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for key, val in (header or {}).items():
            fh.write(f"# {key}: {val}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(row[c]) for c in columns])


def read_csv(path) -> tuple[dict, list[dict]]:
    """Inverse of :func:`write_csv` (cells come back as strings)."""
    header = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# ") and not body:
            key, _, val = line[2:].partition(": ")
            header[key] = val
        else:
            body.append(line)
    return header, list(csv.DictReader(body))


def write_json(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False, allow_nan=True)
        fh.write("\n")
