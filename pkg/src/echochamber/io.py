"""File formats shared by the CLI subcommands and the pipeline."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .community.partition import Partition


def dump_json(obj, path) -> None:
    Path(path).write_text(to_json(obj) + "\n", encoding="utf-8")


def to_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=True)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _num(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 2 ** 53 else repr(x)


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_partition_csv(p: Partition, path) -> None:
    write_rows(path, ["node", "community"], zip(p.nodes, p.labels.tolist()))


def read_partition_csv(path) -> Partition:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"node", "community"} <= set(reader.fieldnames or []):
            raise ValueError(f"{path}: expected header node,community")
        rows = [(r["node"], int(r["community"])) for r in reader]
    return Partition.from_mapping(dict(rows), [n for n, _ in rows])


def write_histogram_csv(path, series: dict[str, tuple[np.ndarray, np.ndarray]], key: str = "series") -> None:
    rows = []
    for name, (edges, dens) in series.items():
        for lo, hi, v in zip(edges[:-1].tolist(), edges[1:].tolist(), dens.tolist()):
            rows.append((name, float(lo), float(hi), float(v)))
    write_rows(path, [key, "bin_left", "bin_right", "density"], rows)


def read_numbers(path, column: str | None = None) -> np.ndarray:
    """One numeric column from a CSV; the header row is optional."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        return np.array([])
    try:
        [float(v) for v in rows[0]]
        header, body = None, rows
    except ValueError:
        header, body = rows[0], rows[1:]
    idx = 0
    if column is not None:
        if header is None or column not in header:
            raise ValueError(f"{path}: no column {column!r}")
        idx = header.index(column)
    return np.array([float(r[idx]) for r in body])


def read_points(path) -> tuple[np.ndarray, np.ndarray]:
    """``(x, y)`` from a CCDF CSV: columns ``x,ccdf`` or the first two."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    try:
        [float(v) for v in rows[0][:2]]
        header, body = None, rows
    except ValueError:
        header, body = rows[0], rows[1:]
    ix, iy = 0, 1
    if header and "x" in header and "ccdf" in header:
        ix, iy = header.index("x"), header.index("ccdf")
    return np.array([float(r[ix]) for r in body]), np.array([float(r[iy]) for r in body])
