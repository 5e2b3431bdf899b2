"""Dense matrix files: CSV (one row per line) or JSON {"m", "n", "entries"}."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .relaxation import as_matrix


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return parse_matrix_json(json.loads(text))
    rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
    if len({len(r) for r in rows}) > 1:
        raise ValueError(f"{path}: rows have different lengths")
    return as_matrix([[float(c) for c in r] for r in rows])


def parse_matrix_json(obj: dict) -> np.ndarray:
    try:
        m, n, entries = int(obj["m"]), int(obj["n"]), obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix JSON needs keys m, n, entries") from exc
    flat = np.asarray(entries, dtype=float).ravel()
    if flat.size != m * n:
        raise ValueError(f"expected {m * n} entries, got {flat.size}")
    return as_matrix(flat.reshape(m, n))


def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {"m": A.shape[0], "n": A.shape[1], "entries": A.ravel().tolist()}


def write_matrix(path, A) -> None:
    path = Path(path)
    A = as_matrix(A)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(matrix_to_json(A)))
    else:
        np.savetxt(path, A, delimiter=",", fmt="%.17g")
