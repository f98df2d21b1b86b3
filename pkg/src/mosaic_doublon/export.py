"""Deterministic CSV writers and readers for the CLI outputs.

Floats are written with ``repr`` so a round trip is exact and identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence

import numpy as np

from .bands import bound_energy, scattering_energy
from .errors import ValidationError
from .model import LatticeSpec

BANDS_COLUMNS = ("K", "k", "E_S", "E_B_plus", "E_B_minus")


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_rows(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def read_rows(text: str, header: Sequence[str]) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != tuple(header):
        raise ValidationError(f"expected columns {tuple(header)}, got {reader.fieldnames}")
    return list(reader)


def band_table(spec: LatticeSpec, n_K: int, n_k: int | None = None) -> np.ndarray:
    """Rows ``(K, k, E_S, E_B_plus, E_B_minus)`` on a product grid over ``[-pi, pi]``."""
    n_k = n_K if n_k is None else n_k
    if n_K < 1 or n_k < 1:
        raise ValidationError("momentum grid is empty")
    K, k = np.meshgrid(np.linspace(-np.pi, np.pi, n_K), np.linspace(-np.pi, np.pi, n_k), indexing="ij")
    K, k = K.ravel(), k.ravel()
    return np.column_stack(
        [K, k, scattering_energy(K, k, spec), bound_energy(K, spec, +1), bound_energy(K, spec, -1)]
    )


def bands_to_csv(table: np.ndarray) -> str:
    return write_rows(BANDS_COLUMNS, table)


def bands_from_csv(text: str) -> np.ndarray:
    rows = read_rows(text, BANDS_COLUMNS)
    return np.array([[float(r[c]) for c in BANDS_COLUMNS] for r in rows]).reshape(-1, len(BANDS_COLUMNS))
