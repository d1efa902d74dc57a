"""Matrix and label file formats.

CSV holds one sample per row with comma-separated decimals and no header;
the loader transposes into the library's p x n (features x samples)
convention.  BIN is a little-endian container: magic "CMAT1", u64 rows and
cols, then row-major float64 payload of the stored p x n matrix.  Label
files hold one integer per line.  Floats are written with shortest
round-trip formatting, so save/load is exact in both formats.
"""

import struct
from pathlib import Path

import numpy as np

from .errors import ContractViolation, ParseError
from .linalg import as_matrix

MATRIX_MAGIC = b"CMAT1"
FORMATS = ("csv", "bin")


def _check_format(fmt: str) -> str:
    if fmt not in FORMATS:
        raise ContractViolation(f"unknown matrix format {fmt!r}, expected one of {FORMATS}")
    return fmt


def _open(path: Path, mode: str):
    try:
        return open(path, mode, encoding=None if "b" in mode else "utf-8")
    except OSError as exc:
        raise ParseError(f"cannot open {path}: {exc}") from exc


def load_matrix(path, fmt: str = "csv") -> np.ndarray:
    """Load a matrix in the p x n convention from a CSV or BIN file."""
    path = Path(path)
    _check_format(fmt)
    if fmt == "bin":
        return _load_bin(path)
    rows: list[list[float]] = []
    width = None
    with _open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ParseError(f"{path}: ragged row at line {lineno}: "
                                 f"expected {width} cells, got {len(cells)}")
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise ParseError(f"{path}: non-numeric cell at line {lineno}") from exc
    if not rows:
        raise ParseError(f"{path}: empty matrix file")
    samples = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise ParseError(f"{path}: matrix contains non-finite values")
    return samples.T.copy()


def _load_bin(path: Path) -> np.ndarray:
    with _open(path, "rb") as fh:
        magic = fh.read(len(MATRIX_MAGIC))
        if magic != MATRIX_MAGIC:
            raise ParseError(f"{path}: bad magic {magic!r} at offset 0, expected {MATRIX_MAGIC!r}")
        header = fh.read(16)
        if len(header) != 16:
            raise ParseError(f"{path}: truncated header at offset {len(MATRIX_MAGIC)}")
        rows, cols = struct.unpack("<2Q", header)
        if rows < 1 or cols < 1:
            raise ParseError(f"{path}: invalid shape ({rows}, {cols})")
        payload = fh.read(8 * rows * cols)
        if len(payload) != 8 * rows * cols:
            raise ParseError(f"{path}: truncated payload at offset {21 + len(payload)}")
    matrix = np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(np.float64)
    if not np.all(np.isfinite(matrix)):
        raise ParseError(f"{path}: matrix contains non-finite values")
    return matrix


def save_matrix(matrix, path, fmt: str = "csv") -> None:
    """Write a p x n matrix; CSV emits one sample per row (the transpose)."""
    matrix = as_matrix(matrix, "matrix to save")
    path = Path(path)
    _check_format(fmt)
    if fmt == "bin":
        with open(path, "wb") as fh:
            fh.write(MATRIX_MAGIC)
            fh.write(struct.pack("<2Q", *matrix.shape))
            fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for sample in matrix.T:
            fh.write(",".join(repr(v) for v in sample.tolist()))
            fh.write("\n")


def load_labels(path) -> np.ndarray:
    """One integer label per line."""
    path = Path(path)
    labels = []
    with _open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError as exc:
                raise ParseError(f"{path}: non-integer label at line {lineno}") from exc
    if not labels:
        raise ParseError(f"{path}: empty label file")
    return np.asarray(labels, dtype=np.int64)


def save_labels(labels, path) -> None:
    labels = np.asarray(labels, dtype=np.int64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for value in labels.tolist():
            fh.write(f"{value}\n")


def check_labels_match(labels: np.ndarray, matrix: np.ndarray, source: str) -> None:
    """Raise a parse error when label count disagrees with the sample count."""
    if labels.size != matrix.shape[1]:
        raise ParseError(f"{source}: {labels.size} labels do not match {matrix.shape[1]} samples")
