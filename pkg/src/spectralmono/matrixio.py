"""Matrix files and JSON reports.

Matrix files are JSON, either ``{"n": n, "entries": [...]}`` with ``n*n``
row-major numbers (a list of rows is also accepted) or ``{"diag": [...]}``,
or CSV with ``n`` rows of ``n`` comma-separated decimals and no header.
``"-"`` reads standard input. Floats in reports and written matrix files use
17 significant digits so they read back bit for bit.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import SpectralMonoError

__all__ = [
    "MatrixFileError",
    "MatrixInput",
    "read_matrix",
    "parse_matrix",
    "dumps",
    "matrix_json",
    "diag_json",
    "write_atomic",
]


class MatrixFileError(SpectralMonoError, ValueError):
    """Unreadable or invalid matrix file; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, source: str, message: str, line: int | None = None, column: int | None = None):
        self.source, self.line, self.column = source, line, column
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class MatrixInput:
    """Parsed matrix (or diagonal as a 1-D array) plus the digest of the raw bytes."""

    source: str
    value: np.ndarray
    sha256: str

    def describe(self) -> dict:
        return {"path": self.source, "sha256": self.sha256, "shape": list(self.value.shape)}


def _number(text: str, source: str, line: int, column: int) -> float:
    try:
        x = float(text.strip())
    except ValueError:
        raise MatrixFileError(source, f"not a decimal number: {text.strip()!r}", line, column) from None
    if not math.isfinite(x):
        raise MatrixFileError(source, f"non-finite value {text.strip()!r}", line, column)
    return x


def _parse_csv(text: str, source: str) -> np.ndarray:
    rows = []
    for lineno, fields in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        rows.append((lineno, [_number(f, source, lineno, c) for c, f in enumerate(fields, start=1)]))
    if not rows:
        raise MatrixFileError(source, "empty CSV file")
    width = len(rows[0][1])
    for lineno, vals in rows:
        if len(vals) != width:
            raise MatrixFileError(source, f"expected {width} fields, found {len(vals)}", lineno)
    return np.array([vals for _, vals in rows], dtype=float)


def _json_value(x, source: str, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise MatrixFileError(source, f"{where}: expected a number, got {x!r}")
    if not math.isfinite(x):
        raise MatrixFileError(source, f"{where}: non-finite value")
    return float(x)


def _parse_json(text: str, source: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(source, exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(obj, dict):
        raise MatrixFileError(source, 'expected an object with "entries" or "diag"')
    if "diag" in obj:
        d = obj["diag"]
        if not isinstance(d, list) or not d:
            raise MatrixFileError(source, '"diag" must be a non-empty array')
        return np.array([_json_value(x, source, f"diag[{i}]") for i, x in enumerate(d)])
    if "entries" not in obj:
        raise MatrixFileError(source, 'missing "entries" (or "diag")')
    entries = obj["entries"]
    if not isinstance(entries, list) or not entries:
        raise MatrixFileError(source, '"entries" must be a non-empty array')
    if all(isinstance(r, list) for r in entries):
        n = len(entries)
        for i, r in enumerate(entries):
            if len(r) != n:
                raise MatrixFileError(source, f"row {i + 1} has {len(r)} entries, expected {n}")
        flat = [x for r in entries for x in r]
    else:
        flat = entries
        n = obj.get("n")
        if n is None:
            n = math.isqrt(len(flat))
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise MatrixFileError(source, f'"n" must be a positive integer, got {n!r}')
        if len(flat) != n * n:
            raise MatrixFileError(source, f"expected n*n = {n * n} entries, found {len(flat)}")
    if "n" in obj and obj["n"] != n:
        raise MatrixFileError(source, f'"n" = {obj["n"]!r} disagrees with {n} rows')
    vals = [_json_value(x, source, f"entry ({k // n + 1}, {k % n + 1})") for k, x in enumerate(flat)]
    return np.array(vals, dtype=float).reshape(n, n)


def parse_matrix(text: str, source: str = "<string>", *, diag: bool = False, nonnegative: bool = True) -> np.ndarray:
    """Parse file contents; JSON when the first non-blank character is ``{``, CSV otherwise.

    With ``diag`` the result is the 1-D vector of a positive diagonal, read
    from ``{"diag": ...}``, a single CSV row or column, or a diagonal matrix.
    """
    stripped = text.lstrip()
    A = _parse_json(text, source) if stripped.startswith("{") else _parse_csv(text, source)
    if diag:
        if A.ndim == 2:
            if 1 in A.shape:
                A = A.ravel()
            elif A.shape[0] == A.shape[1] and not np.any(A - np.diag(np.diag(A))):
                A = np.diag(A).copy()
            else:
                raise MatrixFileError(source, "expected a diagonal: one row, one column or a diagonal matrix")
        bad = np.flatnonzero(A <= 0)
        if bad.size:
            raise MatrixFileError(source, f"diagonal entry {bad[0] + 1} is not positive ({A[bad[0]]!r})")
        return A
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise MatrixFileError(source, f"expected a square matrix, got shape {A.shape}")
    if nonnegative:
        neg = np.argwhere(A < 0)
        if neg.size:
            i, j = (int(k) for k in neg[0])
            raise MatrixFileError(source, f"negative entry {A[i, j]!r}", i + 1, j + 1)
    return A


def read_matrix(path: str, *, diag: bool = False, nonnegative: bool = True, stdin=None) -> MatrixInput:
    """Read and validate a matrix file; ``"-"`` reads ``stdin`` (default ``sys.stdin``)."""
    if path == "-":
        raw = (stdin or sys.stdin).read()
        raw = raw.encode() if isinstance(raw, str) else raw
    else:
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise MatrixFileError(path, exc.strerror or str(exc)) from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise MatrixFileError(path, "file is not UTF-8 text") from None
    value = parse_matrix(text, path, diag=diag, nonnegative=nonnegative)
    return MatrixInput(path, value, hashlib.sha256(raw).hexdigest())


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _encode(obj, indent, level) -> str:
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ","
    colon = ":" if indent is None else ": "
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        obj = int(obj)
    if isinstance(obj, (np.bool_,)):
        obj = bool(obj)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k)) + colon + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_encode(x, indent, level) for x in obj) + "]"
        return "[" + sep.join(pad + _encode(x, indent, level + 1) for x in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    """JSON text with every float written to 17 significant digits (non-finite as ``null``)."""
    return _encode(obj, indent, 0)


def matrix_json(A) -> str:
    A = np.asarray(A, dtype=float)
    return dumps({"n": int(A.shape[0]), "entries": A.ravel()}, indent=None) + "\n"


def diag_json(d) -> str:
    return dumps({"diag": np.asarray(d, dtype=float).ravel()}, indent=None) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
