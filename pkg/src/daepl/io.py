"""Matrix Market ingestion and atomic writers for reports and traces."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .errors import MatrixMarketError

__all__ = ["read_matrix", "read_vector", "atomic_write", "write_json", "dumps_json"]


def _locate_bad_line(path: Path) -> tuple[int | None, str]:
    """Best-effort line diagnostic for a file scipy refused to parse."""
    try:
        lines = path.read_text().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        return None, f"cannot read file: {exc}"
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        return 1, "missing '%%MatrixMarket' banner"
    header = lines[0].lower().split()
    if len(header) != 5 or header[1] != "matrix" or header[2] not in ("array", "coordinate"):
        return 1, f"unsupported banner '{lines[0]}'"
    if header[3] not in ("real", "integer", "double"):
        return 1, f"field '{header[3]}' not supported (real matrices only)"
    coordinate = header[2] == "coordinate"
    size_seen = False
    for no, raw in enumerate(lines[1:], start=2):
        s = raw.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if not size_seen:
            want = 3 if coordinate else 2
            if len(parts) != want or not all(p.isdigit() for p in parts):
                return no, f"size line must hold {want} nonnegative integers, got '{s}'"
            size_seen = True
            continue
        want = 3 if coordinate else 1
        if len(parts) != want:
            return no, f"expected {want} field(s), got {len(parts)}"
        try:
            [float(p) for p in parts]
        except ValueError:
            return no, f"non-numeric entry '{s}'"
    if not size_seen:
        return None, "no size line"
    return None, "entry count does not match the size line"


def read_matrix(path) -> np.ndarray:
    """Dense real array from a Matrix Market file (array or coordinate)."""
    path = Path(path)
    if not path.is_file():
        raise MatrixMarketError(str(path), "file not found")
    try:
        m = scipy.io.mmread(str(path))
    except Exception:  # scipy raises ValueError, IndexError, ... on malformed input
        line, msg = _locate_bad_line(path)
        raise MatrixMarketError(str(path), msg, line) from None
    if scipy.sparse.issparse(m):
        m = m.toarray()
    m = np.asarray(m)
    if np.iscomplexobj(m):
        raise MatrixMarketError(str(path), "complex matrices are not supported")
    m = m.astype(float)
    if not np.all(np.isfinite(m)):
        raise MatrixMarketError(str(path), "matrix contains non-finite entries")
    return m


def read_vector(path) -> np.ndarray:
    """An n-vector from a Matrix Market ``n x 1`` / ``1 x n`` file or plain whitespace text."""
    path = Path(path)
    if not path.is_file():
        raise MatrixMarketError(str(path), "file not found")
    head = path.read_text().lstrip()[:14].lower()
    if head.startswith("%%matrixmarket"):
        m = read_matrix(path)
        if m.ndim != 2 or min(m.shape) != 1:
            raise MatrixMarketError(str(path), f"expected an n x 1 or 1 x n matrix, got {m.shape}")
        return m.ravel()
    vals = []
    for no, raw in enumerate(path.read_text().splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        for tok in s.split():
            try:
                vals.append(float(tok))
            except ValueError:
                raise MatrixMarketError(str(path), f"non-numeric token '{tok}'", no) from None
    if not vals:
        raise MatrixMarketError(str(path), "no values found")
    v = np.array(vals)
    if not np.all(np.isfinite(v)):
        raise MatrixMarketError(str(path), "vector contains non-finite entries")
    return v


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    atomic_write(path, dumps_json(obj))
