"""Matrix CSV and report I/O.

CSV files are comma separated, unquoted, LF terminated.  JSON reports are
pretty-printed with sorted keys so regression diffs stay stable.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

KINDS = ("bits", "symbols", "volts")


class MatrixFormatError(ValueError):
    pass


def parse_matrix(text: str, kind: str) -> np.ndarray:
    """Parse CSV text into an int (bits/symbols) or float (volts) matrix."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    rows = [line.split(",") for line in text.strip().splitlines() if line.strip()]
    if not rows:
        raise MatrixFormatError("empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise MatrixFormatError("ragged rows")
    try:
        if kind == "volts":
            m = np.array([[float(c) for c in r] for r in rows], dtype=float)
        else:
            m = np.array([[int(c.strip()) for c in r] for r in rows], dtype=int)
    except ValueError as exc:
        raise MatrixFormatError(f"non-numeric cell: {exc}") from None
    if kind == "bits" and not np.isin(m, (0, 1)).all():
        raise MatrixFormatError("bit matrix entries must be 0 or 1")
    if kind == "symbols" and ((m < 0) | (m > 3)).any():
        raise MatrixFormatError("symbol matrix entries must be in 0..3")
    if kind == "volts" and not np.all(np.isfinite(m)):
        raise MatrixFormatError("voltages must be finite")
    return m


def parse_matrix_csv(path: str | Path, kind: str) -> np.ndarray:
    return parse_matrix(Path(path).read_text(), kind)


def format_matrix(m) -> str:
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError("only 2-D matrices are written")
    if m.dtype.kind == "f":
        cells = [[repr(float(v)) for v in row] for row in m]
    else:
        cells = [[str(int(v)) for v in row] for row in m]
    return "".join(",".join(r) + "\n" for r in cells)


def write_matrix_csv(path: str | Path, m) -> Path:
    path = Path(path)
    path.write_text(format_matrix(m))
    return path


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_report(path: str | Path, report: dict, config: dict) -> Path:
    path = Path(path)
    body = dict(report)
    body["config"] = config
    body["config_hash"] = config_hash(config)
    path.write_text(dumps_json(body))
    return path
