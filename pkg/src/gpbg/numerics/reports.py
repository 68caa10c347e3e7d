"""Report serialization: canonical JSON, CSV sweeps and atomic file writes."""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile

from ..core import dumps


def clean(obj):
    """Convert numpy scalars/arrays to plain JSON values; non-finite floats to strings."""
    if hasattr(obj, "tolist"):
        obj = obj.tolist()
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def to_json(obj) -> str:
    return dumps(clean(obj))


def to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    rows = [clean(r) for r in rows]
    if columns is None:
        columns = sorted({key for r in rows for key in r})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in columns})
    return buf.getvalue()


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gpbg-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
