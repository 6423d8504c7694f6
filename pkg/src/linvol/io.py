"""Atomic file emission: JSON summaries and CSV tables.

All numbers are written as decimal strings (exact rationals as 'p/q',
quadratic-field values as 'a+b√D') so archived results are lossless.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from fractions import Fraction

from .errors import IoError
from .numbers import QuadExt, format_exact


def render(value):
    """Serializable form of a result scalar."""
    if isinstance(value, (Fraction, QuadExt)):
        return format_exact(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return [render(v) for v in value]
    if isinstance(value, dict):
        return {str(k): render(v) for k, v in value.items()}
    if isinstance(value, frozenset):
        return sorted(value)
    return value


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    try:
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-linvol-")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as e:
        raise IoError(str(e), path=path)


def write_json(path, obj):
    _atomic_write(path, json.dumps(render(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path, header, rows):
    import io as _io

    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([render(v) if not isinstance(v, str) else v for v in row])
    _atomic_write(path, buf.getvalue())


def emit_plotdata(series, path, xlabel="x", ylabel="y"):
    """Two-column CSV for external plotting."""
    series = list(series)
    if not series:
        raise IoError("refusing to emit an empty series", path=path)
    write_csv(path, [xlabel, ylabel], series)
