"""JSON and CSV readers/writers for reports, samples and grids.

JSON documents carry the deterministic payload at the top level plus a
``meta`` object whose ``generated`` timestamp is the only run-dependent field.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__

META_KEY = "meta"


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(payload: dict, with_meta: bool = True) -> str:
    doc = dict(payload)
    if with_meta:
        doc[META_KEY] = {"generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                         "version": __version__}
    return json.dumps(doc, indent=2, sort_keys=True, default=_default) + "\n"


def strip_meta(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != META_KEY}


def write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def write_json(payload: dict, path: str | Path | None = None, with_meta: bool = True) -> None:
    write_text(dumps(payload, with_meta), path)


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def write_csv(header: list[str], rows, path: str | Path | None = None) -> None:
    write_text(csv_text(header, rows), path)


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = np.array([[float(v) for v in row] for row in r], dtype=float)
    return header, data.reshape(-1, len(header))


SAMPLE_HEADER = ["x", "lambda"]
SURFACE_HEADER = ["x", "y", "lambda"]


def write_sample_csv(pairs, path=None) -> None:
    write_csv(SAMPLE_HEADER, pairs, path)


def read_sample_csv(path) -> np.ndarray:
    header, data = read_csv(path)
    if header != SAMPLE_HEADER:
        raise ValueError(f"unexpected header {header}")
    return data


def surface_rows(gx, gy, lam):
    """Row-major ``(x, y, lambda)`` triples of a grid indexed ``lam[ix, iy]``."""
    for i, x in enumerate(gx):
        for j, y in enumerate(gy):
            yield x, y, lam[i, j]


def write_surface_csv(gx, gy, lam, path=None) -> None:
    write_csv(SURFACE_HEADER, surface_rows(gx, gy, lam), path)


def read_surface_csv(path) -> np.ndarray:
    header, data = read_csv(path)
    if header != SURFACE_HEADER:
        raise ValueError(f"unexpected header {header}")
    return data
