"""CSV / JSON / PLY writers for sweep records.

All writers are deterministic: the same records produce byte-identical output.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .steering import OK, ZERO_PROBABILITY, SweepResult

SCHEMA_VERSION = 1
FIELDS = ("r", "phi", "beta_re", "beta_im", "x1", "x2", "x3", "density", "raw_overlap", "flag")


@dataclass(frozen=True)
class SweepRecord:
    r: float
    phi: float
    beta_re: float
    beta_im: float
    x1: float
    x2: float
    x3: float
    density: float
    raw_overlap: float
    flag: str

    def values(self) -> tuple:
        return tuple(getattr(self, k) for k in FIELDS)


def records_from_sweep(res: SweepResult) -> list[SweepRecord]:
    bloch = res.bloch
    ok = res.ok
    raw = res.raw_overlap
    out = []
    for i in range(res.beta.size):
        out.append(
            SweepRecord(
                float(res.r[i]),
                float(res.phi[i]),
                float(res.beta[i].real),
                float(res.beta[i].imag),
                *(float(v) for v in bloch[i]),
                float(raw[i]) / math.pi,
                float(raw[i]),
                OK if ok[i] else ZERO_PROBABILITY,
            )
        )
    return out


def fmt_real(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def csv_text(records: Iterable[SweepRecord], extra: Sequence[tuple[str, object]] = ()) -> str:
    """Header row then one line per record; ``extra`` appends constant columns."""
    buf = io.StringIO()
    buf.write(",".join(list(FIELDS) + [k for k, _ in extra]) + "\n")
    tail = [fmt_real(v) if isinstance(v, float) else str(v) for _, v in extra]
    for rec in records:
        cells = [v if isinstance(v, str) else fmt_real(v) for v in rec.values()]
        buf.write(",".join(cells + tail) + "\n")
    return buf.getvalue()


def _json_real(x: float):
    return None if math.isnan(x) else x


def record_dict(rec: SweepRecord) -> dict:
    return {k: (v if isinstance(v, str) else _json_real(v)) for k, v in zip(FIELDS, rec.values())}


def json_text(payload: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(payload)
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def ply_text(records: Iterable[SweepRecord], comment: str = "") -> str:
    """ASCII PLY point cloud of the admissible outcomes (zero-probability rows have no vertex)."""
    pts = [r for r in records if r.flag == OK]
    lines = ["ply", "format ascii 1.0"]
    if comment:
        lines.append(f"comment {comment}")
    lines += [
        f"element vertex {len(pts)}",
        "property double x",
        "property double y",
        "property double z",
        "property double density",
        "end_header",
    ]
    lines += [" ".join(fmt_real(v) for v in (p.x1, p.x2, p.x3, p.density)) for p in pts]
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> list[dict]:
    """Parse :func:`csv_text` output back into dicts of floats (``flag`` stays a string)."""
    rows = text.strip("\n").split("\n")
    header = rows[0].split(",")
    out = []
    for line in rows[1:]:
        cells = line.split(",")
        out.append({k: (c if k == "flag" else float(c)) for k, c in zip(header, cells)})
    return out


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
