"""JSON matrix files and point-cloud CSV/JSON formats.

A matrix file is a JSON list of objects
``{"name": str, "rows": int, "cols": int, "data": [[[re, im], ...], ...]}``.
Complex numbers are always ``[re, im]`` pairs.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import ParseError, ShapeError
from .pencilvariety import SigmaData, VarietyPoint, VarietyPointCloud


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def pair_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ShapeError(f"expected [re, im] pair, got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_to_json(name: str, m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "name": name,
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[complex_pair(v) for v in row] for row in m],
    }


def parse_matrices(text: str, source: str = "<string>") -> dict[str, np.ndarray]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno} (offset {exc.pos}): {exc.msg}") from exc
    if not isinstance(doc, list):
        raise ParseError(f"{source}: top level must be a list of matrix objects")
    out: dict[str, np.ndarray] = {}
    for k, entry in enumerate(doc):
        if not isinstance(entry, dict) or not {"name", "rows", "cols", "data"} <= entry.keys():
            raise ParseError(f"{source}: entry {k} lacks name/rows/cols/data")
        name, rows, cols, data = entry["name"], entry["rows"], entry["cols"], entry["data"]
        if not isinstance(data, list) or len(data) != rows:
            raise ShapeError(f"{source}: {name} declares {rows} rows, has {len(data) if isinstance(data, list) else 'no'}")
        for r, row in enumerate(data):
            if not isinstance(row, list) or len(row) != cols:
                raise ShapeError(f"{source}: {name} row {r} is ragged (expected {cols} entries)")
        m = np.array([[pair_complex(v) for v in row] for row in data], dtype=np.complex128)
        out[str(name)] = m.reshape(rows, cols)
    return out


def load_matrix_file(path) -> dict[str, np.ndarray]:
    path = Path(path)
    return parse_matrices(path.read_text(), str(path))


def dump_matrices(named: Mapping[str, np.ndarray]) -> str:
    return json.dumps([matrix_to_json(k, v) for k, v in named.items()], indent=1) + "\n"


def _indexed(named: Mapping[str, np.ndarray], prefix: str) -> list[np.ndarray]:
    out = []
    k = 1
    while f"{prefix}{k}" in named:
        out.append(named[f"{prefix}{k}"])
        k += 1
    return out


def sigma_from_named(named: Mapping[str, np.ndarray]) -> SigmaData:
    ps, us = _indexed(named, "P"), _indexed(named, "U")
    if not ps or len(ps) != len(us):
        raise ParseError(f"Sigma file needs P1..Pn and U1..Un, found {len(ps)} P and {len(us)} U")
    return SigmaData(tuple(ps), tuple(us))


def sigma_to_named(s: SigmaData) -> dict[str, np.ndarray]:
    named = {f"P{i + 1}": p for i, p in enumerate(s.projections)}
    named.update({f"U{i + 1}": u for i, u in enumerate(s.unitaries)})
    return named


def tuple_from_named(named: Mapping[str, np.ndarray], prefix: str = "T") -> list[np.ndarray]:
    mats = _indexed(named, prefix)
    if not mats:
        raise ParseError(f"expected matrices named {prefix}1, {prefix}2, ...")
    return mats


CSV_TAIL = ("class", "residual")


def cloud_header(n: int) -> list[str]:
    cols = ["z_re", "z_im"]
    for i in range(1, n + 1):
        cols += [f"z{i}_re", f"z{i}_im"]
    return cols + list(CSV_TAIL)


def _fmt(x: float) -> str:
    return repr(float(x))


def cloud_to_csv(points: Iterable[VarietyPoint], n: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cloud_header(n))
    for p in points:
        row = [_fmt(p.z.real), _fmt(p.z.imag)]
        for c in p.coordinates:
            row += [_fmt(c.real), _fmt(c.imag)]
        w.writerow(row + [p.classification, _fmt(p.witness_residual)])
    return buf.getvalue()


def cloud_from_csv(text: str) -> list[VarietyPoint]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("empty cloud file")
    header = rows[0]
    if len(header) < 6 or header[:2] != ["z_re", "z_im"] or tuple(header[-2:]) != CSV_TAIL:
        raise ParseError(f"unexpected cloud header {header}")
    n = (len(header) - 4) // 2
    if header != cloud_header(n):
        raise ParseError(f"unexpected cloud header {header}")
    pts = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ShapeError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(v) for v in row[:-2]]
            resid = float(row[-1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        z = complex(vals[0], vals[1])
        coords = tuple(complex(vals[2 + 2 * i], vals[3 + 2 * i]) for i in range(n))
        pts.append(VarietyPoint(z, coords, row[-2], resid))
    return pts


def cloud_to_json(cloud: VarietyPointCloud) -> str:
    doc = {
        "grid": cloud.grid,
        "interior": cloud.interior_count,
        "boundary": cloud.boundary_count,
        "exterior": cloud.exterior_count,
        "points": [
            {"z": complex_pair(p.z),
             "coordinates": [complex_pair(c) for c in p.coordinates],
             "class": p.classification,
             "residual": float(p.witness_residual)}
            for p in cloud.points
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def cloud_from_json(text: str) -> list[VarietyPoint]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return [VarietyPoint(pair_complex(p["z"]), tuple(pair_complex(c) for c in p["coordinates"]),
                         p["class"], float(p["residual"])) for p in doc["points"]]


def load_cloud(path) -> list[VarietyPoint]:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return cloud_from_json(text)
    return cloud_from_csv(text)
