"""Reading and writing coefficient grids, sweep tables and cartoon specs.

Coefficient grids are stored as CSV (``cone, j, l, y1, y2, re, im, abs``)
or as a little-endian binary dump: a 28-byte header
``magic "TSHC", version (u32), cone (u8, 0=h 1=v), 3 pad bytes, j (i32),
l (i32), count (u64)`` followed by ``count`` records of four float64
``(y1, y2, re, im)``.
"""
from __future__ import annotations

import csv
import json
import os
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import SweepRow
from .cartoon import Arc, CartoonFunction, StarSet, build_graded_cartoon, bump_f0
from .transform import CoefficientGrid

__all__ = [
    "GRID_COLUMNS",
    "SWEEP_COLUMNS",
    "SpecError",
    "write_grid_csv",
    "read_grid_csv",
    "write_grid_binary",
    "read_grid_binary",
    "write_sweep_csv",
    "write_sweep_dat",
    "read_sweep_csv",
    "write_json",
    "write_pgm",
    "cartoon_from_dict",
    "load_cartoon",
    "save_cartoon",
]

GRID_COLUMNS = ("cone", "j", "l", "y1", "y2", "re", "im", "abs")
SWEEP_COLUMNS = ("cone", "l", "theta", "L_max", "L_min", "count", "skipped", "directed")
MAGIC = b"TSHC"
VERSION = 1
_HEADER = struct.Struct("<4sIBxxxiiQ")
_CONES = {"h": 0, "v": 1}


class SpecError(ValueError):
    """A cartoon specification or data file is malformed."""


def _fmt(x: float) -> str:
    return "%.17g" % x


def _atomic_write(path: Path, data: bytes) -> None:
    # write-then-rename so an interrupted run never leaves a partial file
    path = Path(path)
    tmp = path.with_name(path.name + ".part")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def write_grid_csv(grid: CoefficientGrid, path) -> None:
    lines = [",".join(GRID_COLUMNS)]
    for (y1, y2), v in zip(grid.points, grid.values):
        lines.append(",".join([grid.cone, str(grid.j), str(grid.l), _fmt(y1), _fmt(y2),
                               _fmt(v.real), _fmt(v.imag), _fmt(abs(v))]))
    _atomic_write(Path(path), ("\n".join(lines) + "\n").encode())


def read_grid_csv(path) -> CoefficientGrid:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise SpecError(f"{path}: no coefficient rows")
    if tuple(rows[0].keys()) != GRID_COLUMNS:
        raise SpecError(f"{path}: unexpected columns {list(rows[0].keys())}")
    cone, j, l = rows[0]["cone"], int(rows[0]["j"]), int(rows[0]["l"])
    pts = np.array([[float(r["y1"]), float(r["y2"])] for r in rows])
    vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    return CoefficientGrid(cone, j, l, pts, vals)


def write_grid_binary(grid: CoefficientGrid, path) -> None:
    header = _HEADER.pack(MAGIC, VERSION, _CONES[grid.cone], grid.j, grid.l, len(grid))
    rec = np.empty((len(grid), 4), dtype="<f8")
    rec[:, :2] = grid.points
    rec[:, 2] = grid.values.real
    rec[:, 3] = grid.values.imag
    _atomic_write(Path(path), header + rec.tobytes())


def read_grid_binary(path) -> CoefficientGrid:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SpecError(f"{path}: truncated header")
    magic, version, cone, j, l, count = _HEADER.unpack_from(raw)
    if magic != MAGIC or version != VERSION:
        raise SpecError(f"{path}: not a version-{VERSION} coefficient dump")
    rec = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if rec.size != 4 * count:
        raise SpecError(f"{path}: expected {count} records, found {rec.size / 4:g}")
    rec = rec.reshape(count, 4)
    return CoefficientGrid("hv"[cone], j, l, rec[:, :2].copy(), rec[:, 2] + 1j * rec[:, 3])


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    lines = [",".join(SWEEP_COLUMNS)]
    for r in rows:
        lines.append(",".join([r.cone, str(r.l), _fmt(r.theta), _fmt(r.L_max), _fmt(r.L_min),
                               str(r.count), str(int(r.skipped)), r.directed or ""]))
    _atomic_write(Path(path), ("\n".join(lines) + "\n").encode())


def read_sweep_csv(path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        return [SweepRow(r["cone"], int(r["l"]), float(r["theta"]), float(r["L_max"]),
                         float(r["L_min"]), int(r["count"]), r["directed"] or None, bool(int(r["skipped"])))
                for r in csv.DictReader(fh)]


def write_sweep_dat(rows: Sequence[SweepRow], path) -> None:
    """Gnuplot blocks ``theta L_max L_min``, one indexed block per cone and direction."""
    groups: dict[tuple, list[SweepRow]] = {}
    for r in rows:
        if not r.skipped:
            groups.setdefault((r.cone, r.directed or ""), []).append(r)
    out = []
    for (cone, d), rs in sorted(groups.items()):
        out.append(f"# cone={cone} directed={d or 'none'}")
        out.append("# theta L_max L_min")
        out.extend(f"{_fmt(r.theta)} {_fmt(r.L_max)} {_fmt(r.L_min)}" for r in rs)
        out.extend(["", ""])
    _atomic_write(Path(path), "\n".join(out).encode())


def write_json(obj, path) -> None:
    _atomic_write(Path(path), (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode())


def write_pgm(samples: np.ndarray, path) -> None:
    """8-bit binary PGM; rows run along ``x2`` from top (largest) to bottom."""
    a = np.asarray(samples, dtype=float).T[::-1]
    lo, hi = float(a.min()), float(a.max())
    scaled = np.zeros(a.shape) if hi == lo else (a - lo) / (hi - lo)
    img = np.round(255 * scaled).astype(np.uint8)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    _atomic_write(Path(path), header + img.tobytes())


# -- cartoon specs -------------------------------------------------------------

def _f0_from_dict(d):
    if d is None or d.get("preset", "zero") == "zero":
        return None
    if d["preset"] == "bump":
        return bump_f0(float(d["amplitude"]), d["centre"], float(d["width"]))
    raise SpecError(f"unknown f0 preset {d['preset']!r}")


def cartoon_from_dict(d: dict) -> CartoonFunction:
    """Build a cartoon from its JSON description (see :meth:`CartoonFunction.to_dict`)."""
    try:
        rs = d["radius_series"]
        T = StarSet(origin=tuple(d.get("origin", (0.0, 0.0))), const=float(rs["const"]),
                    cos=tuple(rs.get("cos", ())), sin=tuple(rs.get("sin", ())))
        arcs = [Arc(float(a["from"]), float(a["to"]), int(a["order"]), float(a.get("amplitude", 1.0)))
                for a in d["arcs"]]
        tube = d.get("tube", "auto")
        return build_graded_cartoon(T, arcs, f0=_f0_from_dict(d.get("f0")), blend=float(d.get("blend", 0.1)),
                                    tube=tube, smoothness=int(d.get("smoothness", 16)))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed cartoon spec: missing or invalid {exc}") from exc


def load_cartoon(path) -> CartoonFunction:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from exc
    return cartoon_from_dict(d)


def save_cartoon(f: CartoonFunction, path) -> None:
    write_json(f.to_dict(), path)
