"""JSON documents for point sets, surfaces and reports.

Reals are written with 17 significant digits, which round-trips every
double exactly. Output is deterministic: keys keep insertion order and no
timestamps are recorded.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

import numpy as np

from .cutproject import ProjectedSet
from .delone import Box, Torus, WindowedPointSet
from .errors import SchemaViolation
from .hyperbolic import HyperbolicPoint, Isometry
from .surface import SolvedPolygon, SurfaceGroup, VertexCycle

VERSION = 1


# ------------------------------------------------------------ emitter

def _num(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _emit(obj, out: list, indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True or obj is False:
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_num(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for k, (key, val) in enumerate(obj.items()):
            out.append(pad + json.dumps(str(key)) + ": ")
            _emit(val, out, indent, level + 1)
            if k + 1 < len(obj):
                out.append(",")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        # flat lists of scalars stay on one line
        if all(not isinstance(v, (list, tuple, dict)) for v in obj):
            parts = []
            for v in obj:
                buf: list = []
                _emit(v, buf, indent, level + 1)
                parts.append("".join(buf))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[")
        for k, val in enumerate(obj):
            out.append(pad)
            _emit(val, out, indent, level + 1)
            if k + 1 < len(obj):
                out.append(",")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 1) -> str:
    out: list = []
    _emit(to_jsonable(obj), out, indent, 0)
    return "".join(out) + "\n"


def to_jsonable(obj):
    """Plain containers from dataclasses, arrays and library value types."""
    if isinstance(obj, (ProjectedSet, WindowedPointSet)):
        return pointset_doc(obj)
    if isinstance(obj, SurfaceGroup):
        return surface_doc(obj)
    if isinstance(obj, Isometry):
        return [obj.a, obj.b, obj.c, obj.d]
    if isinstance(obj, HyperbolicPoint):
        return [obj.x, obj.y]
    if isinstance(obj, Box):
        return {"lo": list(obj.lo), "hi": list(obj.hi)}
    if isinstance(obj, Torus):
        return {"torus": list(obj.sides)}
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [[float(z.real), float(z.imag)] for z in obj.ravel()]
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        raise SchemaViolation(f"{path}: {e}") from e


# ------------------------------------------------------------ validation helpers

def _need(doc, key, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaViolation(f"missing field {key!r}")
    v = doc[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaViolation(f"field {key!r} has type {type(v).__name__}")
    return v


def _real(v, what="value") -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaViolation(f"{what} must be a number")
    return float(v)


def _reals(v, what="list") -> list:
    if not isinstance(v, list):
        raise SchemaViolation(f"{what} must be a list")
    return [_real(x, what) for x in v]


def _check_schema(doc, name):
    if not isinstance(doc, dict):
        raise SchemaViolation("document must be a JSON object")
    if doc.get("schema") != name:
        raise SchemaViolation(f"expected schema {name!r}, got {doc.get('schema')!r}")


# ------------------------------------------------------------ point sets

def pointset_doc(S) -> dict:
    if isinstance(S, ProjectedSet):
        return {
            "schema": "pointset", "version": VERSION, "kind": "projected", "dim": 1,
            "window": {"lo": [S.window[0]], "hi": [S.window[1]]},
            "params": None,
            "coords": [float(c) for c in S.coords],
            "flags": [bool(f) for f in S.boundary_flags],
            "rho": S.rho, "mode": S.mode,
            "ambiguous": [[float(t), float(s)] for t, s in S.ambiguous],
        }
    W = S.window
    coords = ([float(p[0]) for p in S.points] if S.dim == 1
              else [[float(v) for v in p] for p in S.points])
    return {
        "schema": "pointset", "version": VERSION, "kind": "windowed", "dim": S.dim,
        "window": to_jsonable(W),
        "params": None if S.params is None else [float(v) for v in S.params],
        "coords": coords,
        "flags": [False] * len(S),
    }


def pointset_from_doc(doc):
    _check_schema(doc, "pointset")
    dim = _need(doc, "dim", int)
    if dim < 1:
        raise SchemaViolation("dim must be positive")
    win = _need(doc, "window", dict)
    coords = _need(doc, "coords", list)
    flags = _need(doc, "flags", list)
    if len(flags) != len(coords) or not all(isinstance(f, bool) for f in flags):
        raise SchemaViolation("flags must be booleans, one per coordinate")
    if dim == 1:
        pts = np.array(_reals(coords, "coords"), dtype=float)
    else:
        if not all(isinstance(p, list) and len(p) == dim for p in coords):
            raise SchemaViolation(f"coords must be lists of {dim} reals")
        pts = np.array([_reals(p, "coords") for p in coords], dtype=float).reshape(-1, dim)
    params = doc.get("params")
    if params is not None:
        params = tuple(_reals(params, "params"))
        if len(params) != 2:
            raise SchemaViolation("params must be [epsilon, delta]")
    if "torus" in win:
        window = Torus(tuple(_reals(win["torus"], "torus")))
    else:
        lo, hi = _reals(_need(win, "lo"), "lo"), _reals(_need(win, "hi"), "hi")
        if len(lo) != dim or len(hi) != dim:
            raise SchemaViolation("window dimension mismatch")
        window = Box(tuple(lo), tuple(hi))
    kind = doc.get("kind", "windowed")
    try:
        if kind == "projected":
            if dim != 1 or isinstance(window, Torus):
                raise SchemaViolation("projected sets are one-dimensional with an interval window")
            amb = doc.get("ambiguous", [])
            if not isinstance(amb, list):
                raise SchemaViolation("ambiguous must be a list")
            ambiguous = [tuple(_reals(a, "ambiguous")) for a in amb]
            rho = doc.get("rho")
            return ProjectedSet(pts, np.array(flags, dtype=bool), (window.lo[0], window.hi[0]), [],
                                ambiguous, None if rho is None else _real(rho, "rho"),
                                doc.get("mode"))
        if kind != "windowed":
            raise SchemaViolation(f"unknown pointset kind {kind!r}")
        return WindowedPointSet(dim, pts, window, params)
    except ValueError as e:
        raise SchemaViolation(str(e)) from e


def save_pointset(path, S) -> None:
    write_json(path, pointset_doc(S))


def load_pointset(path):
    return pointset_from_doc(read_json(path))


# ------------------------------------------------------------ surfaces

def surface_doc(g: SurfaceGroup) -> dict:
    p = g.polygon
    return {
        "schema": "surface", "version": VERSION,
        "vertices": [[v.x, v.y] for v in p.vertices],
        "generators": [[t.a, t.b, t.c, t.d] for t in g.side_maps],
        "labels": list(g.labels),
        "pairing": list(g.pairing),
        "cycles": [{"vertices": list(c.vertices), "word": list(c.word),
                    "angle_sum": c.angle_sum, "residual": c.residual} for c in g.vertex_cycles],
        "mu": g.mu,
        "base": [g.base_point.x, g.base_point.y],
        "polygon": {"side_length": p.side_length, "radius_sharp": p.radius_sharp,
                    "radius_obtuse": p.radius_obtuse, "apothem": p.apothem,
                    "angles": list(p.angles)},
    }


def surface_from_doc(doc) -> SurfaceGroup:
    _check_schema(doc, "surface")
    try:
        verts = tuple(HyperbolicPoint(*_reals(v, "vertex")) for v in _need(doc, "vertices", list))
        gens = []
        for row in _need(doc, "generators", list):
            vals = _reals(row, "generator")
            if len(vals) != 4:
                raise SchemaViolation("generators have 4 entries")
            gens.append(Isometry(*vals))
        labels = tuple(_need(doc, "labels", list))
        pairing = tuple(int(x) for x in _need(doc, "pairing", list))
        if not (len(verts) == len(gens) == len(labels) == len(pairing)):
            raise SchemaViolation("vertices, generators, labels and pairing must align")
        cycles = []
        for c in _need(doc, "cycles", list):
            cycles.append(VertexCycle(tuple(_need(c, "vertices", list)), tuple(_need(c, "word", list)),
                                      _real(_need(c, "angle_sum")), _real(_need(c, "residual"))))
        pd = _need(doc, "polygon", dict)
        poly = SolvedPolygon(verts, _real(_need(pd, "side_length")), _real(_need(pd, "radius_sharp")),
                             _real(_need(pd, "radius_obtuse")), _real(_need(pd, "apothem")),
                             tuple(_reals(_need(pd, "angles"), "angles")))
        mu = doc.get("mu")
        return SurfaceGroup(poly, pairing, labels, tuple(gens),
                            HyperbolicPoint(*_reals(_need(doc, "base", list), "base")),
                            tuple(cycles), None if mu is None else _real(mu, "mu"))
    except (TypeError, ValueError) as e:
        raise SchemaViolation(str(e)) from e


def save_surface(path, g: SurfaceGroup) -> None:
    write_json(path, surface_doc(g))


def load_surface(path) -> SurfaceGroup:
    return surface_from_doc(read_json(path))


# ------------------------------------------------------------ reports

def report_doc(kind: str, data: dict, verdict: str | None = None) -> dict:
    doc = {"schema": "report", "version": VERSION, "kind": kind}
    if verdict is not None:
        doc["verdict"] = verdict
    doc["data"] = to_jsonable(data)
    return doc


def report_from_doc(doc) -> dict:
    _check_schema(doc, "report")
    _need(doc, "kind", str)
    _need(doc, "data", dict)
    return doc


def save_report(path, kind: str, data: dict, verdict: str | None = None) -> None:
    write_json(path, report_doc(kind, data, verdict))


def load_report(path) -> dict:
    return report_from_doc(read_json(path))
