"""Static SVG figures: a Poincare-disk view of the surface and a 1D tick plot.

Colours follow the usual picture of the construction: the tube around the
geodesic is shaded blue and the projected points are red. Coordinates are
printed with fixed precision so equal inputs give byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hyperbolic import OrientedGeodesic
from .surface import SurfaceGroup, mat_apply

SIZE = 480
SCALE = 220.0
C = SIZE / 2


def _disk(z):
    z = np.asarray(z, dtype=complex)
    return (z - 1j) / (z + 1j)


def _xy(w: complex) -> tuple[float, float]:
    return C + SCALE * w.real, C - SCALE * w.imag


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _arc_path(p: complex, q: complex) -> str:
    """SVG path of the hyperbolic segment between disk points p and q."""
    x1, y1 = _xy(p)
    x2, y2 = _xy(q)
    cross = p.real * q.imag - p.imag * q.real
    if abs(cross) < 1e-12 * max(1.0, abs(p) * abs(q)):
        return f"M {_f(x1)} {_f(y1)} L {_f(x2)} {_f(y2)}"
    # circle through p, q and the inverse of p, orthogonal to the unit circle
    a = p if abs(p) > 1e-12 else q
    b = q if a is p else p
    a_inv = a / abs(a) ** 2
    m = np.array([[2 * (b.real - a.real), 2 * (b.imag - a.imag)],
                  [2 * (a_inv.real - a.real), 2 * (a_inv.imag - a.imag)]])
    rhs = np.array([abs(b) ** 2 - abs(a) ** 2, abs(a_inv) ** 2 - abs(a) ** 2])
    cx, cy = np.linalg.solve(m, rhs)
    r = abs(complex(cx, cy) - p) * SCALE
    # SVG sweep 1 runs clockwise on screen, which is counterclockwise in the disk
    # once y is flipped
    turn = (p.real - cx) * (q.imag - cy) - (p.imag - cy) * (q.real - cx)
    sweep = 1 if turn > 0 else 0
    return f"M {_f(x1)} {_f(y1)} A {_f(r)} {_f(r)} 0 0 {sweep} {_f(x2)} {_f(y2)}"


def _frame_point(inv: np.ndarray, t: np.ndarray, s: float) -> np.ndarray:
    """Upper half-plane points at arc length t and signed offset s from the axis."""
    w = np.exp(t) * np.exp(1j * (math.pi / 2 + math.atan(math.sinh(s))))
    return mat_apply(inv, w)


@dataclass
class Scene:
    group: SurfaceGroup | None = None
    orbit_points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    ell: OrientedGeodesic | None = None
    rho: float | None = None
    window: tuple = (-3.0, 3.0)
    projected: np.ndarray = field(default_factory=lambda: np.zeros(0))


def disk_svg(scene: Scene) -> str:
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f'<circle class="boundary" cx="{_f(C)}" cy="{_f(C)}" r="{_f(SCALE)}" '
           'fill="none" stroke="black" stroke-width="1"/>']
    lo, hi = scene.window
    if scene.ell is not None:
        inv = scene.ell.standardizer().inverse().as_array()
        ts = np.linspace(lo, hi, 241)
        if scene.rho is not None:
            top = _disk(_frame_point(inv, ts, scene.rho))
            bot = _disk(_frame_point(inv, ts[::-1], -scene.rho))
            pts = np.concatenate([top, bot])
            d = "M " + " L ".join(f"{_f(_xy(w)[0])} {_f(_xy(w)[1])}" for w in pts) + " Z"
            out.append(f'<path class="tube" d="{d}" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>')
        line = _disk(_frame_point(inv, ts, 0.0))
        pl = " ".join(f"{_f(_xy(w)[0])},{_f(_xy(w)[1])}" for w in line)
        out.append(f'<polyline class="geodesic" points="{pl}" fill="none" stroke="#08519c" stroke-width="1.2"/>')
    if scene.group is not None:
        v = _disk(np.array([p.z for p in scene.group.polygon.vertices]))
        for k in range(len(v)):
            d = _arc_path(complex(v[k]), complex(v[(k + 1) % len(v)]))
            out.append(f'<path class="edge" d="{d}" fill="none" stroke="black" stroke-width="1"/>')
    for w in _disk(np.asarray(scene.orbit_points, dtype=complex)):
        x, y = _xy(complex(w))
        rad = max(0.4, 2.0 * (1 - abs(w) ** 2))
        out.append(f'<circle class="orbit" cx="{_f(x)}" cy="{_f(y)}" r="{_f(rad)}" fill="black"/>')
    if scene.ell is not None and len(scene.projected):
        inv = scene.ell.standardizer().inverse().as_array()
        for w in _disk(_frame_point(inv, np.asarray(scene.projected, dtype=float), 0.0)):
            x, y = _xy(complex(w))
            out.append(f'<circle class="projected" cx="{_f(x)}" cy="{_f(y)}" r="2.500" fill="#de2d26"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def ticks_svg(coords, window, flags=None, width: int = 800, height: int = 80) -> str:
    """Tick plot of a windowed 1D set; flagged points are drawn in orange."""
    lo, hi = float(window[0]), float(window[1])
    coords = np.asarray(coords, dtype=float)
    flags = np.zeros(len(coords), dtype=bool) if flags is None else np.asarray(flags, dtype=bool)
    pad = 20.0
    span = hi - lo if hi > lo else 1.0

    def X(t):
        return pad + (width - 2 * pad) * (t - lo) / span

    mid = height / 2
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<line class="axis" x1="{_f(X(lo))}" y1="{_f(mid)}" x2="{_f(X(hi))}" y2="{_f(mid)}" '
           'stroke="black" stroke-width="1"/>']
    for t, fl in zip(coords, flags):
        colour = "#fd8d3c" if fl else "#de2d26"
        out.append(f'<line class="tick" x1="{_f(X(t))}" y1="{_f(mid - 12)}" x2="{_f(X(t))}" '
                   f'y2="{_f(mid + 12)}" stroke="{colour}" stroke-width="1"/>')
    out.append(f'<text x="{_f(X(lo))}" y="{_f(height - 4)}" font-size="10">{lo:g}</text>')
    out.append(f'<text x="{_f(X(hi))}" y="{_f(height - 4)}" font-size="10" text-anchor="end">{hi:g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(scene: Scene, path) -> None:
    Path(path).write_text(disk_svg(scene))


def render_ticks(coords, window, path, flags=None) -> None:
    Path(path).write_text(ticks_svg(coords, window, flags))
