"""Hyperbolic cut-and-project sets S_l and S+_l on a parameter window."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousBoundary, TripleCluster
from .hyperbolic import HyperbolicPoint, Isometry, OrientedGeodesic
from .surface import OrbitPoint, SurfaceGroup, mat_apply, tube_scan

MODES = ("strict_interior", "plus_boundary", "closed")
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class TubeConfig:
    rho: float
    mode: str = "plus_boundary"
    boundary_tol: float = 1e-9

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.boundary_tol < 0:
            raise ValueError("boundary_tol must be nonnegative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def admits(self, s: np.ndarray) -> np.ndarray:
        """Mask of signed offsets admitted by the mode."""
        a = np.abs(s)
        inside = a < self.rho
        if self.mode == "strict_interior":
            return inside
        if self.mode == "plus_boundary":
            return inside | (np.abs(s - self.rho) <= self.boundary_tol)
        return a <= self.rho + self.boundary_tol

    def flags(self, s: np.ndarray) -> np.ndarray:
        return np.abs(np.abs(s) - self.rho) <= self.boundary_tol


@dataclass
class ProjectedSet:
    coords: np.ndarray
    boundary_flags: np.ndarray
    window: tuple
    provenance: list = field(default_factory=list)   # (coord index, OrbitPoint)
    ambiguous: list = field(default_factory=list)    # (t, s) pairs in the boundary band
    rho: float | None = None
    mode: str | None = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        self.boundary_flags = np.asarray(self.boundary_flags, dtype=bool)
        self.window = (float(self.window[0]), float(self.window[1]))

    def __len__(self):
        return len(self.coords)

    @property
    def flag_count(self) -> int:
        return int(self.boundary_flags.sum())

    def gaps(self) -> np.ndarray:
        return np.diff(self.coords)

    def restrict(self, lo: float, hi: float) -> "ProjectedSet":
        if lo < self.window[0] or hi > self.window[1]:
            raise ValueError("restriction must lie inside the window")
        sel = (self.coords >= lo) & (self.coords <= hi)
        idx = np.nonzero(sel)[0]
        remap = {int(i): k for k, i in enumerate(idx)}
        prov = [(remap[i], op) for i, op in self.provenance if i in remap]
        amb = [(t, s) for t, s in self.ambiguous if lo <= t <= hi]
        return ProjectedSet(self.coords[sel], self.boundary_flags[sel], (lo, hi), prov, amb,
                            self.rho, self.mode)


def _merge(t: np.ndarray, flags: np.ndarray):
    """Collapse coords within MERGE_TOL; returns coords, flags, owner index per input."""
    order = np.argsort(t, kind="stable")
    coords, fl, owner = [], [], np.empty(len(t), dtype=int)
    for i in order:
        if coords and t[i] - coords[-1] <= MERGE_TOL:
            fl[-1] = fl[-1] or bool(flags[i])
        else:
            coords.append(float(t[i]))
            fl.append(bool(flags[i]))
        owner[i] = len(coords) - 1
    return np.array(coords), np.array(fl, dtype=bool), owner


def cut_project(group: SurfaceGroup, ell: OrientedGeodesic, cfg: TubeConfig, window,
                max_elements: int | None = None) -> ProjectedSet:
    """Arc-length coordinates of orbit points whose offset from ell the mode admits."""
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must be nonempty")
    scan = tube_scan(group, ell, lo, hi, cfg.rho + cfg.boundary_tol + 1e-6, max_elements)
    t, s = scan.t, scan.s
    sel = cfg.admits(s) & (t >= lo) & (t <= hi)
    band = cfg.flags(s) & (t >= lo) & (t <= hi)
    ambiguous = [(float(a), float(b)) for a, b in zip(t[band], s[band])]
    if ambiguous:
        warnings.warn(f"{len(ambiguous)} orbit points within {cfg.boundary_tol} of the tube wall",
                      AmbiguousBoundary, stacklevel=2)
    idx = np.nonzero(sel)[0]
    coords, flags, owner = _merge(t[idx], cfg.flags(s[idx]))
    inv = scan.std.inverse().as_array()
    elems = scan.original_elements()[idx]
    pts = mat_apply(inv, scan.points[idx])
    prov = [(int(owner[k]), OrbitPoint(HyperbolicPoint.from_complex(pts[k]),
                                       Isometry.from_array(elems[k]), int(scan.word_lengths[i])))
            for k, i in enumerate(idx)]
    prov.sort(key=lambda p: p[0])
    return ProjectedSet(coords, flags, (lo, hi), prov, ambiguous, cfg.rho, cfg.mode)


def merge_close_pairs(ps: ProjectedSet, threshold: float) -> ProjectedSet:
    """Replace each pair closer than ``threshold`` by its midpoint, scanning left to right."""
    c = ps.coords
    n = len(c)
    for i in range(n - 2):
        if c[i + 2] - c[i] < threshold:
            raise TripleCluster(f"three points within {threshold} near t = {c[i]:.6g}")
    coords, flags, remap = [], [], {}
    i = 0
    while i < n:
        if i + 1 < n and c[i + 1] - c[i] < threshold:
            remap[i] = remap[i + 1] = len(coords)
            coords.append(0.5 * (c[i] + c[i + 1]))
            flags.append(bool(ps.boundary_flags[i] or ps.boundary_flags[i + 1]))
            i += 2
        else:
            remap[i] = len(coords)
            coords.append(float(c[i]))
            flags.append(bool(ps.boundary_flags[i]))
            i += 1
    prov = [(remap[k], op) for k, op in ps.provenance]
    return ProjectedSet(np.array(coords), np.array(flags, dtype=bool), ps.window, prov,
                        list(ps.ambiguous), ps.rho, ps.mode)


def brute_force_coords(group: SurfaceGroup, ell: OrientedGeodesic, cfg: TubeConfig, window,
                       max_elements: int | None = None) -> np.ndarray:
    """Oracle: filter a ball around the base point by signed offset, then project.

    Works entirely in the original frame, independent of the tube scan.
    """
    from .hyperbolic import project_many, dist
    from .surface import ball_orbit

    lo, hi = window
    base = group.base_point
    reach = max(dist(base, ell.point_at(lo)), dist(base, ell.point_at(hi)))
    orb = ball_orbit(group, reach + cfg.rho + 1e-6, max_elements=max_elements)
    t, s = project_many(ell.standardizer(), orb.points)
    sel = cfg.admits(s) & (t >= lo) & (t <= hi)
    return np.unique(np.sort(t[sel]))
