"""Windowed Delone checks and the local-rubber entourage calculus.

Point sets are only known on a declared window, so every check either
restricts its claim to where the data decides it or refuses with
WindowTooSmall.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import WindowTooSmall

TOL = 1e-9


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi):
            raise ValueError("lo and hi must have the same dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("box must have lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, half: float, dim: int = 1, center=None) -> "Box":
        c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        return cls(tuple(c - half), tuple(c + half))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> np.ndarray:
        return np.array(self.hi) - np.array(self.lo)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.array(self.lo) + np.array(self.hi))

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        p = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        return np.all((p >= np.array(self.lo) - tol) & (p <= np.array(self.hi) + tol), axis=1)

    def contains_box(self, other: "Box", tol: float = TOL) -> bool:
        return all(a <= b + tol for a, b in zip(self.lo, other.lo)) and \
            all(a >= b - tol for a, b in zip(self.hi, other.hi))

    def inflate(self, r) -> "Box":
        """Minkowski sum with [-r, r]^n (r may be negative to shrink)."""
        r = np.broadcast_to(np.asarray(r, dtype=float), (self.dim,))
        lo, hi = np.array(self.lo) - r, np.array(self.hi) + r
        if np.any(lo > hi):
            raise ValueError("box shrunk to nothing")
        return Box(tuple(lo), tuple(hi))

    def shift(self, v) -> "Box":
        v = np.broadcast_to(np.asarray(v, dtype=float), (self.dim,))
        return Box(tuple(np.array(self.lo) + v), tuple(np.array(self.hi) + v))

    def __add__(self, other: "Box") -> "Box":
        return Box(tuple(np.array(self.lo) + other.lo), tuple(np.array(self.hi) + other.hi))

    def negate(self) -> "Box":
        return Box(tuple(-np.array(self.hi)), tuple(-np.array(self.lo)))

    def intersect(self, other: "Box") -> "Box | None":
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(lo > hi):
            return None
        return Box(tuple(lo), tuple(hi))


@dataclass(frozen=True)
class Torus:
    """Flat torus R^n / diag(sides) Z^n with representatives in [-L/2, L/2)."""
    sides: tuple

    def __post_init__(self):
        object.__setattr__(self, "sides", tuple(float(v) for v in np.atleast_1d(self.sides)))
        if any(s <= 0 for s in self.sides):
            raise ValueError("torus sides must be positive")

    @property
    def dim(self) -> int:
        return len(self.sides)

    def canonical(self, pts) -> np.ndarray:
        L = np.array(self.sides)
        p = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        return (p + L / 2) % L - L / 2

    def tree(self, pts) -> cKDTree:
        L = np.array(self.sides)
        q = (self.canonical(pts) + L / 2) % L
        return cKDTree(q, boxsize=L)

    def to_tree_coords(self, pts) -> np.ndarray:
        L = np.array(self.sides)
        return (self.canonical(pts) + L / 2) % L


@dataclass
class WindowedPointSet:
    dim: int
    points: np.ndarray
    window: Box | Torus
    params: tuple | None = None          # (epsilon, delta)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        self.points = p.reshape(-1, self.dim) if p.size else np.zeros((0, self.dim))
        if self.window.dim != self.dim:
            raise ValueError("window dimension mismatch")
        if isinstance(self.window, Torus):
            self.points = self.window.canonical(self.points)
        elif len(self.points) and not np.all(self.window.contains(self.points, TOL)):
            raise ValueError("all points must lie inside the window")
        if self.params is not None:
            eps, delta = self.params
            if not eps >= delta > 0:
                raise ValueError("params need epsilon >= delta > 0")

    @property
    def is_torus(self) -> bool:
        return isinstance(self.window, Torus)

    def __len__(self):
        return len(self.points)

    def sorted_points(self) -> np.ndarray:
        return self.points[np.lexsort(self.points.T[::-1])] if len(self.points) else self.points

    def translate(self, v) -> "WindowedPointSet":
        """S - v with window moved along."""
        if self.is_torus:
            raise ValueError("translate a torus set by re-wrapping explicitly")
        v = np.broadcast_to(np.asarray(v, dtype=float), (self.dim,))
        return WindowedPointSet(self.dim, self.points - v, self.window.shift(-v), self.params)

    def restrict(self, box: Box) -> "WindowedPointSet":
        inside = box.contains(self.points, TOL)
        return WindowedPointSet(self.dim, self.points[inside], box, self.params)

    @classmethod
    def from_projected(cls, ps, params=None) -> "WindowedPointSet":
        return cls(1, np.asarray(ps.coords).reshape(-1, 1), Box((ps.window[0],), (ps.window[1],)),
                   params)

    @classmethod
    def lattice(cls, box: Box, spacing: float = 1.0, offset=0.0, params=None) -> "WindowedPointSet":
        """The shifted lattice spacing*Z^n + offset restricted to the box."""
        off = np.broadcast_to(np.asarray(offset, dtype=float), (box.dim,))
        axes = [np.arange(math.ceil((lo - o) / spacing - 1e-12), math.floor((hi - o) / spacing + 1e-12) + 1)
                * spacing + o for lo, hi, o in zip(box.lo, box.hi, off)]
        pts = np.array(list(itertools.product(*axes))) if all(len(a) for a in axes) else np.zeros((0, box.dim))
        return cls(box.dim, pts, box, params)


def _as_windowed(S) -> WindowedPointSet:
    if isinstance(S, WindowedPointSet):
        return S
    if hasattr(S, "coords") and hasattr(S, "window"):
        return WindowedPointSet.from_projected(S)
    raise TypeError("expected a WindowedPointSet or ProjectedSet")


@dataclass(frozen=True)
class Entourage:
    """N_{U,U'}: U a box around the origin, U' a union of boxes (or the shorthand N_r)."""
    U: Box
    Uprime: tuple

    @classmethod
    def from_r(cls, r: float, dim: int = 1) -> "Entourage":
        if not r > 0:
            raise ValueError("r must be positive")
        return cls(Box.cube(r, dim), (Box.cube(1.0 / r, dim),))

    @classmethod
    def boxes(cls, U: Box, Uprime) -> "Entourage":
        up = (Uprime,) if isinstance(Uprime, Box) else tuple(Uprime)
        return cls(U, up)

    @property
    def dim(self) -> int:
        return self.U.dim


@dataclass
class DeloneReport:
    min_gap: float | None
    max_gap: float | None
    separated_ok: bool
    dense_ok: bool
    margin: float
    boundary_flag_count: int = 0
    covering_radius: float | None = None


def _min_distance(W: WindowedPointSet) -> float | None:
    if len(W) < 2:
        return None
    if W.is_torus:
        tree = W.window.tree(W.points)
        d, _ = tree.query(W.window.to_tree_coords(W.points), k=2)
    elif W.dim == 1:
        return float(np.diff(np.sort(W.points[:, 0])).min())
    else:
        tree = cKDTree(W.points)
        d, _ = tree.query(W.points, k=2)
    return float(d[:, 1].min())


def _covering_1d(x: np.ndarray, lo: float, hi: float) -> float:
    """Exact sup over [lo, hi] of the distance to the sorted points x."""
    if len(x) == 0:
        return math.inf
    cands = [lo, hi]
    mids = 0.5 * (x[1:] + x[:-1])
    cands.extend(mids[(mids > lo) & (mids < hi)])
    c = np.array(cands)
    j = np.clip(np.searchsorted(x, c), 1, len(x) - 1) if len(x) > 1 else np.zeros(len(c), int)
    d = np.minimum(np.abs(c - x[j - 1] if len(x) > 1 else c - x[0]), np.abs(c - x[j]))
    return float(d.max())


def _probe_grid(box_lo, box_hi, spacing) -> np.ndarray:
    axes = [np.linspace(a, b, max(2, int(math.ceil((b - a) / spacing)) + 1)) for a, b in zip(box_lo, box_hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def check_delone(S, epsilon: float, delta: float) -> DeloneReport:
    """Separation everywhere; relative density on the epsilon-shrunk window."""
    flags = int(getattr(S, "flag_count", 0))
    W = _as_windowed(S)
    if W.is_torus:
        margin = 0.0
        min_gap = _min_distance(W)
        L = np.array(W.window.sides)
        probes = _probe_grid(np.zeros(W.dim), L, epsilon / 10)
        if len(W):
            d, _ = W.window.tree(W.points).query(probes % L)
            cover = float(d.max())
        else:
            cover = math.inf
    else:
        box = W.window
        if np.any(box.sides <= 2 * epsilon):
            raise WindowTooSmall(f"window sides {box.sides} must exceed 2*epsilon = {2 * epsilon}")
        margin = epsilon
        inner = box.inflate(-epsilon)
        min_gap = _min_distance(W)
        if W.dim == 1:
            cover = _covering_1d(np.sort(W.points[:, 0]), inner.lo[0], inner.hi[0])
        elif len(W):
            probes = _probe_grid(inner.lo, inner.hi, epsilon / 10)
            d, _ = cKDTree(W.points).query(probes)
            cover = float(d.max())
        else:
            cover = math.inf
    if W.dim == 1 and not W.is_torus and len(W) >= 2:
        x = np.sort(W.points[:, 0])
        g = np.diff(x)
        touch = (x[1:] >= inner.lo[0]) & (x[:-1] <= inner.hi[0])
        max_gap = float(g[touch].max()) if touch.any() else None
    else:
        max_gap = None if not math.isfinite(cover) else 2 * cover
    sep = min_gap is None or min_gap >= delta - TOL
    dense = cover <= epsilon + TOL
    return DeloneReport(min_gap, max_gap, bool(sep), bool(dense), margin, flags,
                        cover if math.isfinite(cover) else None)


def _one_sided(P: np.ndarray, Q: np.ndarray, Qwin: Box, E: Entourage, tol: float) -> bool:
    """P cap U is inside Q + U'; refuses when the answer depends on Q outside its window."""
    inU = P[E.U.contains(P, tol)]
    if not len(inU):
        return True
    tree = cKDTree(Q) if len(Q) else None
    for p in inU:
        found = False
        for b in E.Uprime:
            # q with p - q in b  <=>  q in p - b
            target = b.negate().shift(p)
            if tree is not None:
                half = 0.5 * target.sides + tol
                idx = tree.query_ball_point(target.center, float(half.max()), p=np.inf)
                if any(target.contains(Q[i], tol)[0] for i in idx):
                    found = True
                    break
        if found:
            continue
        if not all(Qwin.contains_box(b.negate().shift(p), tol) for b in E.Uprime):
            raise WindowTooSmall("membership depends on points outside the window")
        return False
    return True


def entourage_member(S, Sp, E: Entourage | float) -> bool:
    """(S, S') in N_{U,U'}: S cap U within S' + U' and vice versa (closed, tolerance 1e-9)."""
    A, B = _as_windowed(S), _as_windowed(Sp)
    if A.is_torus or B.is_torus:
        raise ValueError("entourages are defined for sets in R^n, not on the torus")
    if not isinstance(E, Entourage):
        E = Entourage.from_r(float(E), A.dim)
    if E.dim != A.dim or A.dim != B.dim:
        raise ValueError("dimension mismatch")
    if not (A.window.contains_box(E.U) and B.window.contains_box(E.U)):
        raise WindowTooSmall("windows must contain U")
    return _one_sided(A.points, B.points, B.window, E, TOL) and \
        _one_sided(B.points, A.points, A.window, E, TOL)


def rubber_proximity(S, Sp, r_max: float, tol: float = 1e-6) -> float:
    """sup{r <= r_max : (S, S') in N_r}, by bisection on the antitone predicate."""
    A = _as_windowed(S)
    member = lambda r: entourage_member(S, Sp, Entourage.from_r(r, A.dim))
    if member(r_max):
        return float(r_max)
    lo, hi = 0.0, float(r_max)
    probe = min(1.0, r_max / 2)
    while probe > 1e-9:
        if member(probe):
            lo = probe
            break
        hi = probe
        probe /= 2
    else:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    return lo


def find_periods(S, E: Entourage | float, p_min: float, p_max: float,
                 coalesce: float = 1e-6) -> list[float]:
    """Approximate periods p in [p_min, p_max]: (S, S - p) in E.

    Candidates are differences s_j - s_i with s_i in S cap U; an empty list
    means no approximate period shows at this window and entourage scale.
    """
    W = _as_windowed(S)
    if W.dim != 1:
        raise ValueError("find_periods works on sets in R")
    if not isinstance(E, Entourage):
        E = Entourage.from_r(float(E), 1)
    x = np.sort(W.points[:, 0])
    lo_w, hi_w = W.window.lo[0], W.window.hi[0]
    if hi_w - p_max < E.U.hi[0] or lo_w - p_min > E.U.lo[0] or hi_w - lo_w <= p_max:
        raise WindowTooSmall("window too short for the shifted comparison")
    anchors = x[E.U.contains(x, TOL)]
    if len(anchors) == 0:
        anchors = x[np.argsort(np.abs(x))[:1]]
    diffs = (x[None, :] - anchors[:, None]).ravel()
    diffs = np.sort(diffs[(diffs >= p_min - coalesce) & (diffs <= p_max + coalesce)])
    cands = []
    for d in diffs:
        if cands and d - cands[-1][-1] <= coalesce:
            cands[-1].append(d)
        else:
            cands.append([d])
    out = []
    for group in cands:
        p = float(np.mean(group))
        if entourage_member(W, W.translate(p), E):
            out.append(p)
    return out


def composition_check(A: Box, B: Box, C: Box, D: Box, S1, S2, S3) -> bool:
    """Instance of N_{A+B,B} o N_{C+D,D} within N_{A cap C, 2(B cup C)}."""
    if not entourage_member(S1, S2, Entourage.boxes(A + B, B)):
        return True
    if not entourage_member(S2, S3, Entourage.boxes(C + D, D)):
        return True
    core = A.intersect(C)
    if core is None:
        return True
    parts = (B, C)
    doubled = tuple(p + q for p, q in itertools.combinations_with_replacement(parts, 2))
    return entourage_member(S1, S3, Entourage.boxes(core, doubled))
