"""Bounded-window extension, gluing and chaotification of Euclidean Delone sets.

Maximal separated families are built greedily: first a lexicographic scan of
a grid of spacing delta/2, then exact hole filling. A hole is a point of
the free region farther than the density target from the current set; the
farthest points of a region are Voronoi vertices, possibly of the set
augmented by its mirror images across region faces (or periodic images on a
torus), so those are the candidates. Filling stops when no candidate is a
hole, which makes the density claims exact rather than grid-limited.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, cKDTree
from scipy.spatial import QhullError

from .delone import Box, Entourage, Torus, WindowedPointSet, entourage_member, TOL
from .errors import NoSolution, NotDeloneOnA, NotSeparatedInput, ParamOrder, WindowTooSmall

HOLE_TOL = 1e-10


# ------------------------------------------------------------------ regions

@dataclass(frozen=True)
class Region:
    """A union of boxes inside an ambient box or torus."""
    dim: int
    shape: tuple
    ambient: Box | Torus | None = None

    def __post_init__(self):
        shape = (self.shape,) if isinstance(self.shape, Box) else tuple(self.shape)
        object.__setattr__(self, "shape", shape)
        if any(b.dim != self.dim for b in shape):
            raise ValueError("box dimension mismatch")
        if isinstance(self.ambient, Box) and not all(self.ambient.contains_box(b) for b in shape):
            raise ValueError("shape must lie inside the ambient box")

    @classmethod
    def box(cls, lo, hi, ambient=None) -> "Region":
        b = Box(lo, hi)
        return cls(b.dim, (b,), ambient)

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        p = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        out = np.zeros(len(p), dtype=bool)
        for b in self.shape:
            out |= b.contains(p, tol)
        return out

    @property
    def bounding_box(self) -> Box:
        lo = np.min([b.lo for b in self.shape], axis=0)
        hi = np.max([b.hi for b in self.shape], axis=0)
        return Box(tuple(lo), tuple(hi))

    def inner(self, eps: float) -> "_InnerSet":
        """A_eps = {x : D(x, eps) inside A}."""
        return _InnerSet(self, eps)


@dataclass(frozen=True)
class _InnerSet:
    region: Region
    eps: float

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        p = np.asarray(pts, dtype=float).reshape(-1, self.region.dim)
        if len(self.region.shape) == 1:
            b = self.region.shape[0]
            if np.any(b.sides < 2 * self.eps):
                return np.zeros(len(p), dtype=bool)
            return b.inflate(-self.eps).contains(p, tol)
        if self.region.dim != 1:
            raise ValueError("A_eps for a union of boxes is only supported in dimension 1")
        # merge intervals, then shrink each component
        iv = sorted((b.lo[0], b.hi[0]) for b in self.region.shape)
        merged = [list(iv[0])]
        for a, c in iv[1:]:
            if a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], c)
            else:
                merged.append([a, c])
        out = np.zeros(len(p), dtype=bool)
        for a, c in merged:
            if c - a >= 2 * self.eps:
                out |= (p[:, 0] >= a + self.eps - tol) & (p[:, 0] <= c - self.eps + tol)
        return out


@dataclass(frozen=True)
class VoronoiRegion:
    """Union of the Voronoi cells of the kept sites, clipped to a union of boxes.

    If the sites are an eps-dense set known on a big enough window, the kept
    sites are eps-dense in this region by construction.
    """
    sites: np.ndarray
    kept: np.ndarray
    clip: tuple

    @property
    def dim(self) -> int:
        return self.sites.shape[1]

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        p = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        if not len(self.sites):
            return np.zeros(len(p), dtype=bool)
        d, j = cKDTree(self.sites).query(p, k=2) if len(self.sites) > 1 else (None, None)
        if d is None:
            near = np.zeros(len(p), dtype=int)
            tie = np.zeros(len(p), dtype=bool)
            kept_hit = self.kept[near]
        else:
            kept_hit = self.kept[j[:, 0]]
            # ties on a cell wall go to the region when either side is kept
            tie = (d[:, 1] - d[:, 0] <= tol) & self.kept[j[:, 1]]
            kept_hit = kept_hit | tie
        inside = np.zeros(len(p), dtype=bool)
        for b in self.clip:
            inside |= b.contains(p, tol)
        return kept_hit & inside

    @property
    def kept_points(self) -> np.ndarray:
        return self.sites[self.kept]


# ------------------------------------------------------------ greedy engine

class _SeparationIndex:
    """Spatial hash answering 'is p at distance >= delta from every stored point'."""

    def __init__(self, dim: int, delta: float, torus: Torus | None = None):
        self.dim, self.delta, self.torus = dim, delta, torus
        self.cells: dict = {}
        self.pts: list = []
        if torus is not None:
            L = np.array(torus.sides)
            self.count = np.maximum(np.floor(L / delta).astype(int), 1)
            self.size = L / self.count
        else:
            self.size = np.full(dim, delta)

    def _cell(self, p):
        c = np.floor(np.asarray(p) / self.size).astype(int)
        if self.torus is not None:
            c = c % self.count
        return tuple(c)

    def _diff(self, p, q):
        v = np.asarray(p) - np.asarray(q)
        if self.torus is not None:
            L = np.array(self.torus.sides)
            v = (v + L / 2) % L - L / 2
        return float(np.sqrt(v @ v))

    def _neighbours(self, p):
        c = np.array(self._cell(p))
        seen = set()
        for off in itertools.product((-1, 0, 1), repeat=self.dim):
            k = c + off
            if self.torus is not None:
                k = k % self.count
            k = tuple(k)
            if k in seen:
                continue
            seen.add(k)
            yield from self.cells.get(k, ())

    def ok(self, p, tol: float = TOL) -> bool:
        return all(self._diff(p, self.pts[i]) >= self.delta - tol for i in self._neighbours(p))

    def add(self, p):
        self.cells.setdefault(self._cell(p), []).append(len(self.pts))
        self.pts.append(np.asarray(p, dtype=float))


def _grid(lo, hi, spacing) -> np.ndarray:
    """Lexicographic grid anchored at lo, spacing at most ``spacing``, covering [lo, hi]."""
    axes = []
    for a, b in zip(lo, hi):
        n = int(math.floor((b - a) / spacing + 1e-9))
        ax = a + spacing * np.arange(n + 1)
        if b - ax[-1] > 1e-9:
            ax = np.append(ax, b)
        axes.append(ax)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _torus_grid(torus: Torus, spacing) -> np.ndarray:
    axes = []
    for L in torus.sides:
        n = max(1, int(math.ceil(L / spacing - 1e-9)))
        axes.append(-L / 2 + (L / n) * np.arange(n))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _circumcenters(pts: np.ndarray) -> np.ndarray:
    n = pts.shape[1]
    if len(pts) < n + 2:
        return np.zeros((0, n))
    try:
        tri = Delaunay(pts, qhull_options="QJ Qbb Qc")
    except QhullError:
        return np.zeros((0, n))
    s = pts[tri.simplices]                      # (m, n+1, n)
    a = 2.0 * (s[:, 1:, :] - s[:, :1, :])       # (m, n, n)
    b = (s[:, 1:, :] ** 2).sum(-1) - (s[:, :1, :] ** 2).sum(-1)
    det = np.linalg.det(a)
    scale = np.abs(a).max(axis=(1, 2)) ** n
    good = np.abs(det) > 1e-12 * np.maximum(scale, 1e-300)
    out = np.linalg.solve(a[good], b[good][..., None])[..., 0]
    return out


def _face_flats(box: Box):
    """Each choice of a face on a subset of axes: list of (axes, values, inner_signs)."""
    n = box.dim
    for k in range(1, n + 1):
        for axes in itertools.combinations(range(n), k):
            for sides in itertools.product((0, 1), repeat=k):
                vals = [box.lo[a] if s == 0 else box.hi[a] for a, s in zip(axes, sides)]
                signs = [1 if s == 0 else -1 for s in sides]   # inner side: sign*(x - v) >= 0
                yield axes, vals, signs


def _hole_candidates(P: np.ndarray, dim: int, ambient: Box | Torus, face_boxes, reach: float) -> np.ndarray:
    if dim == 1:
        return _hole_candidates_1d(P, ambient, face_boxes)
    cands = [_circumcenters(P)] if len(P) else []
    if isinstance(ambient, Torus):
        L = np.array(ambient.sides)
        imgs = [P]
        for sh in itertools.product((-1, 0, 1), repeat=dim):
            if any(sh):
                Q = P + L * np.array(sh)
                near = np.all(np.abs(Q) <= L / 2 + reach, axis=1)
                imgs.append(Q[near])
        c = _circumcenters(np.concatenate(imgs))
        cands.append(ambient.canonical(c))
    for box in face_boxes:
        corners = np.array(list(itertools.product(*zip(box.lo, box.hi))))
        cands.append(corners)
        for axes, vals, signs in _face_flats(box):
            ax, v, sg = list(axes), np.array(vals), np.array(signs)
            dist_flat = np.sqrt(((P[:, ax] - v) ** 2).sum(1)) if len(P) else np.zeros(0)
            near = P[dist_flat <= reach]
            if not len(near):
                continue
            imgs = [near]
            inner = near[np.all(sg * (near[:, ax] - v) >= -1e-12, axis=1)]
            for mask in itertools.product((0, 1), repeat=len(ax)):
                if not any(mask):
                    continue
                Q = inner.copy()
                for a, vv, mk in zip(ax, v, mask):
                    if mk:
                        Q[:, a] = 2 * vv - Q[:, a]
                imgs.append(Q)
            c = _circumcenters(np.concatenate(imgs))
            if len(c):
                on = np.all(np.abs(c[:, ax] - v) <= 1e-7 * (1 + np.abs(v)), axis=1)
                c = c[on]
                c[:, ax] = v
                cands.append(c)
    return np.concatenate(cands) if cands else np.zeros((0, dim))


def _hole_candidates_1d(P: np.ndarray, ambient, face_boxes) -> np.ndarray:
    x = np.sort(P[:, 0]) if len(P) else np.zeros(0)
    c = []
    if len(x) > 1:
        c.append(0.5 * (x[1:] + x[:-1]))
    if isinstance(ambient, Torus) and len(x):
        L = ambient.sides[0]
        c.append(ambient.canonical([[0.5 * (x[-1] + x[0] + L)]])[:, 0])
    for b in face_boxes:
        c.append(np.array([b.lo[0], b.hi[0]]))
    return np.concatenate(c).reshape(-1, 1) if c else np.zeros((0, 1))


def _distances(P: np.ndarray, C: np.ndarray, ambient) -> np.ndarray:
    if not len(P):
        return np.full(len(C), np.inf)
    if isinstance(ambient, Torus):
        return ambient.tree(P).query(ambient.to_tree_coords(C))[0]
    return cKDTree(P).query(C)[0]


@dataclass
class _Completion:
    points: np.ndarray
    n_fixed: int
    n_grid: int
    n_holes: int


def _complete(fixed: np.ndarray, free, ambient: Box | Torus, face_boxes, target: float,
              delta: float, grid_box: Box | None = None, max_rounds: int = 200) -> _Completion:
    """Greedy grid scan over the free region, then hole filling up to ``target``."""
    dim = fixed.shape[1]
    torus = ambient if isinstance(ambient, Torus) else None
    idx = _SeparationIndex(dim, delta, torus)
    for p in fixed:
        idx.add(p)
    if torus is not None:
        grid = _torus_grid(torus, delta / 2)
    else:
        gb = grid_box or ambient
        grid = _grid(gb.lo, gb.hi, delta / 2)
        grid = grid[ambient.contains(grid)]
    grid = grid[free(grid)]
    n_grid = 0
    for g in grid:
        if idx.ok(g):
            idx.add(g)
            n_grid += 1
    reach = 2.0 * max(target, delta) + 2.0 * delta
    n_holes = 0
    for _ in range(max_rounds):
        P = np.array(idx.pts).reshape(-1, dim)
        C = _hole_candidates(P, dim, ambient, face_boxes, reach)
        if not len(C):
            break
        if torus is None:
            C = C[ambient.contains(C, 1e-12)]
            C = np.clip(C, ambient.lo, ambient.hi)
        else:
            C = torus.canonical(C)
        d = _distances(P, C, ambient)
        sel = d > target + HOLE_TOL
        C, d = C[sel], d[sel]
        if len(C):
            C, d = C[free(C)], d[free(C)]
        if not len(C):
            break
        order = np.lexsort(tuple(C.T[::-1]) + (-d,))
        added = 0
        for c in C[order]:
            if idx.ok(c):
                idx.add(c)
                added += 1
        n_holes += added
        if not added:
            raise NoSolution("hole filling stalled; free region too thin for delta")
    P = np.array(idx.pts).reshape(-1, dim)
    return _Completion(P, len(fixed), n_grid, n_holes)


def _min_sep(P: np.ndarray, ambient=None) -> float:
    if len(P) < 2:
        return math.inf
    if isinstance(ambient, Torus):
        d, _ = ambient.tree(P).query(ambient.to_tree_coords(P), k=2)
    else:
        d, _ = cKDTree(P).query(P, k=2)
    return float(d[:, 1].min())


def _sorted(P: np.ndarray) -> np.ndarray:
    return P[np.lexsort(P.T[::-1])] if len(P) else P


# ------------------------------------------------------------ public operations

def greedy_separated_complete(S: WindowedPointSet, delta: float, region: Region) -> WindowedPointSet:
    """Maximal delta-separated superset of S inside the region (delta-dense there)."""
    ambient = region.ambient if region.ambient is not None else region.bounding_box
    fixed = S.points[region.contains(S.points, TOL)] if not isinstance(ambient, Torus) \
        else ambient.canonical(S.points)
    if _min_sep(fixed, ambient) < delta - TOL:
        raise NotSeparatedInput(f"input is not {delta}-separated in the region")
    if isinstance(ambient, Torus):
        res = _complete(fixed, lambda c: np.ones(len(c), dtype=bool), ambient, (), delta, delta)
    else:
        free = lambda c: region.contains(c, 1e-12)
        res = _complete(fixed, free, ambient, region.shape, delta, delta, region.bounding_box)
    out = WindowedPointSet(region.dim, _sorted(res.points), ambient, (delta, delta))
    out.provenance = {"stage": "greedy_separated_complete", "fixed": res.n_fixed,
                      "grid": res.n_grid, "holes": res.n_holes}
    return out


def _check_order(epsilon, delta):
    if epsilon < delta:
        raise ParamOrder(f"need epsilon >= delta, got {epsilon} < {delta}")


def inner_extend(S: WindowedPointSet, A: Region, epsilon: float, delta: float) -> WindowedPointSet:
    """(eps, delta)-Delone set on A agreeing with S on A_eps."""
    _check_order(epsilon, delta)
    big = A.bounding_box.inflate(epsilon)
    if not S.window.contains_box(big):
        raise WindowTooSmall("S must be known on A inflated by epsilon")
    inner = A.inner(epsilon)
    fixed = S.points[A.contains(S.points, TOL)]
    if _min_sep(fixed) < delta - TOL:
        raise NotSeparatedInput("S is not delta-separated on A")
    free = lambda c: A.contains(c, 1e-12) & ~inner.contains(c, 1e-12)
    res = _complete(fixed, free, A.bounding_box, A.shape, epsilon, delta, A.bounding_box)
    out = WindowedPointSet(A.dim, _sorted(res.points), A.bounding_box, (epsilon, delta))
    out.provenance = {"stage": "inner_extend", "kept": res.n_fixed, "grid": res.n_grid,
                      "holes": res.n_holes}
    return out


def _dense_in(N: np.ndarray, A, epsilon: float, ambient) -> bool:
    """Is N eps-dense in A (boxes only; Voronoi regions hold by construction)."""
    if isinstance(A, VoronoiRegion):
        return True
    boxes = A.shape
    if not boxes:
        return True
    if isinstance(ambient, Torus):
        C = _hole_candidates(N, A.dim, Box(tuple(-np.array(ambient.sides) / 2),
                                           tuple(np.array(ambient.sides) / 2)), boxes, math.inf) \
            if len(N) else np.concatenate([np.array(list(itertools.product(*zip(b.lo, b.hi)))) for b in boxes])
    else:
        C = _hole_candidates(N, A.dim, ambient, boxes, math.inf) if len(N) else \
            np.concatenate([np.array(list(itertools.product(*zip(b.lo, b.hi)))) for b in boxes])
    C = C[A.contains(C, 1e-12)]
    if not len(C):
        return True
    return bool(_distances(N, C, ambient).max() <= epsilon + TOL)


def glue_extend(N: WindowedPointSet, A, ambient: Box | Torus, epsilon: float, delta: float) -> WindowedPointSet:
    """(eps, delta)-Delone set on the ambient space whose trace on A is exactly N."""
    _check_order(epsilon, delta)
    dim = ambient.dim
    pts = ambient.canonical(N.points) if isinstance(ambient, Torus) else N.points
    if len(pts) and not np.all(A.contains(pts, TOL)):
        raise NotDeloneOnA("N must lie inside A")
    if _min_sep(pts, ambient) < delta - TOL:
        raise NotDeloneOnA("N is not delta-separated")
    if not _dense_in(pts, A, epsilon, ambient):
        raise NotDeloneOnA("N is not epsilon-dense in A")
    free = lambda c: ~A.contains(c, 1e-12)
    faces = () if isinstance(ambient, Torus) else (ambient,)
    res = _complete(pts, free, ambient, faces, epsilon, delta)
    out = WindowedPointSet(dim, _sorted(res.points), ambient, (epsilon, delta))
    out.provenance = {"stage": "glue_extend", "kept": res.n_fixed, "grid": res.n_grid,
                      "holes": res.n_holes}
    return out


# ------------------------------------------------------------ V_q

@dataclass(frozen=True)
class VqParams:
    q: tuple
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(v) for v in np.atleast_1d(self.q)))
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def dim(self) -> int:
        return len(self.q)


def vq_member(S: WindowedPointSet, p: VqParams):
    """Is there x in S with the closed disk D(x - q, alpha) missing S?

    Candidates x are scanned by distance from the origin, ties broken
    lexicographically; only x whose disk lies inside the window count.
    """
    q = np.array(p.q)
    reach = float(np.linalg.norm(q)) + p.alpha
    box = S.window
    if np.any(box.sides <= 2 * reach):
        raise WindowTooSmall("window too small for the disk test")
    inner = box.inflate(-reach)
    X = S.points[inner.contains(S.points)]
    if not len(X):
        raise WindowTooSmall("no candidate x inside the shrunk window")
    order = np.lexsort(tuple(X.T[::-1]) + (np.round(np.linalg.norm(X, axis=1), 12),))
    tree = cKDTree(S.points)
    for x in X[order]:
        d, _ = tree.query(x - q)
        if d > p.alpha + TOL:
            return True, tuple(float(v) for v in x)
    return False, None


def vq_construct(q, alpha: float, epsilon: float, delta: float, half_width: float | None = None) -> WindowedPointSet:
    """A (delta, delta)-Delone set in V_q with witness x = 0."""
    _check_order(epsilon, delta)
    p = VqParams(q, alpha)
    if not alpha < delta / 4:
        raise ValueError("need alpha < delta / 4")
    qa = np.array(p.q)
    nq = float(np.linalg.norm(qa))
    if nq <= alpha:
        raise NoSolution("|q| <= alpha: x itself lies in D(x - q, alpha), V_q is empty")
    hw = half_width if half_width is not None else nq + 2 * alpha + 2 * epsilon + delta + 1.0
    box = Box.cube(hw, p.dim)
    seeds = [np.zeros(p.dim)]
    branch = "separation"
    if nq + alpha >= delta:
        y = qa + 2 * alpha * qa / nq
        # the disk sits at x - q = -q; the mirror copy covers the literal reading D(q, alpha)
        seeds += [y, -y]
        branch = "pinned"
    region = Region(p.dim, (box,), box)
    S0 = WindowedPointSet(p.dim, np.array(seeds), box)
    out = greedy_separated_complete(S0, delta, region)
    out.params = (epsilon, delta)
    out.provenance = dict(out.provenance, stage="vq_construct", branch=branch)
    return out


# ------------------------------------------------------------ W_{m, m'}

@dataclass(frozen=True)
class WWitness:
    m: int
    m_prime: int
    x: tuple
    grid_period: float

    def __post_init__(self):
        if self.m < 1 or self.m_prime < 1:
            raise ValueError("m and m' must be at least 1")
        if not self.grid_period > 0:
            raise ValueError("grid_period must be positive")
        object.__setattr__(self, "x", tuple(float(v) for v in np.atleast_1d(self.x)))


def default_grid_period(m: int, epsilon: float, delta: float) -> float:
    return 2.0 * (m + delta + epsilon)


def _w_holds(S: WindowedPointSet, m: int, mp: int, L: float, x: np.ndarray) -> bool:
    Sx = S.translate(x)
    if not entourage_member(S, Sx, Entourage.from_r(m, S.dim)):
        return False
    E = Entourage.from_r(mp, S.dim)
    for a in itertools.product(range(-mp, mp + 1), repeat=S.dim):
        if not any(a):
            continue
        if not entourage_member(Sx, Sx.translate(L * np.array(a, dtype=float)), E):
            return False
    return True


def w_member(S: WindowedPointSet, m: int, m_prime: int, grid_period: float, search_box: Box,
             hint=None):
    """Search the box (grid of resolution 1/(4 m'), centre outward) for a translation x witnessing W_{m, m'}."""
    need = search_box.inflate(m_prime * grid_period + m_prime + 1.0 / m_prime)
    if not S.window.contains_box(need) or not S.window.contains_box(Box.cube(m + 1.0 / m, S.dim)):
        raise WindowTooSmall("window must cover the search box inflated by m' * grid_period + m'")
    cands = []
    if hint is not None:
        cands.append(np.atleast_1d(np.asarray(hint, dtype=float)))
    grid = _grid(search_box.lo, search_box.hi, 1.0 / (4 * m_prime))
    # nearest to the box centre first, ties lexicographic
    r = np.round(np.linalg.norm(grid - search_box.center, axis=1), 12)
    cands.extend(grid[np.lexsort(tuple(grid.T[::-1]) + (r,))])
    for x in cands:
        if _w_holds(S, m, m_prime, grid_period, x):
            return True, WWitness(m, m_prime, tuple(x), grid_period)
    return False, None


def _lift_block(T: WindowedPointSet, x: np.ndarray, L: float, rings: int) -> np.ndarray:
    """Periodic lift of the torus set over squares centred at x + L a, |a_i| <= rings."""
    base = T.points
    shifts = np.array(list(itertools.product(range(-rings, rings + 1), repeat=T.dim)), dtype=float)
    return (base[None, :, :] + x + L * shifts[:, None, :]).reshape(-1, T.dim)


def chaotify(S: WindowedPointSet, m: int, m_prime: int, l: float, epsilon: float, delta: float,
             grid_period: float | None = None, return_torus: bool = False):
    """Build S_hat in W_{m, m'} close to S in N_l, with its witness translation.

    With ``return_torus`` the torus Delone set T of stage (2) is returned too.
    """
    _check_order(epsilon, delta)
    n = S.dim
    L = default_grid_period(m, epsilon, delta) if grid_period is None else float(grid_period)
    half = L / 2
    if half < m + epsilon + delta - 1e-12:
        raise ValueError("grid_period must be at least 2 (m + delta + epsilon)")
    keep_r = max(float(l), float(m))
    need = Box.cube(max(m + epsilon + 1.0, keep_r + 3 * epsilon), n)
    if S.is_torus or not S.window.contains_box(need):
        raise WindowTooSmall(f"S must be known on {need}")

    # (1) agree with S on [-m, m]^n, Delone on [-m-eps, m+eps]^n
    A1 = Region.box(-(m + epsilon) * np.ones(n), (m + epsilon) * np.ones(n))
    S1 = inner_extend(S, A1, epsilon, delta)

    # (2) glue on the torus of side L
    torus = Torus(tuple([L] * n))
    N2 = WindowedPointSet(n, S1.points, torus)
    A2 = Region(n, (A1.shape[0],), torus)
    T = glue_extend(N2, A2, torus, epsilon, delta)

    # (3) witness far along e_1 and the periodic block around it
    rings = m_prime + max(0, math.ceil((m_prime + 1.0 / m_prime) / L - 0.5 + 1e-12))
    x0 = math.ceil(keep_r + (rings + 2) * L + 5 * epsilon + 1.0)
    x = np.zeros(n)
    x[0] = x0
    core = Box.cube((rings + 0.5) * L, n, x)
    block_sites = _lift_block(T, x, L, rings + 1)

    # (4) glue the block and S near the origin into the full window
    s_sites = S.points[Box.cube(keep_r + 3 * epsilon, n).contains(S.points)]
    keep_box = Box.cube(keep_r + epsilon, n)
    sites = np.concatenate([s_sites, block_sites])
    kept = np.concatenate([keep_box.contains(s_sites, 0.0),
                           core.inflate(epsilon).contains(block_sites, 0.0)])
    A4 = VoronoiRegion(sites, kept, (Box.cube(keep_r + 2 * epsilon, n), core.inflate(2 * epsilon)))
    lo = np.minimum(np.array(S.window.lo), np.array(core.lo) - 2 * epsilon - 1.0)
    hi = np.maximum(np.array(S.window.hi), np.array(core.hi) + 2 * epsilon + 1.0)
    ambient = Box(tuple(lo), tuple(hi))
    N4 = WindowedPointSet(n, A4.kept_points, ambient)
    S_hat = glue_extend(N4, A4, ambient, epsilon, delta)
    S_hat.provenance = {
        "stage": "chaotify",
        "inner_extend": len(S1), "torus": len(T), "block": int(kept[len(s_sites):].sum()),
        "kept_from_S": int(kept[:len(s_sites)].sum()), "final": len(S_hat),
        "rings": rings, "grid_period": L,
    }
    witness = WWitness(m, m_prime, tuple(x), L)
    return (S_hat, witness, T) if return_torus else (S_hat, witness)
