"""The genus-2 surface from a 12-gon with alternating angles pi/3, 2pi/3.

Group elements are handled in bulk as float arrays of shape (N, 4) holding
(a, b, c, d). Orbit enumeration is a breadth-first search over right
multiplication by the side-pairing generators, pruned by a geometric keep
criterion; duplicates are detected on the orbit points themselves (the
stabiliser of the base point is trivial), using a KD-tree in the
coordinates (log y, x / y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, NoSolution, VertexCycleFailure
from .hyperbolic import (
    I,
    HyperbolicPoint,
    Isometry,
    OrientedGeodesic,
    apply,
    dist,
    dist_z,
    frame_coords,
    direction_toward,
    geodesic_through,
    angle_between,
    segment_isometry,
)
from .policy import DEFAULT, NumericPolicy

STANDARD_PAIRING = ("A", "B", "C", "A", "D", "C", "E", "D", "F", "E", "B", "F")


@dataclass(frozen=True)
class PolygonSpec:
    vertex_count: int = 12
    angle_pattern: tuple = (2 * math.pi / 3, math.pi / 3) * 6
    pairing_pattern: tuple = STANDARD_PAIRING

    def __post_init__(self):
        if len(self.angle_pattern) != self.vertex_count:
            raise ValueError("angle_pattern must have one angle per vertex")
        if len(self.pairing_pattern) != self.vertex_count:
            raise ValueError("pairing_pattern must label every side")

    @property
    def angle_sum(self) -> float:
        return float(sum(self.angle_pattern))

    @property
    def area(self) -> float:
        return (self.vertex_count - 2) * math.pi - self.angle_sum


@dataclass(frozen=True)
class SolvedPolygon:
    vertices: tuple
    side_length: float
    radius_sharp: float
    radius_obtuse: float
    apothem: float
    angles: tuple

    @property
    def circumradius(self) -> float:
        return max(self.radius_sharp, self.radius_obtuse)

    def side_lengths(self) -> list[float]:
        n = len(self.vertices)
        return [dist(self.vertices[k], self.vertices[(k + 1) % n]) for k in range(n)]

    def interior_angles(self) -> list[float]:
        n = len(self.vertices)
        out = []
        for k in range(n):
            v = self.vertices[k]
            u1 = direction_toward(v, self.vertices[(k + 1) % n])
            u2 = direction_toward(v, self.vertices[(k - 1) % n])
            out.append(angle_between(u1, u2))
        return out

    def triangulated_area(self) -> float:
        """Sum of the 12 centre triangle areas, angles measured numerically."""
        n = len(self.vertices)
        total = 0.0
        for k in range(n):
            p, q = self.vertices[k], self.vertices[(k + 1) % n]
            a0 = angle_between(direction_toward(I, p), direction_toward(I, q))
            a1 = angle_between(direction_toward(p, I), direction_toward(p, q))
            a2 = angle_between(direction_toward(q, I), direction_toward(q, p))
            total += math.pi - (a0 + a1 + a2)
        return total


def solve_polygon(spec: PolygonSpec = PolygonSpec()) -> SolvedPolygon:
    """Place the polygon around i with dihedral symmetry.

    Only alternating two-angle patterns are supported. Each centre triangle
    has angles (2pi/N, a1/2, a2/2) and is solved with the angle form of the
    hyperbolic law of cosines.
    """
    n = spec.vertex_count
    a1, a2 = spec.angle_pattern[0], spec.angle_pattern[1]
    if n % 2 or any(abs(spec.angle_pattern[k] - (a1, a2)[k % 2]) > 1e-15 for k in range(n)):
        raise NoSolution("angle pattern must alternate two values around an even polygon")
    if spec.area <= 0:
        raise NoSolution("angle sum too large for a hyperbolic polygon")
    c0 = 2 * math.pi / n
    h1, h2 = a1 / 2, a2 / 2
    cosh_side = (math.cos(h1) * math.cos(h2) + math.cos(c0)) / (math.sin(h1) * math.sin(h2))
    cosh_r1 = (math.cos(c0) * math.cos(h1) + math.cos(h2)) / (math.sin(c0) * math.sin(h1))
    cosh_r2 = (math.cos(c0) * math.cos(h2) + math.cos(h1)) / (math.sin(c0) * math.sin(h2))
    if min(cosh_side, cosh_r1, cosh_r2) <= 1.0:
        raise NoSolution("centre triangle is not hyperbolic")
    side = math.acosh(cosh_side)
    r1, r2 = math.acosh(cosh_r1), math.acosh(cosh_r2)
    apothem = math.asinh(math.sinh(r1) * math.sin(h1))
    vertices = []
    for k in range(n):
        r = r1 if k % 2 == 0 else r2
        w = math.tanh(r / 2) * complex(math.cos(c0 * k), math.sin(c0 * k))
        vertices.append(HyperbolicPoint.from_complex(1j * (1 + w) / (1 - w)))
    if a1 <= a2:
        sharp, obtuse = r1, r2
    else:
        sharp, obtuse = r2, r1
    poly = SolvedPolygon(tuple(vertices), side, sharp, obtuse, apothem, tuple(spec.angle_pattern))
    if max(abs(s - side) for s in poly.side_lengths()) > 1e-10:
        raise NoSolution("polygon does not close with equal sides")
    if max(abs(x - y) for x, y in zip(poly.interior_angles(), spec.angle_pattern)) > 1e-10:
        raise NoSolution("interior angles do not match the pattern")
    return poly


@dataclass(frozen=True)
class VertexCycle:
    vertices: tuple          # vertex indices in visiting order
    word: tuple              # side indices s whose maps T_s are applied in order
    angle_sum: float
    residual: float          # max deviation of the cycle word from the identity


@dataclass(frozen=True)
class SurfaceGroup:
    polygon: SolvedPolygon
    pairing: tuple                       # side -> partner side
    labels: tuple                        # side -> label
    side_maps: tuple                     # side s -> T_s, carrying the partner side onto s
    base_point: HyperbolicPoint
    vertex_cycles: tuple
    injectivity_radius_at_base: float | None = None
    policy: NumericPolicy = field(default=DEFAULT, compare=False)

    @property
    def mu(self) -> float:
        return self.injectivity_radius_at_base

    @property
    def circumradius(self) -> float:
        return self.polygon.circumradius

    @property
    def generators(self) -> dict:
        """Label -> generator; the generator of label X is T_i for X's first side i."""
        out = {}
        for s, lab in enumerate(self.labels):
            if lab not in out:
                out[lab] = self.side_maps[s]
        return out

    @property
    def inverses(self) -> dict:
        return {lab: g.inverse() for lab, g in self.generators.items()}

    def generator_array(self) -> np.ndarray:
        return np.array([g.as_array() for g in self.side_maps])

    def conjugated(self, g: Isometry) -> "SurfaceGroup":
        """The same surface seen through the isometry g (base point moved to g(base))."""
        gi = g.inverse()
        poly = replace(self.polygon, vertices=tuple(apply(g, v) for v in self.polygon.vertices))
        return replace(self, polygon=poly,
                       side_maps=tuple(g @ t @ gi for t in self.side_maps),
                       base_point=apply(g, self.base_point))


def _pairing_from_labels(labels) -> tuple:
    where: dict = {}
    for s, lab in enumerate(labels):
        where.setdefault(lab, []).append(s)
    partner = [None] * len(labels)
    for lab, sides in where.items():
        if len(sides) != 2:
            raise VertexCycleFailure(f"label {lab!r} must occur exactly twice, got {len(sides)}")
        i, j = sides
        partner[i], partner[j] = j, i
    return tuple(partner)


def _vertex_cycles(poly: SolvedPolygon, partner, side_maps) -> list[VertexCycle]:
    n = len(poly.vertices)
    seen = set()
    cycles = []
    for start in range(n):
        if start in seen:
            continue
        verts, word = [], []
        k = start
        g = Isometry.identity()
        while True:
            verts.append(k)
            seen.add(k)
            s2 = partner[k]
            g = side_maps[s2] @ g
            word.append(s2)
            k = (s2 + 1) % n
            if k == start or len(verts) > n:
                break
        angle_sum = sum(poly.angles[v] for v in verts)
        res = min(np.max(np.abs(g.as_array() - Isometry.identity().as_array())),
                  np.max(np.abs(g.as_array() + Isometry.identity().as_array())))
        cycles.append(VertexCycle(tuple(verts), tuple(word), angle_sum, float(res)))
    return cycles


def build_side_pairings(poly: SolvedPolygon, spec: PolygonSpec = PolygonSpec(),
                        expected_orbit_sizes=(3, 3, 6),
                        policy: NumericPolicy = DEFAULT) -> SurfaceGroup:
    """Side-pairing generators, vertex cycles and the injectivity radius at i."""
    n = spec.vertex_count
    partner = _pairing_from_labels(spec.pairing_pattern)
    v = poly.vertices
    maps = []
    for s in range(n):
        j = partner[s]
        # partner side j, run v_j -> v_{j+1}, lands on side s reversed
        maps.append(segment_isometry(v[j], v[(j + 1) % n], v[(s + 1) % n], v[s]))
    cycles = _vertex_cycles(poly, partner, maps)
    bad = [c for c in cycles if c.residual > 1e-8 or abs(c.angle_sum - 2 * math.pi) > 1e-9]
    if bad:
        raise VertexCycleFailure(
            f"{len(bad)} vertex cycle(s) fail: "
            + ", ".join(f"{c.vertices} angle sum {c.angle_sum:.6f} residual {c.residual:.2e}"
                        for c in bad))
    sizes = tuple(sorted(len(c.vertices) for c in cycles))
    if expected_orbit_sizes is not None and sizes != tuple(sorted(expected_orbit_sizes)):
        raise VertexCycleFailure(f"vertex orbit sizes {sizes} != {tuple(expected_orbit_sizes)}")
    group = SurfaceGroup(poly, partner, tuple(spec.pairing_pattern), tuple(maps), I,
                         tuple(cycles), None, policy)
    return replace(group, injectivity_radius_at_base=injectivity_radius(group))


def standard_surface(policy: NumericPolicy = DEFAULT) -> SurfaceGroup:
    spec = PolygonSpec()
    return build_side_pairings(solve_polygon(spec), spec, policy=policy)


# ---------------------------------------------------------------- bulk algebra

def mat_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a = x[..., 0] * y[..., 0] + x[..., 1] * y[..., 2]
    b = x[..., 0] * y[..., 1] + x[..., 1] * y[..., 3]
    c = x[..., 2] * y[..., 0] + x[..., 3] * y[..., 2]
    d = x[..., 2] * y[..., 1] + x[..., 3] * y[..., 3]
    return normalize(np.stack([a, b, c, d], axis=-1))


def normalize(m: np.ndarray) -> np.ndarray:
    ad, bc = m[..., 0] * m[..., 3], m[..., 1] * m[..., 2]
    det = ad - bc
    # far from the identity det is lost to cancellation; products of det-1
    # rows are then left unscaled
    ok = (det > 0) & (np.abs(ad) + np.abs(bc) < 1e8 * np.abs(det))
    m = m / np.sqrt(np.where(ok, det, 1.0))[..., None]
    lead = np.where(m[..., 0] != 0, m[..., 0], np.where(m[..., 1] != 0, m[..., 1], m[..., 2]))
    return m * np.where(lead < 0, -1.0, 1.0)[..., None]


def mat_inv(m: np.ndarray) -> np.ndarray:
    return normalize(np.stack([m[..., 3], -m[..., 1], -m[..., 2], m[..., 0]], axis=-1))


def mat_apply(m: np.ndarray, z) -> np.ndarray:
    """Moebius action of det-1 rows; Im computed as Im z / |cz + d|^2 to keep
    relative accuracy near the ideal boundary, in an order that avoids overflow."""
    z = np.asarray(z)
    den = m[..., 2] * z + m[..., 3]
    a = np.abs(den)
    with np.errstate(invalid="ignore", divide="ignore"):
        num = (m[..., 0] * z + m[..., 1]) * (np.conj(den) / a)
        return (num.real + 1j * (z.imag / a)) / a


def conj_array(g: Isometry, arr: np.ndarray) -> np.ndarray:
    """g X g^-1 for each row X."""
    ga = g.as_array()
    gi = g.inverse().as_array()
    return mat_mul(mat_mul(np.broadcast_to(ga, arr.shape), arr), np.broadcast_to(gi, arr.shape))


def _keys(points: np.ndarray) -> np.ndarray:
    return np.column_stack([np.log(points.imag), points.real / points.imag])


@dataclass
class Orbit:
    """Result of an orbit enumeration in some working frame."""
    elements: np.ndarray      # (N, 4)
    points: np.ndarray        # (N,) complex, element applied to the frame's base point
    word_lengths: np.ndarray  # (N,) BFS depth
    frames: np.ndarray | None = None  # (N, 3) Iwasawa (x, y, theta) of g B, B: i -> base


def _iwasawa(m: np.ndarray):
    """(x, y, theta) with m = N_x A_y K_theta for det-1 rows."""
    q = m[..., 2] ** 2 + m[..., 3] ** 2
    y = 1.0 / q
    x = (m[..., 0] * m[..., 2] + m[..., 1] * m[..., 3]) / q
    return x, y, np.arctan2(-m[..., 2], m[..., 3])


def _from_iwasawa(x, y, th) -> np.ndarray:
    r = np.sqrt(y)
    c, s = np.cos(th), np.sin(th)
    # N_x A_y = [[r, x / r], [0, 1 / r]] times K = [[c, s], [-s, c]]
    return normalize(np.stack([r * c - x / r * s, r * s + x / r * c, -s / r, c / r], axis=-1))


def _affine(base: complex):
    rb = math.sqrt(base.imag)
    return (np.array([rb, base.real / rb, 0.0, 1.0 / rb]),
            np.array([1.0 / rb, -base.real / rb, 0.0, rb]))


def unit_generators(gens: np.ndarray, base: complex, theta: float = 0.0) -> np.ndarray:
    """K^-1 B^-1 g B K for each generator, B: i -> base affine, K rotation by theta."""
    bmat, binv = _affine(complex(base))
    c, s = math.cos(theta), math.sin(theta)
    k, kinv = np.array([c, s, -s, c]), np.array([c, -s, s, c])
    u = mat_mul(mat_mul(np.broadcast_to(binv, gens.shape), gens), np.broadcast_to(bmat, gens.shape))
    return mat_mul(mat_mul(np.broadcast_to(kinv, gens.shape), u), np.broadcast_to(k, gens.shape))


def orbit_bfs(gens: np.ndarray, base: complex, keep, max_elements: int,
              tol: float = 1e-6, ug: np.ndarray | None = None) -> Orbit:
    """Breadth-first orbit search closed under right multiplication by ``gens``.

    ``keep(points)`` returns a boolean mask; elements whose orbit point fails
    it are neither stored nor expanded.

    An element g is carried as the Iwasawa triple of h = g B, with B the
    affine map i -> base. Right multiplication by a generator then costs one
    product of bounded matrices plus an affine update, so relative accuracy
    survives at any distance from the base. Two elements are identified when
    their orbit points are within hyperbolic distance ``tol``; candidates come
    from a KD-tree in (log y, x / y), whose metric is distorted far from the
    base, so the tree radius is generous and the hyperbolic check decides.

    ``ug`` may supply B^-1 g B directly; a caller working in a distorted frame
    should build it from the original generators to avoid conditioning loss.
    """
    key_r = 1e-2
    base = complex(base)
    _, binv = _affine(base)
    if ug is None:
        ug = unit_generators(gens, base)
    lx, ly, lt = [np.array([base.real])], [np.array([base.imag])], [np.zeros(1)]
    levels_p = [np.array([base])]
    levels_k = [_keys(levels_p[0])]
    cx, cy, ct = lx[0], ly[0], lt[0]
    total = 1
    while len(cx):
        c, s = np.cos(ct), np.sin(ct)
        k = np.stack([c, s, -s, c], axis=-1)
        x2, y2, t2 = _iwasawa(mat_mul(k[:, None, :], ug[None, :, :]))
        nx = (cx[:, None] + cy[:, None] * x2).reshape(-1)
        ny = (cy[:, None] * y2).reshape(-1)
        nt = t2.reshape(-1)
        cand_p = nx + 1j * ny
        mask = keep(cand_p)
        nx, ny, nt, cand_p = nx[mask], ny[mask], nt[mask], cand_p[mask]
        ck = _keys(cand_p)
        if len(nx):
            # pruning can make BFS depth exceed word length, so a candidate may
            # duplicate a point from any earlier level
            old_p = np.concatenate(levels_p)
            _, j = cKDTree(np.concatenate(levels_k)).query(ck, k=2, distance_upper_bound=key_r)
            fresh = np.ones(len(nx), dtype=bool)
            for col in range(2):
                idx = np.nonzero(j[:, col] < len(old_p))[0]
                fresh[idx[dist_z(cand_p[idx], old_p[j[idx, col]]) <= tol]] = False
            nx, ny, nt, cand_p, ck = nx[fresh], ny[fresh], nt[fresh], cand_p[fresh], ck[fresh]
        if len(nx):
            pairs = cKDTree(ck).query_pairs(key_r, output_type="ndarray")
            if len(pairs):
                pairs = pairs[dist_z(cand_p[pairs[:, 0]], cand_p[pairs[:, 1]]) <= tol]
            if len(pairs):
                drop = np.zeros(len(nx), dtype=bool)
                # keep the lowest index of each cluster
                for i, j in sorted(map(tuple, np.sort(pairs, axis=1))):
                    if not drop[i]:
                        drop[j] = True
                keep_i = ~drop
                nx, ny, nt, cand_p, ck = nx[keep_i], ny[keep_i], nt[keep_i], cand_p[keep_i], ck[keep_i]
        total += len(nx)
        if total > max_elements:
            raise BudgetExceeded(f"orbit enumeration exceeded {max_elements} elements")
        cx, cy, ct = nx, ny, nt
        if len(nx):
            lx.append(nx), ly.append(ny), lt.append(nt)
            levels_p.append(cand_p)
            levels_k.append(ck)
    fx, fy, ft = np.concatenate(lx), np.concatenate(ly), np.concatenate(lt)
    h = _from_iwasawa(fx, fy, ft)
    elements = mat_mul(h, np.broadcast_to(binv, h.shape))
    depth = np.concatenate([np.full(len(p), k) for k, p in enumerate(levels_p)])
    return Orbit(elements, np.concatenate(levels_p), depth, np.column_stack([fx, fy, ft]))


@dataclass(frozen=True)
class OrbitPoint:
    point: HyperbolicPoint
    element: Isometry
    word_length: int


def _canonical_order(dists: np.ndarray, elems: np.ndarray) -> np.ndarray:
    r = np.round(dists, 9)
    keys = [np.round(elems[:, k], 7) for k in (3, 2, 1, 0)] + [r]
    return np.lexsort(keys)


def ball_orbit(group: SurfaceGroup, radius: float, slack: float | None = None,
               max_elements: int | None = None) -> Orbit:
    """All elements moving the base point by at most ``radius``, sorted canonically."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    slack = group.circumradius if slack is None else slack
    cap = max_elements or group.policy.max_elements
    base = group.base_point.z
    lim = radius + slack
    orb = orbit_bfs(group.generator_array(), base, lambda p: dist_z(p, base) <= lim, cap)
    d = dist_z(orb.points, base)
    sel = d <= radius + 1e-12
    order = _canonical_order(d[sel], orb.elements[sel])
    idx = np.nonzero(sel)[0][order]
    return Orbit(orb.elements[idx], orb.points[idx], orb.word_lengths[idx], orb.frames[idx])


def group_ball(group: SurfaceGroup, radius: float, max_elements: int | None = None) -> list[OrbitPoint]:
    orb = ball_orbit(group, radius, max_elements=max_elements)
    return [OrbitPoint(HyperbolicPoint.from_complex(p), Isometry.from_array(m), int(w))
            for m, p, w in zip(orb.elements, orb.points, orb.word_lengths)]


def injectivity_radius(group: SurfaceGroup, scan_radius: float | None = None) -> float:
    """Half the minimal displacement of the base point by a nontrivial element."""
    r = 4.0 * group.polygon.apothem if scan_radius is None else scan_radius
    orb = ball_orbit(group, r)
    d = dist_z(orb.points, group.base_point.z)
    d = d[d > 1e-6]
    return 0.5 * float(d.min())


# ------------------------------------------------------------ tube enumeration

def _segment_distance(w: np.ndarray, t0: float, t1: float) -> np.ndarray:
    """Distance from frame points to the segment {i e^t : t0 <= t <= t1}."""
    t, s = frame_coords(w)
    tc = np.clip(t, t0, t1)
    return dist_z(w, 1j * np.exp(tc))


def _general_segment_distance(w: np.ndarray, p: complex, q: complex) -> np.ndarray:
    pp, qq = HyperbolicPoint.from_complex(p), HyperbolicPoint.from_complex(q)
    length = dist(pp, qq)
    if length < 1e-12:
        return dist_z(w, p)
    std = geodesic_through(pp, qq).standardizer()
    return _segment_distance(mat_apply(std.as_array(), w), 0.0, length)


# orbit points in the frame have Im ~ e^t and overflow near t = 709; the
# original-frame images in provenance records lose range earlier
T_LIMIT = 600.0


@dataclass
class TubeScan:
    """Orbit points near a geodesic segment, expressed in the geodesic's frame."""
    std: Isometry            # original frame -> geodesic frame
    elements: np.ndarray     # elements in the geodesic frame
    points: np.ndarray       # orbit points in the geodesic frame
    word_lengths: np.ndarray
    frames: np.ndarray | None = None   # Iwasawa triples of g B in the geodesic frame

    @property
    def t(self) -> np.ndarray:
        return frame_coords(self.points)[0]

    @property
    def s(self) -> np.ndarray:
        return frame_coords(self.points)[1]

    def original_elements(self) -> np.ndarray:
        inv = self.std.inverse()
        return conj_array(inv, self.elements)


def tube_scan(group: SurfaceGroup, ell: OrientedGeodesic, t0: float, t1: float,
              radius: float, max_elements: int | None = None) -> TubeScan:
    """Every orbit point within ``radius`` of ell([t0, t1]), plus some extras.

    The search runs in the frame where ell is the imaginary axis so that
    long windows do not lose precision near the ideal endpoints.
    """
    if not t0 < t1:
        raise ValueError("need t0 < t1")
    if max(abs(t0), abs(t1)) > T_LIMIT:
        raise ValueError(f"window beyond |t| <= {T_LIMIT} leaves double precision range")
    cap = max_elements or group.policy.max_elements
    std = ell.standardizer()
    gens = conj_array(std, group.generator_array())
    base = complex(std.apply_z(group.base_point.z))
    # std B_frame = B_orig K_theta; conjugating the original generators by
    # bounded matrices keeps full accuracy however far ell is from the base
    b0 = group.base_point.z
    bf, _ = _affine(base)
    _, b0inv = _affine(b0)
    m = mat_mul(mat_mul(b0inv, mat_inv(std.as_array())), bf)
    theta = math.atan2(-m[2], m[3])
    ug = unit_generators(group.generator_array(), b0, theta)
    tb, _ = frame_coords(base)
    foot = 1j * math.exp(min(max(float(tb), t0), t1))
    lim = radius + group.circumradius

    def keep(w):
        d = _segment_distance(w, t0, t1)
        near_base = _general_segment_distance(w, base, foot)
        return np.minimum(d, near_base) <= lim

    orb = orbit_bfs(gens, base, keep, cap, ug=ug)
    d = _segment_distance(orb.points, t0, t1)
    sel = d <= radius
    t, s = frame_coords(orb.points[sel])
    order = np.lexsort((s, t))
    idx = np.nonzero(sel)[0][order]
    return TubeScan(std, orb.elements[idx], orb.points[idx], orb.word_lengths[idx], orb.frames[idx])


def orbit_near_segment(group: SurfaceGroup, ell: OrientedGeodesic, t0: float, t1: float,
                       rho: float, margin: float = 1e-6,
                       max_elements: int | None = None) -> list[OrbitPoint]:
    if rho <= 0:
        raise ValueError("rho must be positive")
    scan = tube_scan(group, ell, t0, t1, rho + margin, max_elements)
    inv = scan.std.inverse()
    elems = scan.original_elements()
    out = []
    for m, w, k in zip(elems, scan.points, scan.word_lengths):
        out.append(OrbitPoint(HyperbolicPoint.from_complex(inv.apply_z(w)),
                              Isometry.from_array(m), int(k)))
    return out


def random_geodesic(group: SurfaceGroup, seed: int, spread: float | None = None) -> OrientedGeodesic:
    """Seeded geodesic through a point near the base point, anchored there."""
    from .hyperbolic import UnitTangent, geodesic_from_tangent, point_from_polar

    rng = np.random.default_rng(seed)
    rmax = group.polygon.apothem if spread is None else spread
    r = math.acosh(1.0 + rng.random() * (math.cosh(rmax) - 1.0))
    p = point_from_polar(group.base_point, r, rng.random() * 2 * math.pi)
    return geodesic_from_tangent(UnitTangent(p, rng.random() * 2 * math.pi))
