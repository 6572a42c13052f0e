"""Upper half-plane geometry: points, isometries, oriented geodesics.

Boundary points are plain floats, with ``math.inf`` standing for the point
at infinity. Every geodesic is parametrised by arc length from its anchor,
and the signed normal coordinate is positive on the left of the direction
of travel (the forward tangent rotated by +pi/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonHyperbolicElement

INF = math.inf
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HyperbolicPoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"point must lie in the upper half-plane, got y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "HyperbolicPoint":
        return cls(float(z.real), float(z.imag))


I = HyperbolicPoint(0.0, 1.0)


def _canonical_sign(a, b, c, d):
    for v in (a, b, c):
        if v != 0.0:
            if v < 0:
                return -a, -b, -c, -d
            return a, b, c, d
    return a, b, c, d


@dataclass(frozen=True)
class Isometry:
    """An element of PSL(2, R) acting by z -> (az + b)/(cz + d).

    Construct through :meth:`from_entries` to get det 1 and the canonical
    projective sign.
    """

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_entries(cls, a, b, c, d) -> "Isometry":
        ad, bc = a * d, b * c
        det = ad - bc
        if abs(ad) + abs(bc) > 1e8 * abs(det) and math.isfinite(det):
            # det is lost to cancellation; the caller vouches for det 1
            s = 1.0
        elif not det > 0:
            raise ValueError(f"matrix must have positive determinant, got {det}")
        else:
            s = math.sqrt(det)
        a, b, c, d = _canonical_sign(a / s, b / s, c / s, d / s)
        return cls(float(a), float(b), float(c), float(d))

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, m) -> "Isometry":
        m = np.asarray(m, dtype=float).ravel()
        return cls.from_entries(*m)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    def __matmul__(self, other: "Isometry") -> "Isometry":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return Isometry.from_entries(a, b, c, d)

    def inverse(self) -> "Isometry":
        return Isometry.from_entries(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def apply_z(self, z):
        """Moebius action on a complex scalar or array (boundary included)."""
        if np.isscalar(z) and z == INF:
            return INF if self.c == 0 else self.a / self.c
        return (self.a * z + self.b) / (self.c * z + self.d)

    def apply_boundary(self, x: float) -> float:
        if x == INF:
            return INF if self.c == 0 else self.a / self.c
        den = self.c * x + self.d
        if den == 0:
            return INF
        return (self.a * x + self.b) / den

    def derivative_arg(self, z) -> float:
        """Rotation angle of the tangent map at z."""
        return -2.0 * np.angle(self.c * z + self.d)

    def close_to(self, other: "Isometry", tol: float = 1e-8) -> bool:
        u, v = self.as_array(), other.as_array()
        return min(np.max(np.abs(u - v)), np.max(np.abs(u + v))) <= tol


def apply(g: Isometry, p: HyperbolicPoint) -> HyperbolicPoint:
    w = g.apply_z(p.z)
    return HyperbolicPoint(float(w.real), float(w.imag))


def dist(p: HyperbolicPoint, q: HyperbolicPoint) -> float:
    return float(dist_z(p.z, q.z))


def dist_z(z, w):
    """Hyperbolic distance between complex arrays (broadcasting)."""
    z = np.asarray(z)
    w = np.asarray(w)
    return 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag) * np.sqrt(w.imag)))


@dataclass(frozen=True)
class UnitTangent:
    base: HyperbolicPoint
    direction: float

    def __post_init__(self):
        object.__setattr__(self, "direction", float(self.direction) % TWO_PI)

    def transformed(self, g: Isometry) -> "UnitTangent":
        return UnitTangent(apply(g, self.base), self.direction + g.derivative_arg(self.base.z))

    def reversed(self) -> "UnitTangent":
        return UnitTangent(self.base, self.direction + math.pi)


@dataclass(frozen=True)
class OrientedGeodesic:
    alpha: float
    omega: float
    anchor: HyperbolicPoint

    def __post_init__(self):
        alpha = INF if math.isinf(self.alpha) else float(self.alpha)
        omega = INF if math.isinf(self.omega) else float(self.omega)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "omega", omega)
        if alpha == omega:
            raise ValueError("geodesic endpoints must differ")
        if _offcurve(alpha, omega, self.anchor) > 1e-10:
            raise ValueError("anchor does not lie on the geodesic")

    def standardizer(self) -> Isometry:
        """Isometry sending this geodesic to the upward imaginary axis, anchor to i."""
        al, om = self.alpha, self.omega
        if om == INF:
            m0 = (1.0, -al, 0.0, 1.0)
        elif al == INF:
            m0 = (0.0, -1.0, 1.0, -om)
        else:
            s = 1.0 if al > om else -1.0
            m0 = (s, -s * al, 1.0, -om)
        a, b, c, d = m0
        z = self.anchor.z
        h = abs((a * z + b) / (c * z + d))
        r = math.sqrt(h)
        return Isometry.from_entries(a / r, b / r, c * r, d * r)

    def point_at(self, t: float) -> HyperbolicPoint:
        inv = self.standardizer().inverse()
        return HyperbolicPoint.from_complex(inv.apply_z(1j * math.exp(t)))

    def points_at(self, ts) -> np.ndarray:
        inv = self.standardizer().inverse()
        return inv.apply_z(1j * np.exp(np.asarray(ts, dtype=float)))

    def tangent_at(self, t: float = 0.0) -> UnitTangent:
        inv = self.standardizer().inverse()
        w = 1j * math.exp(t)
        return UnitTangent(HyperbolicPoint.from_complex(inv.apply_z(w)),
                           math.pi / 2 + inv.derivative_arg(w))

    def reversed(self) -> "OrientedGeodesic":
        return OrientedGeodesic(self.omega, self.alpha, self.anchor)

    def reanchored(self, t: float) -> "OrientedGeodesic":
        return OrientedGeodesic(self.alpha, self.omega, self.point_at(t))

    def transformed(self, g: Isometry) -> "OrientedGeodesic":
        return OrientedGeodesic(g.apply_boundary(self.alpha), g.apply_boundary(self.omega),
                                apply(g, self.anchor))

    def same_curve(self, other: "OrientedGeodesic", tol: float = 1e-8) -> bool:
        return _bnd_close(self.alpha, other.alpha, tol) and _bnd_close(self.omega, other.omega, tol)


def _bnd_close(x: float, y: float, tol: float) -> bool:
    if x == INF or y == INF:
        if x == INF and y == INF:
            return True
        f = y if x == INF else x
        return abs(f) > 1.0 / tol
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def _offcurve(alpha: float, omega: float, p: HyperbolicPoint) -> float:
    if alpha == INF or omega == INF:
        foot = omega if alpha == INF else alpha
        return abs(p.x - foot) / max(1.0, p.y)
    c = 0.5 * (alpha + omega)
    r = 0.5 * abs(alpha - omega)
    return abs(math.hypot(p.x - c, p.y) - r) / max(1.0, r)


def project_to_geodesic(ell: OrientedGeodesic, z: HyperbolicPoint) -> tuple[float, float]:
    """Arc-length coordinate of the foot of the perpendicular and signed distance."""
    t, s = project_many(ell.standardizer(), np.array([z.z]))
    return float(t[0]), float(s[0])


def project_many(std: Isometry, zs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised projection given a geodesic's standardizer."""
    return frame_coords(std.apply_z(np.asarray(zs)))


def frame_coords(w) -> tuple[np.ndarray, np.ndarray]:
    """(t, s) for points already expressed in the standard frame."""
    w = np.asarray(w)
    return np.log(np.abs(w)), -np.arcsinh(w.real / w.imag)


def geodesic_from_tangent(v: UnitTangent) -> OrientedGeodesic:
    x, y = v.base.x, v.base.y
    cth, sth = math.cos(v.direction), math.sin(v.direction)
    if abs(cth) < 1e-14:
        if sth > 0:
            return OrientedGeodesic(x, INF, v.base)
        return OrientedGeodesic(INF, x, v.base)
    c = x + y * sth / cth
    r = math.hypot(x - c, y)
    if cth > 0:
        return OrientedGeodesic(c - r, c + r, v.base)
    return OrientedGeodesic(c + r, c - r, v.base)


def geodesic_through(p: HyperbolicPoint, q: HyperbolicPoint) -> OrientedGeodesic:
    """Geodesic through p and q, oriented from p to q and anchored at p."""
    if abs(p.x - q.x) <= 1e-14 * max(1.0, abs(p.x)):
        if q.y > p.y:
            return OrientedGeodesic(p.x, INF, p)
        return OrientedGeodesic(INF, p.x, p)
    c = (abs(p.z) ** 2 - abs(q.z) ** 2) / (2.0 * (p.x - q.x))
    r = math.hypot(p.x - c, p.y)
    if q.x > p.x:
        return OrientedGeodesic(c - r, c + r, p)
    return OrientedGeodesic(c + r, c - r, p)


def segment_isometry(p1, q1, p2, q2) -> Isometry:
    """Orientation-preserving isometry with p1 -> p2 and q1 -> q2 (equal lengths)."""
    m1 = geodesic_through(p1, q1).standardizer()
    m2 = geodesic_through(p2, q2).standardizer()
    return m2.inverse() @ m1


def axis_and_length(g: Isometry, tol: float = 1e-10) -> tuple[OrientedGeodesic, float]:
    a, b, c, d = g.a, g.b, g.c, g.d
    tr = a + d
    if abs(tr) <= 2.0 + tol:
        raise NonHyperbolicElement(f"|trace| = {abs(tr):.12g} <= 2")
    if tr < 0:
        a, b, c, d = -a, -b, -c, -d
        tr = -tr
    length = 2.0 * math.acosh(tr / 2.0)
    if abs(c) <= 1e-15 * max(abs(a), abs(b), abs(d)):
        # second fixed point beyond double range: treat it as infinity
        fixed = b / (d - a)
        if a > d:
            alpha, omega = fixed, INF
        else:
            alpha, omega = INF, fixed
    else:
        bb = d - a
        disc = math.sqrt(tr * tr - 4.0)
        q = -0.5 * (bb + math.copysign(disc, bb) if bb != 0 else disc)
        z1, z2 = q / c, -b / q
        if abs(c * z1 + d) > abs(c * z2 + d):
            omega, alpha = z1, z2
        else:
            omega, alpha = z2, z1
    if alpha == INF or omega == INF:
        foot = omega if alpha == INF else alpha
        tmp = OrientedGeodesic(alpha, omega, HyperbolicPoint(foot, 1.0))
    else:
        tmp = OrientedGeodesic(alpha, omega,
                               HyperbolicPoint(0.5 * (alpha + omega), 0.5 * abs(alpha - omega)))
    t0, _ = project_to_geodesic(tmp, I)
    return tmp.reanchored(t0), length


def translation_length(g: Isometry) -> float:
    tr = abs(g.trace)
    return 2.0 * math.acosh(max(tr, 2.0) / 2.0)


def to_disk(p: HyperbolicPoint) -> tuple[float, float]:
    w = (p.z - 1j) / (p.z + 1j)
    return float(w.real), float(w.imag)


def from_disk(u: float, v: float) -> HyperbolicPoint:
    w = complex(u, v)
    if abs(w) >= 1.0:
        raise ValueError("disk point must satisfy u^2 + v^2 < 1")
    return HyperbolicPoint.from_complex(1j * (1 + w) / (1 - w))


def disk_z(z):
    """Cayley transform on complex arrays."""
    z = np.asarray(z)
    return (z - 1j) / (z + 1j)


def point_from_polar(center: HyperbolicPoint, r: float, theta: float) -> HyperbolicPoint:
    """Point at hyperbolic distance r from center in Euclidean direction theta."""
    v = UnitTangent(center, theta)
    return geodesic_from_tangent(v).point_at(r)


def angle_between(u: float, v: float) -> float:
    """Unsigned angle in [0, pi] between two directions."""
    d = abs((u - v + math.pi) % TWO_PI - math.pi)
    return d


def direction_toward(p: HyperbolicPoint, q: HyperbolicPoint) -> float:
    return geodesic_through(p, q).tangent_at(0.0).direction


