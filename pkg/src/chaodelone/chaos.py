"""Closed geodesics, periodic approximation and the density/aperiodicity diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .cutproject import ProjectedSet, TubeConfig, cut_project
from .delone import Entourage, WindowedPointSet, Box, entourage_member
from .errors import NonHyperbolicElement, NotFoundWithinBudget
from .hyperbolic import (
    HyperbolicPoint,
    Isometry,
    OrientedGeodesic,
    UnitTangent,
    axis_and_length,
    dist_z,
    frame_coords,
    geodesic_from_tangent,
    point_from_polar,
    project_to_geodesic,
)
from .surface import (
    SurfaceGroup,
    ball_orbit,
    _from_iwasawa,
    mat_apply,
    mat_inv,
    mat_mul,
    normalize,
    tube_scan,
)


@dataclass(frozen=True)
class ClosedGeodesic:
    element: Isometry
    length: float
    axis: OrientedGeodesic

    @classmethod
    def from_element(cls, g: Isometry) -> "ClosedGeodesic":
        axis, length = axis_and_length(g)
        return cls(g, length, axis)

    def reanchored_near(self, p: HyperbolicPoint) -> "ClosedGeodesic":
        t, _ = project_to_geodesic(self.axis, p)
        return ClosedGeodesic(self.element, self.length, self.axis.reanchored(t))


@dataclass(frozen=True)
class LengthSpectrum:
    lengths: tuple
    cutoff: float

    @classmethod
    def from_geodesics(cls, geos, cutoff: float, tol: float = 1e-6) -> "LengthSpectrum":
        out: list[float] = []
        for L in sorted(g.length for g in geos):
            if L > cutoff:
                continue
            if not out or L - out[-1] > tol:
                out.append(float(L))
        return cls(tuple(out), float(cutoff))


# ------------------------------------------------------------ enumeration

def _lengths_and_offsets(elems: np.ndarray, base: complex):
    tr = np.abs(elems[:, 0] + elems[:, 3])
    hyp = tr > 2.0 + 1e-9
    length = np.where(hyp, 2.0 * np.arccosh(np.maximum(tr, 2.0) / 2.0), 0.0)
    disp = dist_z(mat_apply(elems, base), base)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.sinh(disp / 2.0) / np.sinh(length / 2.0)
    axis_dist = np.where(hyp, np.arccosh(np.maximum(ratio, 1.0)), np.inf)
    return tr, hyp, length, axis_dist


def _match_tree(elems: np.ndarray) -> cKDTree:
    return cKDTree(elems)


def _matches(tree: cKDTree, queries: np.ndarray, tol: float) -> list:
    """Indices of stored matrices equal to a query up to sign."""
    hits = tree.query_ball_point(queries, tol)
    hits_neg = tree.query_ball_point(-queries, tol)
    out = set()
    for h in list(hits) + list(hits_neg):
        out.update(h)
    return sorted(out)


def enumerate_closed(group: SurfaceGroup, length_cutoff: float,
                     max_elements: int | None = None, tol: float = 1e-7) -> list[ClosedGeodesic]:
    """One primitive representative per oriented conjugacy class of length <= cutoff.

    Every class has a representative whose axis meets the fundamental polygon,
    hence passes within the circumradius R of the base point; such an element
    moves the base by at most 2 asinh(cosh R sinh(L / 2)). Two such
    representatives are conjugate by an element moving the base by at most
    2 R + L / 2, which bounds the conjugator search.
    """
    if length_cutoff <= 0:
        return []
    R = group.circumradius
    base = group.base_point.z
    radius = 2.0 * math.asinh(math.cosh(R) * math.sinh(length_cutoff / 2.0))
    orb = ball_orbit(group, radius, max_elements=max_elements)
    tr, hyp, length, axis_dist = _lengths_and_offsets(orb.elements, base)
    sel = hyp & (length <= length_cutoff + 1e-9) & (axis_dist <= R + 1e-9)
    cand = orb.elements[sel]
    clen, cdist = length[sel], axis_dist[sel]
    if not len(cand):
        return []

    # primitivity: reject gamma = beta^k for a shorter candidate beta
    primitive = np.ones(len(cand), dtype=bool)
    tree = _match_tree(cand)
    kmax = int(length_cutoff / clen.min())
    power = cand.copy()
    for k in range(2, kmax + 1):
        power = mat_mul(power, cand)
        short = np.nonzero(clen * k <= length_cutoff + 1e-9)[0]
        if not len(short):
            break
        for i in _matches(tree, power[short], tol * max(1.0, float(np.abs(power[short]).max()))):
            primitive[i] = False
    cand, clen, cdist = cand[primitive], clen[primitive], cdist[primitive]

    # conjugacy classes, bucketed by length
    conj = ball_orbit(group, 2.0 * R + length_cutoff / 2.0 + 1e-6, max_elements=max_elements).elements
    conj_inv = mat_inv(conj)
    order = np.lexsort((cdist, clen))
    cand, clen, cdist = cand[order], clen[order], cdist[order]
    cls = np.full(len(cand), -1)
    reps = []
    start = 0
    while start < len(cand):
        stop = start + 1
        while stop < len(cand) and clen[stop] - clen[stop - 1] <= 1e-7:
            stop += 1
        bucket = np.arange(start, stop)
        btree = _match_tree(cand[bucket])
        for i in bucket:
            if cls[i] >= 0:
                continue
            cid = len(reps)
            reps.append(i)
            g = np.broadcast_to(cand[i], conj.shape)
            images = mat_mul(mat_mul(conj, g), conj_inv)
            scale = max(1.0, float(np.abs(cand[bucket]).max()))
            for j in _matches(btree, images, tol * scale):
                if cls[bucket[j]] < 0:
                    cls[bucket[j]] = cid
            cls[i] = cid
        start = stop
    out = []
    for i in reps:
        g = Isometry.from_array(cand[i])
        out.append(ClosedGeodesic.from_element(g))
    out.sort(key=lambda c: (round(c.length, 9), c.element.a, c.element.b, c.element.c))
    return out


def length_spectrum(group: SurfaceGroup, cutoff: float, **kw) -> LengthSpectrum:
    return LengthSpectrum.from_geodesics(enumerate_closed(group, cutoff, **kw), cutoff)


def primitive_root(group: SurfaceGroup, g: Isometry, tol: float = 1e-7) -> Isometry:
    """The primitive element with the same axis and direction as g."""
    axis, L = axis_and_length(g)
    scan = tube_scan(group, axis, -1.0, L + 1.0, group.circumradius)
    t, s = scan.t, scan.s
    j0 = int(np.argmin(np.abs(t)))
    same = np.nonzero((np.abs(s - s[j0]) <= 1e-7) & (t - t[j0] > 1e-6))[0]
    for j in same[np.argsort(t[same])]:
        tau = t[j] - t[j0]
        k = L / tau
        if abs(k - round(k)) <= 1e-6:
            beta_f = normalize(mat_mul(scan.elements[j], mat_inv(scan.elements[j0])))
            # a translation along the frame axis is diagonal
            if max(abs(beta_f[1]), abs(beta_f[2])) > tol * max(1.0, abs(beta_f[0])):
                continue
            inv = scan.std.inverse()
            beta = Isometry.from_array(mat_mul(mat_mul(inv.as_array(), beta_f), scan.std.as_array()))
            return beta
    return g


# ------------------------------------------------------------ periodic approximation

def _reduced_tangents(scan, times: np.ndarray):
    """Pull the tangents of the frame axis at ``times`` back to the base tile.

    Returns (index of nearest orbit point, reduced point, reduced direction).
    """
    pts = 1j * np.exp(times)
    tree_pts = scan.points
    d = dist_z(pts[:, None], tree_pts[None, :])
    j = np.argmin(d, axis=1)
    x, y, th = scan.frames[j, 0], scan.frames[j, 1], scan.frames[j, 2]
    z = (pts - x) / y
    c, s = np.sin(th), np.cos(th)
    # K_{-theta} = [[cos, -sin], [sin, cos]]
    w = (s * z - c) / (c * z + s)
    direction = np.pi / 2 - 2.0 * np.angle(c * z + s)
    return j, w, np.mod(direction, 2 * np.pi)


def _frame_element(frame_b, frame_a) -> np.ndarray:
    """h_b h_a^{-1} from Iwasawa triples; equals g_b g_a^{-1}."""
    hb = _from_iwasawa(*frame_b)
    ha = _from_iwasawa(*frame_a)
    return normalize(mat_mul(hb, mat_inv(ha)))


@dataclass
class ApproxResult:
    k: ClosedGeodesic
    reversed_matched: bool
    verified: bool
    word_length: int
    times: tuple
    attempts: int
    window: tuple


def _plus_set(group, geo, cfg, window):
    return cut_project(group, geo, cfg, window)


def _entourage_1d(A: ProjectedSet, B: ProjectedSet, r: float, flip_b: bool = False) -> bool:
    a = WindowedPointSet.from_projected(A)
    if flip_b:
        lo, hi = B.window
        b = WindowedPointSet(1, -B.coords.reshape(-1, 1), Box((-hi,), (-lo,)))
    else:
        b = WindowedPointSet.from_projected(B)
    return entourage_member(a, b, Entourage.from_r(r, 1))


def approx_by_closed(group: SurfaceGroup, ell: OrientedGeodesic, r: float, cfg: TubeConfig,
                     max_word_length: int = 12, margin: float = 4.0, reach: float = 14.0,
                     step: float = 0.02, max_attempts: int = 200) -> ApproxResult:
    """A closed geodesic k with (S+_l, S+_k) in N_r, found by closing ell.

    Tangents of ell at times a < -(r + margin) and b > r + margin are pulled
    back to the base tile; when two nearly coincide, g_b g_a^{-1} is
    hyperbolic with axis shadowing ell on [a, b] (closing lemma). Candidate
    pairs are tried in order of estimated shadowing error. If the oriented
    comparison fails the reversed geodesic is compared with t -> -t.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    lo_t, hi_t = -(r + margin + reach), r + margin + reach
    scan = tube_scan(group, ell, lo_t, hi_t, group.circumradius + 1e-6)
    times = np.arange(lo_t, hi_t + step / 2, step)
    j, w, ang = _reduced_tangents(scan, times)
    left = np.nonzero(times <= -(r + margin))[0]
    right = np.nonzero(times >= r + margin)[0]
    def feat(idx):
        return np.column_stack([w[idx].real, np.log(w[idx].imag), np.cos(ang[idx]), np.sin(ang[idx])])
    tree = cKDTree(feat(right))
    kq = min(8, len(right))
    d, jj = tree.query(feat(left), k=kq)
    d, jj = d.reshape(len(left), kq), jj.reshape(len(left), kq)
    pairs = []
    for li, (drow, jrow) in enumerate(zip(d, jj)):
        for dd, rj in zip(drow, jrow):
            a_i, b_i = left[li], right[rj]
            wl = int(scan.word_lengths[j[a_i]] + scan.word_lengths[j[b_i]])
            if wl > max_word_length:
                continue
            edge = min(-times[a_i], times[b_i]) - r
            pairs.append((dd * math.exp(-edge), a_i, b_i, wl))
    if not pairs:
        raise NotFoundWithinBudget("no closing pair within the word-length budget")
    pairs.sort()
    win = r + 1.0 / r + 1.0
    window = (-win, win)
    S_l = _plus_set(group, ell, cfg, window)
    inv = scan.std.inverse().as_array()
    std = scan.std.as_array()
    first = None
    seen = []
    for attempt, (_, a_i, b_i, wl) in enumerate(pairs[:max_attempts], 1):
        gf = _frame_element(scan.frames[j[b_i]], scan.frames[j[a_i]])
        g = Isometry.from_array(mat_mul(mat_mul(inv, gf), std))
        if abs(g.trace) <= 2.0 + 1e-9:
            continue
        if any(g.close_to(h, 1e-7) for h in seen):
            continue
        seen.append(g)
        k = ClosedGeodesic.from_element(g).reanchored_near(ell.point_at(0.0))
        if first is None:
            first = (k, wl, (float(times[a_i]), float(times[b_i])), attempt)
        S_k = _plus_set(group, k.axis, cfg, window)
        if _entourage_1d(S_l, S_k, r):
            return ApproxResult(k, False, True, wl, (float(times[a_i]), float(times[b_i])), attempt, window)
        k_rev = k.axis.reversed()
        S_kr = _plus_set(group, k_rev, cfg, window)
        if _entourage_1d(S_l, S_kr, r, flip_b=True):
            kr = ClosedGeodesic(k.element.inverse(), k.length, k_rev)
            return ApproxResult(kr, True, True, wl, (float(times[a_i]), float(times[b_i])), attempt, window)
    if first is None:
        raise NotFoundWithinBudget("closing pairs gave no hyperbolic element")
    k, wl, ab, attempt = first
    return ApproxResult(k, False, False, wl, ab, len(pairs[:max_attempts]), window)


def translate_match(group: SurfaceGroup, ell: OrientedGeodesic, k_target: OrientedGeodesic,
                    s: float, window: float, cfg: TubeConfig):
    """Offset a with (S+_l - a, S+_k) in N_s, scanning a by |a| over [-window, window]."""
    if not s > 0:
        raise ValueError("s must be positive")
    reach = s + 1.0 / s + 1.0
    S_k = cut_project(group, k_target, cfg, (-reach, reach))
    S_l = cut_project(group, ell, cfg, (-window - reach, window + reach))
    if len(S_k):
        anchor = S_k.coords[np.argmin(np.abs(S_k.coords))]
        cands = S_l.coords - anchor
    else:
        cands = np.array([0.0])
    cands = cands[np.abs(cands) <= window]
    cands = cands[np.lexsort((cands, np.abs(cands)))]
    Wl = WindowedPointSet.from_projected(S_l)
    Wk = WindowedPointSet.from_projected(S_k)
    E = Entourage.from_r(s, 1)
    for a in cands:
        if entourage_member(Wl.translate(a), Wk, E):
            return float(a), True
    raise NotFoundWithinBudget(f"no offset within |a| <= {window}")


# ------------------------------------------------------------ tau function

@dataclass
class TauEstimate:
    sup_estimate: float
    tangency_suspects: int
    truncated: int
    n_samples: int
    horizon: float
    values: np.ndarray = field(repr=False, default=None)

    def __iter__(self):
        return iter((self.sup_estimate, self.tangency_suspects))


def _tau_from_frame(t: np.ndarray, s: np.ndarray, rho: float, horizon: float, band: float):
    """tau and suspect flag for one geodesic from its orbit frame coordinates."""
    inside = np.abs(s) < rho
    if not inside.any():
        return math.inf, False
    h = np.arccosh(np.clip(math.cosh(rho) / np.cosh(s[inside]), 1.0, None))
    entry = np.maximum(0.0, np.abs(t[inside]) - h)
    tau = float(entry.min())
    near = (np.abs(np.abs(s) - rho) <= band) & (np.abs(t) <= tau + 1e-12)
    return tau, bool(near.any())


def tau_sup_estimate(group: SurfaceGroup, rho: float, sample_grid=(64, 64), horizon: float = 40.0,
                     seed: int = 0, band: float = 1e-4, first_stage: float = 6.0) -> TauEstimate:
    """Sampled sup of tau(v) = inf{|t| : geodesic of v meets an open rho-disk}.

    Base points are area-uniform in the disk of circumradius about the base
    point (which covers the fundamental polygon), directions equally spaced.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    nb, nd = sample_grid
    rng = np.random.default_rng(seed)
    R = group.circumradius
    base = group.base_point
    radii = np.arccosh(1.0 + rng.random(nb) * (math.cosh(R) - 1.0))
    phis = rng.random(nb) * 2 * math.pi
    dirs = 2 * math.pi * (np.arange(nd) + 0.5) / nd
    T0 = min(first_stage, horizon)
    ball = ball_orbit(group, T0 + R + rho + 1e-6).points
    taus = np.empty(nb * nd)
    suspects = np.zeros(nb * nd, dtype=bool)
    k = 0
    for r0, phi in zip(radii, phis):
        p = point_from_polar(base, float(r0), float(phi))
        for th in dirs:
            geo = geodesic_from_tangent(UnitTangent(p, float(th)))
            std = geo.standardizer().as_array()
            t, s = frame_coords(mat_apply(std, ball))
            tau, sus = _tau_from_frame(t, s, rho, horizon, band)
            if tau > T0 - rho:
                T = 2 * T0
                while True:
                    Tw = min(T, horizon)
                    sc = tube_scan(group, geo, -Tw, Tw, rho + 1e-6)
                    tau, sus = _tau_from_frame(sc.t, sc.s, rho, horizon, band)
                    if tau <= Tw - rho or Tw >= horizon:
                        break
                    T *= 2
            taus[k] = min(tau, horizon)
            suspects[k] = sus
            k += 1
    truncated = int(np.sum(taus >= horizon))
    sup = float(taus.max()) if len(taus) else 0.0
    return TauEstimate(sup, int(suspects.sum()), truncated, len(taus), horizon, taus)


# ------------------------------------------------------------ arithmeticity

def dalbo_check(spec: LengthSpectrum, omega_min: float, tol: float):
    """Is every listed length within tol of omega N for some omega >= omega_min?

    Any such omega has the shortest length L1 within tol of k omega, so each
    k gives a tiny interval for omega; inside it the multipliers n_i are
    fixed and feasibility is an intersection of intervals. Returns the
    largest feasible omega.
    """
    L = np.array(spec.lengths, dtype=float)
    if not len(L):
        raise ValueError("spectrum must be nonempty")
    if not omega_min > 0:
        raise ValueError("omega_min must be positive")
    L1 = L.min()
    kmax = int(math.floor((L1 + tol) / omega_min))
    for k in range(1, kmax + 1):
        lo, hi = (L1 - tol) / k, (L1 + tol) / k
        lo = max(lo, omega_min)
        if lo > hi:
            continue
        mid = 0.5 * (lo + hi)
        n_lo = np.floor((L - tol) / hi)
        n_hi = np.ceil((L + tol) / lo)
        ok = True
        for Li, a, b in zip(L, n_lo, n_hi):
            best = None
            for n in range(max(1, int(a)), int(b) + 1):
                ilo, ihi = max(lo, (Li - tol) / n), min(hi, (Li + tol) / n)
                if ilo <= ihi:
                    best = (ilo, ihi)
                    break
            if best is None:
                ok = False
                break
            lo, hi = best
        if ok:
            return True, float(min(max(L1 / k, lo), hi))
    return False, None


# ------------------------------------------------------------ conditions

@dataclass
class ConditionVerdict:
    verdict: str
    condition_a: bool
    rho: float
    mu: float
    tau_sup: float | None
    truncated: int | None
    tangency_suspects: int | None
    sample_grid: tuple
    horizon: float
    note: str = ("Condition (B) is sampled, not proven; the geodesic's density in the unit "
                 "tangent bundle is an assumption")


def condition_check(group: SurfaceGroup, rho: float, sample_grid=(16, 16), horizon: float = 40.0,
                    seed: int = 0) -> ConditionVerdict:
    mu = group.mu
    if not rho < mu:
        return ConditionVerdict("fail_A", False, rho, mu, None, None, None, tuple(sample_grid), horizon)
    est = tau_sup_estimate(group, rho, sample_grid, horizon, seed=seed)
    if est.truncated:
        verdict = "B_unverified"
    elif est.tangency_suspects:
        verdict = "B_suspect"
    else:
        verdict = "pass"
    return ConditionVerdict(verdict, True, rho, mu, est.sup_estimate, est.truncated,
                            est.tangency_suspects, tuple(sample_grid), horizon)
