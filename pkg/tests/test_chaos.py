import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaodelone.chaos import (
    ClosedGeodesic, LengthSpectrum, approx_by_closed, condition_check, dalbo_check,
    enumerate_closed, length_spectrum, tau_sup_estimate, translate_match,
)
from chaodelone.cutproject import TubeConfig, cut_project
from chaodelone.delone import find_periods
from chaodelone.hyperbolic import HyperbolicPoint, Isometry, apply, axis_and_length, dist, point_from_polar
from chaodelone.surface import ball_orbit, random_geodesic, standard_surface

from oracles import dalbo_grid_oracle, entourage_1d, hdist, tau_oracle

G = standard_surface()
MU = G.mu
CFG = TubeConfig(0.95 * MU)
CLOSED6 = enumerate_closed(G, 6.0)


# ------------------------------------------------------------ enumeration

def test_closed_geodesic_invariant():
    for k in CLOSED6:
        assert k.length > 0
        p = apply(k.element, k.axis.anchor)
        assert dist(p, k.axis.point_at(k.length)) <= 1e-8


def test_below_systole_empty():
    assert enumerate_closed(G, 2.5) == []


def test_generator_classes_present():
    lengths = [k.length for k in CLOSED6]
    for g in G.side_maps:
        L = 2 * math.acosh(abs(g.trace) / 2)
        assert min(abs(L - x) for x in lengths) <= 1e-9


def test_count_monotone():
    counts = [len(enumerate_closed(G, c)) for c in (3.0, 4.5, 5.0, 6.0)]
    assert counts == sorted(counts)


def test_classes_primitive_and_distinct():
    for k in CLOSED6:
        for j in (2, 3):
            # no class is a proper power of a shorter listed one
            assert all(abs(k.length - j * h.length) > 1e-7 or not k.axis.same_curve(h.axis, 1e-6)
                       for h in CLOSED6)


@pytest.mark.parametrize("power", [2, 3])
def test_power_lengths(power):
    for k in CLOSED6[:10]:
        g = k.element
        gp = g
        for _ in range(power - 1):
            gp = gp @ g
        _, L = axis_and_length(gp)
        assert abs(L - power * k.length) <= 1e-8


def test_spectrum_conjugation_invariant():
    rng = np.random.default_rng(3)
    a, b, c = rng.uniform(-1, 1, 3)
    h = Isometry.from_entries(1.0 + a * a, b, c, (1.0 + b * c) / (1.0 + a * a))
    s1 = length_spectrum(G, 6.0)
    s2 = length_spectrum(G.conjugated(h), 6.0)
    assert len(s1.lengths) == len(s2.lengths)
    assert np.max(np.abs(np.array(s1.lengths) - np.array(s2.lengths))) <= 1e-7


def test_spectrum_sorted_below_cutoff():
    s = length_spectrum(G, 6.0)
    assert list(s.lengths) == sorted(s.lengths)
    assert all(L <= 6.0 for L in s.lengths)
    assert np.all(np.diff(s.lengths) > 1e-6)


@pytest.mark.parametrize("idx", [0, 20, 50])
def test_closed_projection_periodic(idx):
    k = CLOSED6[idx % len(CLOSED6)]
    ps = cut_project(G, k.axis, CFG, (-40, 40))
    periods = find_periods(ps, 10, 0.5, k.length + 0.5)
    ratios = [k.length / p for p in periods]
    assert any(abs(q - round(q)) <= 1e-6 and round(q) >= 1 for q in ratios)


# ------------------------------------------------------------ approximation

def _recheck(ell, res, r):
    lo, hi = res.window
    a = cut_project(G, ell, CFG, (lo, hi)).coords
    b = cut_project(G, res.k.axis, CFG, (lo, hi)).coords
    if res.reversed_matched:
        b = -b
    # restrict to the comparison core so the oracle never looks past the windows
    return entourage_1d(list(a), list(b), r)


@pytest.mark.parametrize("seed", range(3))
def test_approx_coarse(seed):
    ell = random_geodesic(G, seed)
    res = approx_by_closed(G, ell, 1.0, CFG)
    assert res.verified
    assert res.word_length <= 12
    assert _recheck(ell, res, 1.0)


def test_approx_self():
    k = CLOSED6[0]
    res = approx_by_closed(G, k.axis, 3.0, CFG)
    assert res.verified and _recheck(k.axis, res, 3.0)


def test_approx_invalid_r():
    with pytest.raises(ValueError):
        approx_by_closed(G, random_geodesic(G, 0), 0.0, CFG)


def test_translate_identity():
    ell = random_geodesic(G, 1)
    a, ok = translate_match(G, ell, ell, 2.0, 50.0, CFG)
    assert ok and a == 0.0


def test_translate_reanchored():
    ell = random_geodesic(G, 1)
    a, ok = translate_match(G, ell, ell.reanchored(2.0), 10.0, 50.0, CFG)
    assert ok and abs(a - 2.0) <= 1e-6


# ------------------------------------------------------------ tau

def test_tau_zero_for_big_disks():
    est = tau_sup_estimate(G, G.circumradius + 1e-3, (4, 4), 10.0)
    assert est.sup_estimate == 0.0 and est.truncated == 0


def test_tau_monotone_in_rho():
    vals = [tau_sup_estimate(G, f * MU, (4, 6), 40.0, seed=2).sup_estimate for f in (0.6, 0.8, 0.95, 1.2)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_tau_matches_marching_oracle():
    from chaodelone.hyperbolic import UnitTangent, geodesic_from_tangent
    rho, grid, seed = 0.95 * MU, (3, 4), 5
    est = tau_sup_estimate(G, rho, grid, 40.0, seed=seed)
    # rebuild the same samples
    rng = np.random.default_rng(seed)
    R = G.circumradius
    radii = np.arccosh(1.0 + rng.random(grid[0]) * (math.cosh(R) - 1.0))
    phis = rng.random(grid[0]) * 2 * math.pi
    dirs = 2 * math.pi * (np.arange(grid[1]) + 0.5) / grid[1]
    pts = ball_orbit(G, 12.0).points
    k = 0
    for r0, phi in zip(radii, phis):
        p = point_from_polar(G.base_point, float(r0), float(phi))
        for th in dirs:
            geo = geodesic_from_tangent(UnitTangent(p, float(th)))
            tau = tau_oracle(pts, lambda t: geo.point_at(t).z, rho, 8.0, step=1e-3)
            assert abs(tau - est.values[k]) <= 2e-3
            k += 1


def test_tau_iterable_pair():
    sup, suspects = tau_sup_estimate(G, 0.95 * MU, (2, 2), 40.0)
    assert sup >= 0 and suspects >= 0


# ------------------------------------------------------------ Dal'bo

def test_dalbo_examples():
    ok, w = dalbo_check(LengthSpectrum((1.0, 2.0, 3.0), 3.0), 0.01, 1e-6)
    assert ok and w == pytest.approx(1.0, abs=1e-6)
    ok, w = dalbo_check(LengthSpectrum((1.0, math.sqrt(2)), 2.0), 0.01, 1e-6)
    assert not ok and w is None
    ok, w = dalbo_check(LengthSpectrum((2.5,), 3.0), 0.01, 1e-6)
    assert ok and w == pytest.approx(2.5, abs=1e-6)


def test_dalbo_surface_spectrum():
    ok, _ = dalbo_check(length_spectrum(G, 6.0), 0.01, 1e-6)
    assert not ok


@settings(max_examples=60)
@given(st.lists(st.floats(0.5, 6.0), min_size=1, max_size=5))
def test_dalbo_vs_grid_oracle(lengths):
    spec = LengthSpectrum(tuple(sorted(lengths)), 6.0)
    ok, w = dalbo_check(spec, 0.05, 1e-6)
    ok_o, _ = dalbo_grid_oracle(lengths, 0.05, 1e-6)
    # the oracle's doubled tolerance makes it an upper bound
    if ok:
        assert ok_o
        assert all(abs(x - w * round(x / w)) <= 1e-6 + 1e-12 for x in lengths)


@settings(max_examples=40)
@given(st.floats(0.05, 1.0), st.lists(st.integers(1, 30), min_size=1, max_size=5))
def test_dalbo_finds_arithmetic(omega, mult):
    spec = LengthSpectrum(tuple(sorted(omega * n for n in mult)), 100.0)
    ok, w = dalbo_check(spec, 0.05, 1e-6)
    assert ok and w >= omega - 1e-6


# ------------------------------------------------------------ conditions

def test_condition_fail_a():
    assert condition_check(G, 1.05 * MU).verdict == "fail_A"


def test_condition_small_rho_unverified():
    v = condition_check(G, 0.05 * MU, (4, 4))
    assert v.verdict == "B_unverified" and v.truncated > 0


def test_condition_pass():
    v = condition_check(G, 0.95 * MU, (6, 6))
    assert v.verdict == "pass" and v.condition_a and v.truncated == 0
