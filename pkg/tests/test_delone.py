import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaodelone.cutproject import TubeConfig, cut_project
from chaodelone.delone import (
    Box, Entourage, Torus, WindowedPointSet, check_delone, composition_check,
    entourage_member, find_periods, rubber_proximity,
)
from chaodelone.errors import WindowTooSmall
from chaodelone.surface import random_geodesic, standard_surface

from oracles import covering_radius_1d, entourage_1d, fibonacci_points, min_gap

G = standard_surface()


def Z(lo=-50, hi=50, shift=0.0, dim=1):
    return WindowedPointSet.lattice(Box.cube(hi, dim) if lo == -hi else Box((lo,) * dim, (hi,) * dim),
                                    1.0, shift)


def pts1(x, lo, hi):
    return WindowedPointSet(1, np.asarray(x, dtype=float), Box((lo,), (hi,)))


# ------------------------------------------------------------ check_delone

def test_integers_delone():
    rep = check_delone(Z(), 1.0, 1.0)
    assert rep.separated_ok and rep.dense_ok
    assert rep.min_gap == pytest.approx(1.0) and rep.max_gap == pytest.approx(1.0)


def test_close_pair_not_separated():
    rep = check_delone(pts1([0, 0.1], -1, 1), 0.5, 1.0)
    assert not rep.separated_ok


def test_window_too_small():
    with pytest.raises(WindowTooSmall):
        check_delone(pts1([0], -1, 1), 1.0, 0.5)


def test_projected_set_report():
    rho = 0.95 * G.mu
    ps = cut_project(G, random_geodesic(G, 0), TubeConfig(rho), (-20, 20))
    rep = check_delone(ps, 10.0, 2 * G.mu - 2 * rho)
    assert rep.separated_ok
    assert rep.min_gap > 2 * G.mu - 1.9 * G.mu
    assert rep.boundary_flag_count == 0


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_lattice_delone_any_dim(dim):
    W = WindowedPointSet.lattice(Box.cube(4, dim), 1.0)
    eps = max(1.0, math.ceil(math.sqrt(dim) / 2))
    rep = check_delone(W, eps, 1.0)
    assert rep.separated_ok and rep.dense_ok


@settings(max_examples=40)
@given(st.lists(st.floats(-20, 20), min_size=2, max_size=40, unique=True), st.floats(0.5, 5))
def test_check_delone_matches_oracle(x, eps):
    rep = check_delone(pts1(x, -20, 20), eps, 0.1)
    assert rep.min_gap == pytest.approx(min_gap(x), abs=1e-12)
    cover = covering_radius_1d(x, -20 + eps, 20 - eps, step=1e-3)
    # grid oracle underestimates the exact covering radius by at most half a step
    assert rep.covering_radius - 5e-4 - 1e-12 <= cover <= rep.covering_radius + 1e-12
    assert rep.dense_ok == (rep.covering_radius <= eps + 1e-9)


def test_torus_report():
    T = Torus((4.0, 4.0))
    W = WindowedPointSet(2, [[0, 0], [2, 0], [0, 2], [2, 2]], T)
    rep = check_delone(W, 1.5, 2.0)
    assert rep.separated_ok and rep.dense_ok
    assert rep.min_gap == pytest.approx(2.0)


# ------------------------------------------------------------ entourages

def test_entourage_examples():
    assert entourage_member(Z(), Z(shift=0.05), 10)
    assert not entourage_member(Z(), Z(shift=0.2), 10)
    assert not entourage_member(Z(), Z(shift=0.05), 25)


def test_entourage_refuses_small_window():
    with pytest.raises(WindowTooSmall):
        entourage_member(Z(-5, 5), Z(-5, 5), 10)


def test_rubber_examples():
    assert rubber_proximity(Z(-100, 100), Z(-100, 100), 100) == 100
    # windows reach past [-100, 100] so every witness is observable
    r = rubber_proximity(Z(-110, 110), Z(-110, 110, 0.05), 100)
    assert abs(r - 20) <= 1e-3
    assert rubber_proximity(Z(-110, 110, 0.05), Z(-110, 110), 100) == pytest.approx(r, abs=1e-6)


small_sets = st.lists(st.floats(-12, 12), max_size=25)


@settings(max_examples=100)
@given(small_sets, small_sets, st.floats(1.0, 10.0))
def test_entourage_matches_oracle(a, b, r):
    S, Sp = pts1(a, -12, 12), pts1(b, -12, 12)
    try:
        got = entourage_member(S, Sp, r)
    except WindowTooSmall:
        # only when a witness would have to come from outside the window
        return
    assert got == entourage_1d(a, b, r)


@settings(max_examples=100)
@given(small_sets, small_sets, st.floats(1.0, 10.0), st.floats(0.1, 1.0))
def test_entourage_symmetric_antitone(a, b, r, frac):
    S, Sp = pts1(a, -25, 25), pts1(b, -25, 25)
    m = entourage_member(S, Sp, r)
    assert m == entourage_member(Sp, S, r)
    if m:
        assert entourage_member(S, Sp, max(1.0, r * frac)) or r * frac < 1.0


# ------------------------------------------------------------ periods

def test_integer_periods():
    got = find_periods(Z(), 10, 0.5, 5)
    assert np.allclose(got, [1, 2, 3, 4, 5])


@pytest.mark.parametrize("r", [2, 5, 10])
def test_integer_period_one(r):
    assert any(abs(p - 1) < 1e-9 for p in find_periods(Z(), r, 0.5, 1.5))


def test_fibonacci_aperiodic():
    x = fibonacci_points(140, start=-60)
    S = pts1(x[(x >= -50) & (x <= 50)], -50, 50)
    assert find_periods(S, 10, 0.01, 10) == []
    # oracle: direct scan of every candidate shift on the untruncated sequence
    for p in np.unique(np.round((x[:, None] - x[None, :]).ravel(), 9)):
        if 0.01 <= p <= 10:
            assert not entourage_1d(list(x), list(x - p), 10)


def test_projected_aperiodic():
    ps = cut_project(G, random_geodesic(G, 0), TubeConfig(0.95 * G.mu), (-50, 50))
    assert find_periods(ps, 10, 0.01, 10) == []


def test_periods_window_too_small():
    with pytest.raises(WindowTooSmall):
        find_periods(Z(-10, 10), 10, 0.5, 5)


# ------------------------------------------------------------ composition

def test_composition_degenerate():
    S = Z(-30, 30)
    A = Box.cube(3)
    assert composition_check(A, Box.cube(0.5), A, Box.cube(0.5), S, S, S)


@settings(max_examples=100)
@given(st.integers(0, 2**31 - 1), st.sampled_from([1, 2]))
def test_composition_never_false(seed, dim):
    rng = np.random.default_rng(seed)
    W = Box.cube(12, dim)
    base = WindowedPointSet.lattice(W, 1.0).points
    sets = []
    for _ in range(3):
        p = np.clip(base + rng.uniform(-0.1, 0.1, base.shape), -12, 12)
        sets.append(WindowedPointSet(dim, p, W))
    a, c = rng.uniform(1, 4, 2)
    b, d = rng.uniform(0.1, 0.6, 2)
    assert composition_check(Box.cube(a, dim), Box.cube(b, dim), Box.cube(c, dim), Box.cube(d, dim), *sets)
