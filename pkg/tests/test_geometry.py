"""Geometry primitives: staircase enumeration and exact ell-1 distances."""

from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fastlanes.geometry import (
    AX_D1,
    AX_D2,
    AX_H,
    AX_V,
    HV_H,
    HV_V,
    ORIENT_NE,
    ORIENT_NW,
    START_H,
    START_V,
    Window,
    bond_endpoints,
    canonical_bond,
    d1_site_sets,
    d1_site_zigzag,
    d1_zigzag_pair,
    diag_bonds,
    diag_sites,
    hv_bonds,
    hv_sites,
    zigzag_bonds,
    zigzag_end_sites,
    zigzag_rows,
    zigzag_sites,
)

_coord = st.integers(min_value=-15, max_value=15)
_length = st.integers(min_value=1, max_value=12)
_orient = st.sampled_from([ORIENT_NE, ORIENT_NW])
_start = st.sampled_from([START_V, START_H])


def _rows_to_sites(orient, rows):
    """Expand a row decomposition back into an explicit site set."""
    f0, lo0, hi0, f1, lo1, hi1, v1 = (np.asarray(v).item() for v in rows)
    out = []
    groups = [(f0, lo0, hi0)] + ([(f1, lo1, hi1)] if v1 else [])
    for fixed, lo, hi in groups:
        for p in range(lo, hi + 1, 2):
            u, w = (fixed, p) if orient == ORIENT_NE else (p, fixed)
            # u = x - y, w = x + y  =>  x = (u+w)/2, y = (w-u)/2.
            assert (u + w) % 2 == 0
            out.append(((u + w) // 2, (w - u) // 2))
    return sorted(out)


# ---------------------------------------------------------------------------
# Bond keys
# ---------------------------------------------------------------------------


def test_canonical_bond_round_trip_and_reversal():
    cases = [
        ((2, 3), (3, 3), AX_H),
        ((2, 3), (2, 4), AX_V),
        ((2, 3), (3, 4), AX_D1),
        ((2, 3), (3, 2), AX_D2),
        ((-5, 1), (-6, 2), AX_D2),  # canonicalizes at (-6, 2)
    ]
    for (x1, y1), (x2, y2), want_axis in cases:
        key = canonical_bond(x1, y1, x2, y2)
        assert key == canonical_bond(x2, y2, x1, y1)
        assert key[0] == want_axis
        a, b = bond_endpoints(*key)
        assert {a, b} == {(x1, y1), (x2, y2)}


# ---------------------------------------------------------------------------
# Staircase enumeration
# ---------------------------------------------------------------------------


@given(orient=_orient, start=_start, ax=_coord, ay=_coord, length=_length)
@settings(max_examples=150, deadline=None)
def test_zigzag_sites_alternate_steps_from_anchor(orient, start, ax, ay, length):
    sites = zigzag_sites(orient, start, ax, ay, length)
    assert sites.shape == (length + 1, 2)
    assert tuple(sites[0]) == (ax, ay)
    for t in range(length):
        dx, dy = sites[t + 1] - sites[t]
        vertical = (t % 2 == 0) if start == START_V else (t % 2 == 1)
        if vertical:
            assert (dx, dy) == (0, 1)
        else:
            assert (dx, dy) == ((1, 0) if orient == ORIENT_NE else (-1, 0))
    # Anchor extremality: SW-most for N/E, SE-most for N/W.
    if orient == ORIENT_NE:
        assert (sites[:, 0] >= ax).all() and (sites[:, 1] >= ay).all()
    else:
        assert (sites[:, 0] <= ax).all() and (sites[:, 1] >= ay).all()


@given(orient=_orient, start=_start, ax=_coord, ay=_coord, length=_length)
@settings(max_examples=100, deadline=None)
def test_zigzag_bonds_connect_consecutive_sites(orient, start, ax, ay, length):
    sites = zigzag_sites(orient, start, ax, ay, length)
    bonds = zigzag_bonds(orient, start, ax, ay, length)
    assert bonds.shape == (length, 3)
    for t in range(length):
        a, b = bond_endpoints(*bonds[t])
        assert {a, b} == {tuple(sites[t]), tuple(sites[t + 1])}


@given(orient=_orient, start=_start, ax=_coord, ay=_coord, length=_length)
@settings(max_examples=150, deadline=None)
def test_zigzag_rows_partition_the_site_set(orient, start, ax, ay, length):
    sites = zigzag_sites(orient, start, ax, ay, length)
    want = sorted(map(tuple, sites.tolist()))
    got = _rows_to_sites(orient, zigzag_rows(orient, start, ax, ay, length))
    assert got == want


@given(orient=_orient, start=_start, ax=_coord, ay=_coord, length=_length)
@settings(max_examples=60, deadline=None)
def test_zigzag_end_sites(orient, start, ax, ay, length):
    sites = zigzag_sites(orient, start, ax, ay, length)
    x0, y0, x1, y1 = zigzag_end_sites(orient, start, ax, ay, length)
    assert (int(x0), int(y0)) == tuple(sites[0])
    assert (int(x1), int(y1)) == tuple(sites[-1])


def test_hv_and_diag_enumeration():
    assert hv_sites(HV_H, 2, 5, 3).tolist() == [[2, 5], [3, 5], [4, 5], [5, 5]]
    assert hv_bonds(HV_H, 2, 5, 2).tolist() == [[AX_H, 2, 5], [AX_H, 3, 5]]
    assert hv_bonds(HV_V, 2, 5, 2).tolist() == [[AX_V, 2, 5], [AX_V, 2, 6]]
    assert diag_sites(ORIENT_NE, 1, 1, 3).tolist() == [[1, 1], [2, 2], [3, 3]]
    assert diag_sites(ORIENT_NW, 1, 1, 3).tolist() == [[1, 1], [0, 2], [-1, 3]]
    for orient in (ORIENT_NE, ORIENT_NW):
        sites = diag_sites(orient, 4, -2, 5)
        for t, key in enumerate(diag_bonds(orient, 4, -2, 5)):
            a, b = bond_endpoints(*key)
            assert {a, b} == {tuple(sites[t]), tuple(sites[t + 1])}


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


@given(
    x=st.integers(-40, 40),
    y=st.integers(-40, 40),
    dx=st.integers(-40, 40),
    dy=st.integers(-40, 40),
)
@settings(max_examples=100, deadline=None)
def test_rotated_chebyshev_equals_ell1(x, y, dx, dy):
    du = dx - dy
    dw = dx + dy
    assert max(abs(du), abs(dw)) == abs(dx) + abs(dy)


@given(
    oa=_orient,
    sa=_start,
    axa=_coord,
    aya=_coord,
    la=_length,
    ob=_orient,
    sb=_start,
    axb=_coord,
    ayb=_coord,
    lb=_length,
)
@settings(max_examples=400, deadline=None)
def test_d1_zigzag_pair_matches_brute_force(oa, sa, axa, aya, la, ob, sb, axb, ayb, lb):
    got = int(d1_zigzag_pair((oa, sa, axa, aya, la), (ob, sb, axb, ayb, lb)))
    want = d1_site_sets(zigzag_sites(oa, sa, axa, aya, la), zigzag_sites(ob, sb, axb, ayb, lb))
    assert got == want


def test_d1_known_counterexample_to_box_distance():
    # Two single vertical bonds, horizontal offset 3: the bounding-box
    # Chebyshev distance in rotated coordinates is only 2, the true ell-1
    # distance is 3.  The row decomposition must return 3.
    a = (ORIENT_NE, START_V, 0, 0, 1)
    b = (ORIENT_NE, START_V, 3, 0, 1)
    assert int(d1_zigzag_pair(a, b)) == 3


@given(x=_coord, y=_coord, orient=_orient, start=_start, ax=_coord, ay=_coord, length=_length)
@settings(max_examples=300, deadline=None)
def test_d1_site_zigzag_matches_brute_force(x, y, orient, start, ax, ay, length):
    got = int(d1_site_zigzag(x, y, orient, start, ax, ay, length))
    want = d1_site_sets(np.array([[x, y]]), zigzag_sites(orient, start, ax, ay, length))
    assert got == want


def test_d1_zigzag_pair_vectorized_matches_scalar():
    rng = np.random.default_rng(7)
    n = 64
    sa = rng.integers(0, 2, n)
    sb = rng.integers(0, 2, n)
    coords = rng.integers(-12, 12, size=(4, n))
    la = rng.integers(1, 10, n)
    lb = rng.integers(1, 10, n)
    for oa, ob in ((ORIENT_NE, ORIENT_NE), (ORIENT_NE, ORIENT_NW), (ORIENT_NW, ORIENT_NW)):
        vec = d1_zigzag_pair((oa, sa, coords[0], coords[1], la), (ob, sb, coords[2], coords[3], lb))
        for i in range(n):
            one = d1_zigzag_pair(
                (oa, int(sa[i]), int(coords[0][i]), int(coords[1][i]), int(la[i])),
                (ob, int(sb[i]), int(coords[2][i]), int(coords[3][i]), int(lb[i])),
            )
            assert int(vec[i]) == int(one)


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------


def test_window_square_and_bond_containment():
    w = Window.square(5)  # sites [-2, 2]^2
    assert (w.nx, w.ny) == (5, 5)
    assert bool(w.contains_site(2, -2)) and not bool(w.contains_site(3, 0))
    assert bool(w.contains_bond(AX_H, 1, 2))
    assert not bool(w.contains_bond(AX_H, 2, 0))  # reaches x = 3
    assert bool(w.contains_bond(AX_D2, 0, 0))
    assert not bool(w.contains_bond(AX_D2, 0, -2))  # reaches y = -3
    assert w.expand(3).x0 == -5
