"""Lattice geometry shared by the samplers, thinning, and bond fields.

Bond encoding
-------------
Every bond is keyed by ``(axis, x, y)`` where ``(x, y)`` is the canonical
endpoint (smallest x, then smallest y) and axis is one of

* ``AX_H``  — horizontal bond (x, y)-(x+1, y)
* ``AX_V``  — vertical bond (x, y)-(x, y+1)
* ``AX_D1`` — ascending diagonal (x, y)-(x+1, y+1)
* ``AX_D2`` — descending diagonal (x, y)-(x+1, y-1)

Rotated coordinates
-------------------
With u = x - y and w = x + y, the lattice ell-1 distance equals the Chebyshev
distance in (u, w).  A zigzag staircase occupies exactly two "rows" in these
coordinates: for an N/E staircase, two columns of constant u whose w values
form stride-2 progressions; for an N/W staircase, two rows of constant w with
stride-2 u progressions.  All exact distance computations go through this row
decomposition (bounding-box distances *underestimate* the true distance for
short staircases, so boxes are never used for distance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AX_H",
    "AX_V",
    "AX_D1",
    "AX_D2",
    "ORIENT_NE",
    "ORIENT_NW",
    "START_V",
    "START_H",
    "HV_H",
    "HV_V",
    "Window",
    "canonical_bond",
    "bond_endpoints",
    "zigzag_sites",
    "zigzag_bonds",
    "zigzag_rows",
    "zigzag_end_sites",
    "hv_sites",
    "hv_bonds",
    "diag_sites",
    "diag_bonds",
    "prog_point_dist",
    "prog_prog_dist",
    "d1_zigzag_pair",
    "d1_site_zigzag",
    "d1_site_sets",
]

AX_H = 0
AX_V = 1
AX_D1 = 2
AX_D2 = 3

ORIENT_NE = 0  # staircase of N and E steps (runs SW to NE)
ORIENT_NW = 1  # staircase of N and W steps (runs SE to NW)

START_V = 0  # first step from the anchor is N
START_H = 1  # first step from the anchor is E (NE) or W (NW)

HV_H = 0  # horizontal straight highway
HV_V = 1  # vertical straight highway


def canonical_bond(x1: int, y1: int, x2: int, y2: int) -> tuple[int, int, int]:
    """Canonical (axis, x, y) key of the bond {(x1,y1),(x2,y2)}."""
    if (x2, y2) < (x1, y1):
        x1, y1, x2, y2 = x2, y2, x1, y1
    dx, dy = x2 - x1, y2 - y1
    if (dx, dy) == (1, 0):
        return AX_H, x1, y1
    if (dx, dy) == (0, 1):
        return AX_V, x1, y1
    if (dx, dy) == (1, 1):
        return AX_D1, x1, y1
    if (dx, dy) == (1, -1):
        return AX_D2, x1, y1
    raise ValueError(f"not a nearest-neighbor bond: ({x1},{y1})-({x2},{y2})")


def bond_endpoints(axis: int, x: int, y: int) -> tuple[tuple[int, int], tuple[int, int]]:
    if axis == AX_H:
        return (x, y), (x + 1, y)
    if axis == AX_V:
        return (x, y), (x, y + 1)
    if axis == AX_D1:
        return (x, y), (x + 1, y + 1)
    if axis == AX_D2:
        return (x, y), (x + 1, y - 1)
    raise ValueError(f"bad axis {axis}")


@dataclass(frozen=True)
class Window:
    """Inclusive rectangle of lattice sites [x0, x1] x [y0, y1]."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise ValueError(f"empty window {self}")

    @classmethod
    def square(cls, n: int, center: tuple[int, int] = (0, 0)) -> "Window":
        """Square window of side ``n`` sites, lower-left near the center."""
        half = n // 2
        cx, cy = center
        return cls(cx - half, cy - half, cx - half + n - 1, cy - half + n - 1)

    @property
    def nx(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def ny(self) -> int:
        return self.y1 - self.y0 + 1

    def expand(self, margin: int) -> "Window":
        return Window(self.x0 - margin, self.y0 - margin, self.x1 + margin, self.y1 + margin)

    def contains_site(self, x, y):
        return (self.x0 <= x) & (x <= self.x1) & (self.y0 <= y) & (y <= self.y1)

    def contains_bond(self, axis, x, y):
        """True when both endpoints lie in the window (vectorized)."""
        axis = np.asarray(axis)
        x2 = x + np.where(axis == AX_V, 0, 1)
        y2 = y + np.where(axis == AX_V, 1, np.where(axis == AX_D1, 1, np.where(axis == AX_D2, -1, 0)))
        return self.contains_site(x, y) & self.contains_site(x2, y2)


# ---------------------------------------------------------------------------
# Zigzag staircases (full model)
# ---------------------------------------------------------------------------


def zigzag_sites(orient: int, start: int, ax: int, ay: int, length: int) -> np.ndarray:
    """(length+1, 2) array of sites, anchor first.

    The anchor is the SW-most site of an N/E staircase and the SE-most site
    of an N/W staircase; ``start`` says whether the first step is vertical.
    """
    t = np.arange(length + 1)
    if start == START_V:
        steps_up = (t + 1) // 2  # ceil(t/2)
        steps_side = t // 2
    else:
        steps_up = t // 2
        steps_side = (t + 1) // 2
    if orient == ORIENT_NE:
        x = ax + steps_side
    else:
        x = ax - steps_side
    y = ay + steps_up
    return np.stack([x, y], axis=1)


def zigzag_bonds(orient: int, start: int, ax: int, ay: int, length: int) -> np.ndarray:
    """(length, 3) array of canonical (axis, x, y) bond keys, in path order."""
    sites = zigzag_sites(orient, start, ax, ay, length)
    a, b = sites[:-1], sites[1:]
    vertical = b[:, 1] > a[:, 1]
    axis = np.where(vertical, AX_V, AX_H)
    x = np.minimum(a[:, 0], b[:, 0])
    y = np.minimum(a[:, 1], b[:, 1])
    return np.stack([axis, x, y], axis=1)


def zigzag_end_sites(orient, start, ax, ay, length):
    """The two extreme sites (anchor and far end); vectorized over arrays."""
    ax = np.asarray(ax)
    ay = np.asarray(ay)
    length = np.asarray(length)
    start = np.asarray(start)
    up = np.where(start == START_V, (length + 1) // 2, length // 2)
    side = np.where(start == START_V, length // 2, (length + 1) // 2)
    ex = np.where(np.asarray(orient) == ORIENT_NE, ax + side, ax - side)
    ey = ay + up
    return ax, ay, ex, ey


def zigzag_rows(orient, start, ax, ay, length):
    """Row decomposition in rotated coordinates, vectorized.

    Returns ``(fixed0, lo0, hi0, fixed1, lo1, hi1, valid1)`` where row i is
    the site set {fixed_i} x {lo_i, lo_i+2, ..., hi_i}: for N/E staircases
    ``fixed`` is the u = x-y coordinate and the progression runs over
    w = x+y; for N/W staircases ``fixed`` is w and the progression runs over
    u.  Row 0 holds the even-step sites (always nonempty); row 1 the odd-step
    sites (``valid1`` False only for length 0, which does not occur).
    """
    ax = np.asarray(ax)
    ay = np.asarray(ay)
    length = np.asarray(length)
    start = np.asarray(start)
    u0 = ax - ay
    w0 = ax + ay
    n_even = length // 2  # last even index 2*n_even
    n_odd = (length + 1) // 2  # last odd index 2*n_odd - 1
    if orient == ORIENT_NE:
        # u stays at u0 on even steps; odd steps sit at u0 -/+ 1 (V/H start).
        fixed0 = u0
        lo0 = w0
        hi0 = w0 + 2 * n_even
        fixed1 = np.where(start == START_V, u0 - 1, u0 + 1)
        lo1 = w0 + 1
        hi1 = w0 + 2 * n_odd - 1
    else:
        # w stays at w0 on even steps; odd steps sit at w0 +/- 1 (V/H start).
        # u decreases by 1 per step from u0.
        fixed0 = w0
        lo0 = u0 - 2 * n_even
        hi0 = u0
        fixed1 = np.where(start == START_V, w0 + 1, w0 - 1)
        lo1 = u0 - (2 * n_odd - 1)
        hi1 = u0 - 1
    valid1 = length >= 1
    return fixed0, lo0, hi0, fixed1, lo1, hi1, valid1


def zigzag_meets_rect(orient, start, ax, ay, length, rect):
    """Whether each staircase has at least one site in the closed rectangle.

    ``rect`` is (x0, y0, x1, y1) inclusive; vectorized over staircase arrays
    (orientation must be scalar).  Exact: works row by row in rotated
    coordinates, so no bounding-box overestimate.
    """
    x0, y0, x1, y1 = rect
    f0, lo0, hi0, f1, lo1, hi1, _ = zigzag_rows(orient, start, ax, ay, length)

    def row_hits(c, lo, hi):
        if orient == ORIENT_NE:
            # progression over w; x in [x0,x1] <-> w in [2x0-c, 2x1-c],
            # y in [y0,y1] <-> w in [2y0+c, 2y1+c]
            lo_all = np.maximum.reduce([lo, 2 * x0 - c, 2 * y0 + c])
            hi_all = np.minimum.reduce([hi, 2 * x1 - c, 2 * y1 + c])
        else:
            # progression over u; x in [x0,x1] <-> u in [2x0-c, 2x1-c],
            # y in [y0,y1] <-> u in [c-2y1, c-2y0]
            lo_all = np.maximum.reduce([lo, 2 * x0 - c, c - 2 * y1])
            hi_all = np.minimum.reduce([hi, 2 * x1 - c, c - 2 * y0])
        lo_all = lo_all + ((lo_all - lo) & 1)  # align to the step-2 progression
        return lo_all <= hi_all

    return row_hits(f0, lo0, hi0) | row_hits(f1, lo1, hi1)


# ---------------------------------------------------------------------------
# Straight highways
# ---------------------------------------------------------------------------


def hv_sites(orient: int, ax: int, ay: int, length: int) -> np.ndarray:
    """(length+1, 2) sites of a straight highway of ``length`` bonds."""
    t = np.arange(length + 1)
    if orient == HV_H:
        return np.stack([ax + t, np.full_like(t, ay)], axis=1)
    return np.stack([np.full_like(t, ax), ay + t], axis=1)


def hv_bonds(orient: int, ax: int, ay: int, length: int) -> np.ndarray:
    """(length, 3) canonical bond keys of a straight highway."""
    t = np.arange(length)
    if orient == HV_H:
        return np.stack([np.full_like(t, AX_H), ax + t, np.full_like(t, ay)], axis=1)
    return np.stack([np.full_like(t, AX_V), np.full_like(t, ax), ay + t], axis=1)


def diag_sites(orient: int, ax: int, ay: int, n_sites: int) -> np.ndarray:
    """(n_sites, 2) sites of a diagonal highway (simple model).

    ``orient`` ORIENT_NE runs NE from its SW-most site; ORIENT_NW runs NW
    from its SE-most site.  A class-k highway has n_sites = 2**k.
    """
    t = np.arange(n_sites)
    if orient == ORIENT_NE:
        return np.stack([ax + t, ay + t], axis=1)
    return np.stack([ax - t, ay + t], axis=1)


def diag_bonds(orient: int, ax: int, ay: int, n_sites: int) -> np.ndarray:
    """(n_sites-1, 3) canonical bond keys of a diagonal highway."""
    t = np.arange(n_sites - 1)
    if orient == ORIENT_NE:
        return np.stack([np.full_like(t, AX_D1), ax + t, ay + t], axis=1)
    # Bond {(ax-t, ay+t), (ax-t-1, ay+t+1)} canonicalizes at its west end.
    return np.stack([np.full_like(t, AX_D2), ax - t - 1, ay + t + 1], axis=1)


# ---------------------------------------------------------------------------
# Exact distances via row decomposition
# ---------------------------------------------------------------------------


def prog_point_dist(p, lo, hi):
    """Distance from integer(s) p to the progression {lo, lo+2, ..., hi}."""
    p = np.asarray(p)
    below = np.maximum(lo - p, 0)
    above = np.maximum(p - hi, 0)
    inside = ((p - lo) % 2 != 0) & (p >= lo) & (p <= hi)
    return np.maximum(below, above) + inside


def prog_prog_dist(alo, ahi, blo, bhi):
    """Min |a - b| over progressions {alo..ahi step 2}, {blo..bhi step 2}."""
    alo = np.asarray(alo)
    gap = np.maximum(blo - ahi, alo - bhi)
    overlap = gap <= 0
    parity_mismatch = (alo - blo) % 2 != 0
    return np.where(overlap, parity_mismatch.astype(alo.dtype), gap)


def _pair_rows_same(rows_a, rows_b):
    """Chebyshev distance between two same-orientation staircases."""
    f0a, lo0a, hi0a, f1a, lo1a, hi1a, v1a = rows_a
    f0b, lo0b, hi0b, f1b, lo1b, hi1b, v1b = rows_b
    best = None
    for fa, loa, hia, va in ((f0a, lo0a, hi0a, True), (f1a, lo1a, hi1a, v1a)):
        for fb, lob, hib, vb in ((f0b, lo0b, hi0b, True), (f1b, lo1b, hi1b, v1b)):
            d = np.maximum(np.abs(np.asarray(fa) - fb), prog_prog_dist(loa, hia, lob, hib))
            d = np.where(np.asarray(va) & np.asarray(vb), d, np.iinfo(np.int64).max)
            best = d if best is None else np.minimum(best, d)
    return best


def _pair_rows_cross(rows_ne, rows_nw):
    """Chebyshev distance between an N/E and an N/W staircase.

    The N/E rows fix u and range over w; the N/W rows fix w and range over
    u, so the two coordinates minimize independently.
    """
    best = None
    a_rows = (
        (rows_ne[0], rows_ne[1], rows_ne[2], True),
        (rows_ne[3], rows_ne[4], rows_ne[5], rows_ne[6]),
    )
    b_rows = (
        (rows_nw[0], rows_nw[1], rows_nw[2], True),
        (rows_nw[3], rows_nw[4], rows_nw[5], rows_nw[6]),
    )
    for ua, loa, hia, va in a_rows:
        for wb, lob, hib, vb in b_rows:
            d = np.maximum(prog_point_dist(ua, lob, hib), prog_point_dist(wb, loa, hia))
            d = np.where(np.asarray(va) & np.asarray(vb), d, np.iinfo(np.int64).max)
            best = d if best is None else np.minimum(best, d)
    return best


def d1_zigzag_pair(hw_a: tuple, hw_b: tuple):
    """Exact ell-1 distance between two zigzag staircases.

    Each argument is ``(orient, start, ax, ay, length)``; scalar or array
    inputs are accepted as long as the orientations are scalars.
    """
    oa, sa, axa, aya, la = hw_a
    ob, sb, axb, ayb, lb = hw_b
    rows_a = zigzag_rows(oa, sa, axa, aya, la)
    rows_b = zigzag_rows(ob, sb, axb, ayb, lb)
    if oa == ob:
        return _pair_rows_same(rows_a, rows_b)
    if oa == ORIENT_NE:
        return _pair_rows_cross(rows_a, rows_b)
    return _pair_rows_cross(rows_b, rows_a)


def d1_site_zigzag(x, y, orient, start, ax, ay, length):
    """Exact ell-1 distance from site(s) (x, y) to a zigzag staircase."""
    u = np.asarray(x) - y
    w = np.asarray(x) + y
    f0, lo0, hi0, f1, lo1, hi1, v1 = zigzag_rows(orient, start, ax, ay, length)
    if orient == ORIENT_NE:
        d0 = np.maximum(np.abs(u - f0), prog_point_dist(w, lo0, hi0))
        d1 = np.maximum(np.abs(u - f1), prog_point_dist(w, lo1, hi1))
    else:
        d0 = np.maximum(np.abs(w - f0), prog_point_dist(u, lo0, hi0))
        d1 = np.maximum(np.abs(w - f1), prog_point_dist(u, lo1, hi1))
    d1 = np.where(v1, d1, np.iinfo(np.int64).max)
    return np.minimum(d0, d1)


def d1_site_sets(sites_a: np.ndarray, sites_b: np.ndarray) -> int:
    """Brute-force ell-1 distance between two site sets (reference oracle)."""
    diff = np.abs(sites_a[:, None, :] - sites_b[None, :, :]).sum(axis=2)
    return int(diff.min())
