"""Per-bond classification and passage costs over a window.

Full model
----------
Every lattice bond of a window is classified into one of eleven mutually
exclusive types, determined by the surviving (post-trimming) staircase
highways and the raw straight highways:

* bonds lying in a surviving staircase are *zigzag* bonds, subdivided into
  ``intersection`` (both endpoints are meeting-pair midpoints — the shared
  bond where two opposite staircases cross), ``meeting`` (one of a collinear
  adjacent pair of zigzag bonds), ``doubly-terminal`` (a whole length-1
  highway), ``singly-terminal`` (first/last bond of a longer highway) and
  ``normal-zigzag``, with that precedence;
* bonds outside every staircase but touching a staircase site are *boundary*
  bonds: ``crossing-adjacent`` (sharing an endpoint with an intersection
  bond), ``entry-exit`` (adjacent to two meeting bonds), ``skimming``
  (touching a terminal site) or ``normal-boundary``, with that precedence;
* remaining bonds are ``hv-only`` when they lie in a straight highway, else
  ``backroad``.

Costs come in integer tenths.  The raw core cost ``alpha`` is 0.7 for zigzag
bonds, 0.9 for straight-highway bonds outside staircases, 1.0 otherwise.
The compensated core cost ``alpha_star_core`` adjusts values near crossings
so that straight highways do not "feel" staircases: crossing a staircase
mid-path costs 1.0 + 0.7 + 1.0 (entry toll, fast bond, exit toll) — the same
2.7 as three open-ground bonds — and every other crossing pattern balances
likewise.  Consequently a straight highway whose first and last bonds carry
cost 0.9 sums to exactly 0.9 per bond, and any highway sums to within 0.4 of
that; any path sums to at least 0.7 per bond minus 0.2.  These identities
are exercised bond-by-bond in the tests.

A rare *slow* flag (probability ``4**-k`` on bonds of top class k, never on
class-0 bonds) overrides the core costs with 1.2/1.3.  The continuous
slowdown ``sigma`` in [0, 0.2] encodes the class-dependent speed profile and
the tie-breaking noise; the full cost of a bond is
``tau = alpha_star/10 + sigma``.

Simple model
------------
The 8-neighbor model has no taxonomy: axis bonds cost 1; a diagonal bond
costs ``sqrt(2) * (1 + eta**k)`` on a class-k diagonal highway and 3 off all
highways.  Costs decompose exactly as ``units + sqrt(2) * rad2``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import (
    AX_D1,
    AX_D2,
    AX_H,
    AX_V,
    HV_H,
    ORIENT_NE,
    ORIENT_NW,
    Window,
    zigzag_end_sites,
    zigzag_meets_rect,
)
from .params import FullParams, SimpleParams
from .sampler import (
    KIND_DIAG,
    KIND_HV,
    KIND_ZZ,
    HighwaySet,
    RawEnv,
    bonds_flat,
    sites_flat,
    xi_marks,
    xi_prime_marks,
)

__all__ = [
    "T_NORMAL_ZZ",
    "T_SINGLY_TERMINAL",
    "T_DOUBLY_TERMINAL",
    "T_MEETING",
    "T_INTERSECTION",
    "T_ENTRY_EXIT",
    "T_CROSSING_ADJ",
    "T_SKIMMING",
    "T_NORMAL_BOUNDARY",
    "T_HV_ONLY",
    "T_BACKROAD",
    "TYPE_NAMES",
    "BondField",
    "SimpleField",
    "window_bonds",
    "classify",
    "classify_env",
    "clip_diag",
    "simple_costs",
    "simple_costs_env",
    "hv_alpha_sums",
]

T_NORMAL_ZZ = 0
T_SINGLY_TERMINAL = 1
T_DOUBLY_TERMINAL = 2
T_MEETING = 3
T_INTERSECTION = 4
T_ENTRY_EXIT = 5
T_CROSSING_ADJ = 6
T_SKIMMING = 7
T_NORMAL_BOUNDARY = 8
T_HV_ONLY = 9
T_BACKROAD = 10

TYPE_NAMES = (
    "normal-zigzag",
    "singly-terminal",
    "doubly-terminal",
    "meeting",
    "intersection",
    "entry-exit",
    "crossing-adjacent",
    "skimming",
    "normal-boundary",
    "hv-only",
    "backroad",
)

# Compensated core cost (tenths) by type; skimming is patched afterwards
# (0.9 when the bond lies in a straight highway, 1.0 otherwise).
_CORE_TENTHS = np.array([7, 8, 9, 8, 5, 11, 11, 10, 10, 9, 10], dtype=np.int64)

_SLOW_ALPHA = 12
_SLOW_ALPHA_STAR = 13

_COORD_LIMIT = 1 << 20
_XSHIFT = np.int64(1 << 21)
_SQRT2 = np.sqrt(2.0)

# Margin (sites) around the window within which highways can influence the
# classification of an in-window bond: endpoint (1) + adjacent bond (1) +
# that bond's collinear meeting partner (1).
_TAXONOMY_HALO = 3


def _site_key(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.size and (np.abs(x).max() >= _COORD_LIMIT - 4 or np.abs(y).max() >= _COORD_LIMIT - 4):
        raise ValueError("coordinates out of the supported range")
    return (x + _COORD_LIMIT) * _XSHIFT + (y + _COORD_LIMIT)


def _bond_key(axis, x, y) -> np.ndarray:
    axis = np.asarray(axis, dtype=np.int64)
    return axis * (_XSHIFT * _XSHIFT) + _site_key(x, y)


def _in_sorted(query, table) -> np.ndarray:
    """Membership of each query key in a sorted unique key table."""
    query = np.asarray(query)
    if table.size == 0:
        return np.zeros(query.shape, dtype=bool)
    pos = np.minimum(np.searchsorted(table, query), table.size - 1)
    return table[pos] == query


def _max_join(query, keys, vals) -> np.ndarray:
    """Per-query maximum of ``vals`` over matching ``keys`` (0 if none)."""
    out = np.zeros(query.size, dtype=np.int64)
    if keys.size:
        order = np.lexsort((vals, keys))
        sk, sv = keys[order], vals[order]
        last = np.r_[sk[1:] != sk[:-1], True]
        uk, uv = sk[last], sv[last]
        pos = np.minimum(np.searchsorted(uk, query), uk.size - 1)
        hit = uk[pos] == query
        out[hit] = uv[pos][hit]
    return out


def _grid_coords(axis, x_lo, x_hi, y_lo, y_hi):
    nx, ny = x_hi - x_lo + 1, y_hi - y_lo + 1
    if nx <= 0 or ny <= 0:
        z = np.empty(0, dtype=np.int64)
        return z, z.copy(), z.copy()
    x = np.repeat(np.arange(x_lo, x_hi + 1, dtype=np.int64), ny)
    y = np.tile(np.arange(y_lo, y_hi + 1, dtype=np.int64), nx)
    return np.full(x.size, axis, dtype=np.int64), x, y


def window_bonds(window: Window, diagonals: bool = False):
    """Canonical (axis, x, y) arrays of every bond with both endpoints inside.

    Order: horizontal block, vertical block, then (if requested) ascending-
    and descending-diagonal blocks; within a block, x-major then y.  This is
    the layout assumed by ``BondField.index_of``.
    """
    x0, y0, x1, y1 = window.x0, window.y0, window.x1, window.y1
    parts = [
        _grid_coords(AX_H, x0, x1 - 1, y0, y1),
        _grid_coords(AX_V, x0, x1, y0, y1 - 1),
    ]
    if diagonals:
        parts.append(_grid_coords(AX_D1, x0, x1 - 1, y0, y1 - 1))
        parts.append(_grid_coords(AX_D2, x0, x1 - 1, y0 + 1, y1))
    return tuple(np.concatenate(cols) for cols in zip(*parts))


def _require_kind(hws: HighwaySet, kind: int, what: str) -> None:
    if hws.n and not (hws.kind == kind).all():
        raise ValueError(f"expected only {what} highways")


def _zigzag_taxonomy(staircases: HighwaySet):
    """Key sets driving the classification, from the unclipped highway set.

    Returns (bond keys, classes) for the class join plus sorted unique key
    tables: zigzag bonds, meeting bonds, meeting-pair midpoint sites,
    intersection bonds, intersection-bond endpoint sites, terminal bonds,
    length-1-highway bonds, terminal sites, and all staircase sites.
    """
    zrows, zaxis, zx, zy = bonds_flat(staircases)
    zkeys = _bond_key(zaxis, zx, zy)
    zclass = staircases.klass[zrows]

    uniq, first = np.unique(zkeys, return_index=True)
    uax, ux, uy = zaxis[first], zx[first], zy[first]

    # Meeting pairs: collinear adjacent zigzag bonds.  In key space the next
    # vertical bond up is +1, the next horizontal bond right is +_XSHIFT.
    vmask, hmask = uax == AX_V, uax == AX_H
    v_lo = vmask & _in_sorted(uniq + 1, uniq[vmask])
    h_lo = hmask & _in_sorted(uniq + _XSHIFT, uniq[hmask])
    meet = np.unique(
        np.concatenate([uniq[v_lo], uniq[v_lo] + 1, uniq[h_lo], uniq[h_lo] + _XSHIFT])
    )
    midpts = np.unique(
        np.concatenate(
            [_site_key(ux[v_lo], uy[v_lo] + 1), _site_key(ux[h_lo] + 1, uy[h_lo])]
        )
    )

    s1 = _site_key(ux, uy)
    s2 = _site_key(ux + (uax == AX_H), uy + (uax == AX_V))
    is_inter = _in_sorted(s1, midpts) & _in_sorted(s2, midpts)
    inter = uniq[is_inter]
    inter_ends = np.unique(np.concatenate([s1[is_inter], s2[is_inter]]))

    off = np.cumsum(staircases.length) - staircases.length
    firstk, lastk = zkeys[off], zkeys[off + staircases.length - 1]
    doubly = np.unique(firstk[staircases.length == 1])
    termbond = np.unique(np.concatenate([firstk, lastk]))
    ax0, ay0, ex, ey = zigzag_end_sites(
        staircases.orient, staircases.start, staircases.ax, staircases.ay, staircases.length
    )
    termsite = np.unique(np.concatenate([_site_key(ax0, ay0), _site_key(ex, ey)]))

    _, sx, sy = sites_flat(staircases)
    zsite = np.unique(_site_key(sx, sy))
    return zkeys, zclass, meet, midpts, inter, inter_ends, termbond, doubly, termsite, zsite


@dataclass(frozen=True)
class BondField:
    """Classification and costs of every bond of a full-model window.

    Flat columnar layout (horizontal block then vertical block, x-major);
    ``alpha``/``alpha_star_core``/``alpha_star`` are integer tenths.
    ``alpha_star_core`` is the compensation-table value (what the exact
    highway/path identities sum); ``alpha_star`` additionally charges slow
    bonds 1.3.  ``tau = alpha_star/10 + sigma`` is the cost geodesics use.
    """

    window: Window
    seed: int
    axis: np.ndarray
    x: np.ndarray
    y: np.ndarray
    btype: np.ndarray
    k_zig: np.ndarray
    k_hv: np.ndarray
    slow: np.ndarray
    alpha: np.ndarray
    alpha_star_core: np.ndarray
    alpha_star: np.ndarray
    sigma: np.ndarray
    tau: np.ndarray
    xi: np.ndarray

    @property
    def n(self) -> int:
        return self.axis.size

    @property
    def n_horizontal(self) -> int:
        w = self.window
        return (w.x1 - w.x0) * (w.y1 - w.y0 + 1)

    def index_of(self, axis, x, y) -> np.ndarray:
        """Row indices of canonical in-window bonds (vectorized, checked)."""
        w = self.window
        axis = np.asarray(axis, dtype=np.int64)
        ix = np.asarray(x, dtype=np.int64) - w.x0
        iy = np.asarray(y, dtype=np.int64) - w.y0
        nx, ny = w.x1 - w.x0 + 1, w.y1 - w.y0 + 1
        horiz = axis == AX_H
        ok_h = horiz & (ix >= 0) & (ix < nx - 1) & (iy >= 0) & (iy < ny)
        ok_v = (axis == AX_V) & (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny - 1)
        if not (ok_h | ok_v).all():
            raise ValueError("bond outside the window")
        return np.where(horiz, ix * ny + iy, self.n_horizontal + ix * (ny - 1) + iy)

    def grid(self, name: str, axis: int) -> np.ndarray:
        """One per-bond column reshaped to its (nx-ish, ny-ish) lattice grid."""
        w = self.window
        nx, ny = w.x1 - w.x0 + 1, w.y1 - w.y0 + 1
        col = getattr(self, name)
        if axis == AX_H:
            return col[: self.n_horizontal].reshape(nx - 1, ny)
        if axis == AX_V:
            return col[self.n_horizontal :].reshape(nx, ny - 1)
        raise ValueError(f"bad axis {axis}")

    def to_csv(self, fp) -> None:
        """Write one row per bond: key, type, classes, flags, costs."""
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(
            ["axis", "x", "y", "type", "k_zig", "k_hv", "slow", "alpha", "alpha_star", "sigma", "tau"]
        )
        for i in range(self.n):
            writer.writerow(
                [
                    int(self.axis[i]),
                    int(self.x[i]),
                    int(self.y[i]),
                    TYPE_NAMES[self.btype[i]],
                    int(self.k_zig[i]),
                    int(self.k_hv[i]),
                    int(self.slow[i]),
                    int(self.alpha[i]),
                    int(self.alpha_star[i]),
                    repr(float(self.sigma[i])),
                    repr(float(self.tau[i])),
                ]
            )


def classify(
    params: FullParams, seed: int, staircases: HighwaySet, straights: HighwaySet, window: Window
) -> BondField:
    """Classify and cost every bond with both endpoints in the window.

    ``staircases`` are the surviving (post-trimming) staircase highways and
    ``straights`` the raw straight highways; both may extend beyond the
    window, and must cover at least its 3-site halo for in-window bonds to
    be exact.  Highways farther out are ignored.
    """
    _require_kind(staircases, KIND_ZZ, "staircase")
    _require_kind(straights, KIND_HV, "straight")
    near = window.expand(_TAXONOMY_HALO)
    rect = (near.x0, near.y0, near.x1, near.y1)
    keep = np.zeros(staircases.n, dtype=bool)
    for orient in (ORIENT_NE, ORIENT_NW):
        rows = np.flatnonzero(staircases.orient == orient)
        if rows.size:
            keep[rows] = zigzag_meets_rect(
                orient,
                staircases.start[rows],
                staircases.ax[rows],
                staircases.ay[rows],
                staircases.length[rows],
                rect,
            )
    staircases = staircases.take(keep)

    axis, x, y = window_bonds(window)
    keys = _bond_key(axis, x, y)
    n = keys.size
    btype = np.full(n, T_BACKROAD, dtype=np.int8)

    if staircases.n:
        (zkeys, zclass, meet, midpts, inter, inter_ends, termbond, doubly, termsite, zsite) = (
            _zigzag_taxonomy(staircases)
        )
    else:
        zkeys = zclass = np.empty(0, dtype=np.int64)
        meet = midpts = inter = inter_ends = termbond = doubly = termsite = zsite = zkeys

    k_zig = _max_join(keys, zkeys, zclass)
    is_zz = k_zig > 0

    e1 = _site_key(x, y)
    e2 = _site_key(x + (axis == AX_H), y + (axis == AX_V))
    boundary = ~is_zz & (_in_sorted(e1, zsite) | _in_sorted(e2, zsite))

    # Zigzag subtypes, weakest first so stronger ones overwrite.
    btype[is_zz] = T_NORMAL_ZZ
    btype[is_zz & _in_sorted(keys, termbond)] = T_SINGLY_TERMINAL
    btype[is_zz & _in_sorted(keys, doubly)] = T_DOUBLY_TERMINAL
    btype[is_zz & _in_sorted(keys, meet)] = T_MEETING
    btype[is_zz & _in_sorted(keys, inter)] = T_INTERSECTION

    # Boundary subtypes.  The number of meeting bonds adjacent to e counts,
    # over both endpoints, the four bonds incident to each; e itself is never
    # a meeting bond (boundary bonds are not zigzag bonds).
    meet_count = np.zeros(n, dtype=np.int64)
    for sx, sy in ((x, y), (x + (axis == AX_H), y + (axis == AX_V))):
        for cand in (
            _bond_key(np.full(n, AX_V), sx, sy),
            _bond_key(np.full(n, AX_V), sx, sy - 1),
            _bond_key(np.full(n, AX_H), sx, sy),
            _bond_key(np.full(n, AX_H), sx - 1, sy),
        ):
            meet_count += _in_sorted(cand, meet)
    btype[boundary] = T_NORMAL_BOUNDARY
    btype[boundary & (_in_sorted(e1, termsite) | _in_sorted(e2, termsite))] = T_SKIMMING
    btype[boundary & (meet_count >= 2)] = T_ENTRY_EXIT
    btype[boundary & (_in_sorted(e1, inter_ends) | _in_sorted(e2, inter_ends))] = T_CROSSING_ADJ

    if straights.n:
        hrows, haxis, hx, hy = bonds_flat(straights)
        k_hv = _max_join(keys, _bond_key(haxis, hx, hy), straights.klass[hrows])
    else:
        k_hv = np.zeros(n, dtype=np.int64)
    is_hv = k_hv > 0
    btype[is_hv & ~is_zz & ~boundary] = T_HV_ONLY

    alpha_star_core = _CORE_TENTHS[btype]
    alpha_star_core[(btype == T_SKIMMING) & is_hv] = 9
    alpha = np.where(is_zz, 7, np.where(is_hv, 9, 10))

    xi = xi_marks(seed, axis, x, y)
    xi_prime = xi_prime_marks(seed, axis, x, y)
    kmax = np.maximum(k_zig, k_hv)
    slow = (kmax >= 1) & (xi_prime <= 4.0 ** (-kmax))

    sigma = np.where(
        is_zz,
        0.1 * (params.eta**k_zig + params.etatilde**k_zig * xi),
        np.where(
            is_hv,
            0.1 * params.etatilde**k_hv * (1.0 + xi),
            0.1 * params.etatilde**k_hv * xi,
        ),
    )
    sigma = np.where(slow, 0.1 * xi, sigma)
    alpha = np.where(slow, _SLOW_ALPHA, alpha)
    alpha_star = np.where(slow, _SLOW_ALPHA_STAR, alpha_star_core)
    tau = alpha_star / 10.0 + sigma

    return BondField(
        window=window,
        seed=seed,
        axis=axis,
        x=x,
        y=y,
        btype=btype,
        k_zig=k_zig,
        k_hv=k_hv,
        slow=slow,
        alpha=alpha,
        alpha_star_core=alpha_star_core,
        alpha_star=alpha_star,
        sigma=sigma,
        tau=tau,
        xi=xi,
    )


def classify_env(env: RawEnv, final_staircases: HighwaySet, window: Window | None = None) -> BondField:
    """Classify a sampled full-model environment's window."""
    if not isinstance(env.params, FullParams):
        raise ValueError("bond classification applies to the full model only")
    return classify(env.params, env.seed, final_staircases, env.hv, window or env.window)


def hv_alpha_sums(field: BondField, straights: HighwaySet):
    """Compensated core sums along straight highways fully inside the window.

    Returns ``(rows, sums, ends_nine)``: the selected highway rows, their
    ``alpha_star_core`` totals in tenths, and whether both end bonds carry
    the open-ground cost 9.  Highways whose ends cost 9 sum to exactly
    ``9 * length``; all sum to within 4 tenths of that.
    """
    _require_kind(straights, KIND_HV, "straight")
    w = field.window
    horiz = straights.orient == HV_H
    fx = straights.ax + np.where(horiz, straights.length, 0)
    fy = straights.ay + np.where(horiz, 0, straights.length)
    rows = np.flatnonzero(
        w.contains_site(straights.ax, straights.ay) & w.contains_site(fx, fy)
    )
    if rows.size == 0:
        z = np.empty(0, dtype=np.int64)
        return rows, z, np.empty(0, dtype=bool)
    sub = straights.take(rows)
    local, baxis, bx, by = bonds_flat(sub)
    tenths = field.alpha_star_core[field.index_of(baxis, bx, by)]
    off = np.cumsum(sub.length) - sub.length
    sums = np.add.reduceat(tenths, off)
    ends_nine = (tenths[off] == 9) & (tenths[off + sub.length - 1] == 9)
    return rows, sums, ends_nine


# ---------------------------------------------------------------------------
# Simple model costs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimpleField:
    """Costs of every bond of a simple-model window.

    ``tau = units + sqrt(2) * rad2`` exactly: axis bonds are (1, 0),
    off-highway diagonals (3, 0), class-k diagonals (0, 1 + eta**k).
    """

    window: Window
    axis: np.ndarray
    x: np.ndarray
    y: np.ndarray
    k_diag: np.ndarray
    units: np.ndarray
    rad2: np.ndarray
    tau: np.ndarray

    @property
    def n(self) -> int:
        return self.axis.size

    def index_of(self, axis, x, y) -> np.ndarray:
        """Row indices of canonical in-window bonds (vectorized, checked)."""
        w = self.window
        axis = np.asarray(axis, dtype=np.int64)
        ix = np.asarray(x, dtype=np.int64) - w.x0
        iy = np.asarray(y, dtype=np.int64) - w.y0
        nx, ny = w.x1 - w.x0 + 1, w.y1 - w.y0 + 1
        n_h, n_v, n_d = (nx - 1) * ny, nx * (ny - 1), (nx - 1) * (ny - 1)
        base = np.select(
            [axis == AX_H, axis == AX_V, axis == AX_D1, axis == AX_D2],
            [0, n_h, n_h + n_v, n_h + n_v + n_d],
        )
        cols = np.select(
            [axis == AX_H, axis == AX_V, axis == AX_D1, axis == AX_D2],
            [ny, ny - 1, ny - 1, ny - 1],
        )
        jy = np.where(axis == AX_D2, iy - 1, iy)
        ok_x = (ix >= 0) & (ix < np.where(axis == AX_V, nx, nx - 1))
        ok_y = (jy >= 0) & (jy < cols)
        if not (ok_x & ok_y).all():
            raise ValueError("bond outside the window")
        return base + ix * cols + jy

    def to_csv(self, fp) -> None:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["axis", "x", "y", "k_diag", "units", "rad2", "tau"])
        for i in range(self.n):
            writer.writerow(
                [
                    int(self.axis[i]),
                    int(self.x[i]),
                    int(self.y[i]),
                    int(self.k_diag[i]),
                    int(self.units[i]),
                    repr(float(self.rad2[i])),
                    repr(float(self.tau[i])),
                ]
            )


def clip_diag(highways: HighwaySet, window: Window) -> HighwaySet:
    """Restrict diagonal highways to the bonds canonically keyed in the window.

    Highways can be astronomically long (a class-k one spans 2**k sites), so
    they must be clipped before any per-bond enumeration.  Bond t of a N/E
    highway has key (ax+t, ay+t); of a N/W one, (ax-t-1, ay+t+1).
    """
    _require_kind(highways, KIND_DIAG, "diagonal")
    if highways.n == 0:
        return highways
    ne = highways.orient == ORIENT_NE
    ax, ay, ln = highways.ax, highways.ay, highways.length
    zero = np.zeros_like(ax)
    lo = np.maximum.reduce(
        [np.where(ne, window.x0 - ax, ax - window.x1), window.y0 - ay, zero]
    )
    hi = np.minimum.reduce(
        [np.where(ne, window.x1 - 1 - ax, ax - 1 - window.x0), window.y1 - 1 - ay, ln - 1]
    )
    keep = hi >= lo
    sub = highways.take(keep)
    lo, hi = lo[keep], hi[keep]
    return HighwaySet(
        sub.kind,
        sub.orient,
        sub.start,
        sub.klass,
        np.where(sub.orient == ORIENT_NE, sub.ax + lo, sub.ax - lo),
        sub.ay + lo,
        hi - lo + 1,
        sub.mark,
    )


def simple_costs(params: SimpleParams, highways: HighwaySet, window: Window) -> SimpleField:
    """Cost every bond (including diagonals) of a simple-model window."""
    highways = clip_diag(highways, window)
    axis, x, y = window_bonds(window, diagonals=True)
    keys = _bond_key(axis, x, y)
    if highways.n:
        drows, daxis, dx, dy = bonds_flat(highways)
        k_diag = _max_join(keys, _bond_key(daxis, dx, dy), highways.klass[drows])
    else:
        k_diag = np.zeros(keys.size, dtype=np.int64)
    diag = (axis == AX_D1) | (axis == AX_D2)
    on = diag & (k_diag > 0)
    units = np.where(diag, np.where(on, 0, 3), 1)
    rad2 = np.where(on, 1.0 + params.eta**k_diag, 0.0)
    tau = units + _SQRT2 * rad2
    return SimpleField(window=window, axis=axis, x=x, y=y, k_diag=k_diag, units=units, rad2=rad2, tau=tau)


def simple_costs_env(env: RawEnv, window: Window | None = None) -> SimpleField:
    """Cost a sampled simple-model environment's window."""
    if not isinstance(env.params, SimpleParams):
        raise ValueError("simple costs apply to the simple model only")
    return simple_costs(env.params, env.zz, window or env.window)
