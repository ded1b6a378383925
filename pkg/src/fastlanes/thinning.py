"""Three-pass competitive thinning of the staircase-highway configuration.

Raw staircase highways are pruned deterministically before passage times are
assigned:

1. *Crowding pass* — a staircase dies when some other raw staircase of the
   same orientation with higher precedence comes ell-1 distance
   <= ``NEAR_RADIUS`` of it, so same-orientation survivors are pairwise
   separated by at least ``MIN_SEPARATION``.  Precedence orders staircases by
   (class, length, mark) with an anchor tiebreak.
2. *Straight-cover pass* — a surviving staircase of class m dies when one of
   its bonds also lies on a raw straight highway of class ell with
   ``ell >= (1 + zeta) * m / c_thetatilde``.
3. *Crossing trim* — each end of a survivor that comes ell-1 distance <= 1 of
   an opposite-orientation survivor loses its final ``TRIM_BONDS`` bonds;
   staircases trimmed down to nothing are removed, and trimmed staircases
   whose bond sets collide are merged keeping the largest mark.  Afterwards
   opposite survivors either genuinely cross or stay ell-1 distance >= 2
   apart.

Every pass is one-shot: its delete/trim decisions are all evaluated against
the pass's input configuration and applied simultaneously.

Exactness scope: survival flags are exact for every staircase with a site in
the window grown by ``STATUS_COLLAR``; end trims are exact at any end lying
in the window grown by ``STATUS_COLLAR - 1``.  Bonds further out can only be
affected by trims at far-away ends, so the thinned bond configuration is
exact well beyond the window itself.  Staircases entirely outside the collar
may keep a conservative "alive" flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter

from .geometry import (
    AX_H,
    AX_V,
    HV_H,
    HV_V,
    ORIENT_NE,
    ORIENT_NW,
    Window,
    d1_site_zigzag,
    zigzag_end_sites,
    zigzag_meets_rect,
    zigzag_rows,
)
from .params import FullParams
from .rng import ragged_arange
from .sampler import (
    KIND_ZZ,
    HighwaySet,
    RawEnv,
    bonds_flat,
    hv_class_tiles,
    hv_tile_side,
    sites_flat,
)

__all__ = [
    "NEAR_RADIUS",
    "MIN_SEPARATION",
    "TRIM_BONDS",
    "STATUS_COLLAR",
    "ThinnedEnv",
    "zigzag_ranks",
    "stage1_survivors",
    "ell_min",
    "stage2_survivors",
    "stage3_trim",
    "exact_status_mask",
    "thin",
]

NEAR_RADIUS = 22  # crowding pass deletes at ell-1 distance <= NEAR_RADIUS
MIN_SEPARATION = NEAR_RADIUS + 1  # guaranteed same-orientation separation
TRIM_BONDS = 4  # bonds removed at a triggered staircase end
STATUS_COLLAR = 80  # window collar within which survival flags are exact
_FILTER = 2 * NEAR_RADIUS + 1  # Chebyshev dilation diameter in rotated coords
_HALO = NEAR_RADIUS + 2  # strip halo: neighbours one band off still covered
_COORD_LIMIT = 1 << 20  # coordinate bound backing the composite bond keys


# ---------------------------------------------------------------------------
# Precedence ranks
# ---------------------------------------------------------------------------


def zigzag_ranks(hws: HighwaySet) -> np.ndarray:
    """Dense precedence ranks, higher = stronger; comparable per orientation.

    Order is (class, length, mark) ascending with the anchor as a
    deterministic tiebreak, computed independently for each orientation.
    """
    if hws.n and not (hws.kind == KIND_ZZ).all():
        raise ValueError("precedence ranks are defined for staircases only")
    ranks = np.empty(hws.n, dtype=np.int64)
    for orient in (ORIENT_NE, ORIENT_NW):
        rows = np.flatnonzero(hws.orient == orient)
        sub = np.lexsort(
            (
                hws.start[rows],
                hws.ay[rows],
                hws.ax[rows],
                hws.mark[rows],
                hws.length[rows],
                hws.klass[rows],
            )
        )
        ranks[rows[sub]] = np.arange(rows.size, dtype=np.int64)
    return ranks


# ---------------------------------------------------------------------------
# Pass 1: same-orientation crowding
# ---------------------------------------------------------------------------


def _crop_margin(klass: np.ndarray) -> np.ndarray:
    """How far class-k competitor sites can matter beyond the window.

    A victim with exact status has a site in the STATUS_COLLAR collar and
    extends at most 2**(k+3) bonds, so a class-j competitor only matters
    within STATUS_COLLAR + NEAR_RADIUS + 2**(j+3) of the window (victim
    classes above j cannot be deleted by a class-j competitor).
    """
    return STATUS_COLLAR + NEAR_RADIUS + (np.int64(8) << klass)


def _stage1_orientation(hws, ranks, rows_o, orient, window, deleted, strip):
    if rows_o.size == 0:
        return
    order = rows_o[np.argsort(ranks[rows_o])]
    n = order.size

    # Painted site set: every raw staircase site that can affect a victim
    # with exact status, listed in ascending precedence.
    srow, sx, sy = sites_flat(hws, order)
    pos_site = np.repeat(np.arange(n, dtype=np.int32), hws.length[order] + 1)
    m = _crop_margin(hws.klass[srow])
    keep = (
        (sx >= window.x0 - m)
        & (sx <= window.x1 + m)
        & (sy >= window.y0 - m)
        & (sy <= window.y1 + m)
    )
    sx, sy, pos_site = sx[keep], sy[keep], pos_site[keep]
    if orient == ORIENT_NE:
        sband, srun = sx - sy, sx + sy
    else:
        sband, srun = sx + sy, sx - sy
    del srow, sx, sy, keep, m

    # Victim probes: each staircase is two step-2 progressions in rotated
    # coordinates; the dilated neighbourhood of a row is covered by _FILTER
    # sized boxes centred every _FILTER cells along it (plus the far end).
    f0, lo0, hi0, f1, lo1, hi1, _ = zigzag_rows(
        orient, hws.start[order], hws.ax[order], hws.ay[order], hws.length[order]
    )
    cmin = np.minimum(f0, f1)

    if sband.size == 0:
        return
    lo = int(min(sband.min(), cmin.min()))
    hi = int(max(sband.max(), cmin.max()))
    n_strips = (hi - lo) // strip + 1

    sid_site = (sband - lo) // strip
    site_sorted = np.argsort(sid_site, kind="stable")
    site_bounds = np.searchsorted(sid_site[site_sorted], np.arange(n_strips + 1))

    vsid = (cmin - lo) // strip
    vict_sorted = np.argsort(vsid, kind="stable")
    vict_bounds = np.searchsorted(vsid[vict_sorted], np.arange(n_strips + 1))

    for i in range(n_strips):
        vict = vict_sorted[vict_bounds[i] : vict_bounds[i + 1]]
        if vict.size == 0:
            continue
        s0 = lo + i * strip
        s1 = min(s0 + strip - 1, hi)  # clip the last strip to the populated span
        main = site_sorted[site_bounds[i] : site_bounds[i + 1]]
        left = site_sorted[site_bounds[max(i - 1, 0)] : site_bounds[i]]
        left = left[sband[left] >= s0 - _HALO]
        right = site_sorted[site_bounds[i + 1] : site_bounds[min(i + 2, n_strips)]]
        right = right[sband[right] <= s1 + _HALO]
        if main.size + left.size + right.size == 0:
            continue

        runs = [srun[main], srun[left], srun[right]]
        rlo = int(min(r.min() for r in runs if r.size)) - _HALO
        rhi = int(max(r.max() for r in runs if r.size)) + _HALO
        nb = (s1 - s0 + 1) + 2 * _HALO
        nr = rhi - rlo + 1
        grid = np.full((nb, nr), -1, dtype=np.int32)
        blo = s0 - _HALO
        # Ascending-precedence fancy store: the last write per cell wins, so
        # each cell ends at the max precedence among its painted sites.
        grid[sband[main] - blo, srun[main] - rlo] = pos_site[main]
        for halo in (left, right):
            if halo.size:
                np.maximum.at(grid, (sband[halo] - blo, srun[halo] - rlo), pos_site[halo])
        dil = maximum_filter(grid, size=_FILTER, mode="constant", cval=-1)
        del grid

        # Strided probes along both rows of each victim in this strip.
        band_r = np.concatenate([f0[vict], f1[vict]])
        lo_r = np.concatenate([lo0[vict], lo1[vict]])
        hi_r = np.concatenate([hi0[vict], hi1[vict]])
        n_int = (hi_r - lo_r) // _FILTER + 1
        counts = n_int + 1
        ridx = np.repeat(np.arange(band_r.size), counts)
        t = ragged_arange(counts)
        s = np.where(t < n_int[ridx], lo_r[ridx] + _FILTER * t, hi_r[ridx])
        ci = band_r[ridx] - blo
        si = s - rlo
        inb = (ci >= 0) & (ci < nb) & (si >= 0) & (si < nr)
        vals = np.full(ridx.size, -1, dtype=np.int32)
        vals[inb] = dil[ci[inb], si[inb]]
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        row_max = np.maximum.reduceat(vals, offsets)
        vict_max = np.maximum(row_max[: vict.size], row_max[vict.size :])
        hit = vict_max > vict  # victim's own precedence is its sorted position
        deleted[order[vict[hit]]] = True


def stage1_survivors(
    hws: HighwaySet, ranks: np.ndarray, window: Window, *, strip: int = 512
) -> np.ndarray:
    """Crowding-pass survival flags for every raw staircase.

    Exact for staircases with a site in ``window`` grown by STATUS_COLLAR;
    conservative (may stay alive) further out.  The verdicts do not depend on
    ``strip``, which only controls the memory/time tradeoff.
    """
    if strip < _HALO:
        raise ValueError(f"strip width must be >= {_HALO} so halos span one strip")
    deleted = np.zeros(hws.n, dtype=bool)
    for orient in (ORIENT_NE, ORIENT_NW):
        rows_o = np.flatnonzero(hws.orient == orient)
        _stage1_orientation(hws, ranks, rows_o, orient, window, deleted, strip)
    return ~deleted


# ---------------------------------------------------------------------------
# Pass 2: straight-highway cover
# ---------------------------------------------------------------------------


def ell_min(params: FullParams, m) -> np.ndarray:
    """Smallest straight-highway class whose cover deletes a class-m staircase."""
    val = (1.0 + params.zeta) * np.asarray(m, dtype=np.float64) / params.c_thetatilde
    return np.ceil(val - 1e-9).astype(np.int64)


def _bond_keys(axis, x, y):
    if x.size and (np.abs(x).max() >= _COORD_LIMIT or np.abs(y).max() >= _COORD_LIMIT):
        raise ValueError("bond coordinates exceed the composite key range")
    span = np.int64(2 * _COORD_LIMIT)
    return (np.asarray(axis) * span + (x + _COORD_LIMIT)) * span + (y + _COORD_LIMIT)


def _cover_tiles(t_fix, run, span, T, chunk=2_000_000):
    """Distinct (fix-tile, run-tile) keys whose anchors could cover the bonds.

    A straight highway of extent ``span`` covering run coordinate r is
    anchored at run in [r - span + 1, r]; tiles are deduplicated chunk by
    chunk so the expansion never materializes at full size.
    """
    base = np.int64(4 * _COORD_LIMIT)
    parts = []
    for i in range(0, t_fix.size, chunk):
        sl = slice(i, min(i + chunk, t_fix.size))
        t_lo = (run[sl] - span + 1) // T
        counts = run[sl] // T - t_lo + 1
        fix_rep = np.repeat(t_fix[sl], counts)
        run_rep = t_lo.repeat(counts) + ragged_arange(counts)
        parts.append(np.unique(fix_rep * base + run_rep + _COORD_LIMIT))
    keys = np.unique(np.concatenate(parts))
    return keys // base, keys % base - _COORD_LIMIT


def stage2_survivors(
    params: FullParams, seed: int, hws: HighwaySet, alive1: np.ndarray, window: Window
):
    """Straight-cover survival flags and per-class deletion counts.

    A crowding-pass survivor of class m dies when one of its bonds lies on a
    raw straight highway of class ell >= (1 + zeta) * m / c_thetatilde.  Only
    survivors meeting the status collar are examined (their flags are the
    exact ones); staircases further out pass through unchanged.
    """
    alive2 = alive1.copy()
    stats = {"deleted_by_class": {}}
    thr_all = ell_min(params, hws.klass)
    cand = np.flatnonzero(
        alive1 & (thr_all <= params.class_cutoff) & exact_status_mask(hws, window)
    )
    if cand.size == 0:
        return alive2, stats
    brow, baxis, bx, by = bonds_flat(hws, cand)
    bthr = thr_all[brow]
    bkeys = _bond_keys(baxis, bx, by)
    # Sample every straight-highway layer near the eligible bonds once, then
    # resolve all bonds with a single key join on (bond, max class found).
    hv_keys = []
    hv_klass = []
    for ell in range(int(bthr.min()), params.class_cutoff + 1):
        span = np.int64(1) << ell
        T = hv_tile_side(params, ell)
        elig = bthr <= ell
        for axis, hv_orient in ((AX_V, HV_V), (AX_H, HV_H)):
            bsel = np.flatnonzero(elig & (baxis == axis))
            if bsel.size == 0:
                continue
            if axis == AX_V:
                fix_u, run_u = _cover_tiles(bx[bsel] // T, by[bsel], span, T)
            else:
                fix_u, run_u = _cover_tiles(by[bsel] // T, bx[bsel], span, T)
            TX, TY = (fix_u, run_u) if axis == AX_V else (run_u, fix_u)
            hv = hv_class_tiles(params, seed, hv_orient, ell, TX, TY)
            if hv.n == 0:
                continue
            _, haxis, hx, hy = bonds_flat(hv)
            hv_keys.append(_bond_keys(haxis, hx, hy))
            hv_klass.append(np.full(hx.size, ell, dtype=np.int64))
    doomed = np.zeros(hws.n, dtype=bool)
    if hv_keys:
        keys = np.concatenate(hv_keys)
        kls = np.concatenate(hv_klass)
        order = np.lexsort((kls, keys))
        keys, kls = keys[order], kls[order]
        uniq = np.ones(keys.size, dtype=bool)
        uniq[:-1] = keys[1:] != keys[:-1]
        ukeys, umax = keys[uniq], kls[uniq]  # ascending class: last per key is max
        pos = np.searchsorted(ukeys, bkeys)
        pos_ok = pos < ukeys.size
        hit = np.zeros(bkeys.size, dtype=bool)
        hit[pos_ok] = (ukeys[pos[pos_ok]] == bkeys[pos_ok]) & (
            umax[pos[pos_ok]] >= bthr[pos_ok]
        )
        doomed[brow[hit]] = True
    for row in np.flatnonzero(doomed):
        k = int(hws.klass[row])
        stats["deleted_by_class"][k] = stats["deleted_by_class"].get(k, 0) + 1
    alive2[doomed] = False
    return alive2, stats


# ---------------------------------------------------------------------------
# Pass 3: crossing trim
# ---------------------------------------------------------------------------


def _near_opposite(px, py, hws, opp_rows, orient, chunk=512):
    """Whether each point is ell-1 distance <= 1 of any listed staircase."""
    out = np.zeros(px.size, dtype=bool)
    if opp_rows.size == 0 or px.size == 0:
        return out
    st = hws.start[opp_rows]
    ax = hws.ax[opp_rows]
    ay = hws.ay[opp_rows]
    ln = hws.length[opp_rows]
    for i in range(0, px.size, chunk):
        sl = slice(i, min(i + chunk, px.size))
        d = d1_site_zigzag(px[sl][:, None], py[sl][:, None], orient, st, ax, ay, ln)
        out[sl] = (d <= 1).any(axis=1)
    return out


def stage3_trim(hws: HighwaySet, alive2: np.ndarray, window: Window):
    """Apply the crossing trim to the straight-cover survivors.

    Returns ``(final, src, trim_lo, trim_hi)``: the trimmed staircase set,
    the raw row each final staircase came from (the mark-maximal row when a
    trim collision merged several), and per-raw-row bond counts removed at
    the anchor / far end (0 or TRIM_BONDS; also set for staircases the trim
    removed entirely).

    Only staircase ends inside the status collar are examined — trims at
    far-away ends cannot change any bond there, so the thinned configuration
    stays exact throughout the collar while far survivors pass through with
    their raw geometry.
    """
    trim_lo = np.zeros(hws.n, dtype=np.int64)
    trim_hi = np.zeros(hws.n, dtype=np.int64)
    surv = np.flatnonzero(alive2)
    if surv.size == 0:
        return hws.take(surv), surv, trim_lo, trim_hi
    sax, say, sex, sey = zigzag_end_sites(
        hws.orient[surv], hws.start[surv], hws.ax[surv], hws.ay[surv], hws.length[surv]
    )

    def in_collar(px, py):
        c = STATUS_COLLAR
        return (
            (px >= window.x0 - c)
            & (px <= window.x1 + c)
            & (py >= window.y0 - c)
            & (py <= window.y1 + c)
        )

    rect = (
        window.x0 - STATUS_COLLAR - 1,
        window.y0 - STATUS_COLLAR - 1,
        window.x1 + STATUS_COLLAR + 1,
        window.y1 + STATUS_COLLAR + 1,
    )
    trig_lo = np.zeros(surv.size, dtype=bool)
    trig_hi = np.zeros(surv.size, dtype=bool)
    for orient, opp in ((ORIENT_NE, ORIENT_NW), (ORIENT_NW, ORIENT_NE)):
        mine = hws.orient[surv] == orient
        opp_all = surv[hws.orient[surv] == opp]
        near = zigzag_meets_rect(
            opp,
            hws.start[opp_all],
            hws.ax[opp_all],
            hws.ay[opp_all],
            hws.length[opp_all],
            rect,
        )
        opp_rows = opp_all[near]
        for trig, px, py in ((trig_lo, sax, say), (trig_hi, sex, sey)):
            scoped = np.flatnonzero(mine & in_collar(px, py))
            trig[scoped] = _near_opposite(px[scoped], py[scoped], hws, opp_rows, opp)
    trim_lo[surv] = np.where(trig_lo, TRIM_BONDS, 0)
    trim_hi[surv] = np.where(trig_hi, TRIM_BONDS, 0)

    new_len = hws.length[surv] - trim_lo[surv] - trim_hi[surv]
    keep = new_len >= 1
    rows = surv[keep]
    adv = trim_lo[rows] // 2  # TRIM_BONDS is even: anchor moves 2 up, 2 over
    sign = np.where(hws.orient[rows] == ORIENT_NE, 1, -1)
    nax = hws.ax[rows] + sign * adv
    nay = hws.ay[rows] + adv
    nlen = new_len[keep]

    # Merge staircases whose trimmed bond sets coincide, keeping the largest
    # mark.  Identity is (orientation, start, anchor, length, class) since a
    # staircase's bond set determines those and vice versa.
    ident = (hws.orient[rows], hws.start[rows], nax, nay, nlen, hws.klass[rows])
    grp = np.lexsort((hws.mark[rows],) + ident[::-1])
    cols = np.stack([c[grp] for c in ident])
    last = np.ones(grp.size, dtype=bool)
    last[:-1] = (cols[:, 1:] != cols[:, :-1]).any(axis=0)
    pick = grp[last]  # ascending mark within a group: last one has the max
    final = HighwaySet.build(
        KIND_ZZ,
        hws.orient[rows][pick],
        hws.start[rows][pick],
        hws.klass[rows][pick],
        nax[pick],
        nay[pick],
        nlen[pick],
        mark=hws.mark[rows][pick],
    )
    return final, rows[pick], trim_lo, trim_hi


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def exact_status_mask(hws: HighwaySet, window: Window) -> np.ndarray:
    """Rows whose thinning flags are exact: they meet the status collar."""
    rect = (
        window.x0 - STATUS_COLLAR,
        window.y0 - STATUS_COLLAR,
        window.x1 + STATUS_COLLAR,
        window.y1 + STATUS_COLLAR,
    )
    out = np.zeros(hws.n, dtype=bool)
    for orient in (ORIENT_NE, ORIENT_NW):
        rows = np.flatnonzero(hws.orient == orient)
        if rows.size:
            out[rows] = zigzag_meets_rect(
                orient, hws.start[rows], hws.ax[rows], hws.ay[rows], hws.length[rows], rect
            )
    return out


@dataclass(frozen=True)
class ThinnedEnv:
    """A raw environment together with its thinned staircase configuration."""

    raw: RawEnv
    ranks: np.ndarray  # precedence ranks per raw staircase row
    alive1: np.ndarray  # crowding-pass survival flags
    alive2: np.ndarray  # straight-cover survival flags
    trim_lo: np.ndarray  # bonds trimmed at the anchor end (0 or TRIM_BONDS)
    trim_hi: np.ndarray  # bonds trimmed at the far end
    final: HighwaySet  # trimmed, merged survivor staircases
    final_src: np.ndarray  # raw row backing each final staircase
    report: dict

    @property
    def exact_scope(self) -> np.ndarray:
        return exact_status_mask(self.raw.zz, self.raw.window)


def thin(env: RawEnv, *, strip: int = 512) -> ThinnedEnv:
    """Run all three thinning passes on a raw staircase environment."""
    if env.model != "full":
        raise ValueError("thinning applies to the staircase-highway process only")
    zz = env.zz
    ranks = zigzag_ranks(zz)
    alive1 = stage1_survivors(zz, ranks, env.window, strip=strip)
    alive2, st2 = stage2_survivors(env.params, env.seed, zz, alive1, env.window)
    final, src, trim_lo, trim_hi = stage3_trim(zz, alive2, env.window)
    removed = int((zz.length[alive2] - trim_lo[alive2] - trim_hi[alive2] <= 0).sum())
    report = {
        "n_raw": int(zz.n),
        "stage1_deleted": int(zz.n - alive1.sum()),
        "stage2_deleted": int(alive1.sum() - alive2.sum()),
        "stage2_deleted_by_class": st2["deleted_by_class"],
        "stage3_trims_anchor": int((trim_lo > 0).sum()),
        "stage3_trims_far": int((trim_hi > 0).sum()),
        "stage3_removed": removed,
        "stage3_merged": int(alive2.sum() - removed - final.n),
        "n_final": int(final.n),
    }
    return ThinnedEnv(env, ranks, alive1, alive2, trim_lo, trim_hi, final, src, report)
