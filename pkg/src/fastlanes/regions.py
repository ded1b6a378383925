"""Corner-success events: spanning-highway witnesses, regions, detection.

A *corner success* at scale ``k`` is an environment event local to the
origin.  In the diagonal-highway model it is witnessed by the two spanning
highways (reaching from an axis to the target band ``2**(k-1) + 1`` bonds
out) that cross the positive axes nearest the origin: success asks that
both crossings land within ``C / r_k`` of the corner and that no other
same-orientation highway of class ``>= k`` intrudes into the open region
the witnesses enclose.  In the staircase model four staircase witnesses
(spanning the outer band ``2**k + 4`` in both diagonal directions) enclose
an X-shaped region and four straight witnesses hug the axes; the event
additionally bounds the straights' distance from the axes, budgets the
weighted count of staircases crossing each straight witness near the
origin, and bans slow bonds along every witness.

Detected successes come with a concrete geometric payoff, which
:func:`corridor_check` verifies against an exact geodesic tree: in the
diagonal model every geodesic from the origin to a first-quadrant site
outside the enclosed region starts by following one axis to its witness
crossing; in the staircase model every geodesic stays inside a thin
horizontal or vertical corridor around an axis until it first reaches the
arm of the X through which it leaves.

Everything in this module is a deterministic function of
``(params, seed, k)``: reports serialize to JSON, and re-running a
detection reproduces its report byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .bondfield import classify_env
from .geodesics import geodesic_tree
from .geometry import (
    AX_H,
    AX_V,
    HV_H,
    HV_V,
    ORIENT_NE,
    ORIENT_NW,
    START_V,
    Window,
    zigzag_bonds,
    zigzag_end_sites,
    zigzag_rows,
    zigzag_sites,
)
from .params import FullParams, SimpleParams, ensure_valid, scales
from .sampler import KIND_HV, RawEnv, sample_raw_env
from .thinning import ThinnedEnv, thin

__all__ = [
    "MAX_WINDOW_SITES",
    "ARM_NAMES",
    "STAIR_ROLES",
    "STRAIGHT_ROLES",
    "RegionSet",
    "Witness",
    "EventReport",
    "RegionMasks",
    "CorridorReport",
    "region_set",
    "gap_certificates",
    "simple_event_window",
    "full_event_window",
    "find_spanning_highways",
    "detect_simple_success",
    "detect_full_success",
    "simple_region_masks",
    "full_region_masks",
    "corridor_check",
    "success_census",
]

#: Default ceiling on window size (in sites) for auto-built event windows.
MAX_WINDOW_SITES = 8_000_000

#: Names of the four arms of the X-shaped region, in label order.
ARM_NAMES = ("ne", "nw", "sw", "se")

#: Staircase witness roles (bit order for ``RegionMasks.on_stair``).
STAIR_ROLES = ("ne_lower", "ne_upper", "nw_lower", "nw_upper")

#: Straight witness roles.
STRAIGHT_ROLES = ("north", "east", "south", "west")

_BIG = np.iinfo(np.int64).max // 4


# ---------------------------------------------------------------------------
# Deterministic region scaffold
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionSet:
    """Deterministic scaffold of the scale-``k`` regions and thresholds.

    ``band`` is the distance (in the diagonal band coordinate) of the target
    band the witnesses must reach; ``cross_hi`` / ``cross_lo`` bound the
    admissible axis-crossing offsets.  Staircase-model extras: witnesses must
    span ``+/- outer_band``; straight witnesses must cover ``[-line, line]``
    and sit within ``straight_hi`` of their axis; the corridors around the
    axes have half-width ``corridor_half`` (so width ``2 * corridor_half``);
    classes from ``budget_min_class`` up are charged against
    ``budget_bound`` in the weighted crossing count.
    """

    model: str
    k: int
    band: int
    cross_hi: float
    cross_lo: float = 0.0
    outer_band: int | None = None
    line: float | None = None
    corridor_half: float | None = None
    q: float | None = None
    straight_hi: float | None = None
    budget_min_class: int | None = None
    budget_bound: float | None = None

    def asdict(self) -> dict:
        return {key: val for key, val in asdict(self).items() if val is not None}


def region_set(params, k: int, c1: float | None = None) -> RegionSet:
    """The deterministic region scaffold for ``params`` at scale ``k``."""
    ensure_valid(params)
    sc = scales(params)
    if isinstance(params, SimpleParams):
        return RegionSet(
            model="simple",
            k=int(k),
            band=2 ** (k - 1) + 1,
            cross_hi=params.C / sc.r(k),
        )
    q = sc.q(k)
    m_min = max(1, math.floor((params.c_thetatilde - params.delta) * q) + 1)
    c1v = params.c1 if c1 is None else float(c1)
    bound = (
        c1v
        * (params.eta**3 / params.theta**2) ** (params.c_theta * params.delta * k)
        * (params.eta / params.mu) ** k
    )
    return RegionSet(
        model="full",
        k=int(k),
        band=2**k,
        cross_hi=params.C / sc.r(k),
        cross_lo=params.c / sc.r(k),
        outer_band=2**k + 4,
        line=2 * params.C / sc.r(k),
        corridor_half=params.mu ** (-k),
        q=q,
        straight_hi=params.C / sc.rtilde(q),
        budget_min_class=m_min,
        budget_bound=bound,
    )


def gap_certificates(params, k: int) -> dict:
    """Closed-form certificates that scale ``k`` detections pay off.

    ``corner_gap`` is the effective inequality behind the axis-following
    conclusion in the diagonal model (a class ``k-1`` ride to the band beats
    any class ``>= k`` ride plus the detour to the witness crossing);
    ``tail_gap`` is the coarser textbook sufficient condition, and
    ``corner_inside`` places the crossing threshold strictly inside the
    band.  Each entry reports ``lhs``/``rhs``/``ok``.
    """
    sc = scales(params)
    r_k = sc.r(k)
    C = params.C
    eta = params.eta
    gap = eta ** (k - 1) - eta**k
    out = {"k": int(k), "cross_hi": C / r_k}
    if isinstance(params, SimpleParams):
        out["tail_gap"] = _cert(0.1 * 2**k * gap, 4 * C / r_k, strict=True)
        out["corner_gap"] = _cert(math.sqrt(2.0) * gap * (2 ** (k - 1) + 1), 2 * C / r_k, strict=True)
        out["corner_inside"] = _cert(C / r_k, float(2 ** (k - 1)), strict=True, want_less=True)
        out["eta_small"] = _cert(eta**k, 1 / 32, strict=True, want_less=True)
        out["tail_mass"] = _cert(r_k, 0.5, strict=False, want_less=True)
    else:
        out["tail_gap"] = _cert(0.1 * 2**k * gap, 4 * C / r_k + 0.2, strict=True)
    return out


def _cert(lhs: float, rhs: float, *, strict: bool, want_less: bool = False) -> dict:
    if want_less:
        ok = lhs < rhs if strict else lhs <= rhs
    else:
        ok = lhs > rhs if strict else lhs >= rhs
    return {"lhs": float(lhs), "rhs": float(rhs), "ok": bool(ok)}


# ---------------------------------------------------------------------------
# Event windows
# ---------------------------------------------------------------------------


def _check_budget(win: Window, k: int, max_sites: int) -> Window:
    n = (win.x1 - win.x0 + 1) * (win.y1 - win.y0 + 1)
    if n > max_sites:
        raise ValueError(
            f"scale k={k} needs a {win.x1 - win.x0 + 1} x {win.y1 - win.y0 + 1} window "
            f"({n} sites), over the {max_sites}-site budget; pass a larger max_sites "
            "to override"
        )
    return win


def simple_event_window(params, k: int, *, search: int | None = None, margin: int = 4,
                        max_sites: int = MAX_WINDOW_SITES) -> Window:
    """A window large enough to detect scale-``k`` events (diagonal model).

    Covers the axis segments scanned for witnesses (out to ``search``, which
    defaults to twice the crossing threshold plus slack) and the largest
    possible enclosed region for crossings found in that range.
    """
    rs = region_set(params, k)
    if search is None:
        search = max(2 * math.ceil(rs.cross_hi) + 8, 16)
    hi = rs.band + int(search)
    return _check_budget(Window(-margin, -margin, hi + margin, hi + margin), k, max_sites)


def full_event_window(params, k: int, *, margin: int | None = None,
                      max_sites: int = MAX_WINDOW_SITES) -> Window:
    """A window large enough to detect scale-``k`` events (staircase model)."""
    rs = region_set(params, k)
    if margin is None:
        margin = max(math.ceil(rs.line) + 8, 16)
    half = rs.outer_band + int(margin)
    return _check_budget(Window(-half, -half, half, half), k, max_sites)


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """One selected spanning highway and where it crosses its axis.

    ``crossing`` is the signed lattice point on the axis; ``offset`` its
    distance from the origin.  ``row`` is the highway's row in the sampled
    set it was selected from (diagnostic only).
    """

    role: str
    kind: int
    orient: int
    start: int
    klass: int
    anchor: tuple[int, int]
    length: int
    crossing: tuple[int, int]
    offset: int
    row: int = -1


def _as_witness(w) -> "Witness":
    if isinstance(w, Witness):
        return w
    d = dict(w)
    d["anchor"] = tuple(d["anchor"])
    d["crossing"] = tuple(d["crossing"])
    return Witness(**d)


def _select_witness(hws, rows: np.ndarray, offsets: np.ndarray, role: str, crossings):
    """Minimal-offset row, ties broken by class, length, then anchor."""
    if rows.size == 0:
        return None, 0
    order = np.lexsort((hws.ax[rows], hws.ay[rows], -hws.length[rows], -hws.klass[rows], offsets))
    best = order[0]
    r = int(rows[best])
    ties = int((offsets == offsets[best]).sum())
    cx, cy = crossings[0][best], crossings[1][best]
    return (
        Witness(
            role=role,
            kind=int(hws.kind[r]),
            orient=int(hws.orient[r]),
            start=int(hws.start[r]),
            klass=int(hws.klass[r]),
            anchor=(int(hws.ax[r]), int(hws.ay[r])),
            length=int(hws.length[r]),
            crossing=(int(cx), int(cy)),
            offset=int(offsets[best]),
            row=r,
        ),
        ties,
    )


# -- diagonal model ---------------------------------------------------------


def _simple_witnesses(env: RawEnv, k: int):
    """Minimal-crossing spanning diagonals per axis (scan domain: window)."""
    zz = env.zz
    g = 2 ** (k - 1) + 1
    win = env.window
    m0 = np.minimum(zz.ax, zz.ay)
    spanning = (zz.orient == ORIENT_NE) & (m0 <= 0) & (m0 + zz.length >= g)
    d = zz.ax - zz.ay
    out = {}
    info = {"n_spanning": int(spanning.sum()), "ties": {}}
    for role, keep, off, cross in (
        ("x_axis", d >= 0, d, lambda o: (o, np.zeros_like(o))),
        ("y_axis", d <= 0, -d, lambda o: (np.zeros_like(o), o)),
    ):
        sel = spanning & keep
        offs = off[sel]
        cx, cy = cross(offs)
        inside = win.contains_site(cx, cy)
        rows = np.flatnonzero(sel)[inside]
        w, ties = _select_witness(zz, rows, offs[inside], role, (cx[inside], cy[inside]))
        out[role] = w
        info["ties"][role] = ties
    return out, info


# -- staircase model --------------------------------------------------------


def _sites_at_height(start, ax, length, n, sign):
    """x of the (at most two) staircase sites ``n`` rows above the anchor."""
    t1 = np.where(start == START_V, 2 * n - 1, 2 * n)
    t2 = t1 + 1
    ok1 = (n >= 0) & (t1 >= 0) & (t1 <= length)
    ok2 = (n >= 0) & (t2 >= 0) & (t2 <= length)
    u1 = ax + sign * (t1 - n)
    u2 = ax + sign * (t2 - n)
    return u1, ok1, u2, ok2


def _sites_at_column(start, ay, length, c):
    """y of the (at most two) staircase sites ``c`` columns from the anchor."""
    t1 = np.where(start == START_V, 2 * c, 2 * c - 1)
    t2 = t1 + 1
    ok1 = (c >= 0) & (t1 >= 0) & (t1 <= length)
    ok2 = (c >= 0) & (t2 >= 0) & (t2 <= length)
    v1 = ay + (t1 - c)
    v2 = ay + (t2 - c)
    return v1, ok1, v2, ok2


def _full_witnesses(tenv: ThinnedEnv, k: int):
    """The four staircase and four straight witnesses at scale ``k``.

    Staircase witnesses are drawn from the straight-cover survivors (their
    untrimmed extent), must span both outer bands of their orientation, and
    are chosen to cross their axis nearest the origin; straight witnesses
    come from the raw straight configuration, must cover ``[-line, line]``
    across the perpendicular axis, and are the nearest to their axis.  The
    scan domain is the environment window: a witness is reported absent when
    no qualifying highway crosses inside it.
    """
    raw = tenv.raw
    zz = raw.zz
    rs = region_set(raw.params, k)
    gt = rs.outer_band
    win = raw.window
    out: dict[str, Witness | None] = {}
    info = {"ties": {}, "n_connecting": {}}

    live = tenv.alive2 & (zz.klass >= k) & tenv.exact_scope
    ax0, ay0, ex, ey = zigzag_end_sites(zz.orient, zz.start, zz.ax, zz.ay, zz.length)
    ne = live & (zz.orient == ORIENT_NE) & (np.minimum(ex, ey) >= gt) & (np.maximum(ax0, ay0) <= -gt)
    nw = live & (zz.orient == ORIENT_NW) & (np.minimum(ax0, -ay0) >= gt) & (np.minimum(-ex, ey) >= gt)
    info["n_connecting"]["ne"] = int(ne.sum())
    info["n_connecting"]["nw"] = int(nw.sum())

    # Crossings of the horizontal axis ("lower" witnesses).
    for role, mask, sign in (("ne_lower", ne, 1), ("nw_lower", nw, -1)):
        idx = np.flatnonzero(mask)
        n = -zz.ay[idx]
        u1, ok1, u2, ok2 = _sites_at_height(zz.start[idx], zz.ax[idx], zz.length[idx], n, sign)
        if sign > 0:  # east half-axis: smallest crossing x >= 0
            c1ok = ok1 & (u1 >= 0)
            c2ok = ok2 & (u2 >= 0)
        else:  # west half-axis: crossing x <= 0 closest to 0
            c1ok = ok1 & (u1 <= 0)
            c2ok = ok2 & (u2 <= 0)
        cand = np.where(c1ok, u1, np.where(c2ok, u2, _BIG))
        good = (cand != _BIG) & win.contains_site(cand, 0)
        rows = idx[good]
        cx = cand[good]
        w, ties = _select_witness(zz, rows, np.abs(cx), role, (cx, np.zeros_like(cx)))
        out[role] = w
        info["ties"][role] = ties

    # Crossings of the upper vertical axis ("upper" witnesses).
    for role, mask, col in (
        ("ne_upper", ne, lambda i: -zz.ax[i]),
        ("nw_upper", nw, lambda i: zz.ax[i]),
    ):
        idx = np.flatnonzero(mask)
        c = col(idx)
        v1, ok1, v2, ok2 = _sites_at_column(zz.start[idx], zz.ay[idx], zz.length[idx], c)
        c1ok = ok1 & (v1 >= 0)
        c2ok = ok2 & (v2 >= 0)
        cand = np.where(c1ok, v1, np.where(c2ok, v2, _BIG))
        good = (cand != _BIG) & win.contains_site(0, cand)
        rows = idx[good]
        cy = cand[good]
        w, ties = _select_witness(zz, rows, cy, role, (np.zeros_like(cy), cy))
        out[role] = w
        info["ties"][role] = ties

    # Straight witnesses: nearest spanning straight on each side of its axis.
    hv = raw.hv
    ell = rs.line
    span_h = (hv.orient == HV_H) & (hv.ax <= -ell) & (hv.ax + hv.length >= ell)
    span_v = (hv.orient == HV_V) & (hv.ay <= -ell) & (hv.ay + hv.length >= ell)
    for role, mask, coord, vertical in (
        ("north", span_h & (hv.ay >= 1), hv.ay, False),
        ("south", span_h & (hv.ay <= -1), hv.ay, False),
        ("east", span_v & (hv.ax >= 1), hv.ax, True),
        ("west", span_v & (hv.ax <= -1), hv.ax, True),
    ):
        idx = np.flatnonzero(mask)
        c = coord[idx]
        good = win.contains_site(c, 0) if vertical else win.contains_site(0, c)
        rows = idx[good]
        c = c[good]
        crossings = (c, np.zeros_like(c)) if vertical else (np.zeros_like(c), c)
        w, ties = _select_witness(hv, rows, np.abs(c), role, crossings)
        out[role] = w
        info["ties"][role] = ties
    return out, info


def find_spanning_highways(env, k: int) -> dict[str, Witness | None]:
    """Locate the scale-``k`` spanning-highway witnesses of an environment.

    Returns a role-keyed dict (``x_axis``/``y_axis`` for the diagonal model;
    the four staircase and four straight roles for the staircase model).
    A role maps to ``None`` when no qualifying highway crosses inside the
    environment window: the event simply fails, no exception is raised.
    Minimality is exhaustive over the window's axis segments; ties at equal
    offset resolve deterministically (class, then length, then anchor) and
    are counted in the event report.
    """
    if isinstance(env, ThinnedEnv):
        return _full_witnesses(env, k)[0]
    if env.model == "simple":
        return _simple_witnesses(env, k)[0]
    return _full_witnesses(thin(env), k)[0]


# ---------------------------------------------------------------------------
# Event reports
# ---------------------------------------------------------------------------


def _py(v):
    """Recursively convert to plain JSON-serializable Python values."""
    if isinstance(v, Witness):
        return _py(asdict(v))
    if isinstance(v, dict):
        return {str(kk): _py(x) for kk, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_py(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_py(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


@dataclass(frozen=True)
class EventReport:
    """Outcome of a scale-``k`` success detection.

    ``flags`` holds one boolean per event component plus ``success`` (their
    conjunction); a component that could not be evaluated (e.g. the region
    scan when a witness is absent) is ``None`` and counts as failure.
    ``crossings`` maps each witness role to its signed axis coordinate (or
    ``None``).  Reports are plain data: ``to_json`` output is byte-identical
    across reruns of the same ``(params, seed, k)``.
    """

    model: str
    seed: int
    k: int
    window: tuple[int, int, int, int]
    flags: dict
    crossings: dict
    witnesses: dict
    region: dict
    details: dict

    @property
    def success(self) -> bool:
        return bool(self.flags.get("success"))

    def asdict(self) -> dict:
        return _py(
            {
                "model": self.model,
                "seed": self.seed,
                "k": self.k,
                "window": tuple(self.window),
                "flags": self.flags,
                "crossings": self.crossings,
                "witnesses": self.witnesses,
                "region": self.region,
                "details": self.details,
            }
        )

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(
            self.asdict(),
            sort_keys=True,
            indent=indent,
            separators=(",", ":") if indent is None else None,
        )


# -- diagonal-model detection -----------------------------------------------


def _simple_intruders(env: RawEnv, k: int, g: int, x1: int, x2: int) -> np.ndarray:
    """Rows of class ``>= k`` diagonals meeting the open enclosed region.

    The region is open: sites strictly inside the axes, strictly below the
    band, and strictly between the witness diagonals.  A diagonal highway
    meets it exactly when its diagonal lies strictly between the witness
    diagonals and its band extent overlaps ``[1, g - 1]`` -- in particular
    the witnesses themselves never qualify.
    """
    zz = env.zz
    d = zz.ax - zz.ay
    m0 = np.minimum(zz.ax, zz.ay)
    hit = (
        (zz.orient == ORIENT_NE)
        & (zz.klass >= k)
        & (d > -x2)
        & (d < x1)
        & (m0 <= g - 1)
        & (m0 + zz.length >= 1)
    )
    return np.flatnonzero(hit)


def _highway_rowdicts(hws, rows, limit: int = 12) -> list[dict]:
    out = []
    for r in rows[:limit]:
        out.append(
            {
                "row": int(r),
                "klass": int(hws.klass[r]),
                "orient": int(hws.orient[r]),
                "anchor": (int(hws.ax[r]), int(hws.ay[r])),
                "length": int(hws.length[r]),
            }
        )
    return out


def detect_simple_success(env: RawEnv, k: int) -> EventReport:
    """Detect the scale-``k`` corner success in a diagonal-model environment.

    The environment window is the scan domain; it must reach past the
    crossing threshold on both axes (build it with
    :func:`simple_event_window`).  The region scan is evaluated only when
    both witnesses exist and the window contains the full enclosed region;
    otherwise its flag is ``None``.
    """
    params = env.params
    if not isinstance(params, SimpleParams):
        raise ValueError("diagonal-model detection needs SimpleParams")
    rs = region_set(params, k)
    g = rs.band
    win = env.window
    need = math.ceil(rs.cross_hi) + 1
    if win.x0 > 0 or win.y0 > 0 or win.x1 < need or win.y1 < need:
        raise ValueError(
            f"window {(win.x0, win.y0, win.x1, win.y1)} cannot decide the scale-{k} crossing interval "
            f"(needs the axis segments out to {need}); sample over "
            "simple_event_window(params, k)"
        )

    wits, info = _simple_witnesses(env, k)
    w1, w2 = wits["x_axis"], wits["y_axis"]
    x1 = None if w1 is None else w1.offset
    x2 = None if w2 is None else w2.offset

    flags: dict = {}
    details: dict = {
        "witness_scan": info,
        "certificates": gap_certificates(params, k),
    }
    if w1 is None or w2 is None:
        flags["crossing_interval"] = False
        flags["region_clear"] = None
        details["region_scan"] = "skipped: witness absent"
    else:
        flags["crossing_interval"] = max(x1, x2) <= rs.cross_hi
        if win.x1 >= g + x1 and win.y1 >= g + x2:
            intr = _simple_intruders(env, k, g, x1, x2)
            flags["region_clear"] = intr.size == 0
            details["region_scan"] = {
                "n_intruders": int(intr.size),
                "intruders": _highway_rowdicts(env.zz, intr),
            }
        else:
            flags["region_clear"] = None
            details["region_scan"] = "skipped: window smaller than the enclosed region"
    flags["success"] = bool(flags["crossing_interval"]) and bool(flags["region_clear"])

    return EventReport(
        model="simple",
        seed=env.seed,
        k=int(k),
        window=(win.x0, win.y0, win.x1, win.y1),
        flags=flags,
        crossings={"x_axis": x1, "y_axis": x2},
        witnesses=wits,
        region=rs.asdict(),
        details=details,
    )


# -- staircase-model detection ------------------------------------------------


def _theta_ne(u, v, g2, h):
    """Closed diagonal band of half-width ``h`` cut at the scale bands."""
    d = np.abs(u - v)
    return (d <= h) & (np.abs(u + v) <= g2 + d)


def _theta_nw(u, v, g2, h):
    s = np.abs(u + v)
    return (s <= h) & (np.abs(u - v) <= g2 + s)


def _row_hits_band(f, lo, hi, h, g2):
    """Stride-2 progressions (``f`` fixed) meeting the closed cut band."""
    lim = g2 + np.abs(f)
    lo2 = np.maximum(lo, -lim)
    hi2 = np.minimum(hi, lim)
    lo2 = lo2 + ((lo2 - lo) & 1)
    hi2 = hi2 - ((hi2 - lo) & 1)
    return (np.abs(f) <= h) & (lo2 <= hi2)


def _staircases_meeting_band(zz, mask, orient: int, h: float, g2: int) -> np.ndarray:
    """Rows (among ``mask``) of ``orient`` staircases meeting their band."""
    idx = np.flatnonzero(mask & (zz.orient == orient))
    if idx.size == 0:
        return idx
    f0, lo0, hi0, f1, lo1, hi1, v1 = zigzag_rows(
        orient, zz.start[idx], zz.ax[idx], zz.ay[idx], zz.length[idx]
    )
    hit = _row_hits_band(f0, lo0, hi0, h, g2) | (v1 & _row_hits_band(f1, lo1, hi1, h, g2))
    return idx[hit]


def _straight_crossers(zz, m: int, j: Witness, h: float, g2: int) -> int:
    """Class-``m`` staircases sharing an in-band site with straight ``j``."""
    total = 0
    horizontal = j.orient == HV_H
    jx, jy = j.anchor
    j0 = jx if horizontal else jy
    j1 = j0 + j.length
    for orient, sign in ((ORIENT_NE, 1), (ORIENT_NW, -1)):
        idx = np.flatnonzero((zz.klass == m) & (zz.orient == orient))
        if idx.size == 0:
            continue
        if horizontal:
            n = jy - zz.ay[idx]
            u1, ok1, u2, ok2 = _sites_at_height(zz.start[idx], zz.ax[idx], zz.length[idx], n, sign)
            hit1 = ok1 & (u1 >= j0) & (u1 <= j1) & (_theta_ne(u1, jy, g2, h) | _theta_nw(u1, jy, g2, h))
            hit2 = ok2 & (u2 >= j0) & (u2 <= j1) & (_theta_ne(u2, jy, g2, h) | _theta_nw(u2, jy, g2, h))
        else:
            c = sign * (jx - zz.ax[idx])
            v1, ok1, v2, ok2 = _sites_at_column(zz.start[idx], zz.ay[idx], zz.length[idx], c)
            hit1 = ok1 & (v1 >= j0) & (v1 <= j1) & (_theta_ne(jx, v1, g2, h) | _theta_nw(jx, v1, g2, h))
            hit2 = ok2 & (v2 >= j0) & (v2 <= j1) & (_theta_ne(jx, v2, g2, h) | _theta_nw(jx, v2, g2, h))
        total += int((hit1 | hit2).sum())
    return total


def _witness_slow_bonds(field, w: Witness, box: Window) -> list[tuple[int, int, int]]:
    """Slow bonds along a witness, restricted to ``box`` (within the field)."""
    if w.kind == KIND_HV:
        ar = np.arange(w.length, dtype=np.int64)
        if w.orient == HV_H:
            axes = np.full(w.length, AX_H, dtype=np.int64)
            xs = w.anchor[0] + ar
            ys = np.full(w.length, w.anchor[1], dtype=np.int64)
        else:
            axes = np.full(w.length, AX_V, dtype=np.int64)
            xs = np.full(w.length, w.anchor[0], dtype=np.int64)
            ys = w.anchor[1] + ar
    else:
        b = zigzag_bonds(w.orient, w.start, w.anchor[0], w.anchor[1], w.length)
        axes, xs, ys = b[:, 0], b[:, 1], b[:, 2]
    keep = box.contains_bond(axes, xs, ys)
    axes, xs, ys = axes[keep], xs[keep], ys[keep]
    if axes.size == 0:
        return []
    rows = field.index_of(axes, xs, ys)
    bad = np.flatnonzero(field.slow[rows])
    return [(int(axes[i]), int(xs[i]), int(ys[i])) for i in bad]


def detect_full_success(env, k: int, *, c1: float | None = None) -> EventReport:
    """Detect the scale-``k`` corner success in a staircase-model environment.

    ``env`` may be a raw environment (it is thinned on the fly) or an
    already-thinned one.  Build the window with :func:`full_event_window`;
    detection refuses windows that cannot contain the scale-``k`` band
    region.  Flags: ``crossing_interval`` (all four staircase witnesses
    cross within ``[cross_lo, cross_hi]``), ``region_clear`` (no other
    class ``>= k`` staircase meets the closed band region of its
    orientation), ``straights_near`` (all four straight witnesses exist
    within ``straight_hi`` of their axis), ``crossing_budget`` (weighted
    count of staircases crossing each straight witness in the band region
    is at most ``budget_bound``), ``slow_free`` (no slow bonds along any
    witness inside the band box), and their conjunction ``success``.
    """
    tenv = env if isinstance(env, ThinnedEnv) else thin(env)
    raw = tenv.raw
    params = raw.params
    if not isinstance(params, FullParams):
        raise ValueError("staircase-model detection needs FullParams")
    rs = region_set(params, k, c1)
    win = raw.window
    box_half = rs.outer_band + 2
    need = max(rs.band + math.ceil(rs.cross_hi) + 2, box_half, math.ceil(rs.line) + 1)
    if win.x0 > -need or win.y0 > -need or win.x1 < need or win.y1 < need:
        raise ValueError(
            f"window {(win.x0, win.y0, win.x1, win.y1)} cannot contain the scale-{k} band region "
            f"(needs [-{need}, {need}]^2); sample over full_event_window(params, k)"
        )

    wits, info = _full_witnesses(tenv, k)
    flags: dict = {}
    details: dict = {
        "witness_scan": info,
        "certificates": gap_certificates(params, k),
        "q": {"value": rs.q, "ceil": math.ceil(rs.q)},
    }
    crossings = {}
    for role in STAIR_ROLES + STRAIGHT_ROLES:
        w = wits[role]
        if w is None:
            crossings[role] = None
        else:
            cx, cy = w.crossing
            crossings[role] = cx if cy == 0 and role not in ("ne_upper", "nw_upper") else cy
    stair_wits = [wits[r] for r in STAIR_ROLES]
    straight_wits = [wits[r] for r in STRAIGHT_ROLES]

    # Crossing interval.
    if any(w is None for w in stair_wits):
        flags["crossing_interval"] = False
    else:
        offs = [w.offset for w in stair_wits]
        flags["crossing_interval"] = all(rs.cross_lo <= o <= rs.cross_hi for o in offs)

    # Band-region scan (always evaluable; witnesses excluded).
    zz = raw.zz
    g2 = 2 * rs.band
    h = rs.cross_hi
    not_wit = np.ones(zz.n, dtype=bool)
    for w in stair_wits:
        if w is not None:
            not_wit[w.row] = False
    base = not_wit & (zz.klass >= k)
    intr_ne = _staircases_meeting_band(zz, base, ORIENT_NE, h, g2)
    intr_nw = _staircases_meeting_band(zz, base, ORIENT_NW, h, g2)
    n_intr = int(intr_ne.size + intr_nw.size)
    flags["region_clear"] = n_intr == 0
    details["region_scan"] = {
        "n_intruders": n_intr,
        "intruders": _highway_rowdicts(zz, intr_ne) + _highway_rowdicts(zz, intr_nw),
    }

    # Straight witnesses near their axes.
    if any(w is None for w in straight_wits):
        flags["straights_near"] = False
    else:
        flags["straights_near"] = all(w.offset <= rs.straight_hi for w in straight_wits)

    # Weighted crossing budget per straight witness.
    if any(w is None for w in straight_wits):
        flags["crossing_budget"] = None
        details["budget"] = "skipped: straight witness absent"
    else:
        sums = {}
        counts: dict[str, dict[int, int]] = {}
        for role, w in zip(STRAIGHT_ROLES, straight_wits):
            per_m = {}
            s = 0.0
            for m in range(rs.budget_min_class, raw.cutoff + 1):
                cnt = _straight_crossers(zz, m, w, h, g2)
                if cnt:
                    per_m[m] = cnt
                s += cnt * params.eta**m
            sums[role] = s
            counts[role] = per_m
        flags["crossing_budget"] = all(s <= rs.budget_bound for s in sums.values())
        details["budget"] = {
            "min_class": rs.budget_min_class,
            "bound": rs.budget_bound,
            "sums": sums,
            "counts": counts,
        }

    # Slow bonds along the witnesses (within the band box).
    present = [w for w in stair_wits + straight_wits if w is not None]
    if not present:
        flags["slow_free"] = None
        details["slow_scan"] = "skipped: no witnesses"
    else:
        field = classify_env(raw, tenv.final)
        box = Window(-box_half, -box_half, box_half, box_half)
        slow: list = []
        for w in present:
            for axis, x, y in _witness_slow_bonds(field, w, box):
                slow.append({"role": w.role, "axis": axis, "x": x, "y": y})
        flags["slow_free"] = not slow
        details["slow_scan"] = {"box": (-box_half, -box_half, box_half, box_half),
                                "n_slow": len(slow), "slow_bonds": slow[:12]}

    flags["success"] = all(bool(flags[f]) for f in
                           ("crossing_interval", "region_clear", "straights_near",
                            "crossing_budget", "slow_free"))

    report = EventReport(
        model="full",
        seed=raw.seed,
        k=int(k),
        window=(win.x0, win.y0, win.x1, win.y1),
        flags=flags,
        crossings=crossings,
        witnesses=wits,
        region=rs.asdict(),
        details=details,
    )

    # Invariant scan: the open X-shaped region sits inside the closed band
    # region whenever the crossing interval holds.
    if flags["crossing_interval"]:
        masks = full_region_masks(report)
        inside = bool(np.all(masks.theta[masks.omega]))
        details["region_within_band"] = {
            "ok": inside,
            "n_region_sites": int(masks.omega.sum()),
            "n_band_sites": int(masks.theta.sum()),
            "unlabeled_sites": int(masks.n_unlabeled),
        }
    return report


# ---------------------------------------------------------------------------
# Region masks
# ---------------------------------------------------------------------------


class _StairTable:
    """Cross-coordinate lookup for one staircase.

    N/E staircases have one site per anti-diagonal ``a = x + y``; N/W
    staircases one site per diagonal ``s = y - x``.  ``lookup`` returns, per
    query, whether the along-coordinate falls in the staircase's range and
    the staircase's cross-coordinate there (x - y for N/E rows, x + y for
    N/W rows).
    """

    def __init__(self, w: Witness):
        pts = zigzag_sites(w.orient, w.start, w.anchor[0], w.anchor[1], w.length)
        x, y = pts[:, 0], pts[:, 1]
        if w.orient == ORIENT_NE:
            along, cross = x + y, x - y
        else:
            along, cross = y - x, x + y
        self.orient = w.orient
        self.a0 = int(along[0])
        self.cross = cross.astype(np.int64)

    def lookup(self, along):
        rel = np.asarray(along) - self.a0
        ok = (rel >= 0) & (rel < self.cross.size)
        return ok, self.cross[np.clip(rel, 0, self.cross.size - 1)]

    def on(self, x, y):
        along = x + y if self.orient == ORIENT_NE else y - x
        cross = x - y if self.orient == ORIENT_NE else x + y
        ok, c = self.lookup(along)
        return ok & (cross == c)


@dataclass
class RegionMasks:
    """Site masks of the staircase-model regions over a window.

    Grids are indexed ``[ix, iy]`` with ``ix = x - x0``.  ``arm`` labels the
    four components of the open region minus its center (-1 elsewhere) in
    ``ARM_NAMES`` order; ``on_stair`` is a bitmask of witness-staircase
    membership in ``STAIR_ROLES`` order.  ``corridor_h``/``corridor_v`` are
    the closed horizontal/vertical corridors around the axes.
    """

    window: Window
    omega_ne: np.ndarray
    omega_nw: np.ndarray
    omega: np.ndarray
    center: np.ndarray
    arm: np.ndarray
    corridor_h: np.ndarray
    corridor_v: np.ndarray
    theta: np.ndarray
    on_stair: np.ndarray
    n_unlabeled: int


def simple_region_masks(report: EventReport, window: Window | None = None) -> dict:
    """Site mask of the open enclosed region (diagonal model)."""
    if report.model != "simple":
        raise ValueError("simple_region_masks needs a diagonal-model report")
    x1 = report.crossings["x_axis"]
    x2 = report.crossings["y_axis"]
    if x1 is None or x2 is None:
        raise ValueError("region is undefined without both witnesses")
    win = Window(*report.window) if window is None else window
    g = report.region["band"]
    U, V = np.meshgrid(
        np.arange(win.x0, win.x1 + 1), np.arange(win.y0, win.y1 + 1), indexing="ij"
    )
    omega = (
        (U >= 1)
        & (V >= 1)
        & (np.minimum(U, V) <= g - 1)
        & (U - V <= x1 - 1)
        & (V - U <= x2 - 1)
    )
    return {"window": win, "omega": omega}


def full_region_masks(report: EventReport, window: Window | None = None) -> RegionMasks:
    """Site masks of the X-shaped region, corridors and band (staircase model)."""
    if report.model != "full":
        raise ValueError("full_region_masks needs a staircase-model report")
    wits = {r: report.witnesses.get(r) for r in STAIR_ROLES}
    if any(w is None for w in wits.values()):
        raise ValueError("region is undefined without all four staircase witnesses")
    wits = {r: _as_witness(w) for r, w in wits.items()}
    win = Window(*report.window) if window is None else window
    g = report.region["band"]
    h = report.region["cross_hi"]
    lam = math.floor(report.region["corridor_half"] + 1e-9)

    tables = {r: _StairTable(w) for r, w in wits.items()}
    U, V = np.meshgrid(
        np.arange(win.x0, win.x1 + 1), np.arange(win.y0, win.y1 + 1), indexing="ij"
    )
    a = U + V
    s = V - U
    d = U - V

    ok_l, c_l = tables["ne_lower"].lookup(a)
    ok_u, c_u = tables["ne_upper"].lookup(a)
    ok_wl, c_wl = tables["nw_lower"].lookup(s)
    ok_wu, c_wu = tables["nw_upper"].lookup(s)

    omega_ne = (
        ok_l & ok_u & (d < c_l) & (d > c_u)
        & (np.minimum(U, V) < g) & (np.maximum(U, V) > -g)
    )
    omega_nw = (
        ok_wl & ok_wu & (a > c_wl) & (a < c_wu)
        & (np.minimum(-U, V) < g) & (np.minimum(U, -V) < g)
    )
    center = omega_ne & omega_nw
    omega = omega_ne | omega_nw

    center_closed = (
        ok_l & ok_u & (d <= c_l) & (d >= c_u)
        & ok_wl & ok_wu & (a >= c_wl) & (a <= c_wu)
        & (np.minimum(U, V) <= g) & (np.maximum(U, V) >= -g)
        & (np.minimum(-U, V) <= g) & (np.minimum(U, -V) <= g)
    )
    corridor_h = center_closed & (np.abs(V) <= lam)
    corridor_v = center_closed & (np.abs(U) <= lam)

    arm = np.full(U.shape, -1, dtype=np.int8)
    arm[omega_ne & ok_wu & (a >= c_wu)] = 0  # ne
    arm[omega_nw & ok_u & (d <= c_u)] = 1  # nw
    arm[omega_ne & ok_wl & (a <= c_wl)] = 2  # sw
    arm[omega_nw & ok_l & (d >= c_l)] = 3  # se
    n_unlabeled = int((omega & ~center & (arm < 0)).sum())

    on_stair = np.zeros(U.shape, dtype=np.uint8)
    for bit, role in enumerate(STAIR_ROLES):
        on_stair |= tables[role].on(U, V).astype(np.uint8) << bit

    theta = _theta_ne(U, V, 2 * g, h) | _theta_nw(U, V, 2 * g, h)
    return RegionMasks(
        window=win,
        omega_ne=omega_ne,
        omega_nw=omega_nw,
        omega=omega,
        center=center,
        arm=arm,
        corridor_h=corridor_h,
        corridor_v=corridor_v,
        theta=theta,
        on_stair=on_stair,
        n_unlabeled=n_unlabeled,
    )


# ---------------------------------------------------------------------------
# Corridor checks
# ---------------------------------------------------------------------------


@dataclass
class CorridorReport:
    """Outcome of checking geodesics against a detected success's geometry."""

    model: str
    k: int
    window: tuple[int, int, int, int]
    n_targets: int
    n_checked: int
    n_skipped: int
    n_violations: int
    violations: list
    double_points: list
    notes: dict

    @property
    def ok(self) -> bool:
        return self.n_violations == 0

    def to_json(self, indent: int | None = None) -> str:
        payload = _py(
            {
                "model": self.model,
                "k": self.k,
                "window": tuple(self.window),
                "n_targets": self.n_targets,
                "n_checked": self.n_checked,
                "n_skipped": self.n_skipped,
                "n_violations": self.n_violations,
                "violations": self.violations,
                "double_points": self.double_points,
                "notes": self.notes,
            }
        )
        return json.dumps(payload, sort_keys=True, indent=indent,
                          separators=(",", ":") if indent is None else None)


def _flat_coords(win: Window):
    nx, ny = win.x1 - win.x0 + 1, win.y1 - win.y0 + 1
    idx = np.arange(nx * ny)
    return win.x0 + idx // ny, win.y0 + idx % ny


def corridor_check(field, report: EventReport, *, tree=None, targets=None,
                   max_targets: int | None = None, collar: int | None = None) -> CorridorReport:
    """Check geodesics from the origin against a detected success's geometry.

    ``field`` must be the cost field of the same environment over the same
    window as ``report`` (or a sub-window containing the region).  ``tree``
    is an exact origin-rooted geodesic tree over ``field`` (built on the fly
    when omitted).  Diagonal model: every first-quadrant target off the axes
    and outside the enclosed region must reach its goal via a geodesic that
    first runs along one axis to that axis's witness crossing.  Staircase
    model: walking each geodesic until it first leaves the X-shaped region
    and labeling the arm it leaves through, the leg up to the first site in
    that arm must stay inside the horizontal or the vertical corridor;
    geodesics that step from the center straight onto a witness staircase
    record a double-point choice.  ``targets`` narrows the checked target
    set; ``max_targets`` subsamples deterministically; ``collar`` (staircase
    model) skips targets within that distance of the window edge, where
    window-restricted geodesics may differ from unrestricted ones.
    """
    if report.model == "simple":
        return _corridor_simple(field, report, tree, targets, max_targets)
    return _corridor_full(field, report, tree, targets, max_targets, collar)


def _subsample(flats: np.ndarray, max_targets: int | None) -> np.ndarray:
    if max_targets is None or flats.size <= max_targets:
        return flats
    step = -(-flats.size // max_targets)
    return flats[::step]


def _corridor_simple(field, report, tree, targets, max_targets):
    win = field.window
    x1 = report.crossings["x_axis"]
    x2 = report.crossings["y_axis"]
    if x1 is None or x2 is None:
        raise ValueError("corridor check requires both witnesses")
    masks = simple_region_masks(report, win)
    omega_flat = masks["omega"].ravel()
    if tree is None:
        tree = geodesic_tree(field, (0, 0))
    xs, ys = _flat_coords(win)
    parent = tree.parent
    n = parent.size

    # Tree walk in distance order: bond costs are positive, so a parent
    # always settles strictly before its children.
    order = np.argsort(tree.distances().ravel(), kind="stable")

    a1 = np.zeros(n, dtype=bool)
    a2 = np.zeros(n, dtype=bool)
    good = np.zeros(n, dtype=bool)
    for i in order:
        p = parent[i]
        if p < 0:
            if xs[i] == 0 and ys[i] == 0:
                a1[i] = a2[i] = True
                good[i] = x1 == 0 or x2 == 0
            continue
        if good[p]:
            good[i] = True
            continue
        if a1[p] and ys[i] == 0 and xs[i] == xs[p] + 1:
            a1[i] = True
            if xs[i] >= x1:
                good[i] = True
        if a2[p] and xs[i] == 0 and ys[i] == ys[p] + 1:
            a2[i] = True
            if ys[i] >= x2:
                good[i] = True

    eligible = (xs >= 1) & (ys >= 1) & ~omega_flat
    if targets is not None:
        req = np.zeros(n, dtype=bool)
        for tx, ty in targets:
            req[(tx - win.x0) * (win.y1 - win.y0 + 1) + (ty - win.y0)] = True
        eligible &= req
    flats = _subsample(np.flatnonzero(eligible), max_targets)

    bad = flats[~good[flats]]
    violations = []
    for f in bad[:50]:
        path = tree.path_to(int(xs[f]), int(ys[f]))
        sites = path.sites
        off_axis = np.flatnonzero(~((sites[:, 1] == 0) | (sites[:, 0] == 0)))
        first_off = sites[off_axis[0]] if off_axis.size else sites[-1]
        violations.append(
            {
                "target": (int(xs[f]), int(ys[f])),
                "first_off_axis_site": (int(first_off[0]), int(first_off[1])),
                "n_path_sites": int(sites.shape[0]),
            }
        )
    return CorridorReport(
        model="simple",
        k=report.k,
        window=(win.x0, win.y0, win.x1, win.y1),
        n_targets=int(flats.size),
        n_checked=int(flats.size),
        n_skipped=0,
        n_violations=int(bad.size),
        violations=violations,
        double_points=[],
        notes={"x_axis": int(x1), "y_axis": int(x2)},
    )


def _corridor_full(field, report, tree, targets, max_targets, collar):
    win = field.window
    masks = full_region_masks(report, win)
    if collar is None:
        collar = max(4, math.ceil(report.region["line"]))
    if tree is None:
        tree = geodesic_tree(field, (0, 0))
    xs, ys = _flat_coords(win)
    ny = win.y1 - win.y0 + 1
    parent = tree.parent
    omega = masks.omega.ravel()
    arm = masks.arm.ravel()
    lam_h = masks.corridor_h.ravel()
    lam_v = masks.corridor_v.ravel()
    on_stair = masks.on_stair.ravel()

    origin = (0 - win.x0) * ny + (0 - win.y0)
    if not omega[origin]:
        raise ValueError("origin lies outside the region; is the report a success?")

    inner = (
        (xs >= win.x0 + collar) & (xs <= win.x1 - collar)
        & (ys >= win.y0 + collar) & (ys <= win.y1 - collar)
    )
    eligible = ~omega & inner
    n_skipped_collar = int((~inner & ~omega).sum())
    if targets is not None:
        req = np.zeros(parent.size, dtype=bool)
        for tx, ty in targets:
            req[(tx - win.x0) * ny + (ty - win.y0)] = True
        eligible &= req
    flats = _subsample(np.flatnonzero(eligible), max_targets)

    violations = []
    double_points = []
    n_viol = 0
    notes = {"collar": int(collar), "corner_fallbacks": 0, "arm_entry_off_side": 0}
    for f in flats:
        chain = []
        j = int(f)
        while j >= 0:
            chain.append(j)
            j = int(parent[j])
        chain.reverse()
        p_idx = next(i for i, c in enumerate(chain) if not omega[c])
        prev = chain[p_idx - 1]
        label = int(arm[prev])
        if label >= 0:
            t_idx = next(i for i, c in enumerate(chain[: p_idx]) if arm[c] == label)
            if not on_stair[chain[t_idx]]:
                notes["arm_entry_off_side"] += 1
            via = ARM_NAMES[label]
        else:
            bits = int(on_stair[chain[p_idx]])
            if bits:
                choice = next(b for b in range(4) if bits & (1 << b))
                via = STAIR_ROLES[choice]
                if bits & (bits - 1):  # more than one witness through p_x
                    double_points.append(
                        {
                            "target": (int(xs[f]), int(ys[f])),
                            "point": (int(xs[chain[p_idx]]), int(ys[chain[p_idx]])),
                            "choices": [STAIR_ROLES[b] for b in range(4) if bits & (1 << b)],
                            "chosen": via,
                        }
                    )
                t_idx = next(i for i, c in enumerate(chain[: p_idx + 1])
                             if on_stair[c] & (1 << choice))
            else:
                notes["corner_fallbacks"] += 1
                via = "corner"
                t_idx = p_idx
        seg = chain[: t_idx + 1]
        ok_h = all(lam_h[c] for c in seg)
        ok_v = ok_h or all(lam_v[c] for c in seg)
        if not (ok_h or ok_v):
            n_viol += 1
            if len(violations) < 50:
                bad_h = next(i for i, c in enumerate(seg) if not lam_h[c])
                bad_v = next(i for i, c in enumerate(seg) if not lam_v[c])
                i_bad = max(bad_h, bad_v)
                violations.append(
                    {
                        "target": (int(xs[f]), int(ys[f])),
                        "exit_site": (int(xs[chain[p_idx]]), int(ys[chain[p_idx]])),
                        "via": via,
                        "leg_sites": t_idx + 1,
                        "first_outside_both": (int(xs[seg[i_bad]]), int(ys[seg[i_bad]])),
                    }
                )
    return CorridorReport(
        model="full",
        k=report.k,
        window=(win.x0, win.y0, win.x1, win.y1),
        n_targets=int(flats.size),
        n_checked=int(flats.size),
        n_skipped=n_skipped_collar,
        n_violations=n_viol,
        violations=violations,
        double_points=double_points,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------


def success_census(params, seeds, k_values, *, cutoff: int | None = None,
                   max_sites: int = MAX_WINDOW_SITES) -> dict:
    """Per-scale detection frequencies over a family of seeds.

    Samples one environment per seed over the automatic event window and
    tallies every event flag (``true``/``false``/``skipped``).  The output
    is plain data, deterministic in ``(params, seeds, k_values)``.
    """
    ensure_valid(params)
    simple = isinstance(params, SimpleParams)
    flag_names = (
        ("crossing_interval", "region_clear", "success")
        if simple
        else ("crossing_interval", "region_clear", "straights_near",
              "crossing_budget", "slow_free", "success")
    )
    seeds = [int(s) for s in seeds]
    rows = []
    for k in k_values:
        win = (
            simple_event_window(params, k, max_sites=max_sites)
            if simple
            else full_event_window(params, k, max_sites=max_sites)
        )
        counts = {f: {"true": 0, "false": 0, "skipped": 0} for f in flag_names}
        for seed in seeds:
            env = sample_raw_env(params, seed, win, cutoff)
            rep = detect_simple_success(env, k) if simple else detect_full_success(env, k)
            for f in flag_names:
                v = rep.flags.get(f)
                counts[f]["skipped" if v is None else ("true" if v else "false")] += 1
        n = max(1, len(seeds))
        rows.append(
            {
                "k": int(k),
                "n_seeds": len(seeds),
                "window": (win.x0, win.y0, win.x1, win.y1),
                "counts": counts,
                "frequency": {f: counts[f]["true"] / n for f in flag_names},
            }
        )
    return {"model": params.model, "n_seeds": len(seeds), "rows": rows}
