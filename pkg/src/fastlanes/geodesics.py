"""Exact shortest paths, geodesic trees, and path diagnostics over a field.

The engine works on a materialized cost field (:class:`~fastlanes.bondfield.
BondField` for the 4-neighbor model, :class:`~fastlanes.bondfield.SimpleField`
for the 8-neighbor one) and keeps distances exact: every distance is carried
as a pair ``(c1, c2)`` where ``c1`` accumulates the integer cost component
(tenths for the full model, unit steps for the simple one) without any float
drift, and ``c2`` the companion component (the continuous slowdown sigma, or
the sqrt(2)-multiplied diagonal part).  Comparisons use the exact combined
value ``w1*c1 + w2*c2``; the continuous marks make ties measure-zero, so the
minimizing path is unique and reruns are bit-identical.

Provided operations:

* :func:`shortest_path` / :func:`geodesic_tree` — label-setting runs with
  lazy-deletion heaps (pure Python; meant for desk-scale windows);
* :func:`distance_grid` — the same metric through ``scipy.sparse.csgraph``
  for bulk shape statistics (float accumulation, used only where tolerances
  are percentage-scale);
* :func:`brute_force_tau` — exhaustive self-avoiding enumeration, the oracle
  for tiny windows;
* :func:`path_counters` — zigzag/boundary step bookkeeping of a path,
  including per-orientation directional counts, the highway-intersection
  count ``n_hi`` and its lower bound ``d_gamma``;
* :func:`busemann_estimate` — difference-of-distance estimates along a ray;
* :func:`directedness` — tail direction statistics of a path;
* :func:`canonical_path` — the highway-following connector between a straight
  highway and a staircase, with accessibility checking.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .bondfield import BondField, SimpleField
from .geometry import AX_H, AX_V, ORIENT_NE, HV_H, Window, canonical_bond, zigzag_sites
from .sampler import KIND_HV, KIND_ZZ, HighwaySet, bonds_flat

__all__ = [
    "STEP_NAMES",
    "LatticePath",
    "GeodesicTree",
    "PathCounters",
    "CanonicalCase",
    "InaccessibleSiteError",
    "shortest_path",
    "geodesic_tree",
    "distance_grid",
    "brute_force_tau",
    "path_counters",
    "busemann_estimate",
    "directedness",
    "canonical_path",
]

# Step codes by (dx, dy); the four diagonal steps exist only on simple fields.
_STEPS = {
    (1, 0): 0,
    (0, 1): 1,
    (-1, 0): 2,
    (0, -1): 3,
    (1, 1): 4,
    (-1, 1): 5,
    (-1, -1): 6,
    (1, -1): 7,
}
STEP_NAMES = ("E", "N", "W", "S", "NE", "NW", "SW", "SE")


def _weights(field) -> tuple[float, float]:
    """(w1, w2) with bond value = w1*c1 + w2*c2 for the field's cost pair."""
    if isinstance(field, BondField):
        return 0.1, 1.0
    if isinstance(field, SimpleField):
        return 1.0, float(np.sqrt(2.0))
    raise TypeError(f"not a cost field: {type(field).__name__}")


def _cost_pair(field) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(field, BondField):
        return field.alpha_star, field.sigma
    return field.units, field.rad2


def _site_grid(window: Window) -> tuple[int, int]:
    return window.x1 - window.x0 + 1, window.y1 - window.y0 + 1


def _site_flat(window: Window, x, y) -> np.ndarray:
    nx, ny = _site_grid(window)
    ix = np.asarray(x, dtype=np.int64) - window.x0
    iy = np.asarray(y, dtype=np.int64) - window.y0
    if ((ix < 0) | (ix >= nx) | (iy < 0) | (iy >= ny)).any():
        raise ValueError("site outside the window")
    return ix * ny + iy


def _neighbor_tables(field) -> list[tuple[int, np.ndarray]]:
    """Per-direction (flat-site offset, bond-row grid) tables.

    Entry d gives, for every flat site index, the field row of the bond
    toward direction d (-1 where that step leaves the window).  Built through
    ``field.index_of`` so the layout is taken from the field itself.
    """
    w = field.window
    nx, ny = _site_grid(w)
    xs = np.arange(w.x0, w.x1 + 1)
    ys = np.arange(w.y0, w.y1 + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    simple = isinstance(field, SimpleField)
    dirs = list(_STEPS)[: 8 if simple else 4]
    tables = []
    for dx, dy in dirs:
        ok = np.ones((nx, ny), dtype=bool)
        if dx > 0:
            ok[nx - 1, :] = False
        if dx < 0:
            ok[0, :] = False
        if dy > 0:
            ok[:, ny - 1] = False
        if dy < 0:
            ok[:, 0] = False
        rows = np.full((nx, ny), -1, dtype=np.int64)
        sx, sy = gx[ok], gy[ok]
        # Canonical key of the step bond, per direction.
        if dy == 0:
            axis, bx, by = AX_H, sx + min(dx, 0), sy
        elif dx == 0:
            axis, bx, by = AX_V, sx, sy + min(dy, 0)
        elif dx == dy:
            axis, bx, by = 2, sx + min(dx, 0), sy + min(dy, 0)
        elif (dx, dy) == (1, -1):
            axis, bx, by = 3, sx, sy
        else:  # (-1, 1)
            axis, bx, by = 3, sx - 1, sy + 1
        rows[ok] = field.index_of(np.full(sx.size, axis), bx, by)
        tables.append((dx * ny + dy, rows.ravel()))
    return tables


@dataclass(frozen=True)
class LatticePath:
    """A lattice path with its exact cost pair.

    ``sites`` is the ordered (n+1, 2) site array; ``bond_rows`` the field
    rows of the traversed bonds; ``c1``/``c2`` the exact accumulated cost
    components (see module docstring).
    """

    sites: np.ndarray
    bond_rows: np.ndarray
    c1: int
    c2: float
    w1: float
    w2: float

    @property
    def n_bonds(self) -> int:
        return self.bond_rows.size

    @property
    def total_tau(self) -> float:
        return self.w1 * self.c1 + self.w2 * self.c2

    @property
    def steps(self) -> np.ndarray:
        """int8 step codes; STEP_NAMES[code] gives E/N/W/S/NE/NW/SW/SE."""
        d = np.diff(self.sites, axis=0)
        return np.array([_STEPS[(int(dx), int(dy))] for dx, dy in d], dtype=np.int8)

    @property
    def step_names(self) -> list[str]:
        return [STEP_NAMES[s] for s in self.steps]

    def is_self_avoiding(self) -> bool:
        return len({(int(x), int(y)) for x, y in self.sites}) == self.sites.shape[0]

    @classmethod
    def from_sites(cls, field, sites) -> "LatticePath":
        """Build a path from an explicit site sequence, validating steps."""
        sites = np.asarray(sites, dtype=np.int64).reshape(-1, 2)
        if sites.shape[0] == 0:
            raise ValueError("empty site list")
        axes = np.empty(sites.shape[0] - 1, dtype=np.int64)
        bx = np.empty_like(axes)
        by = np.empty_like(axes)
        for i in range(sites.shape[0] - 1):
            axes[i], bx[i], by[i] = canonical_bond(*sites[i], *sites[i + 1])
        rows = field.index_of(axes, bx, by) if axes.size else np.empty(0, dtype=np.int64)
        ca, cb = _cost_pair(field)
        w1, w2 = _weights(field)
        return cls(
            sites=sites,
            bond_rows=rows,
            c1=int(ca[rows].sum()),
            c2=float(cb[rows].sum()),
            w1=w1,
            w2=w2,
        )

    def to_csv(self, fp) -> None:
        fp.write("x,y\n")
        for x, y in self.sites:
            fp.write(f"{int(x)},{int(y)}\n")


@dataclass(frozen=True)
class GeodesicTree:
    """Single-source geodesic tree over a window.

    ``parent`` holds the flat site index of each site's tree parent (-1 at
    the root); ``c1``/``c2`` the exact distance pair per site.  All sites of
    a window are reachable, so the parent map always forms a spanning tree.
    """

    field: object
    root: tuple[int, int]
    parent: np.ndarray
    parent_bond: np.ndarray
    c1: np.ndarray
    c2: np.ndarray

    @property
    def window(self) -> Window:
        return self.field.window

    @property
    def n_sites(self) -> int:
        return self.parent.size

    @property
    def n_edges(self) -> int:
        return int((self.parent >= 0).sum())

    def distance(self, x: int, y: int) -> float:
        i = int(_site_flat(self.window, x, y))
        w1, w2 = _weights(self.field)
        return w1 * float(self.c1[i]) + w2 * float(self.c2[i])

    def distance_pair(self, x: int, y: int) -> tuple[int, float]:
        i = int(_site_flat(self.window, x, y))
        return int(self.c1[i]), float(self.c2[i])

    def path_to(self, x: int, y: int) -> LatticePath:
        """The unique tree path from the root to (x, y)."""
        w = self.window
        _, ny = _site_grid(w)
        i = int(_site_flat(w, x, y))
        chain = [i]
        while self.parent[chain[-1]] >= 0:
            chain.append(int(self.parent[chain[-1]]))
        chain.reverse()
        sites = np.array([(w.x0 + j // ny, w.y0 + j % ny) for j in chain], dtype=np.int64)
        rows = np.array([int(self.parent_bond[j]) for j in chain[1:]], dtype=np.int64)
        ca, cb = _cost_pair(self.field)
        w1, w2 = _weights(self.field)
        return LatticePath(
            sites=sites,
            bond_rows=rows,
            c1=int(ca[rows].sum()),
            c2=float(cb[rows].sum()),
            w1=w1,
            w2=w2,
        )

    def distances(self) -> np.ndarray:
        """Float distance map as an (nx, ny) grid."""
        w1, w2 = _weights(self.field)
        nx, ny = _site_grid(self.window)
        return (w1 * self.c1 + w2 * self.c2).reshape(nx, ny)


def _run(field, source: tuple[int, int], targets=None):
    """Label-setting run from one source; returns (parent, parent_bond, c1, c2).

    Exact: priorities are recomputed as w1*c1 + w2*c2 from the accumulated
    pair at every push, never by adding float increments to float totals.
    """
    w = field.window
    nx, ny = _site_grid(w)
    n = nx * ny
    w1, w2 = _weights(field)
    ca, cb = _cost_pair(field)
    nbrs = _neighbor_tables(field)

    c1 = np.zeros(n, dtype=np.int64)
    c2 = np.zeros(n, dtype=np.float64)
    best = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    parent_bond = np.full(n, -1, dtype=np.int64)
    settled = np.zeros(n, dtype=bool)

    s = int(_site_flat(w, *source))
    best[s] = 0.0
    heap = [(0.0, s, 0, 0.0)]
    remaining = None
    if targets is not None:
        tset = np.zeros(n, dtype=bool)
        tset[np.asarray(targets, dtype=np.int64)] = True
        remaining = int(tset.sum())

    while heap:
        val, u, uc1, uc2 = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        c1[u], c2[u] = uc1, uc2
        if remaining is not None and tset[u]:
            remaining -= 1
            if remaining == 0:
                break
        for off, rows in nbrs:
            r = rows[u]
            if r < 0:
                continue
            v = u + off
            if settled[v]:
                continue
            vc1 = uc1 + int(ca[r])
            vc2 = uc2 + float(cb[r])
            nv = w1 * vc1 + w2 * vc2
            if nv < best[v]:
                best[v] = nv
                parent[v] = u
                parent_bond[v] = r
                heapq.heappush(heap, (nv, v, vc1, vc2))
    return parent, parent_bond, c1, c2, settled


def geodesic_tree(field, root: tuple[int, int]) -> GeodesicTree:
    """The tree of geodesics from ``root`` to every site of the window."""
    parent, parent_bond, c1, c2, _ = _run(field, root)
    return GeodesicTree(
        field=field, root=(int(root[0]), int(root[1])), parent=parent, parent_bond=parent_bond, c1=c1, c2=c2
    )


def shortest_path(field, a: tuple[int, int], b: tuple[int, int]) -> LatticePath:
    """The unique minimizing path from a to b (both in the field's window)."""
    w = field.window
    tb = int(_site_flat(w, *b))
    parent, parent_bond, c1, c2, settled = _run(field, a, targets=[tb])
    if not settled[tb]:
        raise ValueError(f"target {tuple(b)} unreachable from {tuple(a)}")
    tree = GeodesicTree(
        field=field, root=(int(a[0]), int(a[1])), parent=parent, parent_bond=parent_bond, c1=c1, c2=c2
    )
    return tree.path_to(*b)


def distance_grid(field, root: tuple[int, int]) -> np.ndarray:
    """Float distance map from root over the window, via compiled Dijkstra.

    Same metric as :func:`geodesic_tree` but accumulated in float64; meant
    for bulk statistics where percent-scale tolerances apply.  Returns an
    (nx, ny) grid indexed by (x - x0, y - y0).
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra as _dijkstra

    w = field.window
    nx, ny = _site_grid(w)
    n = nx * ny
    heads, tails, costs = [], [], []
    for off, rows in _neighbor_tables(field):
        src = np.flatnonzero(rows >= 0)
        heads.append(src)
        tails.append(src + off)
        costs.append(field.tau[rows[src]])
    g = csr_matrix(
        (np.concatenate(costs), (np.concatenate(heads), np.concatenate(tails))), shape=(n, n)
    )
    s = int(_site_flat(w, *root))
    return _dijkstra(g, indices=s, directed=True).reshape(nx, ny)


def brute_force_tau(field, a: tuple[int, int], b: tuple[int, int], max_sites: int = 36) -> float:
    """Minimum path value by exhaustive self-avoiding enumeration.

    Oracle for tiny windows; refuses windows larger than ``max_sites``.
    """
    w = field.window
    nx, ny = _site_grid(w)
    if nx * ny > max_sites:
        raise ValueError(f"window has {nx * ny} sites; oracle limit is {max_sites}")
    w1, w2 = _weights(field)
    ca, cb = _cost_pair(field)
    nbrs = _neighbor_tables(field)
    start = int(_site_flat(w, *a))
    goal = int(_site_flat(w, *b))
    visited = np.zeros(nx * ny, dtype=bool)
    best = [np.inf]

    def walk(u: int, uc1: int, uc2: float) -> None:
        val = w1 * uc1 + w2 * uc2
        if val >= best[0]:
            return
        if u == goal:
            best[0] = val
            return
        visited[u] = True
        for off, rows in nbrs:
            r = rows[u]
            if r >= 0 and not visited[u + off]:
                walk(u + off, uc1 + int(ca[r]), uc2 + float(cb[r]))
        visited[u] = False

    walk(start, 0, 0.0)
    return float(best[0])


@dataclass(frozen=True)
class PathCounters:
    """Step bookkeeping of one path over a full-model field.

    ``n_dir[o, d]`` counts zigzag bonds of assigned orientation o (0 N/E-
    diagonal staircases, 1 N/W) traversed in direction d (STEP_NAMES order
    E, N, W, S).  ``n_hi`` is the number of staircase highways the path
    intersects non-redundantly; ``d_gamma`` its direction-imbalance lower
    bound |E-N| + |W-S| (first orientation) + |E-S| + |W-N| (second).
    """

    n_bonds: int
    n_z: int
    n_b: int
    n_h: int
    n_v: int
    n_dir: np.ndarray
    n_hi: int

    @property
    def d_gamma(self) -> int:
        ne, nw = self.n_dir[0], self.n_dir[1]
        return int(
            abs(ne[0] - ne[1]) + abs(ne[2] - ne[3]) + abs(nw[0] - nw[3]) + abs(nw[2] - nw[1])
        )


def _orientation_flags(path: LatticePath, staircases: HighwaySet):
    """(in_ne, in_nw, highway_hits) per path bond, from the staircase set.

    ``highway_hits`` maps staircase row -> indices of path bonds it contains.
    """
    from .bondfield import _bond_key  # shared composite keying

    n = path.n_bonds
    d = np.diff(path.sites, axis=0)
    horiz = d[:, 1] == 0
    bx = np.minimum(path.sites[:-1, 0], path.sites[1:, 0])
    by = np.minimum(path.sites[:-1, 1], path.sites[1:, 1])
    pkeys = _bond_key(np.where(horiz, AX_H, AX_V), bx, by)

    in_ne = np.zeros(n, dtype=bool)
    in_nw = np.zeros(n, dtype=bool)
    hits: dict[int, np.ndarray] = {}
    if staircases.n:
        srows, saxis, sx, sy = bonds_flat(staircases)
        skeys = _bond_key(saxis, sx, sy)
        order = np.argsort(pkeys, kind="stable")
        sorted_p = pkeys[order]
        pos = np.searchsorted(sorted_p, skeys)
        ok = (pos < n) & (sorted_p[np.minimum(pos, n - 1)] == skeys)
        for j in np.flatnonzero(ok):
            i = int(order[pos[j]])
            row = int(srows[j])
            if staircases.orient[row] == ORIENT_NE:
                in_ne[i] = True
            else:
                in_nw[i] = True
            hits.setdefault(row, []).append(i)
        hits = {r: np.unique(v) for r, v in hits.items()}
    return in_ne, in_nw, hits


def path_counters(field: BondField, path: LatticePath, staircases: HighwaySet) -> PathCounters:
    """Count zigzag/boundary/direction statistics of a path.

    ``staircases`` must be the surviving staircase set the field was built
    from: orientation assignment and the highway-intersection count need
    highway identities, which the per-bond field does not carry.  A bond
    lying in staircases of both orientations (the crossing bond) inherits
    the orientation of its path-neighbor when they share a highway segment;
    an isolated such bond counts as N/E by convention.
    """
    if not isinstance(field, BondField):
        raise TypeError("path counters apply to full-model fields")
    steps = path.steps
    n = path.n_bonds
    in_ne, in_nw, hits = _orientation_flags(path, staircases)
    zig = in_ne | in_nw

    # Per-bond orientation: unambiguous where exactly one flag is set;
    # both-orientation bonds take a neighbor's orientation (same component
    # segment), defaulting to N/E when isolated.
    orient = np.full(n, -1, dtype=np.int64)
    orient[in_ne & ~in_nw] = 0
    orient[in_nw & ~in_ne] = 1
    amb = np.flatnonzero(in_ne & in_nw)
    for i in amb:
        if i > 0 and orient[i - 1] >= 0 and zig[i - 1]:
            orient[i] = orient[i - 1]
        elif i + 1 < n and orient[i + 1] >= 0 and zig[i + 1]:
            orient[i] = orient[i + 1]
        else:
            orient[i] = 0

    n_dir = np.zeros((2, 4), dtype=np.int64)
    for o in (0, 1):
        for dcode in range(4):
            n_dir[o, dcode] = int(((orient == o) & (steps == dcode)).sum())

    # Non-redundant highway intersections: multi-bond intersections always
    # count; single-bond ones only when the highway's orientation matches
    # the bond's assigned one.
    n_hi = 0
    for row, idx in hits.items():
        if idx.size >= 2:
            n_hi += 1
        else:
            o = 0 if staircases.orient[row] == ORIENT_NE else 1
            if orient[idx[0]] == o:
                n_hi += 1

    horiz = (steps == 0) | (steps == 2)
    return PathCounters(
        n_bonds=n,
        n_z=int(zig.sum()),
        n_b=int(n - zig.sum()),
        n_h=int(horiz.sum()),
        n_v=int(n - horiz.sum()),
        n_dir=n_dir,
        n_hi=n_hi,
    )


def busemann_estimate(field, x: tuple[int, int], y: tuple[int, int], ray) -> tuple[float, list[float]]:
    """T(x, r_n) - T(y, r_n) along the ray; returns (last value, all values).

    One exact run from each of x and y; differences are computed on the
    exact pairs, so the antisymmetry and cocycle identities hold to the last
    bit at every ray point.
    """
    ray = [tuple(map(int, r)) for r in ray]
    w = field.window
    w1, w2 = _weights(field)
    flats = [int(_site_flat(w, *r)) for r in ray]
    _, _, xc1, xc2, _ = _run(field, x, targets=flats)
    _, _, yc1, yc2, _ = _run(field, y, targets=flats)
    values = [
        w1 * int(xc1[f] - yc1[f]) + w2 * float(xc2[f] - yc2[f])
        for f in flats
    ]
    return values[-1], values


def directedness(path: LatticePath) -> dict:
    """Tail direction statistics of a path.

    Returns the running unit vectors of the displacement from the start, the
    index of the nearest of the 8 canonical directions at the endpoint, and
    the maximum angular deviation from that direction over the tail (second
    half) of the path.
    """
    if path.sites.shape[0] < 2:
        raise ValueError("path too short for direction statistics")
    disp = path.sites[1:] - path.sites[0]
    norms = np.hypot(disp[:, 0], disp[:, 1])
    unit = disp / np.maximum(norms, 1e-300)[:, None]
    ang = np.arctan2(disp[:, 1], disp[:, 0])
    canon = np.arange(8) * (np.pi / 4)

    def circdist(a, b):
        return np.abs((a - b + np.pi) % (2 * np.pi) - np.pi)

    nearest = int(np.argmin(circdist(ang[-1], canon)))
    tail = ang[ang.size // 2 :]
    return {
        "unit_vectors": unit,
        "nearest_direction": STEP_NAMES[[0, 4, 1, 5, 2, 6, 3, 7][nearest]],
        "tail_deviation": float(circdist(tail, canon[nearest]).max()),
    }


class InaccessibleSiteError(ValueError):
    """Raised when a canonical-path target lies on the blocked stretch."""

    def __init__(self, b, lo, hi):
        self.b, self.lo, self.hi = tuple(b), tuple(lo), tuple(hi)
        super().__init__(
            f"site {self.b} is inaccessible: it lies strictly between the "
            f"crossing sites {self.lo} and {self.hi}"
        )


@dataclass(frozen=True)
class CanonicalCase:
    """Witness geometry for a canonical path.

    ``along`` is the straight highway carrying the start site; ``staircase``
    the zigzag highway to follow after the 45-degree turn; ``blocking``
    (optional) the opposite straight highway whose crossing bounds the
    inaccessible stretch of the staircase.
    """

    along: HighwaySet
    staircase: HighwaySet
    blocking: HighwaySet | None = None


def _staircase_site_list(h: HighwaySet) -> np.ndarray:
    return zigzag_sites(
        int(h.orient[0]), int(h.start[0]), int(h.ax[0]), int(h.ay[0]), int(h.length[0])
    )


def _line_of(j: HighwaySet) -> tuple[int, int]:
    """(axis, coordinate) of the straight highway's carrying line."""
    if int(j.kind[0]) != KIND_HV:
        raise ValueError("straight-highway witness expected")
    if int(j.orient[0]) == HV_H:
        return AX_H, int(j.ay[0])
    return AX_V, int(j.ax[0])


def _crossing_index(sites: np.ndarray, axis: int, coord: int) -> np.ndarray:
    """Indices of staircase sites on the given line, in path order."""
    on = sites[:, 1] == coord if axis == AX_H else sites[:, 0] == coord
    return np.flatnonzero(on)


def canonical_path(field, case: CanonicalCase, a: tuple[int, int], b: tuple[int, int]) -> LatticePath:
    """The canonical connector from ``a`` to ``b``.

    When ``case`` is None, a and b must share a line and the path follows
    it.  Otherwise a must lie on the carrying line of ``case.along``; the
    path follows that line to the staircase, turns 45 degrees, and follows
    the staircase to b.  If ``case.blocking`` is given, sites strictly
    between the two straight-highway crossings are inaccessible and raise
    :class:`InaccessibleSiteError` naming the stretch.
    """
    ax_, ay_ = int(a[0]), int(a[1])
    bx_, by_ = int(b[0]), int(b[1])
    if case is None:
        if ax_ != bx_ and ay_ != by_:
            raise ValueError("sites share no horizontal or vertical line")
        if ax_ == bx_:
            ys = np.arange(ay_, by_ + (1 if by_ >= ay_ else -1), 1 if by_ >= ay_ else -1)
            sites = np.stack([np.full(ys.size, ax_), ys], axis=1)
        else:
            xs = np.arange(ax_, bx_ + (1 if bx_ >= ax_ else -1), 1 if bx_ >= ax_ else -1)
            sites = np.stack([xs, np.full(xs.size, ay_)], axis=1)
        return LatticePath.from_sites(field, sites)

    if case.staircase.n != 1 or case.along.n != 1:
        raise ValueError("canonical case wants single-row witnesses")
    if int(case.staircase.kind[0]) != KIND_ZZ:
        raise ValueError("staircase witness expected")
    sites = _staircase_site_list(case.staircase)
    axis, coord = _line_of(case.along)
    if (axis == AX_H and ay_ != coord) or (axis == AX_V and ax_ != coord):
        raise ValueError("start site is not on the straight highway's line")

    on_line = _crossing_index(sites, axis, coord)
    if on_line.size == 0:
        raise ValueError("the straight highway does not meet the staircase")
    idx_b = np.flatnonzero((sites[:, 0] == bx_) & (sites[:, 1] == by_))
    if idx_b.size == 0:
        raise ValueError(f"site {tuple(b)} is not on the staircase")
    ib = int(idx_b[0])

    if case.blocking is not None:
        baxis, bcoord = _line_of(case.blocking)
        blk = _crossing_index(sites, baxis, bcoord)
        if blk.size:
            lo = min(int(on_line.max()), int(blk.max()))
            hi = max(int(on_line.min()), int(blk.min()))
            if lo < ib < hi:
                raise InaccessibleSiteError(b, sites[lo], sites[hi])

    # Junction: the staircase site on the line nearest to a along the line.
    run = 0 if axis == AX_H else 1
    dist_along = np.abs(sites[on_line, run] - (ax_ if axis == AX_H else ay_))
    ij = int(on_line[np.argmin(dist_along)])
    jx, jy = int(sites[ij, 0]), int(sites[ij, 1])

    if axis == AX_H:
        xs = np.arange(ax_, jx + (1 if jx >= ax_ else -1), 1 if jx >= ax_ else -1)
        seg1 = np.stack([xs, np.full(xs.size, coord)], axis=1)
    else:
        ys = np.arange(ay_, jy + (1 if jy >= ay_ else -1), 1 if jy >= ay_ else -1)
        seg1 = np.stack([np.full(ys.size, coord), ys], axis=1)
    seg2 = sites[ij : ib + 1] if ib >= ij else sites[ib : ij + 1][::-1]
    full = np.concatenate([seg1, seg2[1:]], axis=0)
    path = LatticePath.from_sites(field, full)
    if not path.is_self_avoiding():
        raise ValueError("canonical path self-intersects in this geometry")
    return path
