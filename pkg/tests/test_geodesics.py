"""Geodesic engine: oracle equality, tree structure, counters, canonical paths."""

import io

import numpy as np
import pytest

from fastlanes.bondfield import classify, classify_env, simple_costs, simple_costs_env
from fastlanes.geodesics import (
    CanonicalCase,
    InaccessibleSiteError,
    LatticePath,
    brute_force_tau,
    busemann_estimate,
    canonical_path,
    directedness,
    distance_grid,
    geodesic_tree,
    path_counters,
    shortest_path,
)
from fastlanes.geometry import (
    AX_H,
    AX_V,
    HV_H,
    HV_V,
    ORIENT_NE,
    ORIENT_NW,
    START_H,
    START_V,
    Window,
    zigzag_sites,
)
from fastlanes.params import preset, with_overrides
from fastlanes.sampler import KIND_DIAG, KIND_HV, KIND_ZZ, HighwaySet, sample_raw_env
from fastlanes.thinning import thin

FULL = with_overrides(preset("full-a"), class_cutoff=2)
SIMPLE = preset("simple-events")


@pytest.fixture(scope="module")
def full_field():
    env = sample_raw_env(FULL, seed=11, window=Window.square(28))
    return env, classify_env(env, thin(env).final)


@pytest.fixture(scope="module")
def simple_field():
    env = sample_raw_env(SIMPLE, seed=5, window=Window.square(20))
    return simple_costs_env(env)


class TestShortestPath:
    def test_unit_weights_give_l1_distance(self):
        f = simple_costs(SIMPLE, HighwaySet.empty(), Window(0, 0, 4, 4))
        p = shortest_path(f, (0, 0), (3, 2))
        assert p.total_tau == 5.0
        assert p.n_bonds == 5

    def test_empty_simple_environment_is_l1(self):
        # Diagonal steps cost 3 > 2, so they never pay off.
        f = simple_costs(SIMPLE, HighwaySet.empty(), Window(-4, -4, 4, 4))
        for a, b in [((0, 0), (4, 3)), ((-2, -4), (3, 1)), ((4, -4), (-4, 4))]:
            p = shortest_path(f, a, b)
            assert p.total_tau == abs(b[0] - a[0]) + abs(b[1] - a[1])

    def test_matches_brute_force_full_model(self):
        for seed in range(8):
            env = sample_raw_env(FULL, seed=seed, window=Window(0, 0, 3, 3))
            f = classify_env(env, thin(env).final)
            p = shortest_path(f, (0, 0), (3, 2))
            assert p.total_tau == pytest.approx(brute_force_tau(f, (0, 0), (3, 2)), abs=1e-12)
            assert p.is_self_avoiding()

    def test_matches_brute_force_simple_model(self):
        for seed in range(8):
            env = sample_raw_env(SIMPLE, seed=seed, window=Window(0, 0, 3, 3))
            f = simple_costs_env(env)
            p = shortest_path(f, (0, 0), (3, 3))
            assert p.total_tau == pytest.approx(brute_force_tau(f, (0, 0), (3, 3)), abs=1e-12)

    def test_minimum_is_unique(self):
        # Exhaustively count self-avoiding paths attaining the optimum.
        env = sample_raw_env(FULL, seed=3, window=Window(0, 0, 2, 3))
        f = classify_env(env, thin(env).final)
        from fastlanes.geodesics import _neighbor_tables, _site_flat

        nbrs = _neighbor_tables(f)
        start = int(_site_flat(f.window, 0, 0))
        goal = int(_site_flat(f.window, 2, 3))
        best = shortest_path(f, (0, 0), (2, 3)).total_tau
        visited = np.zeros(12, dtype=bool)
        hits = [0]

        def walk(u, acc):
            if acc > best + 1e-12:
                return
            if u == goal:
                hits[0] += int(abs(acc - best) <= 1e-12)
                return
            visited[u] = True
            for off, rows in nbrs:
                r = rows[u]
                if r >= 0 and not visited[u + off]:
                    walk(u + off, acc + f.tau[r])
            visited[u] = False

        walk(start, 0.0)
        assert hits[0] == 1

    def test_degenerate_and_error_cases(self, full_field):
        _, f = full_field
        p = shortest_path(f, (2, 2), (2, 2))
        assert p.total_tau == 0.0 and p.n_bonds == 0
        with pytest.raises(ValueError):
            shortest_path(f, (0, 0), (10**6, 0))

    def test_simple_lower_bound(self, simple_field):
        # For 0 <= b <= a the passage time is at least sqrt(2)*b + (a-b).
        f = simple_field
        for a, b in [(7, 0), (6, 3), (5, 5), (9, 2)]:
            t = shortest_path(f, (0, 0), (a, b)).total_tau
            assert t >= np.sqrt(2.0) * b + (a - b) - 1e-12


class TestGeodesicTree:
    def test_tree_structure(self, full_field):
        _, f = full_field
        t = geodesic_tree(f, (0, 0))
        assert t.n_edges == t.n_sites - 1
        root_flat = np.flatnonzero(t.parent < 0)
        assert root_flat.size == 1
        assert (t.parent == root_flat[0]).sum() >= 1  # root degree

    def test_tree_paths_match_queries(self, full_field):
        _, f = full_field
        t = geodesic_tree(f, (0, 0))
        rng = np.random.default_rng(1)
        w = f.window
        for _ in range(6):
            x = int(rng.integers(w.x0, w.x1 + 1))
            y = int(rng.integers(w.y0, w.y1 + 1))
            p, q = t.path_to(x, y), shortest_path(f, (0, 0), (x, y))
            assert p.total_tau == q.total_tau
            assert np.array_equal(p.sites, q.sites)
            assert t.distance(x, y) == p.total_tau

    def test_subpath_property(self, full_field):
        _, f = full_field
        t = geodesic_tree(f, (3, -2))
        grid = t.distances()
        w = f.window
        for target in [(12, 9), (-10, -11), (-9, 13)]:
            p = t.path_to(*target)
            for i in range(1, p.sites.shape[0]):
                rows = p.bond_rows[:i]
                val = 0.1 * int(f.alpha_star[rows].sum()) + float(f.sigma[rows].sum())
                sx, sy = p.sites[i]
                assert val == pytest.approx(grid[sx - w.x0, sy - w.y0], abs=1e-9)

    def test_distance_grid_agrees_with_exact_engine(self, full_field):
        _, f = full_field
        t = geodesic_tree(f, (0, 0))
        dg = distance_grid(f, (0, 0))
        assert np.abs(dg - t.distances()).max() < 1e-9

    def test_simple_model_tree(self, simple_field):
        f = simple_field
        t = geodesic_tree(f, (0, 0))
        assert t.n_edges == t.n_sites - 1
        p = t.path_to(7, 7)
        assert p.total_tau == pytest.approx(shortest_path(f, (0, 0), (7, 7)).total_tau)
        dg = distance_grid(f, (0, 0))
        assert np.abs(dg - t.distances()).max() < 1e-9


class TestBusemann:
    RAY = [(8, 0), (10, 2), (12, 4)]

    def test_identity_is_zero(self, full_field):
        _, f = full_field
        val, seq = busemann_estimate(f, (1, 1), (1, 1), self.RAY)
        assert val == 0.0 and all(v == 0.0 for v in seq)

    def test_antisymmetry_exact(self, full_field):
        _, f = full_field
        v1, s1 = busemann_estimate(f, (0, 0), (2, 3), self.RAY)
        v2, s2 = busemann_estimate(f, (2, 3), (0, 0), self.RAY)
        assert v1 == -v2 and all(a == -b for a, b in zip(s1, s2))

    def test_cocycle_consistency(self, full_field):
        _, f = full_field
        vxy, _ = busemann_estimate(f, (0, 0), (2, 3), self.RAY)
        vyz, _ = busemann_estimate(f, (2, 3), (-1, 4), self.RAY)
        vxz, _ = busemann_estimate(f, (0, 0), (-1, 4), self.RAY)
        assert vxz == pytest.approx(vxy + vyz, abs=1e-10)


class TestDirectedness:
    def test_horizontal_ray(self, full_field):
        _, f = full_field
        sites = [(x, 0) for x in range(0, 12)]
        d = directedness(LatticePath.from_sites(f, sites))
        assert d["nearest_direction"] == "E"
        assert d["tail_deviation"] == 0.0

    def test_staircase_converges_to_diagonal(self, simple_field):
        sites = [(0, 0)]
        for t in range(1, 15):
            sites.append((t // 2 + t % 2, t // 2))
        d = directedness(LatticePath.from_sites(simple_field, sites))
        assert d["nearest_direction"] == "NE"
        assert d["tail_deviation"] < np.pi / 8

    def test_too_short(self, full_field):
        _, f = full_field
        with pytest.raises(ValueError):
            directedness(LatticePath.from_sites(f, [(0, 0)]))


def crossing_ingredients():
    ne = HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 2, -2, -2, 9, mark=0.5)
    nw = HighwaySet.build(KIND_ZZ, ORIENT_NW, START_H, 1, 3, -1, 7, mark=0.5)
    return ne, nw


class TestPathCounters:
    WINDOW = Window(-6, -6, 6, 6)

    def field_with(self, *stairs, straights=None):
        zz = HighwaySet.concat(list(stairs)) if stairs else HighwaySet.empty()
        hv = straights if straights is not None else HighwaySet.empty()
        return classify(FULL, 7, zz, hv, self.WINDOW), zz

    def test_no_zigzag_bonds(self):
        f, zz = self.field_with()
        p = LatticePath.from_sites(f, [(0, 0), (1, 0), (1, 1), (2, 1)])
        c = path_counters(f, p, zz)
        assert c.n_z == 0 and c.n_b == 3 and c.n_hi == 0 and c.d_gamma == 0
        assert c.n_h == 2 and c.n_v == 1

    def test_traversing_one_staircase(self):
        ne, _ = crossing_ingredients()
        f, zz = self.field_with(ne)
        sites = zigzag_sites(ORIENT_NE, START_V, -2, -2, 9)
        c = path_counters(f, LatticePath.from_sites(f, sites), zz)
        assert c.n_z == 9 and c.n_b == 0
        north, east = c.n_dir[0, 1], c.n_dir[0, 0]
        assert abs(north - east) <= 1
        assert c.n_hi == 1
        assert c.n_hi >= c.d_gamma

    def test_singleton_crossing_bond_defaults_northeast(self):
        ne, nw = crossing_ingredients()
        f, zz = self.field_with(ne, nw)
        # Eastward along y=1: the only zigzag bond hit is the shared crossing
        # bond, a singleton for both highways; the recorded convention
        # assigns it the N/E orientation, so only the N/E highway counts.
        p = LatticePath.from_sites(f, [(x, 1) for x in range(-2, 4)])
        c = path_counters(f, p, zz)
        assert c.n_z == 1
        assert c.n_dir[0, 0] == 1 and c.n_dir[1].sum() == 0
        assert c.n_hi == 1

    def test_two_highways_crossed(self):
        ne, _ = crossing_ingredients()
        ne2 = HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 1, 3, -1, 5, mark=0.5)
        f, zz = self.field_with(ne, ne2)
        # East along y=0 hits one horizontal bond of each staircase.
        p = LatticePath.from_sites(f, [(x, 0) for x in range(-2, 6)])
        c = path_counters(f, p, zz)
        assert c.n_z == 2
        assert c.n_hi == 2

    def test_geodesic_counters_consistent(self, full_field):
        env, f = full_field
        final = thin(env).final
        t = geodesic_tree(f, (0, 0))
        for target in [(11, 7), (-12, 5), (8, -11)]:
            p = t.path_to(*target)
            c = path_counters(f, p, final)
            assert c.n_z + c.n_b == p.n_bonds
            assert c.n_h + c.n_v == p.n_bonds
            assert c.n_dir.sum() == c.n_z
            assert c.n_hi >= c.d_gamma


class TestCanonicalPath:
    WINDOW = Window(-8, -8, 12, 12)

    def setup_field(self):
        # Horizontal straight at y=1 crossing a long N/E staircase; a second
        # vertical straight at x=6 bounds the accessible stretch.
        stair = HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 2, 0, 0, 20, mark=0.5)
        along = HighwaySet.build(KIND_HV, HV_H, START_V, 4, -8, 1, 16)
        blocking = HighwaySet.build(KIND_HV, HV_V, START_V, 4, 6, -8, 16)
        f = classify(FULL, 7, stair, HighwaySet.concat([along, blocking]), self.WINDOW)
        return f, stair, along, blocking

    def test_collinear(self, full_field):
        _, f = full_field
        p = canonical_path(f, None, (2, 3), (9, 3))
        assert p.n_bonds == 7
        assert (p.sites[:, 1] == 3).all()
        p = canonical_path(f, None, (4, 5), (4, -2))
        assert p.n_bonds == 7
        with pytest.raises(ValueError):
            canonical_path(f, None, (0, 0), (3, 2))

    def test_follows_straight_then_staircase(self):
        f, stair, along, blocking = self.setup_field()
        case = CanonicalCase(along=along, staircase=stair, blocking=None)
        p = canonical_path(f, case, (-6, 1), (4, 5))
        assert p.is_self_avoiding()
        assert tuple(p.sites[0]) == (-6, 1) and tuple(p.sites[-1]) == (4, 5)
        # The walk is east along y=1, then a 45-degree turn onto the
        # staircase: all bonds lie in the two witness highways.
        names = p.step_names
        turn = names.index("N")
        assert set(names[:turn]) == {"E"}
        assert set(names[turn:]) <= {"N", "E"}
        expected = f.tau[p.bond_rows].sum()
        assert p.total_tau == pytest.approx(expected, abs=1e-12)

    def test_inaccessible_stretch_raises(self):
        f, stair, along, blocking = self.setup_field()
        case = CanonicalCase(along=along, staircase=stair, blocking=blocking)
        sites = zigzag_sites(ORIENT_NE, START_V, 0, 0, 20)
        # The staircase crosses y=1 around x=0 and x=6 (the blocking line);
        # a site strictly between those crossings is inaccessible.
        with pytest.raises(InaccessibleSiteError) as err:
            canonical_path(f, case, (-6, 1), (3, 4))
        assert err.value.b == (3, 4)
        lo, hi = err.value.lo, err.value.hi
        assert (tuple(lo) in map(tuple, sites)) and (tuple(hi) in map(tuple, sites))
        # Beyond the blocking crossing, sites are accessible again.
        p = canonical_path(f, case, (-6, 1), (8, 9))
        assert tuple(p.sites[-1]) == (8, 9)

    def test_bad_inputs(self):
        f, stair, along, _ = self.setup_field()
        case = CanonicalCase(along=along, staircase=stair)
        with pytest.raises(ValueError):
            canonical_path(f, case, (-6, 2), (4, 5))  # a off the line
        with pytest.raises(ValueError):
            canonical_path(f, case, (-6, 1), (5, 11))  # b off the staircase


class TestLatticePath:
    def test_from_sites_validates_steps(self, full_field):
        _, f = full_field
        with pytest.raises(ValueError):
            LatticePath.from_sites(f, [(0, 0), (2, 0)])

    def test_exports(self, full_field):
        _, f = full_field
        p = shortest_path(f, (0, 0), (4, 2))
        buf = io.StringIO()
        p.to_csv(buf)
        assert buf.getvalue().splitlines()[0] == "x,y"
        assert len(buf.getvalue().splitlines()) == p.sites.shape[0] + 1
        assert len(p.step_names) == p.n_bonds

    def test_simple_model_diagonal_steps(self, simple_field):
        f = simple_field
        p = LatticePath.from_sites(f, [(0, 0), (1, 1), (2, 0), (1, 0)])
        assert p.step_names == ["NE", "SE", "W"]
        assert p.total_tau == pytest.approx(f.tau[p.bond_rows].sum())
