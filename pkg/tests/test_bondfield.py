"""Bond classification and cost tables against hand-worked configurations."""

import io

import numpy as np
import pytest

from fastlanes.bondfield import (
    T_BACKROAD,
    T_CROSSING_ADJ,
    T_DOUBLY_TERMINAL,
    T_ENTRY_EXIT,
    T_HV_ONLY,
    T_INTERSECTION,
    T_MEETING,
    T_NORMAL_BOUNDARY,
    T_NORMAL_ZZ,
    T_SINGLY_TERMINAL,
    T_SKIMMING,
    BondField,
    classify,
    classify_env,
    hv_alpha_sums,
    simple_costs,
    simple_costs_env,
    window_bonds,
)
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
)
from fastlanes.params import preset, with_overrides
from fastlanes.sampler import (
    KIND_DIAG,
    KIND_HV,
    KIND_ZZ,
    HighwaySet,
    sample_raw_env,
    xi_marks,
)
from fastlanes.thinning import thin

FULL = preset("full-a")
SIMPLE = preset("simple-events")
WINDOW = Window(-6, -6, 6, 6)


def crossing_config():
    """Two staircases fully crossing at the bond (0,1)-(1,1), plus straights.

    The N/E staircase runs (-2,-2) .. (2,3) (class 2), the N/W one
    (3,-1) .. (-1,2) (class 1).  Straight highways: vertical along x=0,
    horizontal along y=1 (through the crossing bond) and y=0 (through both
    staircases' fast bonds).
    """
    zz = HighwaySet.concat(
        [
            HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 2, -2, -2, 9, mark=0.5),
            HighwaySet.build(KIND_ZZ, ORIENT_NW, START_H, 1, 3, -1, 7, mark=0.5),
        ]
    )
    hv = HighwaySet.concat(
        [
            HighwaySet.build(KIND_HV, HV_V, START_V, 3, 0, -3, 7),
            HighwaySet.build(KIND_HV, HV_H, START_V, 3, -3, 1, 6),
            HighwaySet.build(KIND_HV, HV_H, START_V, 4, -4, 0, 8),
        ]
    )
    return zz, hv


@pytest.fixture(scope="module")
def crossing_field() -> BondField:
    zz, hv = crossing_config()
    return classify(FULL, 7, zz, hv, WINDOW)


def bond_at(field: BondField, axis, x, y):
    return int(field.index_of([axis], [x], [y])[0])


class TestCrossingTaxonomy:
    @pytest.mark.parametrize(
        "axis,x,y,expected",
        [
            (AX_H, 0, 1, T_INTERSECTION),
            (AX_V, 0, 0, T_MEETING),
            (AX_V, 0, 1, T_MEETING),
            (AX_V, 1, 0, T_MEETING),
            (AX_V, 1, 1, T_MEETING),
            (AX_H, 0, 0, T_ENTRY_EXIT),
            (AX_H, 0, 2, T_ENTRY_EXIT),
            (AX_H, -1, 1, T_CROSSING_ADJ),
            (AX_H, 1, 1, T_CROSSING_ADJ),
            (AX_H, -1, 0, T_NORMAL_ZZ),
            (AX_H, 1, 0, T_NORMAL_ZZ),
            (AX_V, -2, -2, T_SINGLY_TERMINAL),
            (AX_V, 2, 2, T_SINGLY_TERMINAL),
            (AX_H, 2, -1, T_SINGLY_TERMINAL),
            (AX_H, -1, 2, T_SINGLY_TERMINAL),
            (AX_V, -2, -3, T_SKIMMING),
            (AX_H, -3, -2, T_SKIMMING),
            (AX_H, -2, -2, T_SKIMMING),
            (AX_V, 0, -1, T_NORMAL_BOUNDARY),
            (AX_V, 0, 2, T_NORMAL_BOUNDARY),
            (AX_H, -2, 0, T_NORMAL_BOUNDARY),
            (AX_V, 0, -3, T_HV_ONLY),
            (AX_V, 0, 3, T_HV_ONLY),
            (AX_H, -6, -6, T_BACKROAD),
        ],
    )
    def test_types(self, crossing_field, axis, x, y, expected):
        assert crossing_field.btype[bond_at(crossing_field, axis, x, y)] == expected

    def test_costs_follow_types(self, crossing_field):
        f = crossing_field
        expected = {
            (AX_H, 0, 1): 5,
            (AX_V, 0, 0): 8,
            (AX_H, -1, 0): 7,
            (AX_V, -2, -2): 8,
            (AX_H, 0, 0): 11,
            (AX_H, -1, 1): 11,
            (AX_V, -2, -3): 10,  # skimming off all straight highways
            (AX_V, 0, -1): 10,
            (AX_V, 0, 3): 9,
            (AX_H, -6, -6): 10,
        }
        for (axis, x, y), tenths in expected.items():
            assert f.alpha_star_core[bond_at(f, axis, x, y)] == tenths

    def test_classes(self, crossing_field):
        f = crossing_field
        assert f.k_zig[bond_at(f, AX_H, 0, 1)] == 2  # N/E class dominates
        assert f.k_zig[bond_at(f, AX_H, 1, 0)] == 1  # N/W-only bond
        assert f.k_hv[bond_at(f, AX_V, 0, 0)] == 3
        assert f.k_hv[bond_at(f, AX_H, 0, 0)] == 4
        assert f.k_hv[bond_at(f, AX_H, -6, -6)] == 0

    def test_raw_core_costs(self, crossing_field):
        f = crossing_field
        ns = ~f.slow
        assert (f.alpha[ns & (f.k_zig > 0)] == 7).all()
        assert (f.alpha[ns & (f.k_zig == 0) & (f.k_hv > 0)] == 9).all()
        assert (f.alpha[ns & (f.k_zig == 0) & (f.k_hv == 0)] == 10).all()

    def test_straight_highways_do_not_feel_the_crossing(self, crossing_field):
        _, hv = crossing_config()
        rows, sums, ends_nine = hv_alpha_sums(crossing_field, hv)
        assert rows.size == 3
        assert ends_nine.all()
        assert (sums == 9 * hv.length[rows]).all()

    def test_skimming_on_a_straight_costs_nine(self):
        # A vertical straight entering the staircase through its anchor site:
        # the bond below the terminal site skims (0.9), the terminal bond
        # pays the toll (0.8), the exit boundary bond pays the other (1.0).
        zz = HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 1, 0, 0, 4, mark=0.5)
        hv = HighwaySet.build(KIND_HV, HV_V, START_V, 3, 0, -3, 7)
        f = classify(FULL, 7, zz, hv, WINDOW)
        assert f.btype[bond_at(f, AX_V, 0, -1)] == T_SKIMMING
        assert f.alpha_star_core[bond_at(f, AX_V, 0, -1)] == 9
        assert f.alpha_star_core[bond_at(f, AX_V, 0, 0)] == 8
        assert f.alpha_star_core[bond_at(f, AX_V, 0, 1)] == 10
        _, sums, ends_nine = hv_alpha_sums(f, hv)
        assert ends_nine.all() and (sums == 9 * 7).all()

    def test_doubly_terminal_and_its_skims(self):
        zz = HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 1, 4, -4, 1, mark=0.5)
        f = classify(FULL, 7, zz, HighwaySet.empty(), WINDOW)
        assert f.btype[bond_at(f, AX_V, 4, -4)] == T_DOUBLY_TERMINAL
        assert f.alpha_star_core[bond_at(f, AX_V, 4, -4)] == 9
        for axis, x, y in [(AX_H, 4, -4), (AX_H, 3, -4), (AX_V, 4, -5), (AX_H, 4, -3), (AX_V, 4, -3)]:
            assert f.btype[bond_at(f, axis, x, y)] == T_SKIMMING

    def test_max_class_over_overlapping_staircases(self):
        zz = HighwaySet.concat(
            [
                HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 2, 0, 0, 5, mark=0.5),
                HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 5, 0, 0, 5, mark=0.5),
            ]
        )
        f = classify(FULL, 7, zz, HighwaySet.empty(), WINDOW)
        assert f.k_zig[bond_at(f, AX_V, 0, 0)] == 5

    def test_far_staircases_are_ignored(self, crossing_field):
        zz, hv = crossing_config()
        far = HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 8, 500, 500, 100, mark=0.5)
        f2 = classify(FULL, 7, HighwaySet.concat([zz, far]), hv, WINDOW)
        assert (f2.btype == crossing_field.btype).all()
        assert (f2.tau == crossing_field.tau).all()


class TestMarksAndSlow:
    def test_sigma_formulas(self, crossing_field):
        f = crossing_field
        eta, etat = FULL.eta, FULL.etatilde
        for axis, x, y, expect in [
            (AX_H, 0, 1, lambda xi: 0.1 * (eta**2 + etat**2 * xi)),  # zigzag, class 2
            (AX_V, 0, 3, lambda xi: 0.1 * etat**3 * (1 + xi)),  # straight-only, class 3
            (AX_V, 0, -1, lambda xi: 0.1 * etat**3 * (1 + xi)),  # straight boundary
            (AX_H, -2, 0, lambda xi: 0.1 * etat**4 * (1 + xi)),  # boundary on a straight
            (AX_V, -1, 0, lambda xi: 0.1 * xi),  # plain boundary
            (AX_H, -6, -6, lambda xi: 0.1 * xi),  # backroad
        ]:
            i = bond_at(f, axis, x, y)
            if f.slow[i]:
                continue
            xi = xi_marks(7, np.array([axis]), np.array([x]), np.array([y]))[0]
            assert f.sigma[i] == pytest.approx(expect(xi), rel=1e-12)

    def test_sigma_bounded_and_tau_decomposes(self, crossing_field):
        f = crossing_field
        assert (f.sigma >= 0).all() and (f.sigma <= 0.2).all()
        assert np.array_equal(f.tau, f.alpha_star / 10.0 + f.sigma)

    def test_no_slow_bonds_off_highways(self, crossing_field):
        f = crossing_field
        plain = (f.k_zig == 0) & (f.k_hv == 0)
        assert not f.slow[plain].any()
        assert (f.alpha_star[f.slow] == 13).all()
        assert (f.alpha[f.slow] == 12).all()
        assert np.array_equal(f.alpha_star[~f.slow], f.alpha_star_core[~f.slow])

    def test_slow_rate_matches_quarter_power_law(self):
        # Straight highways of class k make their bonds slow w.p. 4**-k.
        hv = HighwaySet.build(
            KIND_HV, HV_H, START_V, 1, np.full(1000, -500), np.arange(-500, 500) * 2, 2
        )
        f = classify(FULL, 3, HighwaySet.empty(), hv, Window.square(1000))
        sel = f.k_hv == 1
        n, got = sel.sum(), f.slow[sel].sum()
        sd = np.sqrt(n * 0.25 * 0.75)
        assert abs(got - n * 0.25) <= 3 * sd


class TestFieldLayout:
    def test_index_roundtrip(self, crossing_field):
        f = crossing_field
        idx = f.index_of(f.axis, f.x, f.y)
        assert np.array_equal(idx, np.arange(f.n))

    def test_grid_views_match_flat(self, crossing_field):
        f = crossing_field
        gh = f.grid("tau", AX_H)
        i = bond_at(f, AX_H, -1, 1)
        assert gh[-1 - WINDOW.x0, 1 - WINDOW.y0] == f.tau[i]
        gv = f.grid("btype", AX_V)
        j = bond_at(f, AX_V, 0, 0)
        assert gv[0 - WINDOW.x0, 0 - WINDOW.y0] == f.btype[j]

    def test_index_rejects_outside(self, crossing_field):
        with pytest.raises(ValueError):
            crossing_field.index_of([AX_H], [WINDOW.x1], [0])  # right edge H bond sticks out

    def test_csv_export(self, crossing_field):
        buf = io.StringIO()
        crossing_field.to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == crossing_field.n + 1
        assert lines[0].startswith("axis,x,y,type")
        assert any(",intersection," in line for line in lines)


@pytest.fixture(scope="module")
def env_field():
    params = with_overrides(FULL, class_cutoff=2)
    env = sample_raw_env(params, seed=9, window=Window.square(24))
    thinned = thin(env)
    return env, classify_env(env, thinned.final)


class TestSampledEnvironment:
    def test_partition_is_total_and_consistent(self, env_field):
        _, f = env_field
        assert f.btype.min() >= 0 and f.btype.max() <= T_BACKROAD
        zz_types = f.btype <= T_INTERSECTION
        assert ((f.k_zig > 0) == zz_types).all()
        hv_only = f.btype == T_HV_ONLY
        assert (f.k_hv[hv_only] > 0).all()
        backroad = f.btype == T_BACKROAD
        assert (f.k_zig[backroad] == 0).all() and (f.k_hv[backroad] == 0).all()

    def test_core_cost_values(self, env_field):
        _, f = env_field
        assert set(np.unique(f.alpha_star_core)) <= {5, 7, 8, 9, 10, 11}
        assert set(np.unique(f.alpha[~f.slow])) <= {7, 9, 10}

    def test_every_straight_highway_balances(self, env_field):
        env, f = env_field
        rows, sums, ends_nine = hv_alpha_sums(f, env.hv)
        assert rows.size > 10
        dev = sums - 9 * env.hv.length[rows]
        assert (np.abs(dev) <= 4).all()
        assert (dev[ends_nine] == 0).all()

    def test_monotone_path_lower_bound(self, env_field):
        _, f = env_field
        rng = np.random.default_rng(0)
        w = f.window
        for _ in range(200):
            steps = rng.integers(0, 2, 20)  # 1 = north, 0 = east
            px = w.x0 + int(rng.integers(0, 3))
            py = w.y0 + int(rng.integers(0, 3))
            axes, xs, ys = [], [], []
            for s in steps:
                axes.append(AX_V if s else AX_H)
                xs.append(px)
                ys.append(py)
                px, py = (px, py + 1) if s else (px + 1, py)
            total = int(f.alpha_star_core[f.index_of(axes, xs, ys)].sum())
            assert total >= 7 * len(steps) - 2

    def test_deterministic(self, env_field):
        env, f = env_field
        thinned = thin(env)
        again = classify_env(env, thinned.final)
        assert (f.btype == again.btype).all()
        assert np.array_equal(f.tau, again.tau)

    def test_rejects_simple_model(self):
        env = sample_raw_env(SIMPLE, seed=1, window=Window.square(8))
        with pytest.raises(ValueError):
            classify_env(env, HighwaySet.empty())


class TestSimpleCosts:
    def test_crafted_values(self):
        highways = HighwaySet.concat(
            [
                HighwaySet.build(KIND_DIAG, ORIENT_NE, START_V, 1, 0, 0, 1),
                HighwaySet.build(KIND_DIAG, ORIENT_NE, START_V, 3, -2, -2, 7),
                HighwaySet.build(KIND_DIAG, ORIENT_NW, START_V, 2, 3, -3, 3),
            ]
        )
        f = simple_costs(SIMPLE, highways, WINDOW)
        eta = SIMPLE.eta
        r2 = np.sqrt(2.0)

        def tau_at(axis, x, y):
            return f.tau[int(f.index_of([axis], [x], [y])[0])]

        assert tau_at(AX_D1, 0, 0) == r2 * (1 + eta**3)  # classes 1 and 3 overlap
        assert tau_at(AX_D1, 3, 3) == r2 * (1 + eta**3)
        assert tau_at(AX_D1, 5, 5) == 3  # past the class-3 far end
        assert tau_at(AX_D2, 2, -2) == r2 * (1 + eta**2)
        assert tau_at(AX_D2, 0, 2) == 3
        assert tau_at(AX_H, 0, 0) == 1
        assert tau_at(AX_V, 2, -1) == 1

    def test_decomposition_exact(self):
        env = sample_raw_env(SIMPLE, seed=4, window=Window.square(40), cutoff=6)
        f = simple_costs_env(env)
        assert np.array_equal(f.tau, f.units + np.sqrt(2.0) * f.rad2)
        diag = (f.axis == AX_D1) | (f.axis == AX_D2)
        assert (f.units[~diag] == 1).all() and (f.rad2[~diag] == 0).all()
        on = diag & (f.k_diag > 0)
        assert (f.units[on] == 0).all() and (f.rad2[on] > 1).all()
        assert (f.tau[diag & ~on] == 3).all()

    def test_index_roundtrip_with_diagonals(self):
        axis, x, y = window_bonds(Window(-3, -2, 4, 5), diagonals=True)
        env = sample_raw_env(SIMPLE, seed=4, window=Window(-3, -2, 4, 5), cutoff=4)
        f = simple_costs_env(env)
        assert np.array_equal(f.index_of(axis, x, y), np.arange(axis.size))

    def test_rejects_full_model(self):
        env = sample_raw_env(with_overrides(FULL, class_cutoff=1), seed=1, window=Window.square(8))
        with pytest.raises(ValueError):
            simple_costs_env(env)

    def test_giant_highways_are_clipped_not_enumerated(self):
        # A class-30 highway spans ~10**9 sites; costing a window it crosses
        # must clip it, not walk it bond by bond.
        w = Window(-5, -5, 5, 5)
        giant_ne = HighwaySet.build(KIND_DIAG, ORIENT_NE, START_V, 30, -(1 << 29), -(1 << 29), (1 << 30) - 1)
        giant_nw = HighwaySet.build(KIND_DIAG, ORIENT_NW, START_V, 28, 1 << 27, 2 - (1 << 27), (1 << 28) - 1)
        f = simple_costs(SIMPLE, HighwaySet.concat([giant_ne, giant_nw]), w)
        eta = SIMPLE.eta
        d1 = f.tau[int(f.index_of([AX_D1], [0], [0])[0])]
        assert d1 == np.sqrt(2.0) * (1 + eta**30)
        d2 = f.tau[int(f.index_of([AX_D2], [1], [1])[0])]
        assert d2 == np.sqrt(2.0) * (1 + eta**28)

    def test_clip_preserves_bond_sets(self):
        from fastlanes.bondfield import clip_diag
        from fastlanes.sampler import bonds_flat

        w = Window(-4, -3, 5, 6)
        rng = np.random.default_rng(3)
        rows = []
        for _ in range(40):
            orient = int(rng.integers(0, 2))
            k = int(rng.integers(1, 5))
            rows.append(
                HighwaySet.build(
                    KIND_DIAG, orient, START_V, k,
                    int(rng.integers(-12, 12)), int(rng.integers(-12, 12)), (1 << k) - 1,
                )
            )
        hws = HighwaySet.concat(rows)
        clipped = clip_diag(hws, w)

        def keyset(h):
            out = set()
            if h.n:
                rws, axs, xs, ys = bonds_flat(h)
                for r, a, x, y in zip(rws, axs, xs, ys):
                    if w.x0 <= x <= w.x1 - 1 and (
                        (a == AX_D1 and w.y0 <= y <= w.y1 - 1)
                        or (a == AX_D2 and w.y0 + 1 <= y <= w.y1)
                    ):
                        out.add((int(a), int(x), int(y), int(h.klass[r])))
            return out

        assert keyset(clipped) == keyset(hws)
