"""Corner-event detection, region masks, and corridor checks on planted configs.

Planted environments make every flag decidable by hand: witnesses are placed
at known crossings, intruders/slow bonds/budget violators are added one at a
time, and each test asserts exactly which flag flips.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastlanes.bondfield import AX_H, AX_V, classify_env, simple_costs_env
from fastlanes.geodesics import geodesic_tree
from fastlanes.geometry import HV_H, HV_V, ORIENT_NE, ORIENT_NW, START_H, START_V, Window
from fastlanes.params import preset, with_overrides
from fastlanes.sampler import KIND_DIAG, KIND_HV, KIND_ZZ, HighwaySet, RawEnv, sample_raw_env
from fastlanes.regions import (
    ARM_NAMES,
    STAIR_ROLES,
    corridor_check,
    detect_full_success,
    detect_simple_success,
    find_spanning_highways,
    full_event_window,
    full_region_masks,
    gap_certificates,
    region_set,
    simple_event_window,
    simple_region_masks,
    success_census,
)
from fastlanes.thinning import thin

SIMPLE = preset("simple-events")
# Enlarged demand scale so the crossing interval [c/r_4, C/r_4] = [5.8, 14.0]
# contains integers and paired witnesses clear the 23-separation rule.
FULLP = with_overrides(preset("full-a"), C=12.0, c=5.0, k0=240)
FULL_K = 4
FULL_WIN = full_event_window(FULLP, FULL_K)


def diag_env(anchors, klass=4, win=None, seed=0):
    """Diagonal-model environment holding exactly the given class-k diagonals."""
    if win is None:
        win = Window(-4, -4, 40, 40)
    ax, ay = zip(*anchors) if anchors else ((), ())
    zz = HighwaySet.build(
        KIND_DIAG, ORIENT_NE, START_V, klass, list(ax), list(ay),
        [2**klass - 1] * len(anchors), mark=[0.5] * len(anchors),
    )
    return RawEnv(params=SIMPLE, seed=seed, window=win, cutoff=max(klass, 5), zz=zz)


def planted_full(seed=0, drop=(), extra_zz=None, upper_shift=0):
    """Staircase-model environment with all four stair and straight witnesses.

    Stairs are class 8 (so the class-7 straights cannot delete them in the
    crossing pass) with crossings at offset 13 and same-orientation row gaps
    of 26 > 22.  ``upper_shift`` moves the ne_lower crossing outward,
    ``drop`` removes straight roles, ``extra_zz`` appends raw staircases.
    """
    zz = HighwaySet.build(
        KIND_ZZ, ORIENT_NE,
        [START_V, START_H, START_V, START_V], 8,
        [-20, -34, 20, 33],
        [-34 - upper_shift, -20, -34, -20],
        [108 + 2 * upper_shift, 108, 108, 106],
        mark=[0.9, 0.8, 0.7, 0.6],
    )
    zz.orient[2] = ORIENT_NW
    zz.orient[3] = ORIENT_NW
    if extra_zz is not None:
        zz = HighwaySet.concat([zz, extra_zz])
    roles = [r for r in ("north", "south", "east", "west") if r not in drop]
    pos = {"north": (-30, 1, HV_H), "south": (-30, -1, HV_H),
           "east": (1, -30, HV_V), "west": (-1, -30, HV_V)}
    if roles:
        hv = HighwaySet.build(
            KIND_HV, HV_H, 0, 7,
            [pos[r][0] for r in roles], [pos[r][1] for r in roles], 60,
            mark=[0.5 - 0.1 * i for i in range(len(roles))],
        )
        hv.orient[:] = [pos[r][2] for r in roles]
    else:
        hv = HighwaySet.empty()
    return RawEnv(params=FULLP, seed=seed, window=FULL_WIN, cutoff=8, zz=zz, hv=hv)


# ---------------------------------------------------------------------------
# Diagonal model: witnesses and flags
# ---------------------------------------------------------------------------


def test_simple_witness_offsets_planted():
    env = diag_env([(7, 0), (0, 5)])
    wit = find_spanning_highways(env, 4)
    assert wit["x_axis"].crossing == (7, 0) and wit["x_axis"].offset == 7
    assert wit["y_axis"].crossing == (0, 5) and wit["y_axis"].offset == 5


def test_simple_closer_witness_wins():
    env = diag_env([(9, 0), (7, 0), (0, 5), (0, 6)])
    wit = find_spanning_highways(env, 4)
    assert wit["x_axis"].offset == 7
    assert wit["y_axis"].offset == 5


def test_simple_witness_requires_axis_and_reach():
    # min(anchor) > 0: never crosses the axis segment
    assert find_spanning_highways(diag_env([(7, 3)]), 4)["x_axis"] is None
    # anchored too deep to span the corner box
    assert find_spanning_highways(diag_env([(7, -20)]), 4)["x_axis"] is None
    # class below the scale is ignored even though it spans its own box
    assert find_spanning_highways(diag_env([(2, 0)], klass=3), 4)["x_axis"] is None


def test_simple_empty_env_is_vacuous():
    rep = detect_simple_success(diag_env([]), 4)
    assert rep.crossings == {"x_axis": None, "y_axis": None}
    assert rep.flags == {"crossing_interval": False, "region_clear": None, "success": False}


def test_simple_crossing_interval_bounds():
    rs = region_set(SIMPLE, 4)
    assert rs.cross_hi < 1  # offset-0 crossings only at this scale
    rep = detect_simple_success(diag_env([(0, 0)], win=Window(-2, -2, 24, 24)), 4)
    assert rep.flags == {"crossing_interval": True, "region_clear": True, "success": True}
    assert rep.crossings == {"x_axis": 0, "y_axis": 0}
    far = detect_simple_success(diag_env([(7, 0), (0, 5)]), 4)
    assert far.flags["crossing_interval"] is False and far.success is False


def test_simple_intruder_blocks_region():
    base = [(7, 0), (0, 5)]
    clean = detect_simple_success(diag_env(base), 4)
    assert clean.flags["region_clear"] is True
    # off-axis diagonal through the region interior: an intruder, not a witness
    dirty = detect_simple_success(diag_env(base + [(3, 1)]), 4)
    assert dirty.crossings == {"x_axis": 7, "y_axis": 5}
    assert dirty.flags["region_clear"] is False
    scan = dirty.details["region_scan"]
    assert scan["n_intruders"] == 1
    assert tuple(scan["intruders"][0]["anchor"]) == (3, 1)


def test_simple_region_scan_needs_window():
    # the region box reaches x = 16 but the window stops at 12
    rep = detect_simple_success(diag_env([(7, 0), (0, 5)], win=Window(-1, -1, 12, 12)), 4)
    assert rep.flags["region_clear"] is None
    assert rep.success is False


def test_simple_axis_window_guard_raises():
    win = Window(1, 1, 30, 30)  # axis segments not in scope
    with pytest.raises(ValueError):
        detect_simple_success(diag_env([(7, 0)], win=win), 4)


def test_simple_planted_success_k8():
    rep = detect_simple_success(diag_env([(1, 0), (0, 2)], klass=8, win=Window(-4, -4, 140, 140)), 8)
    assert rep.success is True
    assert rep.crossings == {"x_axis": 1, "y_axis": 2}
    masks = simple_region_masks(rep)
    om = masks["omega"]
    # the enclosed region is strictly inside the first quadrant between crossings
    xs, ys = np.mgrid[masks["window"].x0:masks["window"].x1 + 1,
                      masks["window"].y0:masks["window"].y1 + 1]
    assert not (om & ((xs < 1) | (ys < 1))).any()
    assert not (om & (xs - ys > rep.crossings["x_axis"] - 1)).any()
    assert not (om & (ys - xs > rep.crossings["y_axis"] - 1)).any()
    assert om.sum() > 0


@settings(max_examples=120, deadline=None)
@given(st.lists(st.tuples(st.integers(-12, 12), st.integers(-12, 12), st.integers(3, 5)),
                max_size=8))
def test_simple_witnesses_match_bruteforce(rows):
    k = 4
    g = 2 ** (k - 1) + 1
    env = diag_env([(x, y) for x, y, _ in rows], klass=4, win=Window(-16, -16, 44, 44))
    env.zz.klass[:] = [kl for _, _, kl in rows]
    env.zz.length[:] = [2**kl - 1 for _, _, kl in rows]
    best_x, best_y = None, None
    for x, y, kl in rows:
        if kl < k or min(x, y) > 0 or min(x, y) + 2**kl - 1 < g:
            continue
        d = x - y
        if d >= 0 and (best_x is None or d < best_x):
            best_x = d
        if d <= 0 and (best_y is None or -d < best_y):
            best_y = -d
    wit = find_spanning_highways(env, k)
    assert (None if wit["x_axis"] is None else wit["x_axis"].offset) == best_x
    assert (None if wit["y_axis"] is None else wit["y_axis"].offset) == best_y


# ---------------------------------------------------------------------------
# Staircase model: planted all-true fixture and single-flag mutations
# ---------------------------------------------------------------------------


def test_full_planted_all_flags_true():
    rep = detect_full_success(planted_full(), FULL_K)
    assert rep.flags == {
        "crossing_interval": True, "region_clear": True, "straights_near": True,
        "crossing_budget": True, "slow_free": True, "success": True,
    }
    assert rep.crossings == {
        "ne_lower": 13, "ne_upper": 13, "nw_lower": -13, "nw_upper": 13,
        "north": 1, "east": 1, "south": -1, "west": -1,
    }
    budget = rep.details["budget"]
    assert budget["min_class"] == 5
    # every witness stair crosses each straight once inside the band
    assert budget["counts"] == {r: {8: 4} for r in ("north", "east", "south", "west")}
    for s in budget["sums"].values():
        assert s == pytest.approx(4 * FULLP.eta**8)
        assert s <= budget["bound"]
    assert rep.details["slow_scan"]["n_slow"] == 0
    band = rep.details["region_within_band"]
    assert band["ok"] is True and band["unlabeled_sites"] == 0


def test_full_witnesses_survive_thinning_together():
    tenv = thin(planted_full())
    assert tenv.alive2.sum() == 4  # paired stairs are 26 apart: nobody is crowded out
    wit = find_spanning_highways(tenv, FULL_K)
    assert all(wit[r] is not None for r in STAIR_ROLES)
    assert wit["ne_lower"].anchor == (-20, -34)
    assert wit["nw_upper"].anchor == (33, -20)


def test_full_crossing_out_of_interval():
    rep = detect_full_success(planted_full(upper_shift=2), FULL_K)
    assert rep.crossings["ne_lower"] == 15
    assert rep.flags["crossing_interval"] is False
    assert rep.success is False


def test_full_missing_straight_fails():
    rep = detect_full_success(planted_full(drop=("west",)), FULL_K)
    assert rep.crossings["west"] is None
    assert rep.flags["straights_near"] is False
    assert rep.success is False


def test_full_intruder_blocks_region_only():
    intruder = HighwaySet.build(KIND_ZZ, ORIENT_NE, START_V, 4, -2, -10, 30, mark=0.3)
    rep = detect_full_success(planted_full(extra_zz=intruder), FULL_K)
    assert rep.flags["region_clear"] is False
    # class 4 sits below the budget class floor: the budget flag is untouched
    assert rep.flags["crossing_budget"] is True
    assert rep.flags["crossing_interval"] is True
    assert rep.success is False


def test_full_budget_exceeded():
    n = 30
    extra = HighwaySet.build(
        KIND_ZZ, ORIENT_NE, START_V, 5,
        np.arange(n) - 15, np.full(n, -16), 40, mark=np.full(n, 0.1),
    )
    rep = detect_full_success(planted_full(extra_zz=extra), FULL_K)
    budget = rep.details["budget"]
    assert budget["sums"]["north"] > budget["bound"]
    assert rep.flags["crossing_budget"] is False
    assert rep.success is False


def test_full_slow_bond_on_witness():
    rep = detect_full_success(planted_full(seed=17), FULL_K)
    assert rep.flags["slow_free"] is False
    assert rep.success is False
    scan = rep.details["slow_scan"]
    assert scan["n_slow"] == 1
    assert scan["slow_bonds"][0]["role"] == "east"


def test_full_window_guard_raises():
    env = planted_full()
    env.window = Window.square(41)
    with pytest.raises(ValueError):
        detect_full_success(env, FULL_K)


# ---------------------------------------------------------------------------
# Region masks
# ---------------------------------------------------------------------------


def test_full_masks_partition_and_band():
    rep = detect_full_success(planted_full(), FULL_K)
    masks = full_region_masks(rep)
    assert masks.n_unlabeled == 0
    assert (masks.center == (masks.omega_ne & masks.omega_nw)).all()
    assert not (masks.omega & ~masks.theta).any()
    sizes = [int((masks.arm == i).sum()) for i in range(len(ARM_NAMES))]
    assert int(masks.center.sum()) + sum(sizes) == int(masks.omega.sum())
    assert min(sizes) > 0
    # arm labels only outside the center, center carries no arm label
    assert not ((masks.arm >= 0) & masks.center).any()


def test_full_corridors_hug_axes():
    rep = detect_full_success(planted_full(), FULL_K)
    rs = region_set(FULLP, FULL_K)
    masks = full_region_masks(rep)
    half = int(np.floor(rs.corridor_half + 1e-9))
    xs, ys = np.mgrid[masks.window.x0:masks.window.x1 + 1,
                      masks.window.y0:masks.window.y1 + 1]
    assert not (masks.corridor_h & (np.abs(ys) > half)).any()
    assert not (masks.corridor_v & (np.abs(xs) > half)).any()
    assert masks.corridor_h[np.flatnonzero(xs[:, 0] == 0)[0],
                            np.flatnonzero(ys[0] == 0)[0]]


def test_full_on_stair_bits_mark_crossings():
    rep = detect_full_success(planted_full(), FULL_K)
    masks = full_region_masks(rep)
    ix = lambda x, y: (x - masks.window.x0, y - masks.window.y0)
    assert masks.on_stair[ix(13, 0)] & (1 << STAIR_ROLES.index("ne_lower"))
    assert masks.on_stair[ix(-13, 0)] & (1 << STAIR_ROLES.index("nw_lower"))
    assert masks.on_stair[ix(0, 13)] & (1 << STAIR_ROLES.index("ne_upper"))
    assert masks.on_stair[ix(0, 13)] & (1 << STAIR_ROLES.index("nw_upper"))
    assert masks.on_stair[ix(0, 0)] == 0


# ---------------------------------------------------------------------------
# Corridor checks
# ---------------------------------------------------------------------------


def test_full_corridor_clean_then_slab_mutation():
    env = planted_full()
    rep = detect_full_success(env, FULL_K)
    tenv = thin(env)
    field = classify_env(env, tenv.final)
    tree = geodesic_tree(field, (0, 0))
    clean = corridor_check(field, rep, tree=tree)
    assert clean.ok and clean.n_violations == 0
    assert clean.n_checked > 1000

    # pricing out both corridor slabs must break corridor-following everywhere
    xs, ys = np.mgrid[-12:12, -4:5]
    xs, ys = xs.ravel(), ys.ravel()
    idx = np.concatenate([field.index_of(AX_H, xs, ys), field.index_of(AX_V, ys, xs)])
    field.alpha_star[idx] += 40
    broken = corridor_check(field, rep, tree=geodesic_tree(field, (0, 0)))
    assert broken.n_violations == broken.n_checked
    viol = broken.violations[0]
    assert viol["first_outside_both"] is not None
    assert viol["via"] in ARM_NAMES or viol["via"] is None


def test_simple_corridor_clean_then_axis_mutation():
    win = simple_event_window(SIMPLE, 8)
    env = sample_raw_env(SIMPLE, 6, win)
    rep = detect_simple_success(env, 8)
    assert rep.success is True and max(rep.crossings.values()) >= 2
    field = simple_costs_env(env)
    tree = geodesic_tree(field, (0, 0))
    clean = corridor_check(field, rep, tree=tree)
    assert clean.ok and clean.n_violations == 0

    xs = np.arange(2)
    idx = np.concatenate([field.index_of(AX_H, xs, np.zeros_like(xs)),
                          field.index_of(AX_V, np.zeros_like(xs), xs)])
    field.units[idx] += 7
    broken = corridor_check(field, rep, tree=geodesic_tree(field, (0, 0)))
    assert not broken.ok
    assert broken.n_violations == broken.n_checked
    assert broken.violations[0]["first_off_axis_site"] is not None


# ---------------------------------------------------------------------------
# Reports, certificates, census
# ---------------------------------------------------------------------------


def test_reports_reproducible_and_json_round_trip():
    a = detect_full_success(planted_full(), FULL_K)
    b = detect_full_success(planted_full(), FULL_K)
    assert a.to_json() == b.to_json()
    blob = json.loads(a.to_json())
    assert blob["flags"]["success"] is True
    assert blob["model"] == "full"

    s1 = detect_simple_success(diag_env([(0, 0)], win=Window(-2, -2, 24, 24)), 4)
    s2 = detect_simple_success(diag_env([(0, 0)], win=Window(-2, -2, 24, 24)), 4)
    assert s1.to_json() == s2.to_json()
    assert json.loads(s1.to_json(indent=2)) == json.loads(s1.to_json())


def test_gap_certificates_report_both_sides():
    for params, k in ((SIMPLE, 8), (FULLP, FULL_K)):
        certs = gap_certificates(params, k)
        assert certs["k"] == k
        per_cert = {n: c for n, c in certs.items() if isinstance(c, dict)}
        assert per_cert
        for cert in per_cert.values():
            assert set(cert) == {"lhs", "rhs", "ok"}
            assert cert["ok"] in (cert["lhs"] > cert["rhs"], cert["lhs"] < cert["rhs"])


def test_simple_census_counts_and_reruns():
    census = success_census(SIMPLE, seeds=range(6), k_values=[8])
    again = success_census(SIMPLE, seeds=range(6), k_values=[8])
    assert census == again
    assert census["model"] == "simple" and census["n_seeds"] == 6
    (row,) = census["rows"]
    assert row["k"] == 8 and row["n_seeds"] == 6
    for flag in ("crossing_interval", "region_clear", "success"):
        c = row["counts"][flag]
        assert c["true"] + c["false"] + c["skipped"] == 6
        assert 0.0 <= row["frequency"][flag] <= 1.0
