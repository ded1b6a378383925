"""Counter-based hashing randomness.

All randomness in the simulator is a pure function of a 64-bit master seed and
a structured integer key (stream tag, class, orientation, absolute lattice
coordinates, slot index, ...).  This gives an infinite-volume random field that
restricts consistently to any query window: there is no generator state, so
two windows always agree on their overlap.

The hash is a chain of splitmix64 finalizer rounds, one per key word.  It is
not cryptographic; it only needs to pass the statistical checks used by the
test suite (uniformity, independence across streams, bit balance).

Everything is vectorized over numpy uint64 arrays.  With NEP-50 integer
promotion, mixing bare Python ints into uint64 arithmetic can change dtypes or
raise on overflow, so every constant here is an explicit ``np.uint64``.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

__all__ = [
    "hash64",
    "uniform01",
    "uniforms",
    "binomial_counts",
    "distinct_uniform_indices",
    "ragged_arange",
    "Stream",
]


class Stream:
    """Stream tags separating independent uses of the hash.

    Values are arbitrary but fixed forever: changing them changes every
    sampled environment.
    """

    ZIGZAG_COUNT = 0x11
    ZIGZAG_PLACE = 0x12
    HV_COUNT = 0x21
    HV_PLACE = 0x22
    DIAG_COUNT = 0x31
    DIAG_PLACE = 0x32
    MARK_XI = 0x41
    MARK_XI_PRIME = 0x42
    MARK_RANK = 0x43
    PATH_SAMPLER = 0x51
    LP_SAMPLER = 0x52
    CENSUS = 0x53


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SHIFT30 = np.uint64(30)
_SHIFT27 = np.uint64(27)
_SHIFT31 = np.uint64(31)
_SHIFT11 = np.uint64(11)
_INV_2_53 = float(2.0**-53)


def _finalize(h: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer (vectorized, wrapping uint64 arithmetic)."""
    h = (h ^ (h >> _SHIFT30)) * _MIX1
    h = (h ^ (h >> _SHIFT27)) * _MIX2
    return h ^ (h >> _SHIFT31)


def _as_u64(value) -> np.ndarray:
    """Coerce ints / int arrays to uint64 with two's-complement wrapping."""
    arr = np.asarray(value)
    if arr.dtype == np.uint64:
        return arr
    return arr.astype(np.int64).astype(np.uint64)


def hash64(seed: int, *fields) -> np.ndarray:
    """Hash (seed, *fields) to uint64.

    ``fields`` are integers or integer arrays (broadcast together); negative
    values are allowed and wrap via two's complement.  Returns a uint64 scalar
    array or a broadcast array.
    """
    with np.errstate(over="ignore"):
        h = _finalize(_as_u64(seed) + _GOLDEN)
        for f in fields:
            h = _finalize(h ^ _finalize(_as_u64(f) * _MIX1 + _GOLDEN))
    return h


def uniform01(seed: int, *fields) -> np.ndarray:
    """Uniform [0,1) floats keyed by (seed, *fields); 53-bit resolution."""
    h = hash64(seed, *fields)
    return (h >> _SHIFT11).astype(np.float64) * _INV_2_53


def uniforms(seed: int, tag: int, *fields, n: int) -> np.ndarray:
    """n uniforms keyed by (seed, tag, *fields, 0..n-1)."""
    return uniform01(seed, tag, *fields, np.arange(n))


def binomial_counts(u: np.ndarray, n, p: float, max_iter: int = 200_000) -> np.ndarray:
    """Inverse-CDF Binomial(n, p) counts from uniforms ``u`` (vectorized).

    ``n`` may be a scalar or an array of trial counts (possibly huge, up to
    ~2**45, where float64 still represents n exactly); ``p`` is a small
    success probability.  Iterates the probability-mass recurrence
    P(m+1) = P(m) * (n-m)/(m+1) * p/(1-p) starting from
    P(0) = exp(n*log1p(-p)), so work is proportional to the largest count
    drawn, which is small in all intended uses (n*p bounded).
    """
    u = np.asarray(u, dtype=np.float64)
    n_arr = np.asarray(n, dtype=np.float64)
    if p <= 0.0:
        return np.zeros(np.broadcast(u, n_arr).shape, dtype=np.int64)
    if p >= 1.0:
        return np.broadcast_to(n_arr.astype(np.int64), np.broadcast(u, n_arr).shape).copy()
    u, n_arr = np.broadcast_arrays(u, n_arr)
    odds = p / (1.0 - p)
    log_p0 = n_arr * np.log1p(-p)
    pmf = np.exp(log_p0)
    cdf = pmf.copy()
    counts = np.zeros(u.shape, dtype=np.int64)
    active = u >= cdf
    m = 0
    while active.any():
        if m >= max_iter:
            raise RuntimeError("binomial_counts failed to converge (n*p too large?)")
        ratio = (n_arr - m) / (m + 1.0) * odds
        np.maximum(ratio, 0.0, out=ratio)
        pmf = pmf * ratio
        cdf = cdf + pmf
        # Once pmf underflows to 0 the cdf stops growing; force those lanes
        # closed to guarantee termination (u < 1 and cdf -> 1 analytically).
        stuck = active & (pmf <= 0.0)
        newly = active & (u >= cdf) & ~stuck
        counts[active] += 1
        counts[stuck] -= 1  # undo the increment for stuck lanes
        active = newly
        m += 1
    return counts


def distinct_uniform_indices(
    seed: int,
    tag: int,
    group_keys: Iterable[np.ndarray],
    counts: np.ndarray,
    space_sizes: np.ndarray,
    max_rounds: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample, for each group g, ``counts[g]`` distinct uniform indices in
    [0, space_sizes[g]).

    For sparse groups (count² ≤ 2·size, the production regime) all indices of
    a group are drawn independently and any group containing a duplicate is
    redrawn whole with a fresh round number until all its indices are
    distinct.  Whole-group rejection conditions the product law on
    distinctness, which is exactly the law of independent per-slot Bernoulli
    placements given their total count.  Near-saturated groups sample their
    complement the same way (the complement of a uniform subset is uniform);
    the rare middle regime falls back to exact sequential sampling without
    replacement.

    ``group_keys`` is a sequence of integer arrays (one entry per group) fed
    into the hash along with the draw/round numbers, so results are
    independent of window placement and of which other groups are queried.
    Returns (group_index, index) flat arrays, one row per sampled item.
    """
    counts = np.asarray(counts, dtype=np.int64)
    space_sizes = np.asarray(space_sizes, dtype=np.int64)
    if np.any(space_sizes > (1 << 52)):
        raise ValueError("index space too large for 53-bit uniforms")
    if np.any(counts > space_sizes):
        raise ValueError("cannot draw more distinct indices than the space size")
    counts = np.broadcast_to(counts, np.broadcast(counts, space_sizes).shape)
    space_sizes = np.broadcast_to(space_sizes, counts.shape)

    rejection = counts * counts <= 2 * space_sizes
    complement = ~rejection & ((space_sizes - counts) ** 2 <= 2 * space_sizes)
    sequential = ~rejection & ~complement

    group_of = np.repeat(np.arange(counts.size), counts)
    out_idx = np.empty(int(counts.sum()), dtype=np.int64)
    keys = [np.asarray(k, dtype=np.int64) for k in group_keys]

    if rejection.any():
        sel = np.where(rejection, counts, 0)
        g, i = _rejection_distinct(seed, tag, keys, sel, space_sizes, 0, max_rounds)
        out_idx[rejection[group_of]] = i
    if complement.any():
        comp_counts = np.where(complement, space_sizes - counts, 0)
        g, i = _rejection_distinct(seed, tag, keys, comp_counts, space_sizes, 1, max_rounds)
        pos = 0
        fill = np.flatnonzero(complement[group_of])
        fpos = 0
        for gi in np.flatnonzero(complement):
            c = int(comp_counts[gi])
            drawn = i[pos : pos + c]
            pos += c
            keep = np.setdiff1d(np.arange(space_sizes[gi]), drawn, assume_unique=False)
            out_idx[fill[fpos : fpos + keep.size]] = keep
            fpos += keep.size
    if sequential.any():
        fill = np.flatnonzero(sequential[group_of])
        fpos = 0
        for gi in np.flatnonzero(sequential):
            c = int(counts[gi])
            size = int(space_sizes[gi])
            u = uniform01(seed, tag, *[k[gi] for k in keys], np.arange(c), -1)
            chosen = _sequential_without_replacement(u, size)
            out_idx[fill[fpos : fpos + c]] = chosen
            fpos += c
    return group_of, out_idx


def _rejection_distinct(seed, tag, keys, counts, space_sizes, salt, max_rounds):
    """Whole-group rejection sampling of distinct indices (see caller)."""
    total = int(counts.sum())
    group_of = np.repeat(np.arange(counts.size), counts)
    out_idx = np.empty(total, dtype=np.int64)
    if total == 0:
        return group_of, out_idx
    ikeys = [k[group_of] for k in keys]
    draw_no = _ragged_arange(counts)
    sizes_f = space_sizes.astype(np.float64)[group_of]
    sizes_i = space_sizes[group_of]
    items = np.arange(total)
    for round_no in range(max_rounds):
        u = uniform01(seed, tag, salt, *[k[items] for k in ikeys], draw_no[items], round_no)
        drawn = (u * sizes_f[items]).astype(np.int64)
        np.minimum(drawn, sizes_i[items] - 1, out=drawn)
        out_idx[items] = drawn
        # Any group we just touched must be rechecked in full.
        touched = np.unique(group_of[items])
        members = np.flatnonzero(np.isin(group_of, touched))
        order = np.lexsort((out_idx[members], group_of[members]))
        mg = group_of[members][order]
        mi = out_idx[members][order]
        dup = (mg[1:] == mg[:-1]) & (mi[1:] == mi[:-1])
        if not dup.any():
            return group_of, out_idx
        bad_groups = np.unique(mg[1:][dup])
        items = members[np.isin(group_of[members], bad_groups)]
    raise RuntimeError("distinct_uniform_indices: too many rejection rounds")


def _sequential_without_replacement(u: np.ndarray, size: int) -> np.ndarray:
    """Exact sequential sampling without replacement from range(size).

    Draw i picks a uniform index in the shrinking space of size-i remaining
    values, then maps it through the gaps left by earlier picks.
    """
    import bisect

    chosen: list[int] = []
    out = np.empty(len(u), dtype=np.int64)
    for i, ui in enumerate(u):
        r = min(int(ui * (size - i)), size - i - 1)
        for v in chosen:
            if r >= v:
                r += 1
            else:
                break
        bisect.insort(chosen, r)
        out[i] = r
    return out


def ragged_arange(counts: np.ndarray) -> np.ndarray:
    """[0..c0-1, 0..c1-1, ...] for counts = [c0, c1, ...]."""
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    ends = np.cumsum(counts)
    idx = np.arange(total, dtype=np.int64)
    starts = ends - counts
    return idx - np.repeat(starts, counts)


_ragged_arange = ragged_arange
