"""Vectorized bond-percolation sampling with counter-based randomness.

Each replication owns a fixed block of a stateless splitmix64 counter
stream, so results are bit-identical no matter how replications are
chunked or distributed across workers.  Stream layout per replication:

    counter 0               -> seed-node draw (full 53-bit uniform)
    counter 1 + q           -> edge pair (2q, 2q+1); low/high 32 bits give
                               one threshold comparison each
    counters after that     -> inner conditioning samples, when used:
                               ``inner_samples`` blocks of ceil(B/2) pair
                               draws over the B conditioned edges

Edge openness uses integer thresholds ``thr[e] = round(p_e * 2**32)``
(compared against 32 bits of the mixed counter), which matches the target
probability to within 2**-32.

Conditioning (``inner_edges``): the listed edges are excluded from the
outer draw and instead re-sampled ``inner_samples`` times per replication,
the extent being averaged over those samples.  This is plain conditional
Monte Carlo: unbiased for the same expectation, with far lower variance
when a handful of bridge edges dominate the outcome (the connected cell
designs).

A numba kernel does the sampling when numba is importable (set
``CASCNET_NO_NUMBA=1`` to force the pure-numpy path); both paths produce
identical extents.
"""

from __future__ import annotations

import os

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

U64 = np.uint64
_GOLD = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_S11 = U64(11)
_S32 = U64(32)
_MASK32 = U64(0xFFFFFFFF)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


def thresholds(probs: np.ndarray) -> np.ndarray:
    """Per-edge open thresholds on the 32-bit comparison scale."""
    p = np.asarray(probs, dtype=float)
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("edge probabilities must lie in [0, 1]")
    return np.rint(p * 4294967296.0).astype(np.uint64)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


_NO_INNER = np.empty(0, dtype=np.int32)


def _stride(m: int, n_inner: int, inner_samples: int) -> int:
    return 1 + (m + 1) // 2 + (inner_samples * ((n_inner + 1) // 2) if n_inner else 0)


def _pair_masks(z: np.ndarray, thr: np.ndarray) -> np.ndarray:
    """Threshold comparisons for a (reps, ceil(m/2)) block of pair draws."""
    m = len(thr)
    mask = np.empty(z.shape[:-1] + (m,), dtype=bool)
    mask[..., 0::2] = (z & _MASK32) < thr[0::2]
    if m > 1:
        mask[..., 1::2] = (z >> _S32)[..., : m // 2] < thr[1::2]
    return mask


def _components_extents(
    open_mask: np.ndarray,
    iu: np.ndarray,
    ju: np.ndarray,
    n: int,
    uniform_seed: bool,
    seeds: np.ndarray | None,
) -> np.ndarray:
    rows_count = open_mask.shape[0]
    r_idx, e_idx = np.nonzero(open_mask)
    big = sparse.csr_matrix(
        (
            np.ones(len(r_idx), dtype=np.int8),
            (r_idx * n + iu[e_idx], r_idx * n + ju[e_idx]),
        ),
        shape=(rows_count * n, rows_count * n),
    )
    _, labels = csgraph.connected_components(big, directed=False)
    sizes = np.bincount(labels)
    per_node = sizes[labels].reshape(rows_count, n)
    if uniform_seed:
        return per_node[np.arange(rows_count), seeds].astype(np.float64) - 1.0
    return (per_node.sum(axis=1) - n) / float(n)


def _extents_numpy(
    key: np.uint64,
    rep_start: int,
    rep_stop: int,
    iu: np.ndarray,
    ju: np.ndarray,
    thr: np.ndarray,
    n: int,
    uniform_seed: bool,
    inner_idx: np.ndarray = _NO_INNER,
    inner_samples: int = 0,
) -> np.ndarray:
    nreps = rep_stop - rep_start
    m = len(iu)
    n_inner = len(inner_idx)
    npairs = (m + 1) // 2
    stride = U64(_stride(m, n_inner, inner_samples))
    reps = np.arange(rep_start, rep_stop, dtype=np.uint64)
    base = reps * stride

    seeds = None
    if uniform_seed:
        z0 = _mix_array(key + (base + U64(1)) * _GOLD)
        u0 = (z0 >> _S11).astype(np.float64) * _INV53
        seeds = np.minimum((u0 * n).astype(np.int64), n - 1)

    if m == 0:
        return np.zeros(nreps)

    q = np.arange(npairs, dtype=np.uint64)
    z = _mix_array(key + (base[:, None] + U64(2) + q[None, :]) * _GOLD)
    open_mask = _pair_masks(z, thr)

    if n_inner == 0:
        return _components_extents(open_mask, iu, ju, n, uniform_seed, seeds)

    if nreps * inner_samples > 4096:  # bound the expanded block size
        split = max(1, 4096 // inner_samples)
        return np.concatenate(
            [
                _extents_numpy(
                    key, a, min(a + split, rep_stop), iu, ju, thr, n, uniform_seed,
                    inner_idx, inner_samples,
                )
                for a in range(rep_start, rep_stop, split)
            ]
        )

    # conditioning: outer pass ignores the inner edges, then each replication
    # is expanded into inner_samples rows with freshly drawn inner edges
    open_mask[:, inner_idx] = False
    bp = (n_inner + 1) // 2
    ell = np.arange(inner_samples, dtype=np.uint64)
    qi = np.arange(bp, dtype=np.uint64)
    counters = (
        base[:, None, None]
        + U64(2)
        + U64(npairs)
        + ell[None, :, None] * U64(bp)
        + qi[None, None, :]
    )
    zi = _mix_array(key + counters * _GOLD)
    inner_mask = _pair_masks(zi, thr[inner_idx])  # (nreps, inner_samples, B)

    expanded = np.repeat(open_mask, inner_samples, axis=0)
    expanded[:, inner_idx] = inner_mask.reshape(nreps * inner_samples, n_inner)
    big_seeds = np.repeat(seeds, inner_samples) if uniform_seed else None
    values = _components_extents(expanded, iu, ju, n, uniform_seed, big_seeds)
    values = values.reshape(nreps, inner_samples)
    # accumulate in sample order so results match the kernel bit for bit
    acc = values[:, 0].copy()
    for ell in range(1, inner_samples):
        acc += values[:, ell]
    return acc / inner_samples


_HAVE_NUMBA = False
if not os.environ.get("CASCNET_NO_NUMBA"):
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass

if _HAVE_NUMBA:

    @njit(cache=True)
    def _mix1(z):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)

    @njit(cache=True, inline="always")
    def _union(parent, size, a, b):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if size[a] < size[b]:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]

    @njit(cache=True, inline="always")
    def _extent_value(parent, size, n, uniform_seed, s):
        if uniform_seed:
            while parent[s] != s:
                parent[s] = parent[parent[s]]
                s = parent[s]
            return float(size[s] - 1)
        tot = 0
        for v in range(n):
            if parent[v] == v:
                tot += size[v] * size[v]
        return (tot - n) / n

    @njit(cache=True)
    def _extents_numba(
        key, rep_start, rep_stop, iu, ju, thr, n, uniform_seed, inner_idx, inner_samples, out
    ):
        m = iu.shape[0]
        n_inner = inner_idx.shape[0]
        npairs = (m + 1) // 2
        bp = (n_inner + 1) // 2
        stride = U64(1 + npairs + (inner_samples * bp if n_inner else 0))
        parent = np.empty(n, np.int32)
        size = np.empty(n, np.int32)
        parent2 = np.empty(n, np.int32)
        size2 = np.empty(n, np.int32)
        is_inner = np.zeros(m, np.bool_)
        for t in range(n_inner):
            is_inner[inner_idx[t]] = True
        for ridx in range(rep_stop - rep_start):
            base = U64(rep_start + ridx) * stride
            for v in range(n):
                parent[v] = v
                size[v] = 1
            for q in range(npairs):
                z = _mix1(key + (base + U64(2) + U64(q)) * _GOLD)
                e = 2 * q
                if not is_inner[e] and (z & _MASK32) < thr[e]:
                    _union(parent, size, iu[e], ju[e])
                e = 2 * q + 1
                if e < m and not is_inner[e] and (z >> _S32) < thr[e]:
                    _union(parent, size, iu[e], ju[e])
            s = 0
            if uniform_seed:
                z0 = _mix1(key + (base + U64(1)) * _GOLD)
                s = int((z0 >> _S11) * _INV53 * n)
                if s >= n:
                    s = n - 1
            if n_inner == 0:
                out[ridx] = _extent_value(parent, size, n, uniform_seed, s)
                continue
            acc = 0.0
            for ell in range(inner_samples):
                for v in range(n):
                    parent2[v] = parent[v]
                    size2[v] = size[v]
                off = base + U64(2) + U64(npairs) + U64(ell * bp)
                for q in range(bp):
                    z = _mix1(key + (off + U64(q)) * _GOLD)
                    t = 2 * q
                    e = inner_idx[t]
                    if (z & _MASK32) < thr[e]:
                        _union(parent2, size2, iu[e], ju[e])
                    t = 2 * q + 1
                    if t < n_inner:
                        e = inner_idx[t]
                        if (z >> _S32) < thr[e]:
                            _union(parent2, size2, iu[e], ju[e])
                acc += _extent_value(parent2, size2, n, uniform_seed, s)
            out[ridx] = acc / inner_samples


def sample_extents(
    key: np.uint64,
    rep_start: int,
    rep_stop: int,
    iu: np.ndarray,
    ju: np.ndarray,
    thr: np.ndarray,
    n: int,
    uniform_seed: bool,
    inner_idx: np.ndarray | None = None,
    inner_samples: int = 32,
) -> np.ndarray:
    """Cascade extents for replications [rep_start, rep_stop).

    Returns new-failure counts under a uniformly drawn seed node when
    `uniform_seed`, else the exact per-sample average over all seed nodes.
    With `inner_idx`, each replication's extent is additionally averaged
    over `inner_samples` redraws of those edges (conditional Monte Carlo).
    """
    if inner_idx is None or len(inner_idx) == 0:
        inner_idx, inner_samples = _NO_INNER, 0
    if _HAVE_NUMBA:
        out = np.empty(rep_stop - rep_start, dtype=np.float64)
        _extents_numba(
            U64(key), rep_start, rep_stop, iu, ju, thr, n, uniform_seed,
            np.asarray(inner_idx, dtype=np.int32), inner_samples, out,
        )
        return out
    return _extents_numpy(
        U64(key), rep_start, rep_stop, iu, ju, thr, n, uniform_seed,
        np.asarray(inner_idx, dtype=np.int32), inner_samples,
    )


def open_edge_mask(key: np.uint64, rep: int, thr: np.ndarray) -> np.ndarray:
    """Boolean open/closed draw for every edge in one replication."""
    m = len(thr)
    if m == 0:
        return np.zeros(0, dtype=bool)
    npairs = (m + 1) // 2
    stride = U64(1 + npairs)
    base = U64(rep) * stride
    q = np.arange(npairs, dtype=np.uint64)
    z = _mix_array(U64(key) + (base + U64(2) + q) * _GOLD)
    mask = np.empty(m, dtype=bool)
    mask[0::2] = (z & _MASK32) < thr[0::2]
    if m > 1:
        mask[1::2] = (z >> _S32)[: m // 2] < thr[1::2]
    return mask


def seed_node_draw(key: np.uint64, rep: int, m: int, n: int) -> int:
    """The uniform seed-node choice for one replication."""
    npairs = (m + 1) // 2
    counter = np.array([rep * (1 + npairs) + 1], dtype=np.uint64)
    z0 = _mix_array(U64(key) + counter * _GOLD)[0]
    u0 = float(z0 >> _S11) * _INV53
    return min(int(u0 * n), n - 1)
