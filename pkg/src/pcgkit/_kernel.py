"""Block evaluator for weight-vector scans.

One function body serves twice: compiled with numba for production sweeps and
left as plain Python as the reference twin, so the two paths cannot drift.

A call processes a contiguous range of ranks of the cube {1..shell}^d in
lexicographic order (rank = the vector read as a base-`shell` number). Only
vectors whose maximum entry equals `shell` are evaluated; lower maxima belong
to earlier shells of the iterative deepening. A vector is also skipped when
its mirror image under `mirror` is lexicographically smaller (pass the
identity permutation to disable). For each evaluated vector the leaf-pair
distances are formed from the per-pair edge paths (CSR layout), and every
threshold candidate (pair of realized distance values, or the single fixed
pair in fixed mode) is screened: edge count, then sorted degree sequence,
packed into one integer key and looked up among the uncovered targets. Hits
land in `out` as rows [w_0..w_{d-1}, d_min, d_max], in scan order.

Returns (n_hits, vectors_examined, threshold_pairs, steps_done); steps_done
counts ranks consumed and falls short of max_steps only when the hit buffer
could fill or the cube ends. The caller tells the cases apart by whether
start_rank + steps_done reached shell**d.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True, inline="always")
def _pack_key(m, degbuf, n):
    # sorts degbuf ascending in place, then packs 4-bit fields under the count
    for i in range(1, n):
        x = degbuf[i]
        j = i - 1
        while j >= 0 and degbuf[j] > x:
            degbuf[j + 1] = degbuf[j]
            j -= 1
        degbuf[j + 1] = x
    key = m << 48
    for v in range(n):
        key |= degbuf[v] << (4 * v)
    return key


@njit(cache=True, nogil=True, inline="always")
def _fp_found(keys, key):
    lo, hi = 0, keys.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo < keys.shape[0] and keys[lo] == key


def _block_impl(path_off, path_edges, pair_u, pair_v, n, d, shell,
                start_rank, max_steps, mirror, fp_keys, ec_mask,
                fixed_mode, fdmin, fdmax, emit_all, out):
    npairs = pair_u.shape[0]
    max_cands = npairs * (npairs + 1) // 2
    w = np.empty(d, dtype=np.int64)
    acc = start_rank
    for i in range(d - 1, -1, -1):
        w[i] = acc % shell + 1
        acc //= shell
    dist = np.empty(npairs, dtype=np.int64)
    uvals = np.empty(npairs, dtype=np.int64)
    cnt = np.empty(npairs, dtype=np.int64)
    degacc = np.empty(npairs * n, dtype=np.int64)
    degbuf = np.empty(n, dtype=np.int64)

    nhits = 0
    examined = 0
    pairsev = 0
    steps = 0
    while steps < max_steps:
        if steps > 0:
            i = d - 1
            while i >= 0 and w[i] == shell:
                w[i] = 1
                i -= 1
            if i < 0:
                break  # cube exhausted
            w[i] += 1
        if out.shape[0] - nhits < max_cands:
            break
        steps += 1

        vmax = 0
        for i in range(d):
            if w[i] > vmax:
                vmax = w[i]
        if vmax != shell:
            continue
        skip = False
        for i in range(d):
            mi = w[mirror[i]]
            if mi != w[i]:
                skip = mi < w[i]
                break
        if skip:
            continue
        examined += 1

        for p in range(npairs):
            s = 0
            for t in range(path_off[p], path_off[p + 1]):
                s += w[path_edges[t]]
            dist[p] = s

        if fixed_mode:
            pairsev += 1
            m = 0
            for v in range(n):
                degbuf[v] = 0
            for p in range(npairs):
                if fdmin <= dist[p] <= fdmax:
                    m += 1
                    degbuf[pair_u[p]] += 1
                    degbuf[pair_v[p]] += 1
            if emit_all or (ec_mask[m] != 0
                            and _fp_found(fp_keys, _pack_key(m, degbuf, n))):
                for i in range(d):
                    out[nhits, i] = w[i]
                out[nhits, d] = fdmin
                out[nhits, d + 1] = fdmax
                nhits += 1
            continue

        # distinct distance values, ascending
        sdist = np.sort(dist)
        k = 0
        for p in range(npairs):
            if p == 0 or sdist[p] != sdist[p - 1]:
                uvals[k] = sdist[p]
                k += 1
        for r in range(k):
            cnt[r] = 0
            for v in range(n):
                degacc[r * n + v] = 0
        for p in range(npairs):
            lo, hi = 0, k - 1
            while lo < hi:
                mid = (lo + hi) // 2
                if uvals[mid] < dist[p]:
                    lo = mid + 1
                else:
                    hi = mid
            cnt[lo] += 1
            degacc[lo * n + pair_u[p]] += 1
            degacc[lo * n + pair_v[p]] += 1
        for r in range(1, k):
            cnt[r] += cnt[r - 1]
            for v in range(n):
                degacc[r * n + v] += degacc[(r - 1) * n + v]

        for a in range(k):
            for b in range(a, k):
                pairsev += 1
                m = cnt[b] - (cnt[a - 1] if a > 0 else 0)
                if not emit_all and ec_mask[m] == 0:
                    continue
                for v in range(n):
                    degbuf[v] = degacc[b * n + v]
                    if a > 0:
                        degbuf[v] -= degacc[(a - 1) * n + v]
                if emit_all or _fp_found(fp_keys, _pack_key(m, degbuf, n)):
                    for i in range(d):
                        out[nhits, i] = w[i]
                    out[nhits, d] = uvals[a]
                    out[nhits, d + 1] = uvals[b]
                    nhits += 1
    return nhits, examined, pairsev, steps


sweep_block_py = _block_impl
sweep_block = njit(cache=True, nogil=True)(_block_impl)


def pack_fingerprint_key(edge_count: int, degrees) -> int:
    """Same packing as the kernel: count above 48 bits, sorted 4-bit degrees below."""
    key = edge_count << 48
    for v, deg in enumerate(sorted(degrees)):
        key |= deg << (4 * v)
    return key
