"""Witness search: forward sweeps over centipede weight vectors, and backward
per-graph search across general leaf topologies.

The sweep walks integer weight vectors shell by shell (shell = maximum entry,
realizing iterative deepening), lexicographically within a shell, mirror
duplicates skipped. Each vector's distance matrix is priced once and every
threshold candidate is screened through a fingerprint filter; only candidates
matching an uncovered target's fingerprint are canonicalized. First witness
per isomorphism class wins, under the fixed global scan order, which makes
databases byte-reproducible for any worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._kernel import pack_fingerprint_key, sweep_block, sweep_block_py
from .engine import Witness, verify_witness
from .graphs import (
    CanonicalForm,
    Graph,
    canonical_labeling,
    is_connected,
    pair_order,
)
from .trees import Topology, WeightedTree, centipede_mirror_permutation, reduced_centipede

MAX_SWEEP_ORDER = 7
BLOCK_STEPS = 1 << 20
HIT_ROWS = 1 << 16


def threshold_candidates(distances) -> list[tuple[Fraction, Fraction]]:
    """All (d_min, d_max) pairs of realized distances with d_min <= d_max.

    The extracted graph depends only on which distances fall inside the
    interval, so realized values exhaust every achievable extraction.
    """
    ds = list(distances)
    if not ds:
        raise ValueError("empty distance list")
    if any(b <= a for a, b in zip(ds, ds[1:])):
        raise ValueError("distances must be strictly increasing")
    return [(ds[i], ds[j]) for i in range(len(ds)) for j in range(i, len(ds))]


@dataclass
class SweepStats:
    vectors_examined: int = 0
    threshold_pairs: int = 0
    canonicalizations: int = 0


@dataclass
class SweepState:
    """Resumable sweep progress.

    Shells up to completed_weight are fully scanned; next_rank is the next
    unprocessed lexicographic rank inside shell completed_weight + 1. The
    covered map and the two monotone cursors are the whole resume story;
    canonicalization counts vary with worker partitioning (stale-snapshot
    hits), the other statistics do not.
    """

    n: int
    max_weight: int
    covered: dict[CanonicalForm, Witness] = field(default_factory=dict)
    completed_weight: int = 0
    next_rank: int = 0
    stats: SweepStats = field(default_factory=SweepStats)

    def cursor_vector(self) -> tuple[int, ...] | None:
        """Last weight vector examined, for reports; None at a shell boundary."""
        if self.next_rank == 0:
            return None
        shell = self.completed_weight + 1
        d = 2 * self.n - 3
        acc = self.next_rank - 1
        w = [0] * d
        for i in range(d - 1, -1, -1):
            w[i] = acc % shell + 1
            acc //= shell
        return tuple(w)


def _topology_arrays(topo: Topology):
    """CSR edge paths for every leaf pair (column order), as kernel arrays."""
    vcount = topo.n_vertices
    adj: list[list[tuple[int, int]]] = [[] for _ in range(vcount)]
    for idx, (u, v) in enumerate(topo.edges):
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    leaves = topo.leaves
    parents: list[dict[int, tuple[int, int]]] = []
    for root in leaves:
        par: dict[int, tuple[int, int]] = {root: (-1, -1)}
        stack = [root]
        while stack:
            x = stack.pop()
            for nb, idx in adj[x]:
                if nb not in par:
                    par[nb] = (x, idx)
                    stack.append(nb)
        parents.append(par)
    k = len(leaves)
    pairs = pair_order(k)
    paths: list[list[int]] = []
    for i, j in pairs:
        par = parents[i]
        path = []
        x = leaves[j]
        while x != leaves[i]:
            x, idx = par[x]
            path.append(idx)
        paths.append(path)
    pair_u = np.array([i for i, _ in pairs], dtype=np.int64)
    pair_v = np.array([j for _, j in pairs], dtype=np.int64)
    off = np.zeros(len(paths) + 1, dtype=np.int64)
    for p, path in enumerate(paths):
        off[p + 1] = off[p] + len(path)
    flat = np.array([e for path in paths for e in path], dtype=np.int64)
    return (off, flat, pair_u, pair_v), paths


def _fp_tables(forms, npairs: int, key_cache: dict):
    keys = sorted({key_cache[cf][0] for cf in forms})
    fp_keys = np.array(keys, dtype=np.int64)
    ec_mask = np.zeros(npairs + 1, dtype=np.uint8)
    for cf in forms:
        ec_mask[key_cache[cf][1]] = 1
    return fp_keys, ec_mask


def _extract_from_vector(n: int, pairs, paths, w, dmin: int, dmax: int) -> Graph:
    edges = []
    for (i, j), path in zip(pairs, paths):
        dist = sum(w[e] for e in path)
        if dmin <= dist <= dmax:
            edges.append((i, j))
    return Graph.from_edges(n, edges)


def _consume_range(kern, arrays, n, d, shell, lo, hi, mirror, fp_keys, ec_mask,
                   fixed_mode, fdmin, fdmax, emit_all):
    """Run the kernel over ranks [lo, hi), collecting hit blocks in order."""
    path_off, path_edges, pair_u, pair_v = arrays
    out = np.empty((HIT_ROWS, d + 2), dtype=np.int64)
    blocks = []
    cur = lo
    while cur < hi:
        nh, ex, pe, st = kern(path_off, path_edges, pair_u, pair_v, n, d, shell,
                              cur, hi - cur, mirror, fp_keys, ec_mask,
                              fixed_mode, fdmin, fdmax, emit_all, out)
        if st == 0:
            raise RuntimeError("hit buffer cannot fit one vector's candidates")
        blocks.append((out[:nh].copy(), ex, pe))
        cur += st
    return blocks


def _chunk_bounds(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    span = hi - lo
    bounds = []
    start = lo
    for i in range(parts):
        size = span // parts + (1 if i < span % parts else 0)
        if size:
            bounds.append((start, start + size))
            start += size
    return bounds


def sweep_centipede(n: int, max_weight: int, targets, resume: SweepState | None = None,
                    *, workers: int = 1, engine: str = "numba",
                    use_fingerprint: bool = True, checkpoint_every: int | None = None,
                    on_checkpoint=None, log=None) -> SweepState:
    """Scan weight vectors on the n-leaf reduced centipede for target classes.

    Terminates when every target is covered or the weight space up to
    max_weight is exhausted; both are normal outcomes readable off the
    returned state. Resume never re-stores a covered class with a later
    witness: the scan order (shell, then lexicographic rank) is monotone.
    """
    if not 3 <= n <= MAX_SWEEP_ORDER:
        raise ValueError(f"sweep supports 3..{MAX_SWEEP_ORDER} leaves, got {n}")
    if max_weight < 1:
        raise ValueError("max_weight must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    state = resume if resume is not None else SweepState(n, max_weight)
    if state.n != n:
        raise ValueError(f"resume state is for n={state.n}, not n={n}")
    state.max_weight = max_weight

    template = reduced_centipede(n)
    d = 2 * n - 3
    npairs = n * (n - 1) // 2
    pairs = pair_order(n)
    arrays, paths = _topology_arrays(template)
    mirror = np.array(centipede_mirror_permutation(n), dtype=np.int64)
    kern = sweep_block if engine == "numba" else sweep_block_py
    emit_all = not use_fingerprint

    key_cache = {}
    uncovered = set()
    for cf in targets:
        g = cf.graph()
        key_cache[cf] = (pack_fingerprint_key(g.edge_count(), g.degree_sequence()),
                         g.edge_count())
        if cf not in state.covered:
            uncovered.add(cf)

    steps_since_ckpt = 0
    for shell in range(state.completed_weight + 1, max_weight + 1):
        total = shell ** d
        rank = state.next_rank
        while rank < total and uncovered:
            fp_keys, ec_mask = _fp_tables(uncovered, npairs, key_cache)
            round_steps = min(workers * BLOCK_STEPS, total - rank)
            if checkpoint_every is not None:
                round_steps = min(round_steps, checkpoint_every)
            bounds = _chunk_bounds(rank, rank + round_steps, workers)
            args = [(kern, arrays, n, d, shell, lo, hi, mirror, fp_keys, ec_mask,
                     False, 0, 0, emit_all) for lo, hi in bounds]
            if len(args) == 1:
                results = [_consume_range(*args[0])]
            else:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(lambda a: _consume_range(*a), args))
            for blocks in results:
                for hits, ex, pe in blocks:
                    state.stats.vectors_examined += ex
                    state.stats.threshold_pairs += pe
                    for row in hits:
                        w = tuple(int(x) for x in row[:d])
                        dmin, dmax = int(row[d]), int(row[d + 1])
                        g = _extract_from_vector(n, pairs, paths, w, dmin, dmax)
                        if not is_connected(g):
                            continue
                        state.stats.canonicalizations += 1
                        cf, perm = canonical_labeling(g)
                        if cf in uncovered:
                            inv = [0] * n
                            for a, orig in enumerate(perm):
                                inv[orig] = a
                            wit = Witness(
                                WeightedTree(template, tuple(Fraction(x) for x in w)),
                                Fraction(dmin), Fraction(dmax), tuple(inv))
                            state.covered[cf] = wit
                            uncovered.discard(cf)
            rank += round_steps
            state.next_rank = rank
            steps_since_ckpt += round_steps
            if log is not None:
                log(phase="sweep", n=n, shell=shell, rank=rank, total=total,
                    covered=len(state.covered), uncovered=len(uncovered))
            if (on_checkpoint is not None and checkpoint_every is not None
                    and steps_since_ckpt >= checkpoint_every):
                on_checkpoint(state)
                steps_since_ckpt = 0
        if not uncovered:
            break
        state.completed_weight = shell
        state.next_rank = 0
        if on_checkpoint is not None:
            on_checkpoint(state)
    return state


def search_for_graph(g: Graph, topologies, max_weight: int, *,
                     fixed_thresholds: tuple[int, int] | None = None,
                     engine: str = "numba", log=None) -> Witness | None:
    """Backward search: the first witness for g over the given topologies.

    Scans shells of increasing maximum weight, topologies in the given order
    within a shell, vectors lexicographically, threshold candidates in
    (d_min, d_max) order; returns the first extraction isomorphic to g, with
    the labeling that realizes labeled equality. None when exhausted.
    """
    if not is_connected(g):
        raise ValueError("backward search expects a connected target")
    topologies = list(topologies)
    for topo in topologies:
        if topo.n_leaves != g.n:
            raise ValueError(
                f"topology with {topo.n_leaves} leaves cannot witness order {g.n}")
    if fixed_thresholds is not None:
        fdmin, fdmax = fixed_thresholds
        if not 0 <= fdmin <= fdmax:
            raise ValueError("fixed thresholds need 0 <= d_min <= d_max")
    else:
        fdmin = fdmax = 0
    fixed_mode = fixed_thresholds is not None

    cf_g, perm_g = canonical_labeling(g)
    n = g.n
    npairs = n * (n - 1) // 2
    pairs = pair_order(n)
    fp_keys = np.array(
        [pack_fingerprint_key(g.edge_count(), g.degree_sequence())], dtype=np.int64)
    ec_mask = np.zeros(npairs + 1, dtype=np.uint8)
    ec_mask[g.edge_count()] = 1
    kern = sweep_block if engine == "numba" else sweep_block_py

    prepared = []
    for topo in topologies:
        arrays, paths = _topology_arrays(topo)
        d = len(topo.edges)
        prepared.append((topo, arrays, paths, d,
                         np.arange(d, dtype=np.int64)))  # identity: no mirror skip

    for shell in range(1, max_weight + 1):
        for topo, arrays, paths, d, mirror in prepared:
            total = shell ** d
            cur = 0
            while cur < total:
                hi = min(cur + BLOCK_STEPS, total)
                for hits, ex, pe in _consume_range(
                        kern, arrays, n, d, shell, cur, hi, mirror, fp_keys,
                        ec_mask, fixed_mode, fdmin, fdmax, False):
                    for row in hits:
                        w = tuple(int(x) for x in row[:d])
                        dmin, dmax = int(row[d]), int(row[d + 1])
                        cand = _extract_from_vector(n, pairs, paths, w, dmin, dmax)
                        if not is_connected(cand):
                            continue
                        cf_e, perm_e = canonical_labeling(cand)
                        if cf_e != cf_g:
                            continue
                        inv_e = [0] * n
                        for a, orig in enumerate(perm_e):
                            inv_e[orig] = a
                        labeling = tuple(perm_g[inv_e[i]] for i in range(n))
                        wit = Witness(
                            WeightedTree(topo, tuple(Fraction(x) for x in w)),
                            Fraction(dmin), Fraction(dmax), labeling)
                        report = verify_witness(wit, g)
                        assert report.ok, "isomorphism bookkeeping broke"
                        return wit
                cur = hi
            if log is not None:
                log(phase="search", shell=shell, edges=d,
                    topology_vertices=topo.n_vertices)
    return None
