"""Small-graph core: bitset graphs, graph6 interchange, canonical labeling, enumeration.

Graphs live on at most 12 vertices and are stored as tuples of neighbor
bitmasks, so isomorphism-class bookkeeping stays allocation-light even in the
inner loops of the witness sweep.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

MAX_ORDER = 12
MAX_ENUM_ORDER = 7


class Graph6Error(ValueError):
    """Malformed graph6 record; the message names the offending byte offset."""


def pair_order(n: int) -> list[tuple[int, int]]:
    """Upper-triangle pairs in graph6 column order: (0,1), (0,2), (1,2), (0,3), ..."""
    return [(i, j) for j in range(1, n) for i in range(j)]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph; ``adj[v]`` is the neighbor bitmask of vertex v."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ORDER:
            raise ValueError(f"order {self.n} outside 1..{MAX_ORDER}")
        if len(self.adj) != self.n:
            raise ValueError("adjacency tuple length differs from order")
        full = (1 << self.n) - 1
        for v, mask in enumerate(self.adj):
            if mask & ~full:
                raise ValueError(f"vertex {v}: neighbor bits outside 0..{self.n - 1}")
            if mask >> v & 1:
                raise ValueError(f"vertex {v}: self-loop")
        for v in range(self.n):
            for u in range(v):
                if (self.adj[u] >> v & 1) != (self.adj[v] >> u & 1):
                    raise ValueError(f"adjacency not symmetric at ({u}, {v})")

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n)
                if self.adj[u] >> v & 1]

    def edge_count(self) -> int:
        return sum(bin(m).count("1") for m in self.adj) // 2

    def degree_sequence(self) -> tuple[int, ...]:
        """Degrees sorted ascending."""
        return tuple(sorted(bin(m).count("1") for m in self.adj))

    def permuted(self, perm) -> "Graph":
        """Relabel so that vertex v of self becomes vertex perm[v]."""
        adj = [0] * self.n
        for v in range(self.n):
            m = self.adj[v]
            new = 0
            while m:
                low = m & -m
                new |= 1 << perm[low.bit_length() - 1]
                m ^= low
            adj[perm[v]] = new
        return Graph(self.n, tuple(adj))


def fingerprint(g: Graph) -> tuple:
    """Cheap isomorphism invariant: (order, edge count, sorted degree sequence)."""
    return (g.n, g.edge_count(), g.degree_sequence())


def upper_triangle_bits(g: Graph) -> int:
    """Adjacency upper triangle packed in column order, first pair at the MSB."""
    bits = 0
    for i, j in pair_order(g.n):
        bits = bits << 1 | (g.adj[i] >> j & 1)
    return bits


def graph_from_bits(n: int, bits: int) -> Graph:
    adj = [0] * n
    k = n * (n - 1) // 2
    for i, j in pair_order(n):
        k -= 1
        if bits >> k & 1:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return Graph(n, tuple(adj))


def parse_graph6(text: str) -> Graph:
    """Decode one graph6 record (n <= 12, single-byte order field)."""
    line = text.rstrip("\n")
    if not line:
        raise Graph6Error("byte 0: empty record")
    for off, ch in enumerate(line):
        code = ord(ch)
        if not 63 <= code <= 126:
            raise Graph6Error(f"byte {off}: character code {code} outside 63..126")
    n = ord(line[0]) - 63
    if n == 0:
        raise Graph6Error("byte 0: order 0 not supported")
    if n > MAX_ORDER:
        raise Graph6Error(f"byte 0: order {n} exceeds supported maximum {MAX_ORDER}")
    npairs = n * (n - 1) // 2
    ndata = (npairs + 5) // 6
    if len(line) - 1 != ndata:
        raise Graph6Error(
            f"byte {len(line)}: expected {ndata} data bytes for order {n}, "
            f"got {len(line) - 1}")
    bits = 0
    for ch in line[1:]:
        bits = bits << 6 | (ord(ch) - 63)
    pad = 6 * ndata - npairs
    if bits & ((1 << pad) - 1):
        raise Graph6Error(f"byte {len(line) - 1}: nonzero padding bits")
    return graph_from_bits(n, bits >> pad)


def to_graph6(g: Graph) -> str:
    """Encode with zero padding bits; inverse of parse_graph6."""
    npairs = g.n * (g.n - 1) // 2
    pad = (6 - npairs % 6) % 6
    bits = upper_triangle_bits(g) << pad
    ndata = (npairs + pad) // 6
    chars = [chr(g.n + 63)]
    for k in range(ndata - 1, -1, -1):
        chars.append(chr(63 + (bits >> 6 * k & 63)))
    return "".join(chars)


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Lexicographically minimal upper-triangle code over all relabelings.

    Equal forms mean isomorphic graphs (exhaustive over vertex permutations,
    with sound branch-and-bound pruning only). Ordering is (n, bits), which
    matches sorting canonical graph6 strings of equal order.
    """

    n: int
    bits: int

    def graph(self) -> Graph:
        return graph_from_bits(self.n, self.bits)

    def to_graph6(self) -> str:
        return to_graph6(self.graph())


def canonical_labeling(g: Graph) -> tuple[CanonicalForm, tuple[int, ...]]:
    """Canonical form plus the lexicographically least permutation reaching it.

    Returns (form, perm) with perm[new_label] = original vertex, i.e. the
    canonical graph C satisfies C.has_edge(a, b) == g.has_edge(perm[a], perm[b]).

    Depth-first search over label assignments, ordered by degree-descending
    candidates and pruned whenever the partial column code already exceeds the
    best complete code found; the pruning only discards provably non-minimal
    branches, so the minimum is exact.
    """
    n = g.n
    if n == 1:
        return CanonicalForm(1, 0), (0,)
    adj = g.adj
    best: list = [None, None]  # [cols, perm]

    def rec(placed: list[int], used: int, cols: list[int]) -> None:
        k = len(placed)
        if k == n:
            if best[0] is None or cols < best[0]:
                best[0] = list(cols)
                best[1] = tuple(placed)
            return
        cands = []
        for v in range(n):
            if used >> v & 1:
                continue
            av = adj[v]
            col = 0
            for u in placed:
                col = col << 1 | (av >> u & 1)
            cands.append((col, v))
        cands.sort()
        for col, v in cands:
            cols.append(col)
            # best may improve between siblings, so compare fresh each time
            if best[0] is not None and cols > best[0][:k + 1]:
                cols.pop()
                break  # candidates sorted by column, the rest are no better
            rec(placed + [v], used | 1 << v, cols)
            cols.pop()

    # Degree-partition seeding: trying high-degree vertices late tends to put
    # zeros early in the code, so the first leaf is already a tight bound.
    rec([], 0, [])
    cols, perm = best
    # cols[k] holds the k bits of column k (cols[0] is an empty placeholder)
    bits = 0
    for k, col in enumerate(cols):
        bits = bits << k | col
    return CanonicalForm(n, bits), perm


def canonical_form(g: Graph) -> CanonicalForm:
    return canonical_labeling(g)[0]


def is_connected(g: Graph) -> bool:
    """True iff one traversal from vertex 0 reaches every vertex (n=1 is connected)."""
    seen = 1
    frontier = 1
    adj = g.adj
    while frontier:
        nxt = 0
        m = frontier
        while m:
            low = m & -m
            nxt |= adj[low.bit_length() - 1]
            m ^= low
        frontier = nxt & ~seen
        seen |= frontier
    return seen == (1 << g.n) - 1


@functools.lru_cache(maxsize=None)
def enumerate_connected(n: int) -> tuple[CanonicalForm, ...]:
    """One canonical form per isomorphism class of connected graphs of order n.

    Orderly augmentation: every connected graph has a non-cut vertex, so each
    class of order n arises from some class of order n-1 by attaching one new
    vertex to a nonempty neighbor subset; canonical dedup collapses the
    collisions. Counts for n = 1..7 are 1, 1, 2, 6, 21, 112, 853.
    """
    if not 1 <= n <= MAX_ENUM_ORDER:
        raise ValueError(f"enumeration supports 1..{MAX_ENUM_ORDER}, got {n}")
    if n == 1:
        return (CanonicalForm(1, 0),)
    parents = enumerate_connected(n - 1)
    out: set[CanonicalForm] = set()
    for cf in parents:
        base = cf.graph().adj
        for s in range(1, 1 << (n - 1)):
            adj = [m | ((s >> v & 1) << (n - 1)) for v, m in enumerate(base)]
            adj.append(s)
            out.add(canonical_form(Graph(n, tuple(adj))))
    return tuple(sorted(out))


def wheel(k: int) -> Graph:
    """Hub vertex 0 joined to every vertex of the (k-1)-cycle 1..k-1."""
    if k < 4:
        raise ValueError(f"wheel needs at least 4 vertices, got {k}")
    edges = [(0, v) for v in range(1, k)]
    edges += [(v, v + 1) for v in range(1, k - 1)]
    edges.append((k - 1, 1))
    return Graph.from_edges(k, edges)
