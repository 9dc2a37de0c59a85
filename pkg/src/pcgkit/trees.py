"""Edge-weighted trees: leaf distances, degree-2 suppression, centipede structure.

Weights are exact rationals throughout. Threshold comparisons elsewhere in the
package rely on that; nothing here may round.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

MAX_TOPOLOGY_LEAVES = 8


@dataclass(frozen=True)
class Topology:
    """Unweighted tree shape with an ordered edge list and ordered leaf list.

    Vertex ids are dense 0..n_vertices-1. The edge order is meaningful: for
    reduced centipedes it is the fixed order that weight vectors index.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    leaves: tuple[int, ...]

    def __post_init__(self):
        v = self.n_vertices
        if v < 1:
            raise ValueError("empty tree")
        if len(self.edges) != v - 1:
            raise ValueError(f"{len(self.edges)} edges on {v} vertices is not a tree")
        deg = [0] * v
        seen = set()
        for u, w in self.edges:
            if not (0 <= u < v and 0 <= w < v) or u == w:
                raise ValueError(f"bad edge ({u}, {w})")
            key = (min(u, w), max(u, w))
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {w})")
            seen.add(key)
            deg[u] += 1
            deg[w] += 1
        if v > 1 and not _spans(self.adjacency(), v):
            raise ValueError("edges do not form a connected tree")
        if sorted(self.leaves) != [x for x in range(v) if deg[x] == 1]:
            raise ValueError("leaf list does not match the degree-1 vertices")

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, w in self.edges:
            adj[u].append(w)
            adj[w].append(u)
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for u, w in self.edges:
            deg[u] += 1
            deg[w] += 1
        return deg

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)


def _spans(adj: list[list[int]], v: int) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == v


@dataclass(frozen=True)
class WeightedTree:
    """Tree shape plus positive rational edge weights aligned with shape.edges."""

    shape: Topology
    weights: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        ws = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if len(ws) != len(self.shape.edges):
            raise ValueError("weight count differs from edge count")
        for w in ws:
            if w <= 0:
                raise ValueError(f"non-positive edge weight {w}")

    @property
    def n_leaves(self) -> int:
        return self.shape.n_leaves

    def edge_items(self) -> list[tuple[int, int, Fraction]]:
        return [(u, v, w) for (u, v), w in zip(self.shape.edges, self.weights)]

    def is_integral(self) -> bool:
        return all(w.denominator == 1 for w in self.weights)


def leaf_distance_matrix(t: WeightedTree) -> tuple[tuple[Fraction, ...], ...]:
    """Exact path-weight sums between every leaf pair; diagonal 0, symmetric."""
    n = t.shape.n_vertices
    adjw: list[list[tuple[int, Fraction]]] = [[] for _ in range(n)]
    for u, v, w in t.edge_items():
        adjw[u].append((v, w))
        adjw[v].append((u, w))
    leaves = t.shape.leaves
    k = len(leaves)
    out = [[Fraction(0)] * k for _ in range(k)]
    for i, src in enumerate(leaves):
        dist: dict[int, Fraction] = {src: Fraction(0)}
        stack = [src]
        while stack:
            v = stack.pop()
            dv = dist[v]
            for nb, w in adjw[v]:
                if nb not in dist:
                    dist[nb] = dv + w
                    stack.append(nb)
        for j, dst in enumerate(leaves):
            out[i][j] = dist[dst]
    return tuple(tuple(row) for row in out)


def suppress_degree2(t: WeightedTree) -> WeightedTree:
    """Merge each degree-2 vertex's two edges into one carrying their weight sum.

    Leaf distances are preserved exactly. Trees of fewer than 4 vertices cannot
    host the merge, so a degree-2 vertex there is an error.
    """
    degs = t.shape.degrees()
    if 2 not in degs:
        return t
    edges = [[u, v, w] for u, v, w in t.edge_items()]
    alive = [True] * t.shape.n_vertices
    n_alive = t.shape.n_vertices
    while True:
        deg: dict[int, list[int]] = {}
        for idx, (u, v, _) in enumerate(edges):
            deg.setdefault(u, []).append(idx)
            deg.setdefault(v, []).append(idx)
        target = min((v for v, inc in deg.items() if len(inc) == 2), default=None)
        if target is None:
            break
        if n_alive < 4:
            raise ValueError("degree-2 vertex in a tree of fewer than 4 vertices")
        ia, ib = deg[target]
        ea, eb = edges[ia], edges[ib]
        x = ea[0] if ea[1] == target else ea[1]
        y = eb[0] if eb[1] == target else eb[1]
        edges[ia] = [x, y, ea[2] + eb[2]]
        del edges[ib]
        alive[target] = False
        n_alive -= 1
    remap = {}
    for v in range(t.shape.n_vertices):
        if alive[v]:
            remap[v] = len(remap)
    shape = Topology(
        n_alive,
        tuple((remap[u], remap[v]) for u, v, _ in edges),
        tuple(remap[v] for v in t.shape.leaves),
    )
    return WeightedTree(shape, tuple(w for _, _, w in edges))


@functools.lru_cache(maxsize=None)
def reduced_centipede(n: int) -> Topology:
    """The n-leaf reduced centipede with its fixed edge order.

    Leaves 0..n-1 stand for l_1..l_n and spine vertices n..2n-4 for s_2..s_{n-1}.
    Edge positions: 0 is (l_1, s_2); i is (l_{i+1}, s_{i+1}) for 1 <= i <= n-2;
    n-1 is (l_n, s_{n-1}); n-1+j is the spine edge (s_{j+1}, s_{j+2}) for
    1 <= j <= n-3. Total 2n-3 edges, no degree-2 vertex. For n=3 the spine
    collapses to the single vertex s_2 and the shape is the 3-leaf star.
    """
    if n < 3:
        raise ValueError(f"reduced centipede needs at least 3 leaves, got {n}")

    def spine(i: int) -> int:  # paper's s_i, 2 <= i <= n-1
        return n + i - 2

    edges = [(0, spine(2))]
    edges += [(i - 1, spine(i)) for i in range(2, n)]
    edges += [(n - 1, spine(n - 1))]
    edges += [(spine(i), spine(i + 1)) for i in range(2, n - 1)]
    return Topology(2 * n - 2, tuple(edges), tuple(range(n)))


def centipede_mirror_permutation(n: int) -> tuple[int, ...]:
    """Edge-index involution induced by reversing the leaf order of the centipede."""
    perm = list(range(2 * n - 3))
    for i in range(n):
        perm[i] = n - 1 - i
    for i in range(n, 2 * n - 3):
        perm[i] = 3 * n - 4 - i
    return tuple(perm)


@dataclass(frozen=True)
class CentipedeWeightVector:
    """Positive integer weights for the reduced centipede, in its fixed edge order."""

    n: int
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if self.n < 3:
            raise ValueError("weight vector needs n >= 3")
        if len(self.entries) != 2 * self.n - 3:
            raise ValueError(
                f"expected {2 * self.n - 3} entries for n={self.n}, got {len(self.entries)}")
        if any(e < 1 for e in self.entries):
            raise ValueError("entries must be >= 1")

    def mirror(self) -> "CentipedeWeightVector":
        perm = centipede_mirror_permutation(self.n)
        return CentipedeWeightVector(self.n, tuple(self.entries[p] for p in perm))


def apply_weights(template: Topology, v: CentipedeWeightVector) -> WeightedTree:
    """Attach a centipede weight vector to its template, checking the match."""
    if template != reduced_centipede(v.n):
        raise ValueError(
            f"template ({len(template.edges)} edges) does not match the reduced "
            f"centipede for n={v.n} ({2 * v.n - 3} edges)")
    return WeightedTree(template, tuple(Fraction(e) for e in v.entries))


def internal_path(shape: Topology) -> list[int] | None:
    """Ordered internal vertices when they induce a path (the caterpillar spine).

    Returns None when the internal vertices do not form a path, i.e. the tree
    is not a caterpillar. A single internal vertex counts as a trivial path.
    """
    deg = shape.degrees()
    internal = [v for v in range(shape.n_vertices) if deg[v] >= 2]
    if not internal:
        return None
    iset = set(internal)
    adj = shape.adjacency()
    nbrs = {v: [u for u in adj[v] if u in iset] for v in internal}
    ends = [v for v in internal if len(nbrs[v]) <= 1]
    if len(internal) == 1:
        return internal
    if len(ends) != 2 or any(len(nbrs[v]) > 2 for v in internal):
        return None
    start = min(ends)
    path = [start]
    prev = None
    while True:
        nxt = [u for u in nbrs[path[-1]] if u != prev]
        if not nxt:
            break
        prev = path[-1]
        path.append(nxt[0])
    return path if len(path) == len(internal) else None


def is_caterpillar(shape: Topology) -> bool:
    return internal_path(shape) is not None


# ---------------------------------------------------------------------------
# Topology enumeration: all degree-2-free trees with a given leaf count.
# ---------------------------------------------------------------------------

def _rooted_code(adj: list[list[int]], v: int, parent: int) -> tuple:
    return tuple(sorted(_rooted_code(adj, u, v) for u in adj[v] if u != parent))


def _centroids(adj: list[list[int]], n: int) -> list[int]:
    size = [0] * n
    best = [n] * n

    def walk(v: int, parent: int) -> None:
        size[v] = 1
        heavy = 0
        for u in adj[v]:
            if u != parent:
                walk(u, v)
                size[v] += size[u]
                heavy = max(heavy, size[u])
        best[v] = max(heavy, n - size[v])

    walk(0, -1)
    m = min(best)
    return [v for v in range(n) if best[v] == m]


def _free_code(edges: list[tuple[int, int]], n: int) -> tuple:
    if n == 1:
        return ()
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return min(_rooted_code(adj, c, -1) for c in _centroids(adj, n))


def _free_trees(n: int) -> list[list[tuple[int, int]]]:
    """All non-isomorphic trees on n vertices, as edge lists (augment + dedup)."""
    level: dict[tuple, list[tuple[int, int]]] = {(): []}
    for m in range(2, n + 1):
        nxt: dict[tuple, list[tuple[int, int]]] = {}
        for edges in level.values():
            for v in range(m - 1):
                cand = edges + [(v, m - 1)]
                code = _free_code(cand, m)
                if code not in nxt:
                    nxt[code] = cand
        level = nxt
    return [level[c] for c in sorted(level)]


def _canonical_topology(edges: list[tuple[int, int]], n: int) -> Topology:
    """Renumber a tree deterministically from its canonical rooted form."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    root = min(_centroids(adj, n),
               key=lambda c: (_rooted_code(adj, c, -1), c))
    ids: dict[int, int] = {}
    out_edges: list[tuple[int, int]] = []

    def assign(v: int, parent: int) -> None:
        ids[v] = len(ids)
        children = sorted((u for u in adj[v] if u != parent),
                          key=lambda u: (_rooted_code(adj, u, v), u))
        for u in children:
            out_edges.append((ids[v], len(ids)))
            assign(u, v)

    assign(root, -1)
    deg = [0] * n
    for u, v in out_edges:
        deg[u] += 1
        deg[v] += 1
    leaves = tuple(v for v in range(n) if deg[v] == 1)
    return Topology(n, tuple(out_edges), leaves)


@functools.lru_cache(maxsize=None)
def enumerate_leaf_topologies(n: int) -> tuple[Topology, ...]:
    """All non-isomorphic trees with exactly n leaves and no degree-2 vertex.

    Internal degrees >= 3 cap the vertex count at 2n-2, so scanning all free
    trees up to that order and filtering is exhaustive. Deterministic order:
    by vertex count, then by canonical code.
    """
    if not 3 <= n <= MAX_TOPOLOGY_LEAVES:
        raise ValueError(f"leaf count {n} outside 3..{MAX_TOPOLOGY_LEAVES}")
    out = []
    for m in range(n + 1, 2 * n - 1):
        for edges in _free_trees(m):
            deg = [0] * m
            for u, v in edges:
                deg[u] += 1
                deg[v] += 1
            if deg.count(1) == n and 2 not in deg:
                out.append(_canonical_topology(edges, m))
    return tuple(out)


def topologies_isomorphic(a: Topology, b: Topology) -> bool:
    """Unlabeled-tree isomorphism (leaf order ignored)."""
    if a.n_vertices != b.n_vertices:
        return False
    return _free_code(list(a.edges), a.n_vertices) == _free_code(list(b.edges), b.n_vertices)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def tree_to_json(t: WeightedTree) -> dict:
    """JSON form; reduced centipedes with integer weights use the short form."""
    n = t.n_leaves
    if (n >= 3 and t.is_integral() and t.shape == reduced_centipede(n)):
        return {"centipede": n, "weights": [int(w) for w in t.weights]}
    return {
        "n_leaves": t.n_leaves,
        "edges": [[u, v, str(w)] for u, v, w in t.edge_items()],
        "leaf_order": list(t.shape.leaves),
    }


def tree_from_json(obj: dict) -> WeightedTree:
    if "centipede" in obj:
        n = int(obj["centipede"])
        vec = CentipedeWeightVector(n, tuple(int(w) for w in obj["weights"]))
        return apply_weights(reduced_centipede(n), vec)
    edges = [(int(u), int(v)) for u, v, _ in obj["edges"]]
    weights = tuple(Fraction(str(w)) for _, _, w in obj["edges"])
    n_vertices = max(max(u, v) for u, v in edges) + 1
    shape = Topology(n_vertices, tuple(edges), tuple(int(x) for x in obj["leaf_order"]))
    if shape.n_leaves != int(obj["n_leaves"]):
        raise ValueError("n_leaves does not match the edge list")
    return WeightedTree(shape, weights)
