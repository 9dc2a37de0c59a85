"""PCG extraction from witnesses and the witness-preserving transformations.

A witness is a checkable certificate (tree, weights, d_min, d_max, leaf
labeling) that a graph is a pairwise compatibility graph: vertices u, v are
adjacent exactly when the tree distance of their leaves lies in the closed
interval [d_min, d_max]. All arithmetic is exact rational; there is no
tolerance anywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .graphs import Graph, parse_graph6, to_graph6
from .trees import (
    WeightedTree,
    internal_path,
    leaf_distance_matrix,
    reduced_centipede,
    tree_from_json,
    tree_to_json,
)


@dataclass(frozen=True)
class Witness:
    """Certificate that some graph is the PCG of this weighted tree.

    labeling[i] is the graph vertex assigned to leaf i (position in the
    tree's leaf order); it must be a bijection onto 0..n_leaves-1.
    """

    tree: WeightedTree
    d_min: Fraction
    d_max: Fraction
    labeling: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "d_min", Fraction(self.d_min))
        object.__setattr__(self, "d_max", Fraction(self.d_max))
        object.__setattr__(self, "labeling", tuple(self.labeling))
        if not 0 <= self.d_min <= self.d_max:
            raise ValueError(f"need 0 <= d_min <= d_max, got {self.d_min}, {self.d_max}")
        k = self.tree.n_leaves
        if sorted(self.labeling) != list(range(k)):
            raise ValueError("labeling is not a bijection onto the vertex range")

    def is_integral(self) -> bool:
        return (self.tree.is_integral()
                and self.d_min.denominator == 1 and self.d_max.denominator == 1)


def identity_labeling(k: int) -> tuple[int, ...]:
    return tuple(range(k))


def extract_pcg(wit: Witness) -> Graph:
    """The graph on the leaf labels with edges at in-interval leaf distances."""
    dm = leaf_distance_matrix(wit.tree)
    k = wit.tree.n_leaves
    lab = wit.labeling
    edges = [(lab[i], lab[j]) for i in range(k) for j in range(i + 1, k)
             if wit.d_min <= dm[i][j] <= wit.d_max]
    return Graph.from_edges(k, edges)


@dataclass(frozen=True)
class PairCheck:
    """One leaf pair of a verification run."""

    leaf_i: int
    leaf_j: int
    vertex_u: int
    vertex_v: int
    distance: Fraction
    in_interval: bool
    has_edge: bool

    @property
    def ok(self) -> bool:
        return self.in_interval == self.has_edge


@dataclass(frozen=True)
class WitnessReport:
    ok: bool
    pairs: tuple[PairCheck, ...]

    def __bool__(self) -> bool:
        return self.ok

    def mismatches(self) -> tuple[PairCheck, ...]:
        return tuple(p for p in self.pairs if not p.ok)


def verify_witness(wit: Witness, g: Graph) -> WitnessReport:
    """Labeled equality of extract_pcg(wit) with g, with a per-pair breakdown."""
    k = wit.tree.n_leaves
    if g.n != k:
        raise ValueError(f"graph order {g.n} differs from leaf count {k}")
    dm = leaf_distance_matrix(wit.tree)
    lab = wit.labeling
    pairs = []
    ok = True
    for i in range(k):
        for j in range(i + 1, k):
            inside = wit.d_min <= dm[i][j] <= wit.d_max
            edge = g.has_edge(lab[i], lab[j])
            pairs.append(PairCheck(i, j, lab[i], lab[j], dm[i][j], inside, edge))
            ok = ok and inside == edge
    return WitnessReport(ok, tuple(pairs))


def integerize_witness(wit: Witness) -> Witness:
    """Clear denominators by the common multiple; every <= comparison survives.

    Returns the input unchanged when it is already integral.
    """
    if wit.is_integral():
        return wit
    scale = 1
    for w in wit.tree.weights:
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    for d in (wit.d_min, wit.d_max):
        scale = scale * d.denominator // math.gcd(scale, d.denominator)
    tree = WeightedTree(wit.tree.shape, tuple(w * scale for w in wit.tree.weights))
    return Witness(tree, wit.d_min * scale, wit.d_max * scale, wit.labeling)


def normalize_witness(wit: Witness) -> Witness:
    """Shift leaf-edge weights so that the smallest one is exactly 1.

    Every leaf pair's distance drops by twice the shift, so both thresholds
    drop by the same amount; a d_min that would go negative clamps to 0 (no
    distance sat below it anyway). Rational inputs are integerized first.
    """
    wit = integerize_witness(wit)
    shape = wit.tree.shape
    if shape.n_leaves < 3:
        raise ValueError("normalization needs at least 3 leaves")
    deg = shape.degrees()
    leaf_edge = [deg[u] == 1 or deg[v] == 1 for u, v in shape.edges]
    w1 = min(w for w, is_leaf in zip(wit.tree.weights, leaf_edge) if is_leaf)
    if w1 == 1:
        return wit
    shift = w1 - 1
    weights = tuple(w - shift if is_leaf else w
                    for w, is_leaf in zip(wit.tree.weights, leaf_edge))
    d_min = max(wit.d_min - 2 * shift, Fraction(0))
    d_max = max(wit.d_max - 2 * shift, Fraction(0))
    return Witness(WeightedTree(shape, weights), d_min, d_max, wit.labeling)


@dataclass(frozen=True)
class TransformReport:
    """Audit record of one caterpillar-to-centipede rewrite.

    L is the least gap between a threshold and a non-edge distance; N counts
    the spine edges that collapsed to weight zero and then received epsilon;
    epsilon = L / (N + 1); d_max_new = d_max + epsilon * N. zero_edges holds
    0-based positions in the centipede edge order. A complete target graph has
    no excluded distance, so no L; the clique rule pins epsilon = 1 there and
    L is recorded as N + 1 to keep the quotient identity.
    """

    L: Fraction
    N: int
    epsilon: Fraction
    d_max_new: Fraction
    zero_edges: tuple[int, ...]
    is_clique: bool = False


def caterpillar_to_reduced_centipede(
    wit: Witness, leaf_order: tuple[int, ...] | None = None,
) -> tuple[Witness, TransformReport]:
    """Rewrite a caterpillar witness onto the reduced centipede.

    leaf_order lists leaf indices left to right in a planar drawing of the
    caterpillar (leaves sharing a spine vertex are consecutive, blocks follow
    the spine). Defaults to the leaves as listed; an order that no planar
    drawing realizes is an error.

    Leaf edges transfer to the centipede positionally; a centipede spine edge
    gets weight 0 when its two leaves shared a spine vertex, else the weight
    of the spine edge between their parents. Zero weights then become epsilon
    and d_max grows by epsilon * N, which provably changes no in/out
    classification. Returns the input untouched when it already is a reduced
    centipede.
    """
    shape = wit.tree.shape
    n = shape.n_leaves
    if n < 3:
        raise ValueError("transform needs at least 3 leaves")
    deg = shape.degrees()
    if 2 in deg:
        raise ValueError("caterpillar has a degree-2 vertex; suppress it first")
    spine = internal_path(shape)
    if spine is None:
        raise ValueError("tree is not a caterpillar")
    if leaf_order is None:
        leaf_order = identity_labeling(n)
    leaf_order = tuple(leaf_order)
    if sorted(leaf_order) != list(range(n)):
        raise ValueError("leaf_order is not a permutation of the leaf indices")

    adj = shape.adjacency()
    parent = {v: adj[v][0] for v in shape.leaves}
    ordered_leaves = [shape.leaves[i] for i in leaf_order]
    pos = {s: i for i, s in enumerate(spine)}
    seq = [pos[parent[v]] for v in ordered_leaves]
    if seq[0] != 0:
        seq = [len(spine) - 1 - p for p in seq]
    steps_ok = all(0 <= b - a <= 1 for a, b in zip(seq, seq[1:]))
    if not (steps_ok and seq[0] == 0 and seq[-1] == len(spine) - 1):
        raise ValueError("leaf_order is not a planar order for this caterpillar")

    weight_of = {frozenset(e): w for e, w in zip(shape.edges, wit.tree.weights)}
    # end spine vertices carry >= 2 leaves (no degree-2), so the outermost
    # leaf pairs share parents and need no spine edge of their own
    assert parent[ordered_leaves[0]] == parent[ordered_leaves[1]]
    assert parent[ordered_leaves[-1]] == parent[ordered_leaves[-2]]

    # w'' on the centipede, in its fixed edge order; spine entries may be 0
    w2: list[Fraction] = [weight_of[frozenset((v, parent[v]))] for v in ordered_leaves]
    zero_edges = []
    for j in range(1, n - 2):  # transition between ordered leaves j and j+1
        pa = parent[ordered_leaves[j]]
        pb = parent[ordered_leaves[j + 1]]
        if pa == pb:
            w2.append(Fraction(0))
            zero_edges.append(n + j - 1)
        else:
            w2.append(weight_of[frozenset((pa, pb))])

    dm = leaf_distance_matrix(wit.tree)

    def d2(i: int, j: int) -> Fraction:  # distance of centipede leaves i, j under w''
        return dm[leaf_order[i]][leaf_order[j]]

    N = len(zero_edges)
    gaps = [min(abs(wit.d_min - d2(i, j)), abs(wit.d_max - d2(i, j)))
            for i in range(n) for j in range(i + 1, n)
            if not wit.d_min <= d2(i, j) <= wit.d_max]
    if N == 0:
        # already a reduced centipede; epsilon = L/(N+1) degenerates to L
        L = min(gaps) if gaps else Fraction(1)
        return wit, TransformReport(L, 0, L, wit.d_max, (), is_clique=not gaps)
    if gaps:
        L = min(gaps)
        epsilon = L / (N + 1)
        is_clique = False
    else:
        epsilon = Fraction(1)
        L = Fraction(N + 1)
        is_clique = True
    weights = tuple(w if w else epsilon for w in w2)
    d_max_new = wit.d_max + epsilon * N
    new_labeling = tuple(wit.labeling[i] for i in leaf_order)
    out = Witness(WeightedTree(reduced_centipede(n), weights),
                  wit.d_min, d_max_new, new_labeling)
    report = TransformReport(L, N, epsilon, d_max_new, tuple(zero_edges), is_clique)
    return out, report


# ---------------------------------------------------------------------------
# Witness records (one JSON object per line in witness databases)
# ---------------------------------------------------------------------------

def witness_record(graph: Graph, wit: Witness) -> dict:
    return {
        "graph": to_graph6(graph),
        "tree": tree_to_json(wit.tree),
        "d_min": str(wit.d_min),
        "d_max": str(wit.d_max),
        "labeling": list(wit.labeling),
    }


def witness_from_record(obj: dict) -> tuple[Graph, Witness]:
    graph = parse_graph6(obj["graph"])
    tree = tree_from_json(obj["tree"])
    wit = Witness(tree, Fraction(str(obj["d_min"])), Fraction(str(obj["d_max"])),
                  tuple(int(x) for x in obj["labeling"]))
    return graph, wit
