"""Boundary-marked graphs and the surgeries the spectral pipeline needs.

A BoundaryGraph is a finite simple connected graph with a distinguished
nonempty set of boundary vertices.  Strict validation additionally requires
that no edge joins two boundary vertices and that the interior induces a
connected nonempty subgraph; the relaxed flag waives those two constraints
for the two-vertex base case used by the flow calculus.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .errors import GraphValidationError


@dataclass(frozen=True)
class BoundaryGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    boundary: frozenset[int]
    strict: bool = True

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def interior(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.boundary

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    @cached_property
    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    @cached_property
    def is_default_boundary(self) -> bool:
        return self.boundary == leaves(self)

    def boundary_sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.boundary))

    def __repr__(self) -> str:
        return (
            f"BoundaryGraph(n={self.n}, edges={list(self.edges)}, "
            f"boundary={sorted(self.boundary)}, strict={self.strict})"
        )


def _normalize_edges(edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out = []
    for e in edges:
        u, v = e
        out.append((u, v) if u < v else (v, u))
    return tuple(sorted(out))


def _connected(n: int, adjacency, subset=None) -> bool:
    verts = set(range(n)) if subset is None else set(subset)
    if not verts:
        return True
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adjacency[u]:
            if v in verts and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == verts


def build(
    n: int,
    edges: Iterable[tuple[int, int]],
    boundary: Iterable[int] | None = None,
    strict: bool = True,
) -> BoundaryGraph:
    """Validate and construct a BoundaryGraph.

    boundary=None marks every degree-1 vertex as boundary (the default
    convention; for trees that is exactly the leaf set).
    """
    if n < 2:
        raise GraphValidationError(f"need at least 2 vertices, got n={n}")
    norm = _normalize_edges(edges)
    seen_edges = set()
    for u, v in norm:
        if u == v:
            raise GraphValidationError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphValidationError(f"edge ({u},{v}) out of range for n={n}")
        if (u, v) in seen_edges:
            raise GraphValidationError(f"multi-edge ({u},{v})")
        seen_edges.add((u, v))

    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in norm:
        nbrs[u].append(v)
        nbrs[v].append(u)
    if not _connected(n, nbrs):
        raise GraphValidationError("graph is not connected")

    if boundary is None:
        bset = frozenset(v for v in range(n) if len(nbrs[v]) == 1)
    else:
        bset = frozenset(boundary)
        for v in bset:
            if not (0 <= v < n):
                raise GraphValidationError(f"boundary vertex {v} out of range")
    if not bset:
        raise GraphValidationError("boundary set is empty")

    if strict:
        for u, v in norm:
            if u in bset and v in bset:
                raise GraphValidationError(
                    f"edge ({u},{v}) joins two boundary vertices"
                )
        interior = set(range(n)) - bset
        if not interior:
            raise GraphValidationError(
                "empty interior (use strict=False for the 2-vertex base case)"
            )
        if not _connected(n, nbrs, interior):
            raise GraphValidationError("interior is not connected")

    return BoundaryGraph(n=n, edges=norm, boundary=bset, strict=strict)


def leaves(g: BoundaryGraph) -> frozenset[int]:
    """Vertices of degree 1."""
    return frozenset(v for v in range(g.n) if g.degree(v) == 1)


# ---------------------------------------------------------------------------
# branches

@dataclass(frozen=True)
class BranchRef:
    """The component of u after deleting tree edge (u, v); closed adds v back."""

    u: int
    v: int
    closed: bool
    vertices: tuple[int, ...]

    def as_graph(self, parent: BoundaryGraph) -> tuple[BoundaryGraph, dict[int, int]]:
        """Materialize the branch with boundary recomputed as its leaves."""
        verts = set(self.vertices)
        if self.closed:
            verts.add(self.v)
        if len(verts) < 2:
            raise GraphValidationError("branch too small to materialize")
        order = sorted(verts)
        relabel = {old: new for new, old in enumerate(order)}
        sub_edges = [
            (relabel[a], relabel[b])
            for a, b in parent.edges
            if a in verts and b in verts
        ]
        strict = len(order) > 2
        graph = build(len(order), sub_edges, boundary=None, strict=strict)
        return graph, relabel


def branch(g: BoundaryGraph, u: int, v: int, closed: bool = True) -> BranchRef:
    """Branch of a tree from directed edge (u, v): u's side of the cut."""
    if not g.is_tree:
        raise GraphValidationError("branches are defined on trees only")
    if v not in g.neighbors(u):
        raise GraphValidationError(f"({u},{v}) is not an edge")
    seen = {u}
    stack = [u]
    while stack:
        a = stack.pop()
        for b in g.neighbors(a):
            if b == v and a == u:
                continue
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return BranchRef(u=u, v=v, closed=closed, vertices=tuple(sorted(seen)))


# ---------------------------------------------------------------------------
# surgeries

class WedgeResult(NamedTuple):
    graph: BoundaryGraph
    map1: dict[int, int]
    map2: dict[int, int]
    vertex: int


class DoubleResult(NamedTuple):
    graph: BoundaryGraph
    wedge: int
    map1: dict[int, int]
    map2: dict[int, int]


def wedge_sum(
    g1: BoundaryGraph, x1: int, g2: BoundaryGraph, x2: int
) -> WedgeResult:
    """Glue g2 onto g1 by identifying x2 with x1.

    Copies stay edge-disjoint; the relabeling of each input is returned so
    chains of surgeries remain traceable.
    """
    if not (0 <= x1 < g1.n and 0 <= x2 < g2.n):
        raise GraphValidationError("glue vertex out of range")
    map1 = {v: v for v in range(g1.n)}
    map2 = {}
    nxt = g1.n
    for v in range(g2.n):
        if v == x2:
            map2[v] = x1
        else:
            map2[v] = nxt
            nxt += 1
    edges = list(g1.edges) + [(map2[a], map2[b]) for a, b in g2.edges]
    n = nxt
    is_tree_result = g1.is_tree and g2.is_tree
    if is_tree_result and g1.is_default_boundary and g2.is_default_boundary:
        bnd = None  # recompute as leaves
    else:
        bnd = {map1[v] for v in g1.boundary} | {map2[v] for v in g2.boundary}
        deg_glue = g1.degree(x1) + g2.degree(x2)
        if deg_glue > 1:
            bnd.discard(x1)
    strict = g1.strict and g2.strict
    graph = build(n, edges, boundary=bnd, strict=strict)
    return WedgeResult(graph=graph, map1=map1, map2=map2, vertex=x1)


def double_at(g: BoundaryGraph, x: int) -> DoubleResult:
    """Wedge g with a disjoint copy of itself at x."""
    w = wedge_sum(g, x, g, x)
    assert w.graph.n == 2 * g.n - 1
    return DoubleResult(graph=w.graph, wedge=w.vertex, map1=w.map1, map2=w.map2)


def add_pendant(g: BoundaryGraph, x: int) -> BoundaryGraph:
    """Attach a new leaf to x; the new vertex gets id g.n."""
    if not (0 <= x < g.n):
        raise GraphValidationError(f"vertex {x} out of range")
    edges = list(g.edges) + [(x, g.n)]
    if g.is_default_boundary:
        bnd = None
    else:
        bnd = set(g.boundary) | {g.n}
    return build(g.n + 1, edges, boundary=bnd, strict=g.strict)


def remove_leaf(g: BoundaryGraph, v: int) -> tuple[BoundaryGraph, dict[int, int]]:
    """Delete leaf v, relabel ids to stay dense, return (graph, old->new map)."""
    if g.degree(v) != 1:
        raise GraphValidationError(f"vertex {v} is not a leaf")
    relabel = {}
    for old in range(g.n):
        if old == v:
            continue
        relabel[old] = old if old < v else old - 1
    edges = [(relabel[a], relabel[b]) for a, b in g.edges if v not in (a, b)]
    if g.is_default_boundary:
        bnd = None
    else:
        bnd = {relabel[b] for b in g.boundary if b != v}
    graph = build(g.n - 1, edges, boundary=bnd, strict=g.strict)
    return graph, relabel


# ---------------------------------------------------------------------------
# generators

def path_tree(length: int) -> BoundaryGraph:
    """Path with `length` edges, vertices 0..length.

    length 1 yields the two-vertex base case under relaxed validation
    (both endpoints are boundary).
    """
    if length < 1:
        raise GraphValidationError("path needs at least 1 edge")
    return build(
        length + 1, [(i, i + 1) for i in range(length)], strict=length > 1
    )


def star(k: int) -> BoundaryGraph:
    """Star with center 0 and k leaves."""
    if k < 3:
        raise GraphValidationError("star needs at least 3 leaves")
    return build(k + 1, [(0, i) for i in range(1, k + 1)])


def ball(D: int, R: int) -> BoundaryGraph:
    """Radius-R ball in the (D+1)-regular tree, centered at vertex 0."""
    if D < 2 or R < 1:
        raise GraphValidationError("ball needs D >= 2 and R >= 1")
    edges = []
    frontier = [0]
    nxt = 1
    for depth in range(R):
        fanout = D + 1 if depth == 0 else D
        new_frontier = []
        for u in frontier:
            for _ in range(fanout):
                edges.append((u, nxt))
                new_frontier.append(nxt)
                nxt += 1
        frontier = new_frontier
    return build(nxt, edges)


def double_ball(D: int, R: int) -> BoundaryGraph:
    """Two adjacent centers 0, 1, each carrying a depth-R regular arm."""
    if D < 2 or R < 1:
        raise GraphValidationError("double_ball needs D >= 2 and R >= 1")
    edges = [(0, 1)]
    nxt = 2
    for center in (0, 1):
        frontier = [center]
        for _ in range(R):
            new_frontier = []
            for u in frontier:
                for _ in range(D):
                    edges.append((u, nxt))
                    new_frontier.append(nxt)
                    nxt += 1
            frontier = new_frontier
    return build(nxt, edges)


def _prufer_decode(seq: list[int], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for s in seq:
        degree[s] += 1
    heap = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(heap)
    edges = []
    for s in seq:
        leaf = heapq.heappop(heap)
        edges.append((leaf, s))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(heap, s)
    u = heapq.heappop(heap)
    v = heapq.heappop(heap)
    edges.append((u, v))
    return edges


def random_tree(n: int, seed: int) -> BoundaryGraph:
    """Uniform random labeled tree on n vertices via Prufer decoding."""
    if n < 3:
        raise GraphValidationError("random_tree needs n >= 3")
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    return build(n, _prufer_decode(seq, n))


# ---------------------------------------------------------------------------
# metrics and canonical forms

def _bfs_dist(g: BoundaryGraph, src: int) -> tuple[list[int], list[int]]:
    dist = [-1] * g.n
    parent = [-1] * g.n
    dist[src] = 0
    queue = [src]
    for u in queue:
        for v in g.neighbors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
    return dist, parent


def diameter(g: BoundaryGraph) -> int:
    """Largest combinatorial distance between two vertices."""
    best = 0
    for v in range(g.n):
        dist, _ = _bfs_dist(g, v)
        best = max(best, max(dist))
    return best


def diametral_path(g: BoundaryGraph) -> list[int]:
    """One shortest path realizing the diameter (smallest-id tie-break)."""
    dist0, _ = _bfs_dist(g, 0)
    x0 = max(range(g.n), key=lambda v: (dist0[v], -v))
    dist, parent = _bfs_dist(g, x0)
    xl = max(range(g.n), key=lambda v: (dist[v], -v))
    path = [xl]
    while parent[path[-1]] >= 0:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def tree_center(g: BoundaryGraph) -> int:
    """Center of a tree (smallest id if bicentral)."""
    if not g.is_tree:
        raise GraphValidationError("tree_center needs a tree")
    deg = [g.degree(v) for v in range(g.n)]
    remaining = set(range(g.n))
    layer = [v for v in remaining if deg[v] <= 1]
    while len(remaining) > 2:
        nxt = []
        for v in layer:
            remaining.discard(v)
            for u in g.neighbors(v):
                if u in remaining:
                    deg[u] -= 1
                    if deg[u] == 1:
                        nxt.append(u)
        layer = nxt
    return min(remaining)


def _ahu_root_form(g: BoundaryGraph, root: int) -> str:
    order = [root]
    parent = {root: -1}
    for u in order:
        for v in g.neighbors(u):
            if v != parent[u]:
                parent[v] = u
                order.append(v)
    label: dict[int, str] = {}
    for u in reversed(order):
        kids = sorted(label[v] for v in g.neighbors(u) if v != parent[u])
        label[u] = "(" + "".join(kids) + ")"
    return label[root]


def tree_canonical_form(g: BoundaryGraph) -> str:
    """AHU canonical string of the underlying free tree."""
    if not g.is_tree:
        raise GraphValidationError("canonical form needs a tree")
    deg = [g.degree(v) for v in range(g.n)]
    remaining = set(range(g.n))
    layer = [v for v in remaining if deg[v] <= 1]
    while len(remaining) > 2:
        nxt = []
        for v in layer:
            remaining.discard(v)
            for u in g.neighbors(v):
                if u in remaining:
                    deg[u] -= 1
                    if deg[u] == 1:
                        nxt.append(u)
        layer = nxt
    centers = sorted(remaining)
    return min(_ahu_root_form(g, c) for c in centers)


def trees_isomorphic(g1: BoundaryGraph, g2: BoundaryGraph) -> bool:
    return g1.n == g2.n and tree_canonical_form(g1) == tree_canonical_form(g2)


def is_subgraph(pattern: BoundaryGraph, host: BoundaryGraph, limit: int = 10) -> bool:
    """Injective homomorphism test by backtracking.

    Guarded by `limit` on both orders; raise it explicitly for the larger
    rigidity checks (n <= 20).
    """
    if max(pattern.n, host.n) > limit:
        raise GraphValidationError(
            f"subgraph check limited to {limit} vertices (got "
            f"{pattern.n} and {host.n})"
        )
    if pattern.n > host.n or len(pattern.edges) > len(host.edges):
        return False

    # order pattern vertices so each one touches an earlier one
    order = [max(range(pattern.n), key=pattern.degree)]
    placed = set(order)
    while len(order) < pattern.n:
        for v in range(pattern.n):
            if v not in placed and any(u in placed for u in pattern.neighbors(v)):
                order.append(v)
                placed.add(v)
                break

    host_edges = set(host.edges)

    def adjacent(a: int, b: int) -> bool:
        return (a, b) in host_edges if a < b else (b, a) in host_edges

    assignment: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        anchors = [u for u in pattern.neighbors(v) if u in assignment]
        if anchors:
            candidates = [
                c
                for c in host.neighbors(assignment[anchors[0]])
                if c not in used
            ]
        else:
            candidates = [c for c in range(host.n) if c not in used]
        for c in candidates:
            if host.degree(c) < pattern.degree(v):
                continue
            if any(not adjacent(c, assignment[u]) for u in anchors):
                continue
            assignment[v] = c
            used.add(c)
            if extend(i + 1):
                return True
            del assignment[v]
            used.discard(c)
        return False

    return extend(0)
