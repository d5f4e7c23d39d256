"""Graph serialization: edge-list text, graph6, DOT.

The edge-list format is the only one carrying the boundary set explicitly:

    n b
    id_1 ... id_b
    u v          (one line per edge)

graph6 exchanges structure only; on import the boundary defaults to the
degree-1 vertices.
"""

from __future__ import annotations

import networkx as nx

from .errors import ParseError
from .graphs import BoundaryGraph, build


def to_edge_list(g: BoundaryGraph) -> str:
    lines = [f"{g.n} {len(g.boundary)}"]
    lines.append(" ".join(str(v) for v in g.boundary_sorted()))
    for u, v in g.edges:
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def from_edge_list(text: str, strict: bool = True) -> BoundaryGraph:
    tokens = text.split()
    if len(tokens) < 2:
        raise ParseError("edge-list input too short")
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f"non-integer token in edge list: {exc}") from None
    n, b = values[0], values[1]
    if b < 0 or len(values) < 2 + b:
        raise ParseError("edge-list boundary count does not match data")
    boundary = values[2 : 2 + b]
    rest = values[2 + b :]
    if len(rest) % 2:
        raise ParseError("edge-list has a dangling vertex id")
    edges = [(rest[i], rest[i + 1]) for i in range(0, len(rest), 2)]
    try:
        return build(n, edges, boundary=boundary, strict=strict)
    except ValueError as exc:
        raise ParseError(f"edge-list describes an invalid graph: {exc}") from None


def to_graph6(g: BoundaryGraph) -> str:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return nx.to_graph6_bytes(h, header=False).decode("ascii").strip()


def from_graph6(text: str, strict: bool = True) -> BoundaryGraph:
    line = text.strip()
    if line.startswith(">>graph6<<"):
        line = line[len(">>graph6<<") :]
    if not line:
        raise ParseError("empty graph6 input")
    try:
        h = nx.from_graph6_bytes(line.encode("ascii"))
    except (nx.NetworkXError, ValueError, UnicodeEncodeError) as exc:
        raise ParseError(f"invalid graph6 data: {exc}") from None
    nodes = sorted(h.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    edges = [(index[a], index[b]) for a, b in h.edges()]
    try:
        return build(len(nodes), edges, boundary=None, strict=strict)
    except ValueError as exc:
        raise ParseError(f"graph6 describes an invalid graph: {exc}") from None


def to_dot(g: BoundaryGraph) -> str:
    lines = ["graph G {"]
    for v in range(g.n):
        shape = "doublecircle" if v in g.boundary else "circle"
        lines.append(f'  {v} [shape={shape}];')
    for u, v in g.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads(text: str, strict: bool = True) -> BoundaryGraph:
    """Parse edge-list or graph6, deciding by shape of the first line."""
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty graph input")
    first = stripped.splitlines()[0].split()
    if len(first) == 2 and all(t.isdigit() for t in first):
        return from_edge_list(stripped, strict=strict)
    return from_graph6(stripped, strict=strict)
