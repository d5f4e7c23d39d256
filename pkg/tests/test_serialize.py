"""Round trips and error paths for the three exchange formats."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov import (
    ParseError,
    ball,
    build,
    from_edge_list,
    from_graph6,
    loads,
    path_tree,
    random_tree,
    star,
    to_dot,
    to_edge_list,
    to_graph6,
    trees_isomorphic,
)


def test_edge_list_round_trip():
    g = ball(2, 2)
    assert from_edge_list(to_edge_list(g)) == g


def test_edge_list_keeps_custom_boundary():
    g = build(4, [(0, 1), (1, 2), (2, 3)], boundary={0})
    assert from_edge_list(to_edge_list(g)) == g


def test_edge_list_relaxed():
    g = path_tree(1)
    text = to_edge_list(g)
    assert text.splitlines()[0] == "2 2"
    assert from_edge_list(text, strict=False) == g
    with pytest.raises(ParseError):
        from_edge_list(text, strict=True)


@given(st.integers(3, 14), st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_edge_list_round_trip_random(n, seed):
    g = random_tree(n, seed)
    assert from_edge_list(to_edge_list(g)) == g


def test_edge_list_errors():
    with pytest.raises(ParseError):
        from_edge_list("")
    with pytest.raises(ParseError):
        from_edge_list("3 x\n0\n0 1\n1 2")
    with pytest.raises(ParseError):
        from_edge_list("3 5\n0 2\n0 1")  # boundary count beyond data
    with pytest.raises(ParseError):
        from_edge_list("3 1\n1\n0 1 2")  # dangling vertex id
    with pytest.raises(ParseError):
        from_edge_list("4 2\n0 3\n0 1\n2 3")  # disconnected


def test_graph6_round_trip():
    g = star(4)
    h = from_graph6(to_graph6(g))
    assert h.n == g.n
    assert trees_isomorphic(g, h)


def test_graph6_header_accepted():
    g = path_tree(3)
    assert from_graph6(">>graph6<<" + to_graph6(g)).edges == g.edges


def test_graph6_boundary_defaults_to_leaves():
    g = build(4, [(0, 1), (1, 2), (2, 3)], boundary={0})
    h = from_graph6(to_graph6(g))
    assert h.boundary == frozenset({0, 3})


def test_graph6_errors():
    with pytest.raises(ParseError):
        from_graph6("")
    with pytest.raises(ParseError):
        from_graph6("\x01\x02 nonsense \xff")


@given(st.integers(3, 14), st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_graph6_round_trip_random(n, seed):
    g = random_tree(n, seed)
    assert from_graph6(to_graph6(g)).edges == g.edges


def test_to_dot_marks_boundary():
    g = star(3)
    dot = to_dot(g)
    assert dot.count("doublecircle") == 3
    assert dot.count("circle") == 4  # 3 double + 1 plain center
    assert "0 -- 1;" in dot
    assert dot.startswith("graph G {")


def test_loads_autodetect():
    g = ball(2, 1)
    assert loads(to_edge_list(g)) == g
    assert loads(to_graph6(g)).edges == g.edges
    with pytest.raises(ParseError):
        loads("")
    with pytest.raises(ParseError):
        loads("certainly not a graph \xff")
