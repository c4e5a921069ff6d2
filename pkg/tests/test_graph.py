import numpy as np
import pytest

from graphlv.graph import (
    GraphError,
    GraphParseError,
    VertexField,
    WeightedGraph,
    check_connected,
    generate,
    induce_bounded_subgraph,
    parse_graph,
    serialize_graph,
)


def test_minimal_file():
    g = parse_graph("v 1 1.0\nv 2 1.0\ne 1 2 1.0\n")
    assert g.vertices == ("1", "2")
    assert g.measure("1") == 1.0
    assert g.weight("1", "2") == 1.0
    assert g.edge_count == 1


def test_parse_comments_and_blanks():
    text = """
    # a path
    v 1 1.0   # vertex one
    v 2 2e0
    e 1 2 1.5e-1
    """
    g = parse_graph(text)
    assert g.measure("2") == 2.0
    assert g.weight("2", "1") == 0.15


def test_parse_self_loop_rejected():
    with pytest.raises(GraphParseError, match="self-loop"):
        parse_graph("v 1 1.0\nv 2 1.0\ne 1 1 1.0\n")


def test_parse_disconnected_rejected():
    with pytest.raises(GraphError, match="disconnected"):
        parse_graph("v 1 1\nv 2 1\nv 3 1\ne 1 2 1\n")


@pytest.mark.parametrize("text,fragment", [
    ("v 1\n", "expected: v"),
    ("v 1 1.0\nv 1 2.0\n", "duplicate vertex"),
    ("v 1 1.0\nv 2 1.0\ne 1 2 1.0\ne 2 1 3.0\n", "duplicate edge"),
    ("v 1 0.0\n", "nonpositive measure"),
    ("v 1 -1.0\n", "nonpositive measure"),
    ("v 1 1.0\nv 2 1.0\ne 1 2 0\n", "nonpositive weight"),
    ("v 1 1.0\ne 1 2 1.0\n", "undeclared vertex"),
    ("v 1 abc\n", "bad measure"),
    ("q 1\n", "unknown directive"),
    ("", "no vertices"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(GraphError, match=fragment):
        parse_graph(text)


def test_parse_error_reports_line_number():
    with pytest.raises(GraphParseError) as err:
        parse_graph("v 1 1.0\nv 2 1.0\ne 1 2 oops\n")
    assert err.value.line_no == 3


def test_boundary_marks_accepted():
    # interior {1,2} of the path 1-2-3 derives boundary {3}
    g = parse_graph("v 1 1\nv 2 1\nv 3 1\ne 1 2 1\ne 2 3 1\nb 3\n")
    assert g.n == 3


def test_boundary_marks_mismatch_rejected():
    # interior {1,2} of the path 1-2-3-4 derives {3}, not the marked {3,4}
    with pytest.raises(GraphError, match="derived boundary"):
        parse_graph("v 1 1\nv 2 1\nv 3 1\nv 4 1\n"
                    "e 1 2 1\ne 2 3 1\ne 3 4 1\nb 3\nb 4\n")


def test_roundtrip_bit_identical():
    rng = np.random.default_rng(7)
    verts = [f"x{i}" for i in range(8)]
    edges = [(verts[i], verts[i + 1], float(w)) for i, w in
             zip(range(7), rng.uniform(0.1, 5.0, 7))]
    edges.append((verts[0], verts[5], float(rng.uniform(0.1, 5.0))))
    measures = {v: float(m) for v, m in zip(verts, rng.uniform(0.1, 5.0, 8))}
    g = WeightedGraph(verts, measures, edges)
    h = parse_graph(serialize_graph(g))
    assert h.vertices == g.vertices
    assert np.array_equal(h.mu, g.mu)
    assert np.array_equal(h.edge_weight, g.edge_weight)
    assert h.edge_pairs() == g.edge_pairs()


def test_generate_path():
    g = generate("path", 3)
    assert g.vertices == ("1", "2", "3")
    assert g.edge_pairs() == [("1", "2"), ("2", "3")]
    assert set(g.neighbors("2")) == {"1", "3"}


def test_generate_cycle3_equals_complete3():
    c = generate("cycle", 3)
    k = generate("complete", 3)
    assert set(map(frozenset, c.edge_pairs())) == set(map(frozenset, k.edge_pairs()))


def test_generate_grid_2x2():
    g = generate("grid", rows=2, cols=2)
    assert g.n == 4
    assert g.edge_count == 4


def test_generate_star():
    g = generate("star", 5)
    assert g.edge_count == 4
    assert set(g.neighbors("1")) == {"2", "3", "4", "5"}


def test_generate_uniform_weight_measure():
    g = generate("cycle", 4, weight=2.5, measure=0.5)
    assert np.all(g.mu == 0.5)
    assert np.all(g.edge_weight == 2.5)


@pytest.mark.parametrize("kwargs,fragment", [
    (dict(kind="path", n=1), "n >= 2"),
    (dict(kind="cycle", n=2), "n >= 3"),
    (dict(kind="grid", rows=1, cols=3), "rows >= 2"),
    (dict(kind="path", n=3, weight=0.0), "weight"),
    (dict(kind="path", n=3, measure=-1.0), "measure"),
    (dict(kind="hypercube", n=3), "unknown graph kind"),
])
def test_generate_errors(kwargs, fragment):
    with pytest.raises(GraphError, match=fragment):
        generate(**kwargs)


def test_check_connected():
    assert check_connected(["1", "2", "3"], [("1", "2"), ("2", "3")])
    assert not check_connected(["1", "2", "3", "4"], [("1", "2"), ("3", "4")])
    assert check_connected(["1"], [])


def test_construction_rejects_bad_inputs():
    with pytest.raises(GraphError, match="no vertices"):
        WeightedGraph([], {}, [])
    with pytest.raises(GraphError, match="positive"):
        WeightedGraph(["a"], {"a": 0.0}, [])
    with pytest.raises(GraphError, match="self-loop"):
        WeightedGraph(["a", "b"], {"a": 1, "b": 1}, [("a", "a", 1.0)])
    with pytest.raises(GraphError, match="not a declared vertex"):
        WeightedGraph(["a", "b"], {"a": 1, "b": 1}, [("a", "c", 1.0)])
    with pytest.raises(GraphError, match="no measure"):
        WeightedGraph(["a", "b"], {"a": 1}, [("a", "b", 1.0)])


def test_arrays_are_readonly():
    g = generate("path", 3)
    with pytest.raises(ValueError):
        g.mu[0] = 2.0
    with pytest.raises(ValueError):
        g.edge_weight[0] = 2.0


# -- bounded subgraphs -------------------------------------------------------


def test_induce_p3_interior_12():
    g = generate("path", 3)
    s = induce_bounded_subgraph(g, ["1", "2"])
    assert s.interior == ("1", "2")
    assert s.boundary == ("3",)
    assert set(map(frozenset, s.closure.edge_pairs())) == {
        frozenset({"1", "2"}), frozenset({"2", "3"})}


def test_induce_p3_interior_2():
    g = generate("path", 3)
    s = induce_bounded_subgraph(g, ["2"])
    assert s.boundary == ("1", "3")
    assert s.closure.edge_count == 2


def test_induce_complete4_excludes_boundary_boundary_edges():
    # enumerate parent edges and apply the endpoint rule: the edge {3,4}
    # has both endpoints in the boundary, so it is dropped
    g = generate("complete", 4)
    s = induce_bounded_subgraph(g, ["1", "2"])
    assert s.boundary == ("3", "4")
    kept = set(map(frozenset, s.closure.edge_pairs()))
    assert frozenset({"3", "4"}) not in kept
    assert len(kept) == 5
    assert not s.closure.has_edge("3", "4")


def test_induce_boundary_recomputation_is_stable():
    g = generate("grid", rows=3, cols=3)
    s = induce_bounded_subgraph(g, ["r2c2", "r1c2"])
    again = induce_bounded_subgraph(g, list(s.interior))
    assert again.boundary == s.boundary
    assert again.closure.edge_pairs() == s.closure.edge_pairs()


def test_induce_errors():
    g = generate("path", 4)
    with pytest.raises(GraphError, match="empty"):
        induce_bounded_subgraph(g, [])
    with pytest.raises(GraphError, match="whole vertex set"):
        induce_bounded_subgraph(g, ["1", "2", "3", "4"])
    with pytest.raises(GraphError, match="not in the graph"):
        induce_bounded_subgraph(g, ["9"])
    # interior {1, 4} of the path 1-2-3-4 leaves the domain in two pieces
    with pytest.raises(GraphError, match="disconnected"):
        induce_bounded_subgraph(g, ["1", "4"])


def test_closure_vertex_order_interior_first():
    g = generate("path", 4)
    s = induce_bounded_subgraph(g, ["2", "3"])
    assert s.closure.vertices == ("2", "3", "1", "4")
    assert s.is_interior("2") and s.is_boundary("1")


def test_boundary_vertices_touch_interior():
    g = generate("grid", rows=3, cols=3)
    s = induce_bounded_subgraph(g, ["r1c1", "r1c2", "r2c1"])
    for z in s.boundary:
        assert any(n in s.interior for n in g.neighbors(z))


# -- vertex fields -----------------------------------------------------------


def test_field_alignment_and_lookup():
    g = generate("path", 3)
    f = VertexField.from_dict(g, {"1": 0.5, "2": 1.5, "3": 2.5})
    assert f["2"] == 1.5
    assert f.as_dict() == {"1": 0.5, "2": 1.5, "3": 2.5}


def test_field_requires_full_domain():
    g = generate("path", 3)
    with pytest.raises(ValueError, match="missing"):
        VertexField.from_dict(g, {"1": 0.0, "2": 0.0})
    with pytest.raises(ValueError, match="unknown vertex"):
        VertexField.from_dict(g, {"1": 0.0, "2": 0.0, "3": 0.0, "4": 0.0})
    with pytest.raises(ValueError, match="3 vertices"):
        VertexField(g, [1.0, 2.0])


def test_field_values_are_copied_and_frozen():
    g = generate("path", 3)
    src = np.zeros(3)
    f = VertexField(g, src)
    src[0] = 9.0
    assert f["1"] == 0.0
    with pytest.raises(ValueError):
        f.values[0] = 1.0
