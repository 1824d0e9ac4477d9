import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import dataset_from
from echochamber.bipartite import BipartiteGraph, WeightedGraph, build_bipartite, project, read_edge_csv, write_edge_csv
from echochamber.data import COMMENT, LIKE


def _dense_oracle(m, side):
    c = m @ m.T if side == "left" else m.T @ m
    np.fill_diagonal(c, 0)
    return c


def test_two_pages_sharing_two_users():
    b = BipartiteGraph.from_incidence([[1, 1], [1, 1]], ["p", "q"], ["u1", "u2"])
    g = project(b, "pages")
    assert g.edges() == [("p", "q", 2.0)]
    assert g.node_weight.tolist() == [2.0, 2.0]


def test_star_has_no_projected_edges():
    b = BipartiteGraph.from_incidence(np.ones((1, 5)))
    assert project(b, "left").n_edges == 0
    users = project(b, "right")
    assert users.n_edges == 10 and set(users.weight.tolist()) == {1.0}


def test_random_incidence_matches_matrix_product(rng):
    m = (rng.random((10, 20)) < 0.3).astype(np.int64)
    b = BipartiteGraph.from_incidence(m)
    for side in ("left", "right"):
        assert np.array_equal(project(b, side).to_dense(), _dense_oracle(m, side))


@settings(max_examples=60, deadline=None)
@given(arrays(np.int8, st.tuples(st.integers(1, 8), st.integers(1, 12)), elements=st.integers(0, 1)))
def test_projection_is_off_diagonal_product(m):
    b = BipartiteGraph.from_incidence(m)
    for side in ("left", "right"):
        g = project(b, side)
        assert np.array_equal(g.to_dense(), _dense_oracle(m.astype(np.int64), side))
        assert np.array_equal(g.node_weight, np.diag(m @ m.T if side == "left" else m.T @ m))


def test_multiplicity_collapses_to_one_edge():
    d = dataset_from(["p"], [("a", "p"), ("b", "p"), ("c", "p")],
                     [("u", "a", LIKE), ("u", "b", LIKE), ("u", "c", LIKE)])
    b = build_bipartite(d)
    assert b.n_edges == 1
    assert b.incidence().tolist() == [[1]]


def test_kind_filter():
    d = dataset_from(["p", "q"], [("a", "p"), ("b", "q")], [("u", "a", COMMENT, 1, 0.0), ("u", "b", COMMENT, 2, 0.0)])
    assert build_bipartite(d, LIKE).n_edges == 0
    assert project(build_bipartite(d, COMMENT)).edges() == [("p", "q", 1.0)]
    both = build_bipartite(d, "all")
    assert both.edge_kinds == (frozenset({COMMENT}),) * 2
    with pytest.raises(ValueError):
        build_bipartite(d, "share")


def test_weighted_graph_contracts():
    with pytest.raises(ValueError, match="self-loop"):
        WeightedGraph.from_edges([("a", "a", 1)])
    with pytest.raises(ValueError, match="positive"):
        WeightedGraph.from_edges([("a", "b", 0)])
    with pytest.raises(ValueError, match="duplicate"):
        WeightedGraph.from_edges([("a", "b", 1), ("b", "a", 2)])


def test_weighted_graph_strengths_and_degrees():
    g = WeightedGraph.from_edges([("a", "b", 2), ("b", "c", 3)])
    assert g.strengths.tolist() == [2, 5, 3]
    assert g.degrees.tolist() == [1, 2, 1]
    assert g.total_weight == 5
    assert g.edge_weight("c", "b") == 3 and g.edge_weight("a", "c") == 0


def test_components():
    g = WeightedGraph.from_edges([("a", "b", 1), ("c", "d", 1)], ["a", "b", "c", "d", "e"])
    assert g.components().tolist() == [0, 0, 1, 1, 2]


def test_edge_csv_round_trip(tmp_path, rng):
    m = (rng.random((6, 15)) < 0.5).astype(int)
    g = project(BipartiteGraph.from_incidence(m))
    write_edge_csv(g, tmp_path / "e.csv")
    again = read_edge_csv(tmp_path / "e.csv", g.nodes)
    assert again == g
