import numpy as np
import pytest
from scipy import integrate

from conftest import random_graph
from echochamber.backbone import (FIGURE_ALPHA, backbone_for_figure, disparity_filter, disparity_pvalue,
                                  endpoint_pvalues)
from echochamber.bipartite import WeightedGraph


def integrated_pvalue(p, k):
    """1 - (k-1) * integral_0^p (1-x)^(k-2) dx, evaluated by quadrature."""
    val, _ = integrate.quad(lambda x: (1.0 - x) ** (k - 2), 0.0, p, epsabs=1e-14, epsrel=1e-13)
    return 1.0 - (k - 1) * val


def reference_backbone(g, alpha):
    """Independent loop-based reimplementation of the filter."""
    s = {n: 0.0 for n in g.nodes}
    k = {n: 0 for n in g.nodes}
    for a, b, w in g.edges():
        for n in (a, b):
            s[n] += w
            k[n] += 1
    kept = set()
    for a, b, w in g.edges():
        for n in (a, b):
            if k[n] > 1 and (1 - w / s[n]) ** (k[n] - 1) < alpha:
                kept.add((a, b))
    return kept


def test_closed_form_matches_quadrature_on_grid():
    ks = np.arange(2, 51)
    ps = np.arange(1, 100) / 100.0
    worst = 0.0
    for k in ks:
        closed = disparity_pvalue(ps, k)
        for p, c in zip(ps, closed):
            worst = max(worst, abs(c - integrated_pvalue(p, int(k))))
    assert worst < 1e-12


def test_degree_one_is_undefined():
    assert np.isnan(disparity_pvalue(0.5, 1))


@pytest.mark.parametrize("k", [2, 3, 5, 10, 50])
def test_uniform_star_keeps_nothing(k):
    g = WeightedGraph.from_edges([("hub", f"leaf{i}", 1.0) for i in range(k)])
    res = disparity_filter(g, FIGURE_ALPHA)
    expected = (1 - 1 / k) ** (k - 1)
    assert expected > FIGURE_ALPHA
    assert np.allclose(res.per_edge_alpha, expected, rtol=0, atol=1e-15)
    assert res.graph.n_edges == 0


def test_alpha_one_keeps_edges_with_a_degree_two_endpoint():
    g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 5), ("d", "e", 2)])
    res = disparity_filter(g, 1.0)
    assert res.kept_edges == [("a", "b", 1.0), ("b", "c", 5.0)]


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
def test_alpha_out_of_range(alpha):
    with pytest.raises(ValueError):
        disparity_filter(WeightedGraph.from_edges([("a", "b", 1)]), alpha)


def test_empty_graph():
    g = WeightedGraph.from_edges([], ["a", "b"])
    assert backbone_for_figure(g).graph.n_edges == 0


def test_single_edge_dropped():
    res = backbone_for_figure(WeightedGraph.from_edges([("a", "b", 3)]))
    assert res.graph.n_edges == 0
    assert res.per_edge_alpha.tolist() == [1.0]


def test_dominant_edge_survives():
    edges = [("hub", "big", 100.0)] + [("hub", f"x{i}", 1.0) for i in range(9)]
    res = disparity_filter(WeightedGraph.from_edges(edges), 0.05)
    assert res.kept_edges == [("big", "hub", 100.0)] or res.kept_edges == [("hub", "big", 100.0)]


def test_heavy_tailed_weights_match_reference(rng):
    for _ in range(5):
        edges = []
        for i in range(40):
            for j in range(i + 1, 40):
                if rng.random() < 0.2:
                    edges.append((f"n{i}", f"n{j}", float(np.ceil(rng.pareto(1.2) * 5))))
        g = WeightedGraph.from_edges(edges)
        for alpha in (0.01, 0.03, 0.2):
            got = {(a, b) for a, b, _ in disparity_filter(g, alpha).kept_edges}
            assert got == reference_backbone(g, alpha)


def test_rule_both_is_subset_of_any(rng):
    g = random_graph(rng, 20, 0.4)
    any_ = disparity_filter(g, 0.3, "any").kept
    both = disparity_filter(g, 0.3, "both").kept
    assert np.all(any_ | ~both)


def test_monotone_in_alpha(rng):
    for _ in range(10):
        g = random_graph(rng, 25, 0.3)
        prev = np.zeros(g.n_edges, dtype=bool)
        for alpha in np.linspace(0.01, 1.0, 40):
            kept = disparity_filter(g, alpha).kept
            assert np.all(kept | ~prev)
            prev = kept


def test_per_edge_alpha_is_min_over_endpoints(rng):
    g = random_graph(rng, 15, 0.5)
    a, b = endpoint_pvalues(g)
    res = disparity_filter(g, 0.05)
    ref = np.where(np.isnan(a) & np.isnan(b), 1.0, np.fmin(a, b))
    assert np.array_equal(res.per_edge_alpha, ref)
    assert np.array_equal(res.kept, res.per_edge_alpha < 0.05)
