"""Walktrap: agglomeration driven by distances between short random walks
(Pons and Latapy)."""
from __future__ import annotations

import heapq

import numpy as np

from ..bipartite import WeightedGraph
from ._agglomerate import CommunityLinks, cut_dendrogram
from .partition import Partition, modularity


def _walk_matrix(g: WeightedGraph, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """``P**t`` for the walk on ``g`` with one self-loop per vertex.

    The loop weight is the mean incident edge weight (1 for isolated
    vertices), which keeps the walk aperiodic.
    """
    a = g.to_dense()
    deg = g.degrees
    s = a.sum(axis=1)
    loop = np.where(deg > 0, s / np.maximum(deg, 1), 1.0)
    a[np.diag_indices_from(a)] = loop
    d = a.sum(axis=1)
    p = a / d[:, None]
    return np.linalg.matrix_power(p, steps), d


def walktrap(g: WeightedGraph, steps: int = 4) -> Partition:
    """Merge adjacent communities minimizing the increase in mean squared
    walk distance, then cut the dendrogram at maximal modularity."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    n = g.n_nodes
    if n == 0:
        return Partition((), np.array([], dtype=np.int64), "walktrap", 0.0)
    pt, d = _walk_matrix(g, steps)
    inv_d = 1.0 / d
    prob = {i: pt[i] for i in range(n)}
    size = {i: 1 for i in range(n)}

    def delta_sigma(a, b):
        diff = prob[a] - prob[b]
        return float(size[a] * size[b] / (size[a] + size[b]) * np.dot(diff * diff, inv_d) / n)

    links = CommunityLinks(g)
    heap = [(delta_sigma(a, b), a, b) for a, nbrs in links.links.items() for b in nbrs if a < b]
    heapq.heapify(heap)
    merges, scores = [], [links.score]
    next_id = n
    while heap:
        ds, a, b = heapq.heappop(heap)
        if a not in links.links or b not in links.links:
            continue
        new = next_id
        next_id += 1
        links.merge(a, b, new)
        merges.append((a, b, new))
        scores.append(links.score)
        sa, sb = size.pop(a), size.pop(b)
        size[new] = sa + sb
        prob[new] = (sa * prob.pop(a) + sb * prob.pop(b)) / (sa + sb)
        for c in links.links[new]:
            heapq.heappush(heap, (delta_sigma(c, new), c, new))
    labels = cut_dendrogram(n, merges, scores)
    p = Partition(g.nodes, labels, "walktrap")
    return Partition(g.nodes, p.labels, "walktrap", modularity(g, p))
