"""Greedy agglomerative modularity maximization (Clauset-Newman-Moore)."""
from __future__ import annotations

import heapq

from ..bipartite import WeightedGraph
from ._agglomerate import CommunityLinks, cut_dendrogram
from .partition import Partition, modularity


def fast_greedy(g: WeightedGraph) -> Partition:
    """Merge the connected pair with the largest modularity gain until each
    component is one community, then cut the dendrogram at maximal Q.

    A community is named by its smallest node index; equal gains go to the
    lexicographically lowest pair of names.
    """
    n = g.n_nodes
    links = CommunityLinks(g)
    heap = []
    for a, nbrs in links.links.items():
        for b in nbrs:
            if a < b:
                heap.append((-links.gain(a, b), a, b))
    heapq.heapify(heap)
    merges, scores = [], [links.score]
    while heap:
        neg, a, b = heapq.heappop(heap)
        if a not in links.links or b not in links.links[a] or -neg != links.gain(a, b):
            continue
        new = min(a, b)
        links.merge(a, b, new)
        merges.append((a, b, new))
        scores.append(links.score)
        for c in links.links[new]:
            lo, hi = min(new, c), max(new, c)
            heapq.heappush(heap, (-links.gain(lo, hi), lo, hi))
    labels = cut_dendrogram(n, merges, scores)
    p = Partition(g.nodes, labels, "fast_greedy")
    return Partition(g.nodes, p.labels, "fast_greedy", modularity(g, p))
