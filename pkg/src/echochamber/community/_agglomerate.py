"""Bookkeeping shared by the two agglomerative methods."""
from __future__ import annotations

import numpy as np

from ..bipartite import WeightedGraph


class CommunityLinks:
    """Inter-community weights and strengths under successive merges.

    Tracks ``S = sum_c (2 * in_c * 2m - tot_c**2)``, so modularity is
    ``S / (2m)**2``; with integer weights every update is exact.
    """

    def __init__(self, g: WeightedGraph):
        self.m2 = 2.0 * g.total_weight
        self.tot = {i: float(s) for i, s in enumerate(g.strengths.tolist())}
        self.links: dict[int, dict[int, float]] = {i: {} for i in range(g.n_nodes)}
        for i, j, w in zip(g.src.tolist(), g.dst.tolist(), g.weight.tolist()):
            self.links[i][j] = self.links[i].get(j, 0.0) + w
            self.links[j][i] = self.links[j].get(i, 0.0) + w
        self.score = -sum(t * t for t in self.tot.values())

    def gain(self, a: int, b: int) -> float:
        """Half the change in ``S`` if ``a`` and ``b`` merge."""
        return self.links[a][b] * self.m2 - self.tot[a] * self.tot[b]

    def merge(self, a: int, b: int, new: int) -> None:
        self.score += 2.0 * self.gain(a, b)
        la, lb = self.links.pop(a), self.links.pop(b)
        merged: dict[int, float] = {}
        for c, w in la.items():
            if c != b:
                merged[c] = merged.get(c, 0.0) + w
        for c, w in lb.items():
            if c != a:
                merged[c] = merged.get(c, 0.0) + w
        for c, w in merged.items():
            nbr = self.links[c]
            nbr.pop(a, None)
            nbr.pop(b, None)
            nbr[new] = w
        self.links[new] = merged
        self.tot[new] = self.tot.pop(a) + self.tot.pop(b)


def cut_dendrogram(n: int, merges: list[tuple[int, int, int]], scores: list[float]) -> np.ndarray:
    """Labels after replaying merges up to the first level with maximal score.

    ``scores[k]`` is the score after ``k`` merges; ``merges`` holds
    ``(a, b, new)`` community ids.
    """
    best = int(np.argmax(scores))
    owner = {i: [i] for i in range(n)}
    for a, b, new in merges[:best]:
        members = owner.pop(a) + owner.pop(b)
        owner[new] = members
    labels = np.empty(n, dtype=np.int64)
    for cid, members in owner.items():
        labels[members] = min(members)
    return labels
