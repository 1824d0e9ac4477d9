from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..bipartite import WeightedGraph

ALGORITHMS = ("fast_greedy", "walktrap", "multilevel", "label_propagation", "external")


class PartitionError(ValueError):
    """A partition does not fit the graph or the operation's contract."""


def canonical_labels(labels: Sequence[int]) -> np.ndarray:
    """Relabel so community ids are contiguous from 0 in order of first appearance."""
    mapping: dict = {}
    return np.array([mapping.setdefault(lab, len(mapping)) for lab in labels], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Partition:
    nodes: tuple[str, ...]
    labels: np.ndarray
    algorithm: str = "external"
    modularity: float = float("nan")
    rng_seed: int | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise PartitionError(f"unknown algorithm {self.algorithm!r}")
        labels = canonical_labels(np.asarray(self.labels).tolist())
        if len(labels) != len(self.nodes):
            raise PartitionError("one label per node is required")
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_mapping(cls, assignment: Mapping[str, int], nodes: Sequence[str] | None = None,
                     algorithm: str = "external", **kw) -> "Partition":
        nodes = tuple(nodes) if nodes is not None else tuple(assignment)
        missing = [n for n in nodes if n not in assignment]
        if missing:
            raise PartitionError(f"unassigned node(s): {missing[:5]}")
        return cls(nodes, np.array([assignment[n] for n in nodes]), algorithm, **kw)

    @classmethod
    def from_groups(cls, groups, nodes: Sequence[str] | None = None, **kw) -> "Partition":
        assignment = {}
        for c, group in enumerate(groups):
            for node in group:
                if node in assignment:
                    raise PartitionError(f"node {node!r} assigned twice")
                assignment[node] = c
        return cls.from_mapping(assignment, nodes, **kw)

    @property
    def assignment(self) -> dict[str, int]:
        return dict(zip(self.nodes, self.labels.tolist()))

    @property
    def n_communities(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def groups(self) -> list[list[str]]:
        out: list[list[str]] = [[] for _ in range(self.n_communities)]
        for node, lab in zip(self.nodes, self.labels.tolist()):
            out[lab].append(node)
        return out

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_communities)

    def labels_for(self, nodes: Sequence[str]) -> np.ndarray:
        a = self.assignment
        missing = [n for n in nodes if n not in a]
        if missing:
            raise PartitionError(f"unassigned node(s): {missing[:5]}")
        return np.array([a[n] for n in nodes], dtype=np.int64)

    def same_as(self, other: "Partition") -> bool:
        """Equal up to relabeling and node order."""
        if set(self.nodes) != set(other.nodes):
            return False
        return bool(np.array_equal(canonical_labels(other.labels_for(self.nodes).tolist()), self.labels))


def modularity(g: WeightedGraph, p: Partition | Sequence[int] | Mapping[str, int]) -> float:
    """Weighted Newman-Girvan modularity.

    ``Q = sum_c [ in_c / 2m - (tot_c / 2m)**2 ]`` where ``in_c`` counts
    internal weight in both directions and ``tot_c`` is the summed strength.
    A graph without edges scores 0.
    """
    labels = _labels_on(g, p)
    m2 = 2.0 * g.total_weight
    if m2 == 0:
        return 0.0
    n_comm = int(labels.max()) + 1 if labels.size else 0
    same = labels[g.src] == labels[g.dst]
    internal = np.bincount(labels[g.src][same], weights=g.weight[same], minlength=n_comm)
    tot = np.bincount(labels, weights=g.strengths, minlength=n_comm)
    return float(np.sum(2.0 * internal / m2 - (tot / m2) ** 2))


def _labels_on(g: WeightedGraph, p) -> np.ndarray:
    if isinstance(p, Partition):
        if p.nodes == g.nodes:
            return p.labels
        return canonical_labels(p.labels_for(g.nodes).tolist())
    if isinstance(p, Mapping):
        missing = [n for n in g.nodes if n not in p]
        if missing:
            raise PartitionError(f"unassigned node(s): {missing[:5]}")
        return canonical_labels([p[n] for n in g.nodes])
    labels = list(p)
    if len(labels) != g.n_nodes:
        raise PartitionError("one label per node is required")
    return canonical_labels(labels)
