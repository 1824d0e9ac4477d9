"""Page-user bipartite graph and its weighted co-occurrence projections."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import kernels
from .data import KINDS, LIKE, InteractionDataset

__all__ = [
    "BipartiteGraph",
    "WeightedGraph",
    "build_bipartite",
    "project",
    "read_edge_csv",
    "write_edge_csv",
]

LEFT, RIGHT = "left", "right"
_SIDE_ALIASES = {"left": LEFT, "pages": LEFT, "page": LEFT, "right": RIGHT, "users": RIGHT, "user": RIGHT}


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected, loop-free graph with positive edge weights.

    Edges are stored once as index pairs ``src < dst``, sorted. ``node_weight``
    carries optional per-node metadata (the projection's diagonal, i.e.
    audience size of a page).
    """

    nodes: tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    node_weight: np.ndarray | None = None
    _csr: tuple = field(default=None, init=False, repr=False)

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        w = np.asarray(self.weight, dtype=np.float64)
        if not (src.shape == dst.shape == w.shape):
            raise ValueError("edge arrays must have equal length")
        if np.any(src == dst):
            raise ValueError("self-loops are not allowed")
        if w.size and not np.all(w > 0):
            raise ValueError("edge weights must be strictly positive")
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                raise ValueError("duplicate edges")
        n = len(self.nodes)
        if lo.size and (lo.min() < 0 or hi.max() >= n):
            raise ValueError("edge endpoint out of range")
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "src", lo)
        object.__setattr__(self, "dst", hi)
        object.__setattr__(self, "weight", w)
        if self.node_weight is not None:
            object.__setattr__(self, "node_weight", np.asarray(self.node_weight, dtype=np.float64))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], nodes: Iterable[str] | None = None, node_weight=None):
        """Build from ``(a, b, w)`` triples over node names."""
        edges = list(edges)
        if nodes is None:
            names = set()
            for a, b, _ in edges:
                names.add(a)
                names.add(b)
            nodes = sorted(names)
        nodes = tuple(nodes)
        index = {name: i for i, name in enumerate(nodes)}
        src = [index[a] for a, _, _ in edges]
        dst = [index[b] for _, b, _ in edges]
        w = [float(x) for _, _, x in edges]
        return cls(nodes, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                   np.array(w, dtype=np.float64), node_weight)

    @classmethod
    def from_dense(cls, adjacency, nodes: Iterable[str] | None = None):
        a = np.asarray(adjacency, dtype=np.float64)
        if nodes is None:
            nodes = [str(i) for i in range(a.shape[0])]
        src, dst = np.nonzero(np.triu(a, 1))
        return cls(tuple(nodes), src, dst, a[src, dst])

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    @property
    def strengths(self) -> np.ndarray:
        s = np.zeros(self.n_nodes)
        np.add.at(s, self.src, self.weight)
        np.add.at(s, self.dst, self.weight)
        return s

    @property
    def degrees(self) -> np.ndarray:
        return (np.bincount(self.src, minlength=self.n_nodes)
                + np.bincount(self.dst, minlength=self.n_nodes))

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric adjacency as ``(indptr, indices, data)``; neighbours sorted."""
        if self._csr is None:
            n = self.n_nodes
            rows = np.concatenate([self.src, self.dst])
            cols = np.concatenate([self.dst, self.src])
            data = np.concatenate([self.weight, self.weight])
            order = np.lexsort((cols, rows))
            rows, cols, data = rows[order], cols[order], data[order]
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
            object.__setattr__(self, "_csr", (indptr, cols.astype(np.int64), data.astype(np.float64)))
        return self._csr

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n_nodes, self.n_nodes))
        a[self.src, self.dst] = self.weight
        a[self.dst, self.src] = self.weight
        return a

    def edges(self) -> list[tuple[str, str, float]]:
        return [(self.nodes[i], self.nodes[j], float(w))
                for i, j, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist())]

    def edge_weight(self, a: str, b: str) -> float:
        i, j = self.nodes.index(a), self.nodes.index(b)
        i, j = min(i, j), max(i, j)
        hit = np.nonzero((self.src == i) & (self.dst == j))[0]
        return float(self.weight[hit[0]]) if hit.size else 0.0

    def subgraph_edges(self, mask) -> "WeightedGraph":
        """Same node set, only the edges selected by boolean ``mask``."""
        mask = np.asarray(mask, dtype=bool)
        return WeightedGraph(self.nodes, self.src[mask], self.dst[mask], self.weight[mask], self.node_weight)

    def components(self) -> np.ndarray:
        """Connected-component label per node (labels by first appearance)."""
        parent = list(range(self.n_nodes))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in zip(self.src.tolist(), self.dst.tolist()):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
        roots = [find(i) for i in range(self.n_nodes)]
        relabel = {}
        return np.array([relabel.setdefault(r, len(relabel)) for r in roots], dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (self.nodes == other.nodes and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst) and np.array_equal(self.weight, other.weight))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Incidence between pages (left) and users (right).

    ``edge_kinds`` maps each ``(left_index, right_index)`` edge to the set of
    interaction kinds that produced it; the incidence itself is 0/1.
    """

    left_nodes: tuple[str, ...]
    right_nodes: tuple[str, ...]
    left_idx: np.ndarray
    right_idx: np.ndarray
    edge_kinds: tuple[frozenset, ...] = ()

    @property
    def n_edges(self) -> int:
        return int(self.left_idx.size)

    def incidence(self) -> np.ndarray:
        """Dense 0/1 matrix, pages by users."""
        m = np.zeros((len(self.left_nodes), len(self.right_nodes)), dtype=np.int64)
        m[self.left_idx, self.right_idx] = 1
        return m

    def degree(self, side: str = LEFT) -> np.ndarray:
        side = _SIDE_ALIASES[side]
        if side == LEFT:
            return np.bincount(self.left_idx, minlength=len(self.left_nodes))
        return np.bincount(self.right_idx, minlength=len(self.right_nodes))

    @classmethod
    def from_incidence(cls, m, left=None, right=None) -> "BipartiteGraph":
        m = np.asarray(m)
        left = tuple(left) if left is not None else tuple(f"p{i}" for i in range(m.shape[0]))
        right = tuple(right) if right is not None else tuple(f"u{j}" for j in range(m.shape[1]))
        li, ri = np.nonzero(m)
        return cls(left, right, li.astype(np.int64), ri.astype(np.int64),
                   tuple(frozenset({LIKE}) for _ in range(li.size)))


def _kind_set(kind_filter) -> frozenset:
    if kind_filter in (None, "all", "both"):
        return frozenset(KINDS)
    if isinstance(kind_filter, str):
        kind_filter = [kind_filter]
    kinds = frozenset(kind_filter)
    bad = kinds - set(KINDS)
    if bad:
        raise ValueError(f"unknown interaction kind(s): {sorted(bad)}")
    return kinds


def build_bipartite(d: InteractionDataset, kind_filter=LIKE) -> BipartiteGraph:
    """Page-user incidence: an edge wherever the user has at least one
    interaction of a selected kind on some post of the page.

    All pages of ``d`` become left nodes (ordered as in the dataset); users
    appear in first-interaction order sorted by id.
    """
    kinds = _kind_set(kind_filter)
    pages = tuple(p.page_id for p in d.pages)
    page_index = {pid: i for i, pid in enumerate(pages)}
    post_page = {p.post_id: page_index[p.page_id] for p in d.posts}
    pairs: dict[tuple[str, int], set] = {}
    for inter in d.interactions:
        if inter.kind not in kinds:
            continue
        key = (inter.user_id, post_page[inter.post_id])
        pairs.setdefault(key, set()).add(inter.kind)
    users = tuple(sorted({u for u, _ in pairs}))
    user_index = {u: j for j, u in enumerate(users)}
    keys = sorted(pairs, key=lambda k: (k[1], user_index[k[0]]))
    left = np.array([k[1] for k in keys], dtype=np.int64)
    right = np.array([user_index[k[0]] for k in keys], dtype=np.int64)
    return BipartiteGraph(pages, users, left, right, tuple(frozenset(pairs[k]) for k in keys))


def _hub_csr(hub_idx: np.ndarray, member_idx: np.ndarray, n_hubs: int):
    order = np.lexsort((member_idx, hub_idx))
    members = member_idx[order]
    indptr = np.zeros(n_hubs + 1, dtype=np.int64)
    np.cumsum(np.bincount(hub_idx, minlength=n_hubs), out=indptr[1:])
    return indptr, members.astype(np.int64)


def project(b: BipartiteGraph, side: str = LEFT) -> WeightedGraph:
    """One-mode projection: ``w(p, q)`` = number of common neighbours.

    Equivalent to the off-diagonal of ``M M^T`` (left) or ``M^T M`` (right);
    the diagonal is returned as ``node_weight``.
    """
    side = _SIDE_ALIASES[side]
    if side == LEFT:
        nodes, members, hubs, n_hubs = b.left_nodes, b.left_idx, b.right_idx, len(b.right_nodes)
    else:
        nodes, members, hubs, n_hubs = b.right_nodes, b.right_idx, b.left_idx, len(b.left_nodes)
    indptr, indices = _hub_csr(hubs, members, n_hubs)
    rows, cols, counts = kernels.cooccurrence(indptr, indices, len(nodes))
    diag = np.bincount(members, minlength=len(nodes)).astype(np.float64)
    return WeightedGraph(nodes, rows, cols, counts.astype(np.float64), diag)


def _fmt_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def write_edge_csv(g: WeightedGraph, path, extra: dict[str, np.ndarray] | None = None) -> None:
    """``node_a,node_b,weight`` plus any extra per-edge columns."""
    extra = extra or {}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node_a", "node_b", "weight", *extra])
        cols = [np.asarray(v) for v in extra.values()]
        for k, (a, b_, wt) in enumerate(g.edges()):
            w.writerow([a, b_, _fmt_weight(wt), *(repr(float(c[k])) for c in cols)])


def read_edge_csv(path, nodes: Iterable[str] | None = None) -> WeightedGraph:
    with open(Path(path), newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"node_a", "node_b", "weight"} - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: header lacks {sorted(missing)}")
        edges = [(r["node_a"], r["node_b"], float(r["weight"])) for r in reader]
    return WeightedGraph.from_edges(edges, nodes)
