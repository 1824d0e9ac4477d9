"""Multilevel modularity optimization (Louvain)."""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..bipartite import WeightedGraph
from .partition import Partition, canonical_labels, modularity

DEFAULT_SEED = 42


def _aggregate(indptr, indices, data, labels, n_comm):
    rows = np.repeat(np.arange(indptr.size - 1), np.diff(indptr))
    codes = labels[rows] * n_comm + labels[indices]
    uniq, inverse = np.unique(codes, return_inverse=True)
    w = np.bincount(inverse.ravel(), weights=data, minlength=uniq.size)
    r, c = uniq // n_comm, uniq % n_comm
    new_ptr = np.zeros(n_comm + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=n_comm), out=new_ptr[1:])
    return new_ptr, c.astype(np.int64), w


def multilevel(g: WeightedGraph, seed: int = DEFAULT_SEED, max_sweeps: int = 1000) -> Partition:
    """Louvain with resolution 1.

    Each level sweeps nodes in a seeded random order, moving a node to the
    neighbouring community with the largest strictly positive gain over
    staying, until a sweep moves nothing; the communities then become the
    nodes of the next level. Stops when a level makes no move.
    """
    n = g.n_nodes
    m2 = 2.0 * g.total_weight
    rng = np.random.default_rng(seed)
    membership = np.arange(n, dtype=np.int64)
    if m2 > 0:
        indptr, indices, data = g.csr()
        strengths = g.strengths
        while True:
            nl = strengths.size
            community = np.arange(nl, dtype=np.int64)
            tot = strengths.astype(np.float64).copy()
            order = rng.permutation(nl).astype(np.int64)
            moves = kernels.louvain_local_moves(indptr, indices, data, strengths, order,
                                                community, tot, m2, max_sweeps)
            if moves == 0:
                break
            labels = canonical_labels(community.tolist())
            n_comm = int(labels.max()) + 1
            membership = labels[membership]
            if n_comm == nl:
                break
            indptr, indices, data = _aggregate(indptr, indices, data, labels, n_comm)
            strengths = np.bincount(labels, weights=strengths, minlength=n_comm)
    p = Partition(g.nodes, membership, "multilevel", rng_seed=seed)
    return Partition(g.nodes, p.labels, "multilevel", modularity(g, p), seed)
