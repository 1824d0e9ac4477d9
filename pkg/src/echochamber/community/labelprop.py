"""Asynchronous weighted label propagation (Raghavan, Albert and Kumara)."""
from __future__ import annotations

import logging

import numpy as np

from .. import kernels
from ..bipartite import WeightedGraph
from .partition import Partition, modularity

log = logging.getLogger(__name__)

DEFAULT_SEED = 42
MAX_SWEEPS = 1000


def label_propagation(g: WeightedGraph, seed: int = DEFAULT_SEED, max_sweeps: int = MAX_SWEEPS) -> Partition:
    """Each sweep visits nodes in a fresh seeded order; a node takes the label
    with the largest incident weight, ties drawn uniformly. Stops once every
    label is among its node's weighted-majority labels, or after
    ``max_sweeps`` sweeps with a warning."""
    n = g.n_nodes
    rng = np.random.default_rng(seed)
    labels = np.arange(n, dtype=np.int64)
    indptr, indices, data = g.csr()
    for _ in range(max_sweeps):
        order = rng.permutation(n).astype(np.int64)
        uniforms = rng.random(n)
        kernels.label_propagation_sweep(indptr, indices, data, labels, order, uniforms)
        if kernels.label_propagation_stable(indptr, indices, data, labels):
            break
    else:
        log.warning("label propagation did not settle after %d sweeps; keeping current labels", max_sweeps)
    p = Partition(g.nodes, labels, "label_propagation", rng_seed=seed)
    return Partition(g.nodes, p.labels, "label_propagation", modularity(g, p), seed)
