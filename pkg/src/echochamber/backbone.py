"""Disparity-filter backbone of a weighted graph.

For an endpoint ``i`` of degree ``k >= 2`` and strength ``s``, an incident
edge with normalized weight ``p = w / s`` has p-value ``(1 - p)**(k - 1)``
under the null of a uniformly random split of ``s`` over ``k`` edges.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipartite import WeightedGraph

__all__ = ["BackboneResult", "FIGURE_ALPHA", "disparity_pvalue", "endpoint_pvalues", "disparity_filter", "backbone_for_figure"]

FIGURE_ALPHA = 0.03


@dataclass(frozen=True, eq=False)
class BackboneResult:
    graph: WeightedGraph          # all input nodes, kept edges only
    kept: np.ndarray              # boolean mask over input edges
    alpha: float
    per_edge_alpha: np.ndarray    # min endpoint p-value per input edge (1.0 if undefined)
    rule: str = "any"

    @property
    def kept_edges(self) -> list[tuple[str, str, float]]:
        return self.graph.edges()

    @property
    def kept_alpha(self) -> np.ndarray:
        return self.per_edge_alpha[self.kept]


def disparity_pvalue(p, k):
    """Probability, under a uniform random split of a node's strength over
    its ``k`` edges, that one edge carries a share of at least ``p``.

    Equals ``(1 - p) ** (k - 1)``; undefined (``nan``) for ``k < 2``.
    """
    p = np.asarray(p, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        out = np.power(1.0 - p, k - 1.0)
    return np.where(k >= 2, out, np.nan)


def endpoint_pvalues(g: WeightedGraph) -> tuple[np.ndarray, np.ndarray]:
    """P-values of every edge seen from its ``src`` and from its ``dst`` end.

    Endpoints of degree 1 make no claim and get ``nan``.
    """
    s = g.strengths
    k = g.degrees.astype(np.float64)

    def side(node):
        return disparity_pvalue(g.weight / s[node], k[node])

    return side(g.src), side(g.dst)


def disparity_filter(g: WeightedGraph, alpha: float, rule: str = "any") -> BackboneResult:
    """Keep edges significant at level ``alpha`` (strict ``<``).

    ``rule="any"`` keeps an edge significant at either endpoint,
    ``rule="both"`` requires both.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if rule not in ("any", "both"):
        raise ValueError(f"rule must be 'any' or 'both', got {rule!r}")
    a_src, a_dst = endpoint_pvalues(g)
    sig_src = np.nan_to_num(a_src, nan=1.0) < alpha
    sig_dst = np.nan_to_num(a_dst, nan=1.0) < alpha
    kept = (sig_src | sig_dst) if rule == "any" else (sig_src & sig_dst)
    per_edge = np.fmin(a_src, a_dst)
    per_edge = np.where(np.isnan(per_edge), 1.0, per_edge)
    return BackboneResult(g.subgraph_edges(kept), kept, float(alpha), per_edge, rule)


def backbone_for_figure(g: WeightedGraph) -> BackboneResult:
    return disparity_filter(g, FIGURE_ALPHA)
