"""Community detection on weighted graphs and partition comparison."""
from .compare import PairCounts, PartitionComparison, compare_partitions, comparison_matrix
from .fastgreedy import fast_greedy
from .labelprop import label_propagation
from .louvain import multilevel
from .partition import Partition, PartitionError, canonical_labels, modularity
from .walktrap import walktrap

ALGO_CODES = {
    "fg": "fast_greedy",
    "wt": "walktrap",
    "ml": "multilevel",
    "lp": "label_propagation",
}


def detect(g, algo: str, seed: int = 42, steps: int = 4) -> Partition:
    """Run one algorithm by short code (fg, wt, ml, lp) or full name."""
    name = ALGO_CODES.get(algo, algo)
    if name == "fast_greedy":
        return fast_greedy(g)
    if name == "walktrap":
        return walktrap(g, steps)
    if name == "multilevel":
        return multilevel(g, seed)
    if name == "label_propagation":
        return label_propagation(g, seed)
    raise ValueError(f"unknown algorithm {algo!r}")


__all__ = [
    "ALGO_CODES",
    "PairCounts",
    "Partition",
    "PartitionComparison",
    "PartitionError",
    "canonical_labels",
    "compare_partitions",
    "comparison_matrix",
    "detect",
    "fast_greedy",
    "label_propagation",
    "modularity",
    "multilevel",
    "walktrap",
]
