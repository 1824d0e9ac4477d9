"""Pair-counting comparison of two partitions (Rand, Hubert-Arabie)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partition import Partition, PartitionError


@dataclass(frozen=True)
class PairCounts:
    together_both: int
    apart_both: int
    together_first_only: int
    together_second_only: int

    @property
    def total(self) -> int:
        return self.together_both + self.apart_both + self.together_first_only + self.together_second_only


@dataclass(frozen=True)
class PartitionComparison:
    rand_index: float
    adjusted_rand: float
    pair_counts: PairCounts


def _comb2(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def compare_partitions(a: Partition, b: Partition) -> PartitionComparison:
    if set(a.nodes) != set(b.nodes) or len(a.nodes) != len(b.nodes):
        raise PartitionError("partitions cover different node sets")
    la = a.labels
    lb = b.labels_for(a.nodes)
    n = la.size
    table = np.zeros((int(la.max(initial=-1)) + 1, int(lb.max(initial=-1)) + 1), dtype=np.int64)
    np.add.at(table, (la, lb), 1)
    sum_ij = int(_comb2(table).sum())
    sum_a = int(_comb2(table.sum(axis=1)).sum())
    sum_b = int(_comb2(table.sum(axis=0)).sum())
    total = n * (n - 1) // 2
    counts = PairCounts(
        together_both=sum_ij,
        apart_both=total - sum_a - sum_b + sum_ij,
        together_first_only=sum_a - sum_ij,
        together_second_only=sum_b - sum_ij,
    )
    if total == 0:
        return PartitionComparison(1.0, 1.0, counts)
    rand = (counts.together_both + counts.apart_both) / total
    expected = sum_a * sum_b / total
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        ari = 1.0
    else:
        ari = (sum_ij - expected) / (max_index - expected)
    return PartitionComparison(float(rand), float(ari), counts)


def comparison_matrix(partitions: dict[str, Partition]) -> dict[str, dict[str, dict[str, float]]]:
    """Nested ``{a: {b: {"rand": .., "adjusted_rand": ..}}}`` over all ordered pairs."""
    out: dict = {}
    for name_a, pa in partitions.items():
        row = out.setdefault(name_a, {})
        for name_b, pb in partitions.items():
            c = compare_partitions(pa, pb)
            row[name_b] = {"rand": c.rand_index, "adjusted_rand": c.adjusted_rand}
    return out
