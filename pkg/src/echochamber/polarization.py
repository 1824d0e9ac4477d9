"""User polarization between two page communities, and the density,
tail and lifetime statistics built on it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .community.partition import Partition, PartitionError
from .data import COMMENT, KINDS, InteractionDataset

__all__ = [
    "C1",
    "C2",
    "DEFAULT_BINS",
    "PolarizationProfile",
    "LifetimeRecord",
    "PolarizedCounts",
    "TwoSides",
    "two_sides",
    "polarization_profiles",
    "classify_polarized",
    "pdf",
    "ccdf",
    "lifetimes",
]

C1, C2 = "C1", "C2"
DEFAULT_BINS = 21
SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class TwoSides:
    """Page -> side ("C1" or "C2") for the pages taking part in the split."""

    side_of: dict[str, str]

    def swapped(self) -> "TwoSides":
        return TwoSides({p: (C2 if s == C1 else C1) for p, s in self.side_of.items()})

    def pages(self, side: str) -> list[str]:
        return [p for p, s in self.side_of.items() if s == side]


def two_sides(p: Partition, communities: Sequence[int] | None = None) -> TwoSides:
    """Map a two-community page partition onto sides C1 (first id) and C2.

    With more than two communities the caller must name the pair to use via
    ``communities=(c1, c2)``; pages in other communities are left out.
    """
    if communities is None:
        if p.n_communities != 2:
            raise PartitionError(
                f"polarization needs exactly two communities, got {p.n_communities}; "
                "merge communities or select two with communities=(c1, c2)")
        communities = (0, 1)
    c1, c2 = communities
    if c1 == c2:
        raise PartitionError("the two selected communities must differ")
    for c in (c1, c2):
        if not 0 <= c < p.n_communities:
            raise PartitionError(f"no community {c}; ids run 0..{p.n_communities - 1}")
    side_of = {}
    for node, lab in p.assignment.items():
        if lab == c1:
            side_of[node] = C1
        elif lab == c2:
            side_of[node] = C2
    return TwoSides(side_of)


def largest_two(p: Partition) -> tuple[int, int]:
    """Ids of the two largest communities, ordered by id."""
    sizes = p.sizes()
    if sizes.size < 2:
        raise PartitionError("partition has fewer than two communities")
    top = sorted(np.argsort(-sizes, kind="stable")[:2].tolist())
    return top[0], top[1]


@dataclass(frozen=True, slots=True)
class PolarizationProfile:
    user_id: str
    x: int
    y: int
    kind: str

    @property
    def rho(self) -> float:
        return (self.y - self.x) / (self.y + self.x)


@dataclass(frozen=True, slots=True)
class LifetimeRecord:
    user_id: str
    first_ts: float
    last_ts: float

    @property
    def lifetime_days(self) -> float:
        return (self.last_ts - self.first_ts) / SECONDS_PER_DAY


def _sides(p) -> TwoSides:
    return p if isinstance(p, TwoSides) else two_sides(p)


def polarization_profiles(d: InteractionDataset, p, kind: str) -> list[PolarizationProfile]:
    """Per-user counts on C1 (``x``) and C2 (``y``) content, sorted by user id.

    ``p`` is a two-community :class:`Partition` over pages or a
    :class:`TwoSides`. Users with no interaction of ``kind`` on split pages
    are omitted.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    sides = _sides(p)
    post_side = {post.post_id: sides.side_of.get(post.page_id) for post in d.posts}
    tally: dict[str, list[int]] = {}
    for inter in d.interactions:
        if inter.kind != kind:
            continue
        side = post_side[inter.post_id]
        if side is None:
            continue
        xy = tally.setdefault(inter.user_id, [0, 0])
        xy[0 if side == C1 else 1] += 1
    return [PolarizationProfile(u, xy[0], xy[1], kind) for u, xy in sorted(tally.items())]


@dataclass(frozen=True)
class PolarizedCounts:
    tau: float
    c1: list[str]
    c2: list[str]
    unpolarized: int

    @property
    def counts(self) -> dict[str, int]:
        return {C1: len(self.c1), C2: len(self.c2), "unpolarized": self.unpolarized}


def classify_polarized(profiles: Iterable[PolarizationProfile], tau: float = 1.0) -> PolarizedCounts:
    """C1 when ``rho <= -tau``, C2 when ``rho >= tau``."""
    if not (0.0 < tau <= 1.0):
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    c1, c2, rest = [], [], 0
    for prof in profiles:
        r = prof.rho
        if r <= -tau:
            c1.append(prof.user_id)
        elif r >= tau:
            c2.append(prof.user_id)
        else:
            rest += 1
    return PolarizedCounts(tau, c1, c2, rest)


def pdf(values: Sequence[float], bins: int = DEFAULT_BINS) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width density over [-1, 1]; returns ``(edges, density)``.

    The last bin is closed, so 1.0 lands in it.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("pdf of an empty sample")
    if np.any((v < -1) | (v > 1)):
        raise ValueError("values must lie in [-1, 1]")
    counts, edges = np.histogram(v, bins=bins, range=(-1.0, 1.0))
    return edges, counts / (v.size * np.diff(edges))


def ccdf(values: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Empirical ``P(X >= x)`` at each distinct observed value."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        raise ValueError("ccdf of an empty sample")
    xs, first = np.unique(v, return_index=True)
    return xs, (v.size - first) / v.size


def lifetimes(d: InteractionDataset, users: Iterable[str]) -> tuple[list[LifetimeRecord], int]:
    """First/last comment per user; returns ``(records, n_skipped)`` where
    skipped users had no comment."""
    wanted = list(dict.fromkeys(users))
    span: dict[str, list[float]] = {}
    want = set(wanted)
    for inter in d.interactions:
        if inter.kind != COMMENT or inter.user_id not in want:
            continue
        s = span.get(inter.user_id)
        if s is None:
            span[inter.user_id] = [inter.timestamp, inter.timestamp]
        else:
            s[0] = min(s[0], inter.timestamp)
            s[1] = max(s[1], inter.timestamp)
    records = [LifetimeRecord(u, *span[u]) for u in wanted if u in span]
    return records, len(wanted) - len(records)
