"""Concept-level sentiment comparison between two echo chambers.

Posts carry a sentiment in [-1, 1] and a set of concepts. For a concept
shared by both communities, its emotional distance is the mean sentiment of
C2 posts mentioning it minus the mean over C1 posts. The response gap
compares the sentiment of comments with that of the posts they answer.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .data import COMMENT, InteractionDataset, normalize_concept
from .polarization import C1, C2, DEFAULT_BINS, TwoSides, two_sides

log = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_THRESHOLD",
    "ConceptSentimentRecord",
    "EmotionalDistanceRecord",
    "DistancePanels",
    "ResponseRecord",
    "ResponseTable",
    "UserResponseRecord",
    "TopConcepts",
    "ScoredText",
    "LexiconScorer",
    "sentiment_pdf",
    "concept_sentiments",
    "top_concepts",
    "emotional_distance",
    "emotional_response",
    "user_response",
    "score_with_provider",
    "score_dataset",
]

DEFAULT_THRESHOLD = 0.2
SIDES = (C1, C2)


def _sides(p) -> TwoSides:
    return p if isinstance(p, TwoSides) else two_sides(p)


def _posts_by_side(d: InteractionDataset, sides: TwoSides):
    out = {C1: [], C2: []}
    for post in d.posts:
        side = sides.side_of.get(post.page_id)
        if side is not None:
            out[side].append(post)
    return out


# ---------------------------------------------------------------------------
# sentiment distribution


def sentiment_pdf(d: InteractionDataset, p, bins: int = DEFAULT_BINS) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Density of post sentiment over [-1, 1] per community.

    A community with no scored posts is omitted (and logged).
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    posts = _posts_by_side(d, _sides(p))
    out = {}
    for side in SIDES:
        s = np.array([q.sentiment for q in posts[side] if q.sentiment is not None])
        if s.size == 0:
            log.info("no scored posts in %s; omitted from sentiment density", side)
            continue
        counts, edges = np.histogram(s, bins=bins, range=(-1.0, 1.0))
        out[side] = (edges, counts / (s.size * np.diff(edges)))
    return out


# ---------------------------------------------------------------------------
# concepts


@dataclass(frozen=True, slots=True)
class ConceptSentimentRecord:
    concept: str
    community: str
    post_count: int
    avg_sentiment: float


def concept_sentiments(d: InteractionDataset, p) -> dict[str, dict[str, ConceptSentimentRecord]]:
    """``{side: {concept: record}}`` averaged over scored posts only."""
    posts = _posts_by_side(d, _sides(p))
    out = {}
    for side in SIDES:
        acc: dict[str, list[float]] = {}
        for post in posts[side]:
            if post.sentiment is None:
                continue
            for c in post.concepts:
                acc.setdefault(normalize_concept(c), []).append(post.sentiment)
        out[side] = {c: ConceptSentimentRecord(c, side, len(v), float(np.mean(v))) for c, v in acc.items()}
    return out


@dataclass(frozen=True)
class TopConcepts:
    ranked: dict[str, list[tuple[str, int]]]
    shared: list[str]


def _concept_counts(posts) -> dict[str, int]:
    counts: dict[str, int] = {}
    for post in posts:
        for c in {normalize_concept(c) for c in post.concepts}:
            counts[c] = counts.get(c, 0) + 1
    return counts


def _top_n(counts: Mapping[str, int], n: int) -> list[tuple[str, int]]:
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if len(ranked) <= n:
        return ranked
    cutoff = ranked[n - 1][1]
    return [kv for kv in ranked if kv[1] >= cutoff]


def top_concepts(d: InteractionDataset, p, n: int = 100) -> TopConcepts:
    """Top-``n`` concepts per community by number of posts mentioning them.

    Ties with the ``n``-th entry are kept, so a list may run past ``n``.
    ``shared`` is the sorted intersection of the two lists.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    posts = _posts_by_side(d, _sides(p))
    ranked = {side: _top_n(_concept_counts(posts[side]), n) for side in SIDES}
    shared = sorted({c for c, _ in ranked[C1]} & {c for c, _ in ranked[C2]})
    return TopConcepts(ranked, shared)


# ---------------------------------------------------------------------------
# emotional distance


@dataclass(frozen=True, slots=True)
class EmotionalDistanceRecord:
    concept: str
    avg_c1: float
    avg_c2: float
    threshold: float

    @property
    def distance(self) -> float:
        return self.avg_c2 - self.avg_c1

    @property
    def controversial(self) -> bool:
        return abs(self.distance) > self.threshold

    @property
    def panel(self) -> str:
        dist = self.distance
        if dist > self.threshold:
            return "A"
        if dist < -self.threshold:
            return "B"
        return "-"


@dataclass(frozen=True)
class DistancePanels:
    records: list[EmotionalDistanceRecord]
    excluded: list[str] = field(default_factory=list)

    @property
    def panel_a(self) -> list[EmotionalDistanceRecord]:
        """Concepts presented more negatively in C1."""
        return [r for r in self.records if r.panel == "A"]

    @property
    def panel_b(self) -> list[EmotionalDistanceRecord]:
        """Concepts presented more negatively in C2."""
        return [r for r in self.records if r.panel == "B"]

    @property
    def neutral(self) -> list[EmotionalDistanceRecord]:
        return [r for r in self.records if r.panel == "-"]

    @property
    def controversial(self) -> list[str]:
        return [r.concept for r in self.records if r.controversial]


def emotional_distance(d: InteractionDataset, p, concepts: Iterable[str] | None = None,
                       threshold: float = DEFAULT_THRESHOLD) -> DistancePanels:
    """Distance ``avg(C2) - avg(C1)`` for each concept, sorted by decreasing
    absolute distance (then by name).

    Concepts lacking a scored post on either side are listed in ``excluded``.
    ``concepts=None`` uses every concept scored on both sides.
    """
    sides = _sides(p)
    cs = concept_sentiments(d, sides)
    if concepts is None:
        concepts = sorted(set(cs[C1]) & set(cs[C2]))
    records, excluded = [], []
    for c in dict.fromkeys(normalize_concept(c) for c in concepts):
        if c not in cs[C1] or c not in cs[C2]:
            excluded.append(c)
            continue
        records.append(EmotionalDistanceRecord(c, cs[C1][c].avg_sentiment, cs[C2][c].avg_sentiment, threshold))
    if excluded:
        log.info("%d concept(s) lack scored posts in one community: %s", len(excluded), excluded[:5])
    records.sort(key=lambda r: (-abs(r.distance), r.concept))
    return DistancePanels(records, excluded)


# ---------------------------------------------------------------------------
# users' response


@dataclass(frozen=True, slots=True)
class ResponseRecord:
    concept: str
    community: str
    post_avg_sentiment: float
    comment_avg_sentiment: float
    n_posts: int

    @property
    def response_gap(self) -> float:
        return self.comment_avg_sentiment - self.post_avg_sentiment


@dataclass(frozen=True)
class ResponseTable:
    """Per-community records sorted by increasing gap.

    ``sign_change[side]`` is the index of the first record whose gap is not
    negative: records before it drew a more negative response than the post.
    """

    records: dict[str, list[ResponseRecord]]
    sign_change: dict[str, int]
    posts_without_comments: int = 0


def _comment_sentiments(d: InteractionDataset) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {}
    for inter in d.interactions:
        if inter.kind == COMMENT and inter.sentiment is not None:
            out.setdefault(inter.post_id, []).append(inter.sentiment)
    return out


def emotional_response(d: InteractionDataset, p, concepts: Iterable[str], weight: str = "post") -> ResponseTable:
    """Mean post sentiment versus mean comment sentiment per concept and side.

    Only scored posts with at least one scored comment enter both averages.
    ``weight="post"`` averages per-post comment means; ``weight="comment"``
    pools all comments.
    """
    if weight not in ("post", "comment"):
        raise ValueError("weight must be 'post' or 'comment'")
    wanted = list(dict.fromkeys(normalize_concept(c) for c in concepts))
    want = set(wanted)
    posts = _posts_by_side(d, _sides(p))
    comments = _comment_sentiments(d)
    records: dict[str, list[ResponseRecord]] = {}
    sign_change = {}
    dropped = set()
    for side in SIDES:
        acc: dict[str, tuple[list[float], list[float], list[float]]] = {}
        for post in posts[side]:
            if post.sentiment is None:
                continue
            hits = {normalize_concept(c) for c in post.concepts} & want
            if not hits:
                continue
            cm = comments.get(post.post_id)
            if not cm:
                dropped.add(post.post_id)
                continue
            for c in hits:
                post_s, per_post, pooled = acc.setdefault(c, ([], [], []))
                post_s.append(post.sentiment)
                per_post.append(float(np.mean(cm)))
                pooled.extend(cm)
        rows = []
        for c in wanted:
            if c not in acc:
                continue
            post_s, per_post, pooled = acc[c]
            cavg = float(np.mean(per_post if weight == "post" else pooled))
            rows.append(ResponseRecord(c, side, float(np.mean(post_s)), cavg, len(post_s)))
        rows.sort(key=lambda r: (r.response_gap, r.concept))
        records[side] = rows
        sign_change[side] = next((i for i, r in enumerate(rows) if r.response_gap >= 0), len(rows))
    if dropped:
        log.info("%d post(s) without scored comments left out of the response averages", len(dropped))
    return ResponseTable(records, sign_change, len(dropped))


@dataclass(frozen=True, slots=True)
class UserResponseRecord:
    concept: str
    community: str
    n_users: int
    user_avg_sentiment: float


def user_response(d: InteractionDataset, p, concepts: Iterable[str]) -> list[UserResponseRecord]:
    """Mean over users of each user's mean comment sentiment on posts
    mentioning the concept (auxiliary to :func:`emotional_response`)."""
    wanted = list(dict.fromkeys(normalize_concept(c) for c in concepts))
    want = set(wanted)
    sides = _sides(p)
    post_info = {}
    for post in d.posts:
        side = sides.side_of.get(post.page_id)
        if side is None:
            continue
        hits = {normalize_concept(c) for c in post.concepts} & want
        if hits:
            post_info[post.post_id] = (side, hits)
    acc: dict[tuple[str, str], dict[str, list[float]]] = {}
    for inter in d.interactions:
        if inter.kind != COMMENT or inter.sentiment is None or inter.post_id not in post_info:
            continue
        side, hits = post_info[inter.post_id]
        for c in hits:
            acc.setdefault((c, side), {}).setdefault(inter.user_id, []).append(inter.sentiment)
    out = []
    for side in SIDES:
        for c in wanted:
            users = acc.get((c, side))
            if users:
                means = [float(np.mean(v)) for _, v in sorted(users.items())]
                out.append(UserResponseRecord(c, side, len(means), float(np.mean(means))))
    return out


# ---------------------------------------------------------------------------
# scoring seam


@dataclass(frozen=True)
class ScoredText:
    sentiment: float | None
    concepts: frozenset[str] = frozenset()


Provider = Callable[[str], tuple[float, Iterable[str]]]

_TOKEN = re.compile(r"[a-z']+")


class LexiconScorer:
    """Word-list scorer for fixtures.

    Sentiment is the mean valence over all tokens (unknown words count 0),
    clipped to [-1, 1]; concepts are the vocabulary terms found in the text.
    """

    def __init__(self, valences: Mapping[str, float], concept_vocab: Iterable[str] = ()):
        self.valences = {k.lower(): float(v) for k, v in valences.items()}
        self.vocab = sorted({normalize_concept(c) for c in concept_vocab})

    def __call__(self, text: str) -> tuple[float, frozenset[str]]:
        tokens = _TOKEN.findall(text.lower())
        if not tokens:
            return 0.0, frozenset()
        score = sum(self.valences.get(t, 0.0) for t in tokens) / len(tokens)
        norm = " " + " ".join(tokens) + " "
        found = frozenset(c for c in self.vocab if f" {c} " in norm)
        return max(-1.0, min(1.0, score)), found


def score_with_provider(texts: Sequence[str], provider: Provider) -> tuple[list[ScoredText], int]:
    """Score each text; failures (exceptions or out-of-range scores) leave
    the result's sentiment as None and are counted."""
    out, failures = [], 0
    for text in texts:
        try:
            s, concepts = provider(text)
            s = float(s)
            if not (-1.0 <= s <= 1.0):
                raise ValueError(f"sentiment {s} outside [-1, 1]")
            out.append(ScoredText(s, frozenset(normalize_concept(c) for c in concepts)))
        except Exception as exc:  # provider errors are data, not crashes
            log.debug("provider failed on text %r: %s", text[:40], exc)
            failures += 1
            out.append(ScoredText(None))
    return out, failures


def score_dataset(d: InteractionDataset, provider: Provider) -> tuple[InteractionDataset, int]:
    """Fill missing post sentiment/concepts and comment sentiment from text."""
    posts = list(d.posts)
    todo = [i for i, q in enumerate(posts) if q.text and (q.sentiment is None or not q.concepts)]
    scored, failures = score_with_provider([posts[i].text for i in todo], provider)
    for i, s in zip(todo, scored):
        q = posts[i]
        posts[i] = replace(q, sentiment=q.sentiment if q.sentiment is not None else s.sentiment,
                           concepts=q.concepts or s.concepts)
    inters = list(d.interactions)
    todo = [i for i, it in enumerate(inters) if it.kind == COMMENT and it.text and it.sentiment is None]
    scored, fails2 = score_with_provider([inters[i].text for i in todo], provider)
    for i, s in zip(todo, scored):
        inters[i] = replace(inters[i], sentiment=s.sentiment)
    return InteractionDataset(d.pages, tuple(posts), tuple(inters), d.provenance), failures + fails2
