"""Synthetic interaction datasets with planted page blocks, user leanings
and concept sentiment, together with a record of what was planted."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .data import COMMENT, LIKE, Interaction, InteractionDataset, Page, Post, parse_timestamp, write_jsonl

__all__ = ["ConceptSpec", "SynthConfig", "GroundTruthLedger", "generate", "write_synth", "PRNG"]

PRNG = "numpy.random.PCG64"
PRNG_VERSION = 1


@dataclass(frozen=True)
class ConceptSpec:
    name: str
    freq: tuple[float, float] = (0.2, 0.2)
    offset: tuple[float, float] = (0.0, 0.0)


DEFAULT_VOCAB = (
    ConceptSpec("european union", (0.5, 0.4), (-0.2, 0.1)),
    ConceptSpec("immigration", (0.3, 0.5), (0.1, -0.3)),
    ConceptSpec("david cameron", (0.4, 0.3), (-0.1, 0.0)),
    ConceptSpec("referendum", (0.5, 0.5), (0.0, 0.0)),
    ConceptSpec("economy", (0.3, 0.2), (-0.3, 0.1)),
    ConceptSpec("boris johnson", (0.2, 0.3), (0.2, -0.2)),
)


@dataclass(frozen=True)
class SynthConfig:
    n_pages_per_block: int = 4
    n_users_per_block: int | tuple[int, int] = 200
    p_in: float = 0.5
    p_out: float = 0.02
    posts_per_page: int = 3
    # probability of commenting a post, relative to the like probability
    comment_rate: float = 0.3
    sentiment_means: tuple[float, float] = (-0.4, -0.1)
    sentiment_noise: float = 0.15
    comment_shift: float = -0.15
    comment_noise: float = 0.15
    concept_vocab: tuple[ConceptSpec, ...] = DEFAULT_VOCAB
    n_unengaged_pages: int = 0
    start: str = "2016-01-01T00:00:00Z"
    end: str = "2016-07-15T00:00:00Z"
    seed: int = 42

    @property
    def users_per_block(self) -> tuple[int, int]:
        n = self.n_users_per_block
        return (int(n), int(n)) if isinstance(n, (int, np.integer)) else (int(n[0]), int(n[1]))

    def validate(self) -> None:
        problems = []
        if self.n_pages_per_block < 1:
            problems.append("n_pages_per_block must be >= 1")
        if min(self.users_per_block) < 0:
            problems.append("n_users_per_block must be >= 0")
        if self.posts_per_page < 1:
            problems.append("posts_per_page must be >= 1")
        if not (0.0 <= self.p_out <= self.p_in <= 1.0):
            problems.append("need 0 <= p_out <= p_in <= 1")
        if not (0.0 <= self.comment_rate * self.p_in <= 1.0):
            problems.append("comment_rate * p_in must be a probability")
        if any(not (-1.0 < m < 1.0) for m in self.sentiment_means):
            problems.append("sentiment_means must lie in (-1, 1)")
        if self.sentiment_noise < 0 or self.comment_noise < 0:
            problems.append("noise must be >= 0")
        if self.n_unengaged_pages < 0:
            problems.append("n_unengaged_pages must be >= 0")
        for c in self.concept_vocab:
            if any(not (0.0 <= f <= 1.0) for f in c.freq):
                problems.append(f"concept {c.name!r} frequencies must be probabilities")
        if parse_timestamp(self.end) <= parse_timestamp(self.start):
            problems.append("end must follow start")
        if problems:
            raise ValueError("invalid synth config: " + "; ".join(problems))

    @classmethod
    def from_dict(cls, raw: dict) -> "SynthConfig":
        raw = dict(raw)
        if "concept_vocab" in raw:
            raw["concept_vocab"] = tuple(
                ConceptSpec(c["name"], tuple(c.get("freq", (0.2, 0.2))), tuple(c.get("offset", (0.0, 0.0))))
                for c in raw["concept_vocab"])
        for key in ("sentiment_means",):
            if key in raw:
                raw[key] = tuple(raw[key])
        if isinstance(raw.get("n_users_per_block"), list):
            raw["n_users_per_block"] = tuple(raw["n_users_per_block"])
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown synth config key(s): {sorted(unknown)}")
        return cls(**raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["concept_vocab"] = [asdict(c) for c in self.concept_vocab]
        return out


@dataclass
class GroundTruthLedger:
    """What the generator planted and emitted, keyed by ids."""

    prng: str
    prng_version: int
    seed: int
    page_block: dict[str, int | None]
    user_block: dict[str, int]
    # user -> kind -> [count on block-0 pages, count on block-1 pages]
    user_counts: dict[str, dict[str, list[int]]]
    # user -> [first comment ts, last comment ts]
    comment_span: dict[str, list[float]]
    # concept -> [mean post sentiment in block 0, in block 1] (None if absent)
    concept_means: dict[str, list[float | None]]
    counts: dict[str, int]
    config: dict = field(default_factory=dict)

    def polarized_counts(self, kind: str, tau: float = 1.0) -> tuple[int, int]:
        """Users with ``rho <= -tau`` (block 0) and ``rho >= tau`` (block 1)."""
        c0 = c1 = 0
        for counts in self.user_counts.values():
            x, y = counts.get(kind, [0, 0])
            if x + y == 0:
                continue
            rho = (y - x) / (y + x)
            if rho <= -tau:
                c0 += 1
            elif rho >= tau:
                c1 += 1
        return c0, c1

    def lifetime_days(self, user: str) -> float:
        first, last = self.comment_span[user]
        return (last - first) / 86400.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1)


def generate(cfg: SynthConfig) -> tuple[InteractionDataset, GroundTruthLedger]:
    """Draw a dataset from ``cfg``; identical seeds give identical output."""
    cfg.validate()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    t0, t1 = int(parse_timestamp(cfg.start)), int(parse_timestamp(cfg.end))
    nb0, nb1 = cfg.users_per_block
    npb = cfg.n_pages_per_block

    pages: list[Page] = []
    page_block: dict[str, int | None] = {}
    for b in (0, 1):
        for k in range(npb):
            pid = f"page{b * npb + k:03d}"
            pages.append(Page(pid, f"Block {b} outlet {k}", True))
            page_block[pid] = b
    for k in range(cfg.n_unengaged_pages):
        pid = f"page{2 * npb + k:03d}"
        pages.append(Page(pid, f"Unengaged outlet {k}", False))
        page_block[pid] = None

    users = [f"user{j:06d}" for j in range(nb0 + nb1)]
    ublock = np.array([0] * nb0 + [1] * nb1, dtype=np.int64)
    n_users = len(users)
    vocab = cfg.concept_vocab

    posts: list[Post] = []
    inters: list[Interaction] = []
    counts = np.zeros((n_users, 2, 2), dtype=np.int64)    # user, kind (like, comment), block
    first_c = np.full(n_users, np.inf)
    last_c = np.full(n_users, -np.inf)
    concept_acc: dict[str, list[list[float]]] = {c.name: [[], []] for c in vocab}

    for page in pages:
        b = page_block[page.page_id]
        if b is None:
            like_p = np.full(n_users, cfg.p_out)
        else:
            like_p = np.where(ublock == b, cfg.p_in, cfg.p_out)
        comment_p = np.clip(like_p * cfg.comment_rate, 0.0, 1.0)
        for k in range(cfg.posts_per_page):
            post_id = f"{page.page_id}/post{k:03d}"
            ts = int(rng.integers(t0, t1))
            if b is None:
                concepts = frozenset()
                mean = 0.0
            else:
                present = rng.random(len(vocab)) < np.array([c.freq[b] for c in vocab])
                concepts = frozenset(c.name for c, hit in zip(vocab, present) if hit)
                mean = cfg.sentiment_means[b] + sum(c.offset[b] for c, hit in zip(vocab, present) if hit)
            sentiment = float(np.clip(mean + cfg.sentiment_noise * rng.standard_normal(), -1.0, 1.0))
            posts.append(Post(post_id, page.page_id, float(ts), None, sentiment, concepts))
            if b is not None:
                for name in concepts:
                    concept_acc[name][b].append(sentiment)

            likes = np.nonzero(rng.random(n_users) < like_p)[0]
            like_delay = rng.exponential(86400.0, size=likes.size).astype(np.int64)
            for j, delay in zip(likes.tolist(), like_delay.tolist()):
                inters.append(Interaction(users[j], post_id, LIKE, float(ts + delay)))
                if b is not None:
                    counts[j, 0, b] += 1

            commenters = np.nonzero(rng.random(n_users) < comment_p)[0]
            c_delay = rng.exponential(3 * 86400.0, size=commenters.size).astype(np.int64)
            c_sent = np.clip(sentiment + cfg.comment_shift + cfg.comment_noise * rng.standard_normal(commenters.size),
                             -1.0, 1.0)
            for j, delay, s in zip(commenters.tolist(), c_delay.tolist(), c_sent.tolist()):
                when = float(ts + delay)
                inters.append(Interaction(users[j], post_id, COMMENT, when, float(s)))
                if b is not None:
                    counts[j, 1, b] += 1
                first_c[j] = min(first_c[j], when)
                last_c[j] = max(last_c[j], when)

    d = InteractionDataset(tuple(pages), tuple(posts), tuple(inters), f"synth seed={cfg.seed} prng={PRNG}")
    d.validate()

    n_likes = sum(1 for i in inters if i.kind == LIKE)
    likers = {i.user_id for i in inters if i.kind == LIKE}
    commenters_all = {i.user_id for i in inters if i.kind == COMMENT}
    user_counts = {}
    for j, u in enumerate(users):
        entry = {}
        if counts[j, 0].sum():
            entry[LIKE] = counts[j, 0].tolist()
        if counts[j, 1].sum():
            entry[COMMENT] = counts[j, 1].tolist()
        if entry:
            user_counts[u] = entry
    ledger = GroundTruthLedger(
        prng=PRNG,
        prng_version=PRNG_VERSION,
        seed=cfg.seed,
        page_block=page_block,
        user_block={u: int(ublock[j]) for j, u in enumerate(users)},
        user_counts=user_counts,
        comment_span={u: [float(first_c[j]), float(last_c[j])] for j, u in enumerate(users)
                      if np.isfinite(first_c[j])},
        concept_means={name: [float(np.mean(v)) if v else None for v in acc]
                       for name, acc in concept_acc.items()},
        counts={
            "pages": len(pages),
            "posts": len(posts),
            "likes": n_likes,
            "comments": len(inters) - n_likes,
            "likers": len(likers),
            "commenters": len(commenters_all),
        },
        config=cfg.to_dict(),
    )
    return d, ledger


def write_synth(cfg: SynthConfig, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    d, ledger = generate(cfg)
    data_path, ledger_path = out / "dataset.jsonl", out / "ledger.json"
    write_jsonl(d, data_path)
    ledger_path.write_text(ledger.to_json() + "\n", encoding="utf-8")
    return data_path, ledger_path
