"""Shared builders for the test suite."""
from __future__ import annotations

import csv
import itertools
from pathlib import Path

import numpy as np
import pytest

from echochamber.bipartite import WeightedGraph
from echochamber.data import COMMENT, LIKE, Interaction, InteractionDataset, Page, Post
from echochamber.synth import SynthConfig, generate

FIXTURES = Path(__file__).parent / "fixtures"

# 4+4 pages, 200 users per block, p_in 0.5, p_out 0.02, seed 42
PINNED = SynthConfig()
# unequal blocks and a couple of pages outside the debate, for the pipeline
PIPELINE = SynthConfig(n_users_per_block=(300, 100), n_unengaged_pages=2)
# sparse cross-block activity so almost every user is exclusive to one side
POLARIZED = SynthConfig(p_out=0.005)


def two_triangles() -> WeightedGraph:
    return WeightedGraph.from_edges(
        [("a", "b", 1), ("a", "c", 1), ("b", "c", 1), ("d", "e", 1), ("d", "f", 1), ("e", "f", 1), ("c", "d", 1)])


def random_graph(rng, n, p=0.4, weighted=True) -> WeightedGraph:
    edges = []
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < p:
            w = float(rng.integers(1, 10)) if weighted else 1.0
            edges.append((f"n{i}", f"n{j}", w))
    return WeightedGraph.from_edges(edges, [f"n{i}" for i in range(n)])


def dataset_from(pages, posts, interactions) -> InteractionDataset:
    """Terse builder: pages are ids or (id, engaged); posts are
    (post_id, page_id[, sentiment[, concepts]]); interactions are
    (user, post, kind[, ts[, sentiment]])."""
    pg = [Page(p, p, True) if isinstance(p, str) else Page(p[0], p[0], p[1]) for p in pages]
    ps = []
    for k, spec in enumerate(posts):
        post_id, page_id, *rest = spec
        sent = rest[0] if rest else None
        concepts = frozenset(rest[1]) if len(rest) > 1 else frozenset()
        ps.append(Post(post_id, page_id, float(k), None, sent, concepts))
    its = []
    for k, spec in enumerate(interactions):
        user, post, kind, *rest = spec
        ts = float(rest[0]) if rest else float(k)
        sent = rest[1] if len(rest) > 1 else None
        its.append(Interaction(user, post, kind, ts, sent))
    d = InteractionDataset(tuple(pg), tuple(ps), tuple(its))
    d.validate()
    return d


def random_dataset(rng, n_pages=6, n_posts=18, n_users=30, n_inter=200, n_concepts=0) -> InteractionDataset:
    pages = [f"p{i}" for i in range(n_pages)]
    vocab = [f"c{i}" for i in range(n_concepts)]
    posts = []
    for k in range(n_posts):
        concepts = [c for c in vocab if rng.random() < 0.4]
        posts.append((f"q{k}", pages[int(rng.integers(n_pages))], float(rng.uniform(-1, 1)), concepts))
    inters = []
    for k in range(n_inter):
        kind = LIKE if rng.random() < 0.7 else COMMENT
        sent = float(rng.uniform(-1, 1)) if kind == COMMENT else None
        inters.append((f"u{int(rng.integers(n_users))}", f"q{int(rng.integers(n_posts))}", kind, k, sent))
    return dataset_from(pages, posts, inters)


def load_uk_pages():
    with open(FIXTURES / "uk_pages.csv", newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="session")
def pinned():
    return generate(PINNED)


@pytest.fixture(scope="session")
def polarized():
    return generate(POLARIZED)


@pytest.fixture
def rng():
    return np.random.default_rng(20160623)
