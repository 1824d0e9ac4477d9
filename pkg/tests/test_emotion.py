import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dataset_from, random_dataset
from echochamber.community import Partition
from echochamber.data import COMMENT, LIKE
from echochamber.emotion import (LexiconScorer, concept_sentiments, emotional_distance, emotional_response,
                                 score_dataset, score_with_provider, sentiment_pdf, top_concepts, user_response)
from echochamber.polarization import C1, C2, TwoSides, two_sides

SIDES = two_sides(Partition(("left", "right"), [0, 1]))

# concept -> (C1 post sentiments, C2 post sentiments)
TEN = {
    "brexit": ([-0.5, -0.3], [0.2]),
    "immigration": ([0.125], [-0.375]),
    "economy": ([-0.2, -0.2], [-0.1]),
    "nhs": ([0.3], [0.3]),
    "david cameron": ([-0.625], [-0.25, 0.0]),
    "boris johnson": ([0.4, 0.2], [-0.1]),
    "trade": ([0.0], [0.25]),
    "nigel farage": ([0.0], [-0.25]),
    "referendum": ([-0.1], [0.05]),
    "sovereignty": ([0.2], [-0.5]),
}
# hand-computed: (concept, avg_c1, avg_c2, distance, panel) in output order
TEN_EXPECTED = [
    ("sovereignty", 0.2, -0.5, -0.7, "B"),
    ("brexit", -0.4, 0.2, 0.6, "A"),
    ("david cameron", -0.625, -0.125, 0.5, "A"),
    ("immigration", 0.125, -0.375, -0.5, "B"),
    ("boris johnson", 0.3, -0.1, -0.4, "B"),
    ("nigel farage", 0.0, -0.25, -0.25, "B"),
    ("trade", 0.0, 0.25, 0.25, "A"),
    ("referendum", -0.1, 0.05, 0.15, "-"),
    ("economy", -0.2, -0.1, 0.1, "-"),
    ("nhs", 0.3, 0.3, 0.0, "-"),
]


def corpus(spec):
    posts = []
    for concept, (left, right) in spec.items():
        for page, values in (("left", left), ("right", right)):
            for k, s in enumerate(values):
                posts.append((f"{page}/{concept}/{k}", page, s, [concept]))
    return dataset_from(["left", "right"], posts, [])


def test_ten_concept_fixture():
    panels = emotional_distance(corpus(TEN), SIDES, list(TEN))
    got = [(r.concept, r.avg_c1, r.avg_c2, r.distance, r.panel) for r in panels.records]
    assert [g[0] for g in got] == [e[0] for e in TEN_EXPECTED]
    for g, e in zip(got, TEN_EXPECTED):
        assert g[4] == e[4]
        assert np.allclose(g[1:4], e[1:4], rtol=0, atol=1e-12)
    assert [r.concept for r in panels.panel_a] == ["brexit", "david cameron", "trade"]
    assert [r.concept for r in panels.panel_b] == ["sovereignty", "immigration", "boris johnson", "nigel farage"]
    assert len(panels.neutral) == 3 and panels.excluded == []


def test_simple_distance():
    panels = emotional_distance(corpus({"x": ([-0.5, -0.3], [0.2])}), SIDES)
    r = panels.records[0]
    assert r.distance == pytest.approx(0.6, abs=1e-15) and r.controversial


def test_equal_averages_not_controversial():
    r = emotional_distance(corpus({"x": ([0.1, 0.3], [0.2])}), SIDES).records[0]
    assert abs(r.distance) < 1e-15 and not r.controversial


def test_missing_side_excluded():
    d = corpus({"x": ([0.1], []), "y": ([0.1], [0.5])})
    panels = emotional_distance(d, SIDES, ["x", "y"])
    assert panels.excluded == ["x"] and [r.concept for r in panels.records] == ["y"]


def test_unscored_posts_ignored():
    d = dataset_from(["left", "right"], [("a", "left", None, ["x"]), ("b", "left", 0.4, ["x"]),
                                         ("c", "right", 0.0, ["x"])], [])
    cs = concept_sentiments(d, SIDES)
    assert cs[C1]["x"].post_count == 1 and cs[C1]["x"].avg_sentiment == 0.4


def test_top_concepts_disjoint_and_identical():
    d = corpus({"a": ([0.1], []), "b": ([], [0.1])})
    assert top_concepts(d, SIDES, 5).shared == []
    same = corpus({"a": ([0.1, 0.2], [0.1, 0.2]), "b": ([0.0], [0.0])})
    assert top_concepts(same, SIDES, 5).shared == ["a", "b"]


def test_top_concepts_ranking_matches_counting(rng):
    vocab = [f"c{i:02d}" for i in range(30)]
    freqs = rng.random(30)
    posts = []
    for k in range(200):
        chosen = [c for c, f in zip(vocab, freqs) if rng.random() < f]
        posts.append((f"q{k}", "left" if k % 2 else "right", 0.0, chosen))
    d = dataset_from(["left", "right"], posts, [])
    top = top_concepts(d, SIDES, 10)
    for side, page in ((C1, "left"), (C2, "right")):
        counts = {}
        for _, pg, _, cs in posts:
            if pg == page:
                for c in cs:
                    counts[c] = counts.get(c, 0) + 1
        brute = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        cutoff = brute[9][1]
        assert top.ranked[side] == [kv for kv in brute if kv[1] >= cutoff]


def test_top_concepts_keeps_ties():
    d = corpus({"a": ([0.1], [0.1]), "b": ([0.1], [0.1]), "c": ([0.1], [0.1])})
    assert len(top_concepts(d, SIDES, 1).ranked[C1]) == 3


def test_response_example():
    d = dataset_from(["left", "right"], [("p", "left", 0.5, ["x"]), ("q", "right", 0.1, ["x"])],
                     [("u", "p", COMMENT, 1, -0.5), ("v", "p", COMMENT, 2, -0.1), ("w", "q", COMMENT, 3, 0.1)])
    table = emotional_response(d, SIDES, ["x"])
    r = table.records[C1][0]
    assert (r.post_avg_sentiment, r.comment_avg_sentiment) == (0.5, pytest.approx(-0.3, abs=1e-15))
    assert r.response_gap == pytest.approx(-0.8, abs=1e-15)
    assert table.records[C2][0].response_gap == 0.0
    assert table.sign_change == {C1: 1, C2: 0}


def test_response_weighting_and_missing_comments():
    d = dataset_from(["left", "right"],
                     [("p", "left", 0.0, ["x"]), ("q", "left", 0.0, ["x"]), ("r", "left", 0.9, ["x"])],
                     [("u", "p", COMMENT, 1, -0.6), ("v", "q", COMMENT, 2, 0.0), ("w", "q", COMMENT, 3, 0.0),
                      ("w", "q", LIKE, 4)])
    by_post = emotional_response(d, SIDES, ["x"], "post")
    by_comment = emotional_response(d, SIDES, ["x"], "comment")
    assert by_post.records[C1][0].comment_avg_sentiment == pytest.approx(-0.3)
    assert by_comment.records[C1][0].comment_avg_sentiment == pytest.approx(-0.2)
    assert by_post.records[C1][0].post_avg_sentiment == 0.0   # post r has no comments
    assert by_post.posts_without_comments == 1


def test_user_response():
    d = dataset_from(["left", "right"], [("p", "left", 0.5, ["x"]), ("q", "left", 0.5, ["x"])],
                     [("u", "p", COMMENT, 1, -0.5), ("u", "q", COMMENT, 2, 0.5), ("v", "p", COMMENT, 3, 0.6)])
    (rec,) = user_response(d, SIDES, ["x"])
    assert rec.n_users == 2 and rec.user_avg_sentiment == pytest.approx(0.3)


def test_sentiment_pdf_extremes_and_symmetry():
    d = corpus({"x": ([-1.0, -1.0], [0.5, -0.5])})
    h = sentiment_pdf(d, SIDES, 10)
    edges, dens = h[C1]
    assert dens[0] * (edges[1] - edges[0]) == 1.0
    _, dens2 = h[C2]
    assert np.allclose(dens2, dens2[::-1], rtol=1e-12)


def test_sentiment_pdf_omits_empty_side():
    d = corpus({"x": ([0.1], [])})
    assert set(sentiment_pdf(d, SIDES)) == {C1}


def test_planted_means_and_negative_responses(pinned):
    d, ledger = pinned
    cfg = ledger.config
    sides = TwoSides({p: (C1 if b == 0 else C2) for p, b in ledger.page_block.items()})
    by_side = {C1: [], C2: []}
    for post in d.posts:
        by_side[sides.side_of[post.page_id]].append(post.sentiment)
    for b, side in enumerate((C1, C2)):
        planted = cfg["sentiment_means"][b] + sum(c["freq"][b] * c["offset"][b] for c in cfg["concept_vocab"])
        v = np.array(by_side[side])
        assert abs(v.mean() - planted) <= 3 * v.std(ddof=1) / np.sqrt(v.size)
    assert np.mean(by_side[C1]) < np.mean(by_side[C2])
    concepts = [c["name"] for c in cfg["concept_vocab"]]
    table = emotional_response(d, sides, concepts)
    gaps = [r.response_gap for recs in table.records.values() for r in recs]
    assert gaps and all(g < 0 for g in gaps)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_panel_counts_partition_shared_set(seed, n):
    d = random_dataset(np.random.default_rng(seed), n_concepts=10)
    sides = two_sides(Partition(tuple(p.page_id for p in d.pages), [0, 0, 0, 1, 1, 1]))
    top = top_concepts(d, sides, n)
    panels = emotional_distance(d, sides, top.shared)
    assert len(panels.panel_a) + len(panels.panel_b) + len(panels.neutral) + len(panels.excluded) == len(top.shared)
    assert panels.excluded == []


# -- scoring ------------------------------------------------------------------

LEX = LexiconScorer({"good": 1.0, "great": 0.8, "bad": -1.0, "awful": -0.9},
                    ["european union", "immigration"])


def test_lexicon_empty_text():
    assert LEX("") == (0.0, frozenset())


def test_lexicon_positive_words():
    s, _ = LEX("good great good")
    assert s > 0


def test_lexicon_hand_arithmetic():
    cases = [
        ("The European Union is good", (1.0 / 5, {"european union"})),
        ("awful awful immigration policy, bad!", ((-0.9 - 0.9 - 1.0) / 5, {"immigration"})),
        ("great", (0.8, set())),
    ]
    for text, (sent, concepts) in cases:
        s, found = LEX(text)
        assert s == pytest.approx(sent, abs=1e-15) and found == concepts


def test_provider_failures_counted():
    def flaky(text):
        if "boom" in text:
            raise RuntimeError("provider down")
        if "big" in text:
            return 3.0, []
        return 0.5, ["Trade"]
    scored, failures = score_with_provider(["fine", "boom", "big"], flaky)
    assert failures == 2
    assert [s.sentiment for s in scored] == [0.5, None, None]
    assert scored[0].concepts == frozenset({"trade"})


def test_score_dataset_fills_missing_fields():
    from echochamber.data import Interaction, InteractionDataset, Page, Post
    d = InteractionDataset((Page("p"),), (Post("q", "p", 0.0, "the european union is bad"),),
                           (Interaction("u", "q", COMMENT, 1.0, None, "good"),))
    scored, failures = score_dataset(d, LEX)
    assert failures == 0
    post = scored.post("q")
    assert post.sentiment == pytest.approx(-0.2) and post.concepts == frozenset({"european union"})
    assert scored.interactions[0].sentiment == 1.0
