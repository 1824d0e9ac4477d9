import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dataset_from, load_uk_pages, random_dataset
from echochamber.data import (COMMENT, LIKE, IntegrityError, InteractionDataset, Page, ParseError,
                              filter_engaged, format_timestamp, ingest, normalize_concept, parse_timestamp,
                              read_dataset, summarize, to_jsonl_string, write_csv_dir, write_jsonl)
from echochamber.synth import SynthConfig, generate


def _lines(*recs):
    return [json.dumps(r) for r in recs]


def _basic_stream():
    return _lines(
        {"type": "page", "page_id": "p1", "name": "One", "engaged": True},
        {"type": "page", "page_id": "p2", "name": "Two", "engaged": False},
        {"type": "post", "post_id": "a", "page_id": "p1", "timestamp": "2016-01-01T00:00:00Z"},
        {"type": "post", "post_id": "b", "page_id": "p1", "timestamp": "2016-01-02T00:00:00Z",
         "sentiment": -0.5, "concepts": ["European Union", "  Brexit "]},
        {"type": "post", "post_id": "c", "page_id": "p2", "timestamp": 1451606400},
        *[{"type": "like", "user_id": f"u{k}", "post_id": "abc"[k % 3], "timestamp": "2016-01-03T00:00:00"}
          for k in range(5)],
    )


def test_counts_two_pages_three_posts_five_likes():
    d = ingest(_basic_stream())
    s = summarize(d)
    assert (s.pages, s.posts, s.likes, s.comments) == (2, 3, 5, 0)


def test_concepts_are_normalized():
    d = ingest(_basic_stream())
    assert d.post("b").concepts == frozenset({"european union", "brexit"})


def test_unknown_post_reference_is_integrity_error():
    lines = _basic_stream() + _lines({"type": "like", "user_id": "x", "post_id": "zzz", "timestamp": 0})
    with pytest.raises(IntegrityError) as err:
        ingest(lines)
    assert "zzz" in str(err.value)


def test_unknown_page_reference_is_integrity_error():
    lines = _lines({"type": "post", "post_id": "a", "page_id": "nowhere", "timestamp": 0})
    with pytest.raises(IntegrityError, match="nowhere"):
        ingest(lines)


def test_duplicate_page_is_integrity_error():
    lines = _lines({"type": "page", "page_id": "p", "engaged": True}, {"type": "page", "page_id": "p", "engaged": 1})
    with pytest.raises(IntegrityError, match="duplicate"):
        ingest(lines)


@pytest.mark.parametrize("record,needle", [
    ({"type": "post", "post_id": "a", "page_id": "p1"}, "timestamp"),
    ({"type": "post", "post_id": "a", "page_id": "p1", "timestamp": "yesterday"}, "timestamp"),
    ({"type": "comment", "user_id": "u", "post_id": "a", "timestamp": 0, "sentiment": 1.5}, "sentiment"),
    ({"type": "like", "user_id": "u", "post_id": "a", "timestamp": 0, "sentiment": 0.1}, "sentiment"),
    ({"type": "share", "user_id": "u", "post_id": "a", "timestamp": 0}, "type"),
    ({"type": "page", "page_id": "p9", "engaged": "maybe"}, "engaged"),
])
def test_schema_violations_name_line_and_field(record, needle):
    lines = _basic_stream() + _lines(record)
    with pytest.raises(ParseError) as err:
        ingest(lines)
    msg = str(err.value)
    assert f"line {len(lines)}" in msg and needle in msg


def test_malformed_json_line_reported():
    with pytest.raises(ParseError, match="line 2"):
        ingest(['{"type": "page", "page_id": "p", "engaged": true}', "{not json"])


def test_repeated_interaction_is_deduplicated():
    lines = _basic_stream() + _basic_stream()[-1:]
    assert summarize(ingest(lines)).likes == 5


def test_one_user_liking_and_commenting_same_post():
    d = dataset_from(["p"], [("q", "p")], [("u", "q", LIKE), ("u", "q", COMMENT, 5, 0.1)])
    assert summarize(d).as_dict() == {"pages": 1, "posts": 1, "likes": 1, "comments": 1,
                                      "likers": 1, "commenters": 1}


def test_empty_dataset_summary_all_zero():
    assert set(summarize(InteractionDataset()).as_dict().values()) == {0}


def test_filter_engaged_drops_pages_posts_and_interactions():
    d = ingest(_basic_stream())
    e = filter_engaged(d)
    assert [p.page_id for p in e.pages] == ["p1"]
    assert {p.post_id for p in e.posts} == {"a", "b"}
    assert all(i.post_id in {"a", "b"} for i in e.interactions)
    assert summarize(e).likes == 4


def test_filter_engaged_all_engaged_is_identity():
    d = dataset_from(["p", "q"], [("x", "p")], [("u", "x", LIKE)])
    assert filter_engaged(d) is d


def test_filter_engaged_none_engaged_is_empty():
    d = dataset_from([("p", False)], [("x", "p")], [("u", "x", LIKE)])
    assert set(summarize(filter_engaged(d)).as_dict().values()) == {0}


def test_uk_page_table_engaged_count():
    rows = load_uk_pages()
    d = InteractionDataset(tuple(Page(r["id"], r["name"], r["engaged"] == "Y", r["community"] or None)
                                 for r in rows))
    assert len(d.pages) == 81
    kept = filter_engaged(d)
    # the appendix table flags 37 pages (16 C1 + 21 C2)
    assert len(kept.pages) == 37
    assert sum(p.community_label == "C1" for p in kept.pages) == 16
    assert sum(p.community_label == "C2" for p in kept.pages) == 21


def test_synth_with_38_engaged_of_81():
    cfg = SynthConfig(n_pages_per_block=19, n_users_per_block=20, n_unengaged_pages=43, posts_per_page=1)
    d, _ = generate(cfg)
    assert len(d.pages) == 81
    assert len(filter_engaged(d).pages) == 38


def test_summary_matches_generator_ledger(pinned):
    d, ledger = pinned
    assert summarize(d).as_dict() == ledger.counts


def test_jsonl_round_trip(tmp_path, pinned):
    d, _ = pinned
    path = tmp_path / "d.jsonl"
    write_jsonl(d, path)
    again = read_dataset(path)
    assert again.pages == d.pages and again.posts == d.posts and again.interactions == d.interactions


def test_csv_round_trip(tmp_path):
    d = ingest(_basic_stream() + _lines(
        {"type": "comment", "user_id": "u1", "post_id": "b", "timestamp": 7, "sentiment": -0.25, "text": "no, thanks"}))
    write_csv_dir(d, tmp_path / "csv")
    again = read_dataset(tmp_path / "csv")
    assert to_jsonl_string(again) == to_jsonl_string(d)


def test_csv_missing_header_field(tmp_path):
    d = ingest(_basic_stream())
    write_csv_dir(d, tmp_path)
    (tmp_path / "likes.csv").write_text("user_id,post_id\nu,a\n")
    with pytest.raises(ParseError, match="likes.csv.*timestamp"):
        ingest(tmp_path, "csv")


def test_timestamps():
    assert parse_timestamp("2016-01-10T00:00:00Z") - parse_timestamp("2016-01-01") == 9 * 86400
    assert parse_timestamp("2016-01-01T01:00:00+01:00") == parse_timestamp("2016-01-01T00:00:00Z")
    assert parse_timestamp(format_timestamp(1467158400.5)) == 1467158400.5
    with pytest.raises(ValueError):
        parse_timestamp(True)


def test_normalize_concept():
    assert normalize_concept("  David   CAMERON ") == "david cameron"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_jsonl_serialization_is_stable(seed):
    import numpy as np
    d = random_dataset(np.random.default_rng(seed), n_concepts=3)
    text = to_jsonl_string(d)
    assert to_jsonl_string(ingest(io.StringIO(text))) == text
