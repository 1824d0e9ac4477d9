"""Domain records for page/user interaction datasets, plus ingestion and
serialization in JSONL and per-type CSV form.

Timestamps are stored as UTC seconds since the epoch (float). JSONL
records carry a ``type`` discriminator in {page, post, like, comment};
the CSV layout is a directory holding ``pages.csv``, ``posts.csv``,
``likes.csv`` and ``comments.csv``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

__all__ = [
    "Page",
    "Post",
    "Interaction",
    "InteractionDataset",
    "DatasetSummary",
    "IngestError",
    "ParseError",
    "IntegrityError",
    "ingest",
    "read_dataset",
    "write_jsonl",
    "write_csv_dir",
    "iter_jsonl_records",
    "filter_engaged",
    "summarize",
    "normalize_concept",
    "parse_timestamp",
    "format_timestamp",
]

LIKE = "like"
COMMENT = "comment"
KINDS = (LIKE, COMMENT)


class IngestError(ValueError):
    """Base class for ingestion failures; ``diagnostics`` lists one line per problem."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        head = "; ".join(self.diagnostics[:5])
        more = len(self.diagnostics) - 5
        if more > 0:
            head += f"; ... ({more} more)"
        super().__init__(head)


class ParseError(IngestError):
    pass


class IntegrityError(IngestError):
    pass


def normalize_concept(concept: str) -> str:
    """Lowercase and collapse internal whitespace."""
    return " ".join(concept.lower().split())


def parse_timestamp(value) -> float:
    """ISO-8601 string (naive means UTC) or epoch number -> UTC seconds."""
    if isinstance(value, bool):
        raise ValueError("boolean is not a timestamp")
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ValueError("non-finite timestamp")
        return float(value)
    if not isinstance(value, str) or not value:
        raise ValueError("timestamp must be an ISO-8601 string")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def format_timestamp(ts: float) -> str:
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    if dt.microsecond == 0:
        return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass(frozen=True, slots=True)
class Page:
    page_id: str
    name: str = ""
    engaged_flag: bool = True
    community_label: str | None = None


@dataclass(frozen=True, slots=True)
class Post:
    post_id: str
    page_id: str
    timestamp: float
    text: str | None = None
    sentiment: float | None = None
    concepts: frozenset[str] = frozenset()


@dataclass(frozen=True, slots=True)
class Interaction:
    user_id: str
    post_id: str
    kind: str
    timestamp: float
    sentiment: float | None = None
    # comment body, only used when scoring comments locally
    text: str | None = None

    @property
    def key(self) -> tuple[str, str, str, float]:
        return (self.user_id, self.post_id, self.kind, self.timestamp)


@dataclass(frozen=True, slots=True)
class DatasetSummary:
    pages: int
    posts: int
    likes: int
    comments: int
    likers: int
    commenters: int

    def as_dict(self) -> dict[str, int]:
        return {
            "pages": self.pages,
            "posts": self.posts,
            "likes": self.likes,
            "comments": self.comments,
            "likers": self.likers,
            "commenters": self.commenters,
        }


@dataclass(frozen=True)
class InteractionDataset:
    """Immutable, referentially intact collection of pages, posts and interactions."""

    pages: tuple[Page, ...] = ()
    posts: tuple[Post, ...] = ()
    interactions: tuple[Interaction, ...] = ()
    provenance: str = ""
    _page_index: dict = field(default=None, init=False, repr=False, compare=False)
    _post_index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pages", tuple(self.pages))
        object.__setattr__(self, "posts", tuple(self.posts))
        object.__setattr__(self, "interactions", tuple(self.interactions))
        object.__setattr__(self, "_page_index", {p.page_id: p for p in self.pages})
        object.__setattr__(self, "_post_index", {p.post_id: p for p in self.posts})

    def page(self, page_id: str) -> Page:
        return self._page_index[page_id]

    def post(self, post_id: str) -> Post:
        return self._post_index[post_id]

    def page_of_post(self, post_id: str) -> str:
        return self._post_index[post_id].page_id

    @property
    def likes(self) -> Iterator[Interaction]:
        return (i for i in self.interactions if i.kind == LIKE)

    @property
    def comments(self) -> Iterator[Interaction]:
        return (i for i in self.interactions if i.kind == COMMENT)

    def validate(self) -> None:
        """Raise :class:`IntegrityError` on duplicate ids or dangling references."""
        problems = []
        seen = set()
        for p in self.pages:
            if p.page_id in seen:
                problems.append(f"duplicate page_id {p.page_id!r}")
            seen.add(p.page_id)
        seen = set()
        for p in self.posts:
            if p.post_id in seen:
                problems.append(f"duplicate post_id {p.post_id!r}")
            seen.add(p.post_id)
            if p.page_id not in self._page_index:
                problems.append(f"post {p.post_id!r} references missing page_id {p.page_id!r}")
        for i in self.interactions:
            if i.post_id not in self._post_index:
                problems.append(f"{i.kind} by {i.user_id!r} references missing post_id {i.post_id!r}")
        if problems:
            raise IntegrityError(problems)

    def with_pages(self, pages: Iterable[Page]) -> "InteractionDataset":
        return replace(self, pages=tuple(pages))


# ---------------------------------------------------------------------------
# record validation


def _require(rec: dict, name: str, where: str, errors: list[str]):
    if name not in rec or rec[name] is None or rec[name] == "":
        errors.append(f"{where}: missing field {name!r}")
        return None
    return rec[name]


def _opt_sentiment(rec: dict, where: str, errors: list[str]) -> float | None:
    value = rec.get("sentiment")
    if value is None or value == "":
        return None
    try:
        s = float(value)
    except (TypeError, ValueError):
        errors.append(f"{where}: field 'sentiment' is not a number")
        return None
    if not (-1.0 <= s <= 1.0):
        errors.append(f"{where}: field 'sentiment' {s} outside [-1, 1]")
        return None
    return s


def _timestamp(rec: dict, where: str, errors: list[str]) -> float | None:
    raw = _require(rec, "timestamp", where, errors)
    if raw is None:
        return None
    try:
        return parse_timestamp(raw)
    except (TypeError, ValueError):
        errors.append(f"{where}: field 'timestamp' is not ISO-8601: {raw!r}")
        return None


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return bool(value)
    text = str(value).strip().lower()
    if text in ("1", "true", "t", "yes", "y"):
        return True
    if text in ("0", "false", "f", "no", "n", ""):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _concepts(value) -> frozenset[str]:
    if value is None or value == "":
        return frozenset()
    if isinstance(value, str):
        value = value.split("|")
    return frozenset(c for c in (normalize_concept(str(v)) for v in value) if c)


def _record_to_obj(rec: dict, where: str, errors: list[str]):
    kind = rec.get("type")
    n_before = len(errors)
    if kind == "page":
        pid = _require(rec, "page_id", where, errors)
        try:
            engaged = _as_bool(rec.get("engaged", True))
        except ValueError:
            errors.append(f"{where}: field 'engaged' is not a boolean")
            engaged = True
        if len(errors) > n_before:
            return None
        community = rec.get("community") or None
        return Page(str(pid), str(rec.get("name") or ""), engaged, community)
    if kind == "post":
        pid = _require(rec, "post_id", where, errors)
        page = _require(rec, "page_id", where, errors)
        ts = _timestamp(rec, where, errors)
        sentiment = _opt_sentiment(rec, where, errors)
        if len(errors) > n_before:
            return None
        text = rec.get("text")
        return Post(str(pid), str(page), ts, text if text else None, sentiment, _concepts(rec.get("concepts")))
    if kind in KINDS:
        user = _require(rec, "user_id", where, errors)
        post = _require(rec, "post_id", where, errors)
        ts = _timestamp(rec, where, errors)
        sentiment = _opt_sentiment(rec, where, errors)
        if kind == LIKE and sentiment is not None:
            errors.append(f"{where}: field 'sentiment' not allowed on a like")
        if len(errors) > n_before:
            return None
        text = rec.get("text") if kind == COMMENT else None
        return Interaction(str(user), str(post), kind, ts, sentiment, text if text else None)
    errors.append(f"{where}: field 'type' must be one of page, post, like, comment (got {kind!r})")
    return None


def _assemble(objs: Iterable, provenance: str) -> InteractionDataset:
    pages, posts, inters = [], [], []
    seen = set()
    for obj in objs:
        if isinstance(obj, Page):
            pages.append(obj)
        elif isinstance(obj, Post):
            posts.append(obj)
        else:
            if obj.key in seen:
                continue
            seen.add(obj.key)
            inters.append(obj)
    ds = InteractionDataset(tuple(pages), tuple(posts), tuple(inters), provenance)
    ds.validate()
    return ds


def iter_jsonl_records(lines: Iterable[str]) -> Iterator[tuple[int, dict | None, str | None]]:
    """Yield ``(line_number, record, error)`` for each non-blank line."""
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            yield lineno, None, f"line {lineno}: invalid JSON ({exc.msg})"
            continue
        if not isinstance(rec, dict):
            yield lineno, None, f"line {lineno}: record is not a JSON object"
            continue
        yield lineno, rec, None


def _ingest_jsonl(lines: Iterable[str], provenance: str) -> InteractionDataset:
    errors: list[str] = []
    objs = []
    for lineno, rec, err in iter_jsonl_records(lines):
        if err:
            errors.append(err)
            continue
        obj = _record_to_obj(rec, f"line {lineno}", errors)
        if obj is not None:
            objs.append(obj)
    if errors:
        raise ParseError(errors)
    return _assemble(objs, provenance)


_CSV_FILES = {
    "page": ("pages.csv", ("page_id", "name", "engaged")),
    "post": ("posts.csv", ("post_id", "page_id", "timestamp")),
    "like": ("likes.csv", ("user_id", "post_id", "timestamp")),
    "comment": ("comments.csv", ("user_id", "post_id", "timestamp")),
}


def _ingest_csv_dir(directory: Path, provenance: str) -> InteractionDataset:
    errors: list[str] = []
    objs = []
    for kind, (fname, required) in _CSV_FILES.items():
        path = directory / fname
        if not path.exists():
            if kind in ("page", "post"):
                errors.append(f"{fname}: file missing")
            continue
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                errors.append(f"{fname} line 1: header lacks field(s) {', '.join(missing)}")
                continue
            for row in reader:
                rec = dict(row)
                rec["type"] = kind
                obj = _record_to_obj(rec, f"{fname} line {reader.line_num}", errors)
                if obj is not None:
                    objs.append(obj)
    if errors:
        raise ParseError(errors)
    return _assemble(objs, provenance)


def ingest(source, fmt: str = "jsonl", provenance: str | None = None) -> InteractionDataset:
    """Parse and validate a dataset.

    Parameters
    ----------
    source : path, text stream or iterable of lines
        A ``.jsonl`` file, an iterable of JSON lines, or (for ``fmt="csv"``)
        a directory containing the per-type CSV files.
    fmt : {"jsonl", "csv"}

    Raises
    ------
    ParseError
        One diagnostic per malformed record, naming line and field.
    IntegrityError
        Duplicate ids or references to unknown pages/posts.
    """
    if fmt == "csv":
        directory = Path(source)
        return _ingest_csv_dir(directory, provenance if provenance is not None else str(directory))
    if fmt != "jsonl":
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return _ingest_jsonl(fh, provenance if provenance is not None else str(source))
    return _ingest_jsonl(source, provenance or "")


def read_dataset(path, fmt: str | None = None) -> InteractionDataset:
    """Ingest from a path, inferring the format (directory means CSV)."""
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.is_dir() else "jsonl"
    return ingest(path, fmt)


# ---------------------------------------------------------------------------
# serialization


def _num(x: float):
    return int(x) if float(x).is_integer() else x


def _records(d: InteractionDataset) -> Iterator[dict]:
    for p in d.pages:
        rec = {"type": "page", "page_id": p.page_id, "name": p.name, "engaged": p.engaged_flag}
        if p.community_label is not None:
            rec["community"] = p.community_label
        yield rec
    for p in d.posts:
        rec = {"type": "post", "post_id": p.post_id, "page_id": p.page_id,
               "timestamp": format_timestamp(p.timestamp)}
        if p.text is not None:
            rec["text"] = p.text
        if p.sentiment is not None:
            rec["sentiment"] = p.sentiment
        if p.concepts:
            rec["concepts"] = sorted(p.concepts)
        yield rec
    for i in d.interactions:
        rec = {"type": i.kind, "user_id": i.user_id, "post_id": i.post_id,
               "timestamp": format_timestamp(i.timestamp)}
        if i.sentiment is not None:
            rec["sentiment"] = i.sentiment
        if i.text is not None:
            rec["text"] = i.text
        yield rec


def write_jsonl(d: InteractionDataset, dest) -> None:
    """Write ``d`` as JSON lines to a path or text stream."""
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            write_jsonl(d, fh)
        return
    for rec in _records(d):
        dest.write(json.dumps(rec, ensure_ascii=False, sort_keys=True))
        dest.write("\n")


def to_jsonl_string(d: InteractionDataset) -> str:
    buf = io.StringIO()
    write_jsonl(d, buf)
    return buf.getvalue()


def write_csv_dir(d: InteractionDataset, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def opt(x):
        return "" if x is None else x

    with open(directory / "pages.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["page_id", "name", "engaged", "community"])
        for p in d.pages:
            w.writerow([p.page_id, p.name, "true" if p.engaged_flag else "false", opt(p.community_label)])
    with open(directory / "posts.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["post_id", "page_id", "timestamp", "text", "sentiment", "concepts"])
        for p in d.posts:
            w.writerow([p.post_id, p.page_id, format_timestamp(p.timestamp), opt(p.text),
                        opt(p.sentiment), "|".join(sorted(p.concepts))])
    with open(directory / "likes.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["user_id", "post_id", "timestamp"])
        for i in d.likes:
            w.writerow([i.user_id, i.post_id, format_timestamp(i.timestamp)])
    with open(directory / "comments.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["user_id", "post_id", "timestamp", "sentiment", "text"])
        for i in d.comments:
            w.writerow([i.user_id, i.post_id, format_timestamp(i.timestamp), opt(i.sentiment), opt(i.text)])


# ---------------------------------------------------------------------------
# operations


def filter_engaged(d: InteractionDataset) -> InteractionDataset:
    """Keep engaged pages, their posts, and the interactions on those posts."""
    pages = tuple(p for p in d.pages if p.engaged_flag)
    if len(pages) == len(d.pages):
        return d
    keep_pages = {p.page_id for p in pages}
    posts = tuple(p for p in d.posts if p.page_id in keep_pages)
    keep_posts = {p.post_id for p in posts}
    inters = tuple(i for i in d.interactions if i.post_id in keep_posts)
    return InteractionDataset(pages, posts, inters, d.provenance)


def summarize(d: InteractionDataset) -> DatasetSummary:
    likes = comments = 0
    likers, commenters = set(), set()
    for i in d.interactions:
        if i.kind == LIKE:
            likes += 1
            likers.add(i.user_id)
        else:
            comments += 1
            commenters.add(i.user_id)
    return DatasetSummary(len(d.pages), len(d.posts), likes, comments, len(likers), len(commenters))
