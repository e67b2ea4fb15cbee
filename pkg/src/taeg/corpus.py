"""Corpus and timeline loading, validation and sentence-to-event alignment.

Both input files are UTF-8 JSON carrying ``format_version: 1``. Text spans
are addressed as ``book:chapter:verse`` where ``book`` is the identifier of
the document the span belongs to.
"""
from __future__ import annotations

import bisect
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .errors import InvariantError, MalformedRef, OverlapError, SchemaError

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class VerseRef:
    book: str
    chapter: int
    verse: int

    def __post_init__(self):
        if not self.book:
            raise MalformedRef("empty book identifier")
        if self.chapter < 1 or self.verse < 1:
            raise MalformedRef(f"chapter and verse must be >= 1: {self}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.chapter, self.verse)

    def __str__(self):
        return f"{self.book}:{self.chapter}:{self.verse}"


@dataclass(frozen=True)
class VerseRange:
    start: VerseRef
    end: VerseRef

    def __post_init__(self):
        if self.start.book != self.end.book:
            raise InvariantError(f"range crosses books: {self.start} .. {self.end}")
        if self.start.key > self.end.key:
            raise InvariantError(f"range start after end: {self.start} .. {self.end}")

    @property
    def book(self) -> str:
        return self.start.book

    def contains(self, other: "VerseRange") -> bool:
        return (
            self.book == other.book
            and self.start.key <= other.start.key
            and other.end.key <= self.end.key
        )

    def overlaps(self, other: "VerseRange") -> bool:
        return (
            self.book == other.book
            and self.start.key <= other.end.key
            and other.start.key <= self.end.key
        )

    def to_dict(self) -> dict:
        return {"start": str(self.start), "end": str(self.end)}


def parse_verse_ref(s: str, books: Optional[Iterable[str]] = None) -> VerseRef:
    """Parse ``book:chapter:verse``; whitespace around each field is ignored.

    If ``books`` is given the book token must be one of them (exact,
    case-sensitive match).
    """
    if not isinstance(s, str):
        raise MalformedRef(f"verse reference must be a string, got {type(s).__name__}")
    parts = [p.strip() for p in s.split(":")]
    if len(parts) != 3:
        raise MalformedRef(f"expected book:chapter:verse, got {s!r}")
    book, chapter, verse = parts
    if not book:
        raise MalformedRef(f"empty book in {s!r}")
    if not (chapter.isdecimal() and verse.isdecimal()):
        raise MalformedRef(f"non-numeric chapter or verse in {s!r}")
    if books is not None and book not in books:
        raise MalformedRef(f"unknown book {book!r} in {s!r}")
    return VerseRef(book, int(chapter), int(verse))


@dataclass(frozen=True)
class Sentence:
    id: int
    doc_id: str
    position: int
    text: str
    span: VerseRange


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    sentences: tuple[Sentence, ...]

    @property
    def text(self) -> str:
        return " ".join(s.text for s in self.sentences)


@dataclass(frozen=True)
class CanonicalEvent:
    index: int
    title: str
    spans: Mapping[str, VerseRange] = field(default_factory=dict)

    @property
    def covered(self) -> bool:
        return bool(self.spans)


@dataclass(frozen=True)
class Timeline:
    events: tuple[CanonicalEvent, ...]

    def __post_init__(self):
        seen = set()
        prev = None
        for ev in self.events:
            if ev.index in seen:
                raise InvariantError(f"duplicate event index {ev.index}")
            if prev is not None and ev.index <= prev:
                raise InvariantError(f"event index {ev.index} follows {prev}")
            seen.add(ev.index)
            prev = ev.index

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def indices(self) -> list[int]:
        return [ev.index for ev in self.events]


@dataclass
class Alignment:
    sentence_to_event: dict[int, Optional[int]]
    event_versions: dict[tuple[int, str], list[int]]

    def versions_of(self, event_index: int) -> dict[str, list[int]]:
        return {
            doc: sids for (ev, doc), sids in self.event_versions.items() if ev == event_index
        }


# --------------------------------------------------------------------------
# JSON <-> objects
# --------------------------------------------------------------------------

def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    return obj[key]


def _check_version(data, where):
    version = _require(data, "format_version", where)
    if version != FORMAT_VERSION:
        raise SchemaError(f"{where}: unsupported format_version {version!r}")


def _read_json(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def corpus_from_dict(data: dict) -> list[Document]:
    _check_version(data, "corpus")
    raw_docs = _require(data, "documents", "corpus")
    if not isinstance(raw_docs, list):
        raise SchemaError("corpus: 'documents' must be an array")

    doc_ids = []
    for i, raw in enumerate(raw_docs):
        doc_id = _require(raw, "id", f"documents[{i}]")
        if not isinstance(doc_id, str) or not doc_id or ":" in doc_id:
            raise SchemaError(f"documents[{i}]: invalid id {doc_id!r}")
        if doc_id in doc_ids:
            raise SchemaError(f"duplicate document id {doc_id!r}")
        doc_ids.append(doc_id)

    docs = []
    next_id = 0
    for raw, doc_id in zip(raw_docs, doc_ids):
        raw_sents = _require(raw, "sentences", f"document {doc_id}")
        if not isinstance(raw_sents, list):
            raise SchemaError(f"document {doc_id}: 'sentences' must be an array")
        sentences = []
        prev = None
        for pos, rs in enumerate(raw_sents):
            where = f"{doc_id} sentence {pos}"
            text = _require(rs, "text", where)
            if not isinstance(text, str) or not text.strip():
                raise SchemaError(f"{where}: empty text")
            if "\n" in text or "\r" in text:
                raise InvariantError(f"{where}: text contains a newline")
            start = parse_verse_ref(_require(rs, "start", where), (doc_id,))
            end = parse_verse_ref(_require(rs, "end", where), (doc_id,))
            span = VerseRange(start, end)
            if prev is not None and (span.start.key < prev.start.key or span.end.key < prev.end.key):
                raise InvariantError(f"{where}: verse span {start}..{end} goes backwards")
            prev = span
            sentences.append(Sentence(next_id, doc_id, pos, text, span))
            next_id += 1
        docs.append(Document(doc_id, raw.get("title", doc_id), tuple(sentences)))
    return docs


def corpus_to_dict(docs: list[Document]) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "documents": [
            {
                "id": d.id,
                "title": d.title,
                "sentences": [
                    {"text": s.text, "start": str(s.span.start), "end": str(s.span.end)}
                    for s in d.sentences
                ],
            }
            for d in docs
        ],
    }


def timeline_from_dict(data: dict, books: Optional[Iterable[str]] = None) -> Timeline:
    _check_version(data, "timeline")
    raw_events = _require(data, "events", "timeline")
    if not isinstance(raw_events, list):
        raise SchemaError("timeline: 'events' must be an array")
    events = []
    for i, raw in enumerate(raw_events):
        index = _require(raw, "index", f"events[{i}]")
        if not isinstance(index, int) or isinstance(index, bool) or index < 1:
            raise SchemaError(f"events[{i}]: index must be a positive integer")
        spans = {}
        for doc_id, rs in (raw.get("spans") or {}).items():
            where = f"event {index} span {doc_id}"
            start = parse_verse_ref(_require(rs, "start", where), books)
            end = parse_verse_ref(_require(rs, "end", where), books)
            if start.book != doc_id:
                raise SchemaError(f"{where}: span refers to book {start.book!r}")
            spans[doc_id] = VerseRange(start, end)
        events.append(CanonicalEvent(index, raw.get("title", f"Event {index}"), spans))
    return Timeline(tuple(events))


def timeline_to_dict(timeline: Timeline) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "events": [
            {
                "index": ev.index,
                "title": ev.title,
                "spans": {doc: span.to_dict() for doc, span in ev.spans.items()},
            }
            for ev in timeline.events
        ],
    }


def load_corpus(path) -> list[Document]:
    return corpus_from_dict(_read_json(path))


def load_timeline(path, books: Optional[Iterable[str]] = None) -> Timeline:
    timeline = timeline_from_dict(_read_json(path), books)
    uncovered = [ev.index for ev in timeline if not ev.covered]
    if uncovered:
        log.warning("%d events are covered by no document: %s", len(uncovered), uncovered[:10])
    return timeline


def dump_json(data: dict, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def save_corpus(docs: list[Document], path) -> None:
    dump_json(corpus_to_dict(docs), path)


def save_timeline(timeline: Timeline, path) -> None:
    dump_json(timeline_to_dict(timeline), path)


# --------------------------------------------------------------------------
# Alignment
# --------------------------------------------------------------------------

def align(docs: list[Document], timeline: Timeline) -> Alignment:
    """Assign each sentence to the event whose span fully contains it.

    Sentences only partially inside an event span stay unassigned. Sentence
    spans are monotone within a document, so the contained sentences of a
    span form one contiguous run found by bisection.
    """
    by_doc = {d.id: d for d in docs}
    starts = {d.id: [s.span.start.key for s in d.sentences] for d in docs}
    ends = {d.id: [s.span.end.key for s in d.sentences] for d in docs}

    sentence_to_event: dict[int, Optional[int]] = {
        s.id: None for d in docs for s in d.sentences
    }
    event_versions: dict[tuple[int, str], list[int]] = {}

    for ev in timeline:
        for doc_id, span in ev.spans.items():
            if doc_id not in by_doc:
                raise SchemaError(f"event {ev.index} refers to undeclared document {doc_id!r}")
            lo = bisect.bisect_left(starts[doc_id], span.start.key)
            hi = bisect.bisect_right(ends[doc_id], span.end.key)
            sentences = by_doc[doc_id].sentences[lo:hi]
            if not sentences:
                log.warning("event %d: span %s..%s holds no sentence", ev.index, span.start, span.end)
                continue
            for s in sentences:
                prior = sentence_to_event[s.id]
                if prior is not None:
                    raise OverlapError(s.id, prior, ev.index)
                sentence_to_event[s.id] = ev.index
            event_versions[(ev.index, doc_id)] = [s.id for s in sentences]

    partial = 0
    for ev in timeline:
        for doc_id, span in ev.spans.items():
            lo = bisect.bisect_left(ends[doc_id], span.start.key)
            hi = bisect.bisect_right(starts[doc_id], span.end.key)
            for s in by_doc[doc_id].sentences[lo:hi]:
                if sentence_to_event[s.id] is None:
                    partial += 1
                    log.debug("sentence %d straddles event %d boundary", s.id, ev.index)
    if partial:
        log.warning("%d sentence spans straddle event boundaries and were left unassigned", partial)

    return Alignment(sentence_to_event, event_versions)
