"""Streaming parser for MediaWiki page-revision history dumps.

Consumes decompressed export XML (the pages-meta-history shape) and yields
one record per ``<revision>`` element in document order, holding at most a
single revision in memory at a time. Records missing a revision id or a
parseable timestamp are skipped and tallied; suppressed contributors are
kept with a sentinel name so their deletions stay attributable.
"""

from __future__ import annotations

import xml.parsers.expat
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import BinaryIO, Iterator, Optional

DELETED_USER_SENTINEL = "[deleted]"

_READ_SIZE = 1 << 20


class DumpFormatError(Exception):
    """Malformed dump XML; message carries the failing byte offset."""


@dataclass(frozen=True)
class RevisionRecord:
    page_id: str
    page_title: str
    revision_id: str
    timestamp: datetime
    user_text: str
    user_id: Optional[int]
    wikitext: str

    @property
    def sort_key(self) -> tuple[datetime, str]:
        return (self.timestamp, self.revision_id)


@dataclass
class IngestTally:
    revisions: int = 0
    skipped: int = 0
    skip_reasons: dict[str, int] = field(default_factory=dict)

    def record_skip(self, reason: str) -> None:
        self.skipped += 1
        self.skip_reasons[reason] = self.skip_reasons.get(reason, 0) + 1


def parse_timestamp(value: str) -> datetime:
    ts = datetime.fromisoformat(value.strip().replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


class _RevisionAccumulator:
    """Collects character data for one revision while expat walks it."""

    def __init__(self):
        self.rev_id: list[str] = []
        self.timestamp: list[str] = []
        self.username: list[str] = []
        self.ip: list[str] = []
        self.user_id: list[str] = []
        self.text: list[str] = []
        self.contributor_deleted = False


class _DumpHandler:
    def __init__(self, tally: IngestTally):
        self.tally = tally
        self.stack: list[str] = []
        self.page_id: list[str] = []
        self.page_title: list[str] = []
        self.rev: Optional[_RevisionAccumulator] = None
        self.capture: Optional[list[str]] = None
        self.completed: list[RevisionRecord] = []

    def start(self, name: str, attrs: dict) -> None:
        self.stack.append(name)
        parent = self.stack[-2] if len(self.stack) >= 2 else ""
        if name == "page":
            self.page_id = []
            self.page_title = []
        elif name == "revision" and parent == "page":
            self.rev = _RevisionAccumulator()
        elif name == "contributor" and self.rev is not None:
            if attrs.get("deleted") == "deleted":
                self.rev.contributor_deleted = True
        elif self.rev is not None and parent == "revision":
            if name == "id":
                self.capture = self.rev.rev_id
            elif name == "timestamp":
                self.capture = self.rev.timestamp
            elif name == "text":
                self.capture = self.rev.text
        elif self.rev is not None and parent == "contributor":
            if name == "username":
                self.capture = self.rev.username
            elif name == "id":
                self.capture = self.rev.user_id
            elif name == "ip":
                self.capture = self.rev.ip
        elif parent == "page":
            if name == "id":
                self.capture = self.page_id
            elif name == "title":
                self.capture = self.page_title

    def end(self, name: str) -> None:
        self.stack.pop()
        self.capture = None
        if name == "revision" and self.rev is not None:
            self._finish_revision()
            self.rev = None

    def chars(self, data: str) -> None:
        if self.capture is not None:
            self.capture.append(data)

    def _finish_revision(self) -> None:
        rev = self.rev
        rev_id = "".join(rev.rev_id).strip()
        ts_raw = "".join(rev.timestamp).strip()
        if not rev_id:
            self.tally.record_skip("missing_revision_id")
            return
        if not ts_raw:
            self.tally.record_skip("missing_timestamp")
            return
        try:
            timestamp = parse_timestamp(ts_raw)
        except ValueError:
            self.tally.record_skip("bad_timestamp")
            return
        username = "".join(rev.username).strip()
        ip = "".join(rev.ip).strip()
        if rev.contributor_deleted or (not username and not ip):
            user_text = DELETED_USER_SENTINEL
            user_id = None
        elif username:
            user_text = username
            raw_uid = "".join(rev.user_id).strip()
            user_id = int(raw_uid) if raw_uid.isdigit() else None
        else:
            user_text = ip
            user_id = None
        self.tally.revisions += 1
        self.completed.append(
            RevisionRecord(
                page_id="".join(self.page_id).strip(),
                page_title="".join(self.page_title).strip(),
                revision_id=rev_id,
                timestamp=timestamp,
                user_text=user_text,
                user_id=user_id,
                wikitext="".join(rev.text),
            )
        )


def parse_dump_stream(
    stream: BinaryIO,
    tally: Optional[IngestTally] = None,
    read_size: int = _READ_SIZE,
) -> Iterator[RevisionRecord]:
    """Yield revision records from a decompressed dump, in document order.

    ``tally`` (when provided) is updated in place with parsed/skipped
    counts as the stream is consumed.
    """
    tally = tally if tally is not None else IngestTally()
    handler = _DumpHandler(tally)
    parser = xml.parsers.expat.ParserCreate()
    parser.buffer_text = True
    parser.StartElementHandler = handler.start
    parser.EndElementHandler = handler.end
    parser.CharacterDataHandler = handler.chars

    saw_content = False
    while True:
        chunk = stream.read(read_size)
        if not chunk:
            break
        if isinstance(chunk, str):
            chunk = chunk.encode("utf-8")
        if chunk.strip():
            saw_content = True
        try:
            parser.Parse(chunk, False)
        except xml.parsers.expat.ExpatError as exc:
            raise DumpFormatError(
                f"malformed dump XML at byte offset {parser.ErrorByteIndex}: {exc}"
            ) from exc
        if handler.completed:
            yield from handler.completed
            handler.completed = []
    if not saw_content:
        return
    try:
        parser.Parse(b"", True)
    except xml.parsers.expat.ExpatError as exc:
        raise DumpFormatError(
            f"malformed dump XML at byte offset {parser.ErrorByteIndex}: {exc}"
        ) from exc
    yield from handler.completed
