"""Line-delimited corpus serialization and summary statistics.

One JSON record per action, UTF-8, with a fixed field order so corpora are
byte-reproducible. The first line is a schema marker comment; readers skip
any ``#``-prefixed line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Iterator, Optional

from wikitalk.actions import Action, ActionType

SCHEMA_HEADER = "#wikiconv-schema=1"
SCORED_SCHEMA_HEADER = "#wikiconv-schema=1-scored"

FIELD_ORDER = (
    "id",
    "type",
    "timestamp",
    "user_text",
    "user_id",
    "page_id",
    "page_title",
    "conversation_id",
    "replyTo_id",
    "parent_id",
    "indentation",
    "content",
    "raw_markup",
    "char_start",
    "char_end",
)


class CorpusWriteError(Exception):
    def __init__(self, written: int, cause: Exception):
        super().__init__(f"write failed after {written} actions: {cause}")
        self.written = written


def _format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def action_to_record(action: Action) -> dict:
    return {
        "id": action.action_id,
        "type": action.type.value,
        "timestamp": _format_timestamp(action.timestamp),
        "user_text": action.user_text,
        "user_id": action.user_id,
        "page_id": action.page_id,
        "page_title": action.page_title,
        "conversation_id": action.conversation_id,
        "replyTo_id": action.replyto_id,
        "parent_id": action.parent_id,
        "indentation": action.indentation,
        "content": action.content,
        "raw_markup": action.raw_markup,
        "char_start": action.char_span[0],
        "char_end": action.char_span[1],
    }


def record_to_action(record: dict) -> Action:
    ts = datetime.strptime(record["timestamp"], "%Y-%m-%dT%H:%M:%SZ").replace(
        tzinfo=timezone.utc
    )
    return Action(
        action_id=record["id"],
        type=ActionType(record["type"]),
        page_id=record["page_id"],
        page_title=record["page_title"],
        revision_id=record["id"].split(".")[0],
        timestamp=ts,
        user_text=record["user_text"],
        user_id=record["user_id"],
        content=record["content"],
        raw_markup=record["raw_markup"],
        replyto_id=record["replyTo_id"],
        parent_id=record["parent_id"],
        indentation=record["indentation"],
        conversation_id=record["conversation_id"],
        char_span=(record["char_start"], record["char_end"]),
    )


def serialize_action(action: Action, extra: Optional[dict] = None) -> str:
    record = action_to_record(action)
    if extra:
        record.update(extra)
    return json.dumps(record, ensure_ascii=False)


def write_actions(actions: Iterable[Action], sink: IO[str], header: str = SCHEMA_HEADER) -> int:
    """Write actions as line-delimited records; returns the count written."""
    written = 0
    try:
        sink.write(header + "\n")
        for action in actions:
            sink.write(serialize_action(action) + "\n")
            written += 1
    except OSError as exc:
        raise CorpusWriteError(written, exc) from exc
    return written


def read_records(source: IO[str]) -> Iterator[dict]:
    for line in source:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        yield json.loads(line)


def read_actions(source: IO[str]) -> Iterator[Action]:
    for record in read_records(source):
        yield record_to_action(record)


@dataclass
class SummaryStats:
    distinct_users: int = 0
    pages: int = 0
    revisions: int = 0
    conversations: int = 0
    actions: int = 0
    type_breakdown: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "distinct_users": self.distinct_users,
            "pages": self.pages,
            "revisions": self.revisions,
            "conversations": self.conversations,
            "actions": self.actions,
            "type_breakdown": self.type_breakdown,
        }


def summarize(actions: Iterable[Action]) -> SummaryStats:
    """Single-pass corpus statistics. Actions with empty cleaned content
    (pure formatting edits) are excluded from every count."""
    users: set[str] = set()
    pages: set[str] = set()
    revisions: set[tuple[str, str]] = set()
    conversations: set[str] = set()
    type_counts: dict[str, int] = {t.value: 0 for t in ActionType}
    total = 0
    for action in actions:
        if not action.has_content:
            continue
        total += 1
        users.add(action.user_text)
        pages.add(action.page_id)
        revisions.add((action.page_id, action.revision_id))
        conversations.add(action.conversation_id)
        type_counts[action.type.value] += 1
    breakdown = {
        name: (count / total if total else 0.0) for name, count in type_counts.items()
    }
    return SummaryStats(
        distinct_users=len(users),
        pages=len(pages),
        revisions=len(revisions),
        conversations=len(conversations),
        actions=total,
        type_breakdown=breakdown,
    )
