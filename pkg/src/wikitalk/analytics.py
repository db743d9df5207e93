"""Moderation analytics: toxicity scoring, EER threshold, deletion rates.

Comments (creation and addition actions with nonempty content) are scored
by a pluggable classifier client: either a rate-limited, retrying HTTP
client or a deterministic hash-based stub so the full analytics path runs
offline. Deletion metadata is joined from the corpus's deletion actions by
following parent chains back to the action that created each comment.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Iterable, Optional

import numpy as np

from wikitalk.actions import Action, ActionType

_SCORE_ATTRIBUTES = ("toxicity", "severe_toxicity")


@dataclass
class ScoredComment:
    action_id: str
    toxicity: Optional[float]
    severe_toxicity: Optional[float]
    author: str
    created_at: datetime
    deleted_at: Optional[datetime] = None
    deleted_by: Optional[str] = None

    def __post_init__(self):
        if self.deleted_at is not None and self.deleted_at < self.created_at:
            raise ValueError("deleted_at precedes created_at")


class ScorerError(Exception):
    pass


class StubScorer:
    """Deterministic pseudo-scorer: hash of the text mapped into [0, 1]."""

    def score(self, text: str) -> dict[str, float]:
        out = {}
        for attr in _SCORE_ATTRIBUTES:
            digest = hashlib.sha256(f"{attr}:{text}".encode("utf-8")).digest()
            out[attr] = int.from_bytes(digest[:8], "big") / 2**64
        return out


class HttpScorer:
    """Wire client: POSTs comment text, expects a probability per attribute.

    Never exceeds ``rate_limit`` requests/sec; failures are retried with
    exponential backoff and surface as ScorerError after the last attempt.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: Optional[str] = None,
        rate_limit: float = 10.0,
        timeout: float = 10.0,
        max_attempts: int = 3,
        backoff: float = 0.5,
        transport: Optional[Callable] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate_limit <= 0:
            raise ValueError("rate_limit must be positive")
        self.endpoint = endpoint
        self.api_key = api_key
        self.min_interval = 1.0 / rate_limit
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.sleep = sleep
        self._last_request = 0.0
        if transport is None:
            import requests

            def transport(url, payload, timeout):
                response = requests.post(url, json=payload, timeout=timeout)
                response.raise_for_status()
                return response.json()

        self.transport = transport

    def score(self, text: str) -> dict[str, float]:
        payload = {"text": text}
        if self.api_key:
            payload["api_key"] = self.api_key
        last_error: Optional[Exception] = None
        for attempt in range(self.max_attempts):
            wait = self._last_request + self.min_interval - time.monotonic()
            if wait > 0:
                self.sleep(wait)
            self._last_request = time.monotonic()
            try:
                data = self.transport(self.endpoint, payload, self.timeout)
                return {attr: float(data[attr]) for attr in _SCORE_ATTRIBUTES}
            except Exception as exc:  # noqa: BLE001 - every failure is retryable
                last_error = exc
                if attempt + 1 < self.max_attempts:
                    self.sleep(self.backoff * 2**attempt)
        raise ScorerError(f"scoring failed after {self.max_attempts} attempts: {last_error}")


@dataclass
class ScoringTally:
    scored: int = 0
    failed: int = 0


def _comment_roots(actions: list[Action]) -> dict[str, str]:
    """Map every action id to the id of the action that created its comment.

    Parent chains terminate at a creation or addition; restorations root
    back to the restored comment's origin through their parent link.
    """
    roots: dict[str, str] = {}
    for action in actions:
        if action.parent_id is not None and action.parent_id in roots:
            roots[action.action_id] = roots[action.parent_id]
        else:
            roots[action.action_id] = action.action_id
    return roots


def comments_with_deletions(actions: Iterable[Action]) -> tuple[list[Action], list[ScoredComment]]:
    """Every creation/addition with nonempty content, joined with its
    earliest deletion (timestamp and deleting user), scores unset."""
    action_list = list(actions)
    roots = _comment_roots(action_list)

    deletions: dict[str, Action] = {}
    for action in action_list:
        if action.type is ActionType.DELETION and action.parent_id is not None:
            root = roots.get(action.parent_id, action.parent_id)
            if root not in deletions or action.timestamp < deletions[root].timestamp:
                deletions[root] = action

    out: list[ScoredComment] = []
    comment_actions: list[Action] = []
    for action in action_list:
        if action.type not in (ActionType.CREATION, ActionType.ADDITION):
            continue
        if not action.has_content:
            continue
        deletion = deletions.get(action.action_id)
        comment_actions.append(action)
        out.append(
            ScoredComment(
                action_id=action.action_id,
                toxicity=None,
                severe_toxicity=None,
                author=action.user_text,
                created_at=action.timestamp,
                deleted_at=deletion.timestamp if deletion else None,
                deleted_by=deletion.user_text if deletion else None,
            )
        )
    return comment_actions, out


def score_comments(
    actions: Iterable[Action],
    scorer,
    tally: Optional[ScoringTally] = None,
) -> list[ScoredComment]:
    """Score every creation/addition with nonempty content and join each
    comment's earliest deletion, if any. Scoring failures leave the scores
    absent; such comments are excluded from threshold-dependent analyses."""
    tally = tally if tally is not None else ScoringTally()
    comment_actions, out = comments_with_deletions(actions)
    for action, comment in zip(comment_actions, out):
        try:
            scores = scorer.score(action.content)
            tally.scored += 1
        except ScorerError:
            scores = {attr: None for attr in _SCORE_ATTRIBUTES}
            tally.failed += 1
        comment.toxicity = scores["toxicity"]
        comment.severe_toxicity = scores["severe_toxicity"]
    return out


def equal_error_threshold(scores: Iterable[float], labels: Iterable[bool]) -> float:
    """Threshold t (classify positive at score >= t) minimizing |FP - FN|.

    Candidates are the observed score values; ties break toward the larger
    threshold. Requires both classes to be present.
    """
    s = np.asarray(list(scores), dtype=float)
    y = np.asarray(list(labels), dtype=bool)
    if s.shape != y.shape or s.size == 0:
        raise ValueError("scores and labels must be equal-length and nonempty")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.size:
        raise ValueError("both classes must be present to balance FP against FN")

    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    # At threshold t, everything with score >= t is classified positive.
    cum_fp = np.cumsum(~y_sorted)
    cum_tp = np.cumsum(y_sorted)
    candidates = np.unique(s)  # ascending
    last_at_or_above = np.searchsorted(-s_sorted, -candidates, side="right") - 1
    fps = cum_fp[last_at_or_above]
    fns = n_pos - cum_tp[last_at_or_above]
    gaps = np.abs(fps - fns)
    best = gaps.min()
    return float(candidates[gaps == best].max())


def deletion_rate(
    scored: list[ScoredComment],
    horizons: list[timedelta],
    subset: str = "all",
    toxicity_threshold: Optional[float] = None,
    severe_threshold: Optional[float] = None,
) -> list[Optional[float]]:
    """Fraction of comments deleted by someone other than their author
    within each horizon. Empty subsets report None, not zero."""
    if sorted(horizons) != list(horizons):
        raise ValueError("horizons must be sorted ascending")
    if subset == "all":
        pool = list(scored)
    elif subset == "toxic":
        if toxicity_threshold is None:
            raise ValueError("toxic subset requires toxicity_threshold")
        pool = [c for c in scored if c.toxicity is not None and c.toxicity >= toxicity_threshold]
    elif subset == "severe":
        if severe_threshold is None:
            raise ValueError("severe subset requires severe_threshold")
        pool = [
            c
            for c in scored
            if c.severe_toxicity is not None and c.severe_toxicity >= severe_threshold
        ]
    else:
        raise ValueError(f"unknown subset {subset!r}")
    if not pool:
        return [None] * len(horizons)
    rates = []
    for horizon in horizons:
        hits = sum(
            1
            for c in pool
            if c.deleted_at is not None
            and c.deleted_by is not None
            and c.deleted_by != c.author
            and (c.deleted_at - c.created_at) <= horizon
        )
        rates.append(hits / len(pool))
    return rates


DEFAULT_HORIZONS = ("1h", "6h", "1d", "7d", "30d", "1y")

_HORIZON_UNITS = {
    "s": timedelta(seconds=1),
    "m": timedelta(minutes=1),
    "h": timedelta(hours=1),
    "d": timedelta(days=1),
    "w": timedelta(weeks=1),
    "y": timedelta(days=365),
}


def parse_horizon(text: str) -> timedelta:
    text = text.strip().lower()
    if len(text) < 2 or text[-1] not in _HORIZON_UNITS or not text[:-1].isdigit():
        raise ValueError(f"bad horizon {text!r}; use forms like 1h, 6h, 1d, 7d, 1y")
    return int(text[:-1]) * _HORIZON_UNITS[text[-1]]


def scored_to_record(c: ScoredComment) -> dict:
    return {
        "action_id": c.action_id,
        "toxicity": c.toxicity,
        "severe_toxicity": c.severe_toxicity,
        "author": c.author,
        "created_at": c.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "deleted_at": c.deleted_at.strftime("%Y-%m-%dT%H:%M:%SZ") if c.deleted_at else None,
        "deleted_by": c.deleted_by,
    }


def record_to_scored(record: dict) -> ScoredComment:
    from datetime import timezone

    def parse(ts):
        if ts is None:
            return None
        return datetime.strptime(ts, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)

    return ScoredComment(
        action_id=record["action_id"],
        toxicity=record["toxicity"],
        severe_toxicity=record["severe_toxicity"],
        author=record["author"],
        created_at=parse(record["created_at"]),
        deleted_at=parse(record["deleted_at"]),
        deleted_by=record["deleted_by"],
    )
