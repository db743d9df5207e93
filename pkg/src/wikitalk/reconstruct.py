"""Per-page reconstruction of conversational actions from revision diffs.

Each revision is diffed against its predecessor at token level; the edit
script is decomposed into typed actions attributed to the revision's
contributor. Sequential state tracks every live comment's character span
(distinguishing in-place modifications from additions) and a bounded store
of recently deleted comments (detecting restorations by exact match).

Comment boundaries are interpretive: inserted text is split at heading
lines and at indentation changes at line starts, and consecutive
same-indentation lines join one comment unless a signature ends the
earlier line. That rule is isolated in :func:`segment_text`.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from wikitalk.actions import Action, ActionType
from wikitalk.clean import clean_markup
from wikitalk.diff import (
    DeleteOp,
    DiffTokenLimitError,
    EqualOp,
    InsertOp,
    lcs_diff,
)
from wikitalk.ingest import RevisionRecord
from wikitalk.store import DeletedCommentStore, DeletedEntry
from wikitalk.tokenizer import TokenSequence, tokenize

_HEADING_LINE_RE = re.compile(r"^(=+)\s*(.*?)\s*(=+)\s*\r?$")
_INDENT_PREFIX_RE = re.compile(r"^[:*#]+")
_SIGNATURE_END_RE = re.compile(r"(~{3,5}|\(UTC\))\s*\r?$")

# Fraction of a comment's tokens that must be removed (with nothing
# inserted inside it) for the edit to count as a deletion of the comment
# rather than a modification.
DELETION_TOKEN_FRACTION = 0.5


def _is_heading_line(line: str) -> bool:
    m = _HEADING_LINE_RE.match(line)
    return bool(m and m.group(2))


def _line_indentation(line: str) -> int:
    m = _INDENT_PREFIX_RE.match(line)
    return len(m.group()) if m else 0


@dataclass
class LiveComment:
    comment_id: str
    last_action_id: str
    span: tuple[int, int]
    tok_range: tuple[int, int]
    indentation: int
    conversation_id: str
    replyto_id: Optional[str]
    is_heading: bool
    cleaned_text: str


@dataclass
class PageState:
    page_id: str
    page_title: str
    tokens: TokenSequence = field(default_factory=lambda: tokenize(""))
    live: dict[str, LiveComment] = field(default_factory=dict)
    store: DeletedCommentStore = field(default_factory=DeletedCommentStore)
    root_creation_id: Optional[str] = None
    incidents: list[str] = field(default_factory=list)
    _seen_action_ids: set[str] = field(default_factory=set)

    def live_in_order(self) -> list[LiveComment]:
        return sorted(self.live.values(), key=lambda c: c.span[0])


@dataclass
class Segment:
    """One atomic piece of inserted text: a heading or one comment."""

    tok_lo: int
    tok_hi: int
    char_lo: int
    char_hi: int
    indentation: int
    is_heading: bool
    raw: str


def segment_text(seq: TokenSequence, tok_lo: int, tok_hi: int) -> list[Segment]:
    """Split tokens [tok_lo, tok_hi) into heading/comment segments.

    Lines are judged in their full-text context, so an insertion that does
    not start at a line break inherits the indentation of the line it lands
    on. Blank lines separate segments and belong to none.
    """
    text = seq.text

    # Group the token range into lines: (content token indices, ends_line)
    lines: list[list[int]] = []
    current: list[int] = []
    for i in range(tok_lo, tok_hi):
        current.append(i)
        if seq.tokens[i] == "\n":
            lines.append(current)
            current = []
    if current:
        lines.append(current)

    segments: list[Segment] = []
    open_seg: Optional[dict] = None
    prev_signed = False

    def close():
        nonlocal open_seg
        if open_seg is not None:
            lo, hi = open_seg["tok_lo"], open_seg["tok_hi"]
            char_lo, char_hi = seq.char_span(lo, hi)
            segments.append(
                Segment(
                    tok_lo=lo,
                    tok_hi=hi,
                    char_lo=char_lo,
                    char_hi=char_hi,
                    indentation=open_seg["indent"],
                    is_heading=open_seg["is_heading"],
                    raw=text[char_lo:char_hi],
                )
            )
            open_seg = None

    for line_tokens in lines:
        content = [i for i in line_tokens if seq.tokens[i] != "\n"]
        if not content:
            close()
            prev_signed = False
            continue
        first_char = seq.offsets[content[0]][0]
        line_start = text.rfind("\n", 0, first_char) + 1
        line_end = text.find("\n", first_char)
        if line_end == -1:
            line_end = len(text)
        line_text = text[line_start:line_end]

        if _is_heading_line(line_text):
            close()
            lo, hi = content[0], content[-1] + 1
            char_lo, char_hi = seq.char_span(lo, hi)
            segments.append(
                Segment(
                    tok_lo=lo,
                    tok_hi=hi,
                    char_lo=char_lo,
                    char_hi=char_hi,
                    indentation=-1,
                    is_heading=True,
                    raw=text[char_lo:char_hi],
                )
            )
            prev_signed = False
            continue

        indent = _line_indentation(line_text)
        signed = bool(_SIGNATURE_END_RE.search(line_text))
        if open_seg is not None and (open_seg["indent"] != indent or prev_signed):
            close()
        if open_seg is None:
            open_seg = {
                "tok_lo": content[0],
                "tok_hi": content[-1] + 1,
                "indent": indent,
                "is_heading": False,
            }
        else:
            open_seg["tok_hi"] = content[-1] + 1
        prev_signed = signed
    close()
    return segments


@dataclass
class _Region:
    """One normalized changed region of a diff: a delete, an insert, or a
    delete-then-insert pair anchored at the same spot."""

    delete: Optional[DeleteOp] = None
    insert: Optional[InsertOp] = None
    attach_id: Optional[str] = None  # comment the insert edits, when any


@dataclass
class _CommentEdit:
    comment: LiveComment
    deleted_tokens: int = 0
    has_insert: bool = False
    insert_ranges: list[tuple[int, int]] = field(default_factory=list)
    first_delete_new_pos: Optional[int] = None


@dataclass
class ReconstructionTally:
    revisions: int = 0
    actions: int = 0
    skipped_revisions: int = 0


class Reconstructor:
    def __init__(self, deletion_fraction: float = DELETION_TOKEN_FRACTION):
        self.deletion_fraction = deletion_fraction
        self.tally = ReconstructionTally()

    # -- id scheme: <revision_id>.<token offset>.<page_id>, bumped
    # deterministically in the rare case two actions of one revision share
    # an anchor offset.
    def _new_action_id(self, state: PageState, revision_id: str, offset: int, bump: int) -> str:
        while True:
            action_id = f"{revision_id}.{offset}.{state.page_id}"
            if action_id not in state._seen_action_ids:
                state._seen_action_ids.add(action_id)
                return action_id
            offset += bump

    def process_revision(self, state: PageState, rev: RevisionRecord) -> tuple[PageState, list[Action]]:
        """Advance the page state by one revision, returning emitted actions."""
        self.tally.revisions += 1
        new_seq = tokenize(rev.wikitext)
        old_seq = state.tokens
        try:
            script = lcs_diff(old_seq, new_seq)
        except DiffTokenLimitError as exc:
            state.incidents.append(
                f"revision {rev.revision_id}: diff cap exceeded ({exc}); resynced"
            )
            self.tally.skipped_revisions += 1
            self._resync(state, rev, new_seq)
            return state, []

        regions, equal_ops = self._collect_regions(script)
        if not regions:
            # content-identical revision (possibly with whitespace drift)
            self._remap_unchanged(state, new_seq, equal_ops)
            return state, []

        actions = self._decompose(state, rev, new_seq, regions, equal_ops)
        state.tokens = new_seq
        self.tally.actions += len(actions)
        return state, actions

    # ------------------------------------------------------------------

    def _collect_regions(self, script) -> tuple[list[_Region], list[EqualOp]]:
        regions: list[_Region] = []
        equals: list[EqualOp] = []
        current: Optional[_Region] = None
        for op in script.ops:
            if isinstance(op, EqualOp):
                equals.append(op)
                current = None
            elif isinstance(op, DeleteOp):
                current = _Region(delete=op)
                regions.append(current)
            else:
                if current is not None and current.insert is None:
                    current.insert = op
                else:
                    regions.append(_Region(insert=op))
                current = None
        return regions, equals

    def _forward_map(self, old_len: int, equal_ops: list[EqualOp]) -> list[Optional[int]]:
        fwd: list[Optional[int]] = [None] * (old_len + 1)
        for op in equal_ops:
            for i in range(op.old_lo, op.old_hi):
                fwd[i] = op.new_lo + (i - op.old_lo)
        return fwd

    def _remap_unchanged(self, state: PageState, new_seq: TokenSequence, equal_ops) -> None:
        fwd = self._forward_map(len(state.tokens), equal_ops)
        for c in state.live.values():
            lo, hi = c.tok_range
            if hi > lo and fwd[lo] is not None and fwd[hi - 1] is not None:
                new_lo, new_hi = fwd[lo], fwd[hi - 1] + 1
                c.tok_range = (new_lo, new_hi)
                c.span = new_seq.char_span(new_lo, new_hi)
        state.tokens = new_seq

    # ------------------------------------------------------------------

    def _decompose(
        self,
        state: PageState,
        rev: RevisionRecord,
        new_seq: TokenSequence,
        regions: list[_Region],
        equal_ops: list[EqualOp],
    ) -> list[Action]:
        old_seq = state.tokens
        fwd = self._forward_map(len(old_seq), equal_ops)
        comments = state.live_in_order()
        starts = [c.tok_range[0] for c in comments]

        edits: dict[str, _CommentEdit] = {}

        def edit_for(c: LiveComment) -> _CommentEdit:
            if c.comment_id not in edits:
                edits[c.comment_id] = _CommentEdit(comment=c)
            return edits[c.comment_id]

        # 1. attribute deleted tokens to the comments they overlap
        for region in regions:
            if region.delete is None:
                continue
            dlo, dhi = region.delete.old_lo, region.delete.old_hi
            idx = bisect.bisect_right(starts, dlo) - 1
            if idx < 0:
                idx = 0
            for c in comments[idx:]:
                clo, chi = c.tok_range
                if clo >= dhi:
                    break
                overlap = min(chi, dhi) - max(clo, dlo)
                if overlap <= 0:
                    continue
                e = edit_for(c)
                e.deleted_tokens += overlap
                if e.first_delete_new_pos is None:
                    e.first_delete_new_pos = region.delete.new_pos
                fully_covered = dlo <= clo and dhi >= chi
                if region.insert is not None and not fully_covered and region.attach_id is None:
                    region.attach_id = c.comment_id

        # 2. attribute inserts: edits of existing comments vs new segments
        standalone: list[InsertOp] = []
        for region in regions:
            if region.insert is None:
                continue
            ins = region.insert
            target: Optional[LiveComment] = None
            if region.attach_id is not None:
                target = state.live[region.attach_id]
            else:
                idx = bisect.bisect_right(starts, ins.old_pos) - 1
                if 0 <= idx < len(comments):
                    c = comments[idx]
                    clo, chi = c.tok_range
                    if clo < ins.old_pos < chi:
                        target = c
            if target is not None:
                e = edit_for(target)
                e.has_insert = True
                e.insert_ranges.append((ins.new_lo, ins.new_hi))
            else:
                standalone.append(ins)

        # 3. classify touched comments as deletions or modifications
        deletions: list[_CommentEdit] = []
        modifications: list[_CommentEdit] = []
        for e in edits.values():
            total = e.comment.tok_range[1] - e.comment.tok_range[0]
            if not e.has_insert and total and e.deleted_tokens / total >= self.deletion_fraction:
                deletions.append(e)
            else:
                modifications.append(e)

        deleted_ids = {e.comment.comment_id for e in deletions}

        # 4. recompute spans of surviving comments in the new token space
        for c in comments:
            if c.comment_id in deleted_ids:
                continue
            lo, hi = c.tok_range
            e = edits.get(c.comment_id)
            if e is None:
                new_lo = fwd[lo]
                new_last = fwd[hi - 1]
                if new_lo is None or new_last is None:
                    raise AssertionError(
                        f"comment {c.comment_id} lost its span without an edit record"
                    )
                c.tok_range = (new_lo, new_last + 1)
            else:
                positions = [fwd[i] for i in range(lo, hi) if fwd[i] is not None]
                for ins_lo, ins_hi in e.insert_ranges:
                    positions.extend((ins_lo, ins_hi - 1))
                if not positions:
                    raise AssertionError(
                        f"modified comment {c.comment_id} has no surviving tokens"
                    )
                c.tok_range = (min(positions), max(positions) + 1)
            c.span = new_seq.char_span(*c.tok_range)

        # 5. order emissions by document position
        pending: list[tuple[tuple, str, object]] = []
        for e in deletions:
            anchor_new = e.first_delete_new_pos if e.first_delete_new_pos is not None else 0
            pos = new_seq.char_span(anchor_new, anchor_new)[0]
            pending.append(((pos, 0, e.comment.span[0]), "delete", e))
        for e in modifications:
            pending.append(((e.comment.span[0], 1, e.comment.span[0]), "modify", e))
        for ins in standalone:
            for seg in segment_text(new_seq, ins.new_lo, ins.new_hi):
                pending.append(((seg.char_lo, 1, seg.char_lo), "segment", seg))
        pending.sort(key=lambda item: item[0])

        # 6. emit, maintaining an ordered view of live comments for reply
        # resolution (surviving comments now carry new-space spans)
        actions: list[Action] = []
        ordered: list[LiveComment] = sorted(
            (c for c in state.live.values() if c.comment_id not in deleted_ids),
            key=lambda c: c.span[0],
        )
        bump = len(new_seq) + len(old_seq) + 1

        def provenance(action_id, a_type, **kw):
            return Action(
                action_id=action_id,
                type=a_type,
                page_id=state.page_id,
                page_title=state.page_title,
                revision_id=rev.revision_id,
                timestamp=rev.timestamp,
                user_text=rev.user_text,
                user_id=rev.user_id,
                **kw,
            )

        for (pos, _, _), kind, payload in pending:
            if kind == "delete":
                e: _CommentEdit = payload
                c = e.comment
                action_id = self._new_action_id(state, rev.revision_id, c.tok_range[0], bump)
                actions.append(
                    provenance(
                        action_id,
                        ActionType.DELETION,
                        content=c.cleaned_text,
                        raw_markup=old_seq.text[c.span[0] : c.span[1]],
                        replyto_id=None if c.is_heading else c.replyto_id,
                        parent_id=c.last_action_id,
                        indentation=c.indentation,
                        conversation_id=c.conversation_id,
                        char_span=(pos, pos),
                    )
                )
                state.store.push(
                    DeletedEntry(
                        text=c.cleaned_text,
                        last_action_id=c.last_action_id,
                        conversation_id=c.conversation_id,
                        replyto_id=c.replyto_id,
                        indentation=c.indentation,
                        is_heading=c.is_heading,
                    )
                )
                del state.live[c.comment_id]
            elif kind == "modify":
                e = payload
                c = e.comment
                raw = new_seq.text[c.span[0] : c.span[1]]
                cleaned = clean_markup(raw).text
                if not c.is_heading:
                    first_line_end = raw.find("\n")
                    first_line = raw if first_line_end == -1 else raw[:first_line_end]
                    c.indentation = _line_indentation(first_line)
                action_id = self._new_action_id(state, rev.revision_id, c.tok_range[0], bump)
                actions.append(
                    provenance(
                        action_id,
                        ActionType.MODIFICATION,
                        content=cleaned,
                        raw_markup=raw,
                        replyto_id=c.replyto_id,
                        parent_id=c.last_action_id,
                        indentation=c.indentation,
                        conversation_id=c.conversation_id,
                        char_span=c.span,
                    )
                )
                c.last_action_id = action_id
                c.cleaned_text = cleaned
            else:
                seg: Segment = payload
                action = self._emit_segment(state, rev, new_seq, seg, ordered, bump, actions)
                if action is not None:
                    actions.append(action)

        return actions

    # ------------------------------------------------------------------

    def _ensure_root(
        self, state: PageState, rev: RevisionRecord, actions: list[Action]
    ) -> str:
        if state.root_creation_id is None:
            root_id = self._new_action_id(state, rev.revision_id, -1, 1_000_000_000)
            state.root_creation_id = root_id
            actions.append(
                Action(
                    action_id=root_id,
                    type=ActionType.CREATION,
                    page_id=state.page_id,
                    page_title=state.page_title,
                    revision_id=rev.revision_id,
                    timestamp=rev.timestamp,
                    user_text=rev.user_text,
                    user_id=rev.user_id,
                    content="",
                    raw_markup="",
                    replyto_id=None,
                    parent_id=None,
                    indentation=-1,
                    conversation_id=root_id,
                    char_span=(0, 0),
                )
            )
        return state.root_creation_id

    def _resolve_thread(self, ordered: list[LiveComment], char_pos: int) -> Optional[LiveComment]:
        best = None
        for c in ordered:
            if c.span[0] >= char_pos:
                break
            if c.is_heading:
                best = c
        return best

    def _resolve_reply(
        self,
        ordered: list[LiveComment],
        char_pos: int,
        indent: int,
        conversation_id: str,
    ) -> Optional[str]:
        fallback = None
        for c in reversed(ordered):
            if c.span[0] >= char_pos:
                continue
            if c.conversation_id != conversation_id:
                continue
            if c.indentation == indent - 1:
                return c.last_action_id
            if fallback is None and c.indentation < indent:
                fallback = c.last_action_id
        return fallback

    def _emit_segment(
        self,
        state: PageState,
        rev: RevisionRecord,
        new_seq: TokenSequence,
        seg: Segment,
        ordered: list[LiveComment],
        bump: int,
        actions: list[Action],
    ) -> Optional[Action]:
        cleaned = clean_markup(seg.raw).text

        if seg.is_heading:
            entry = state.store.match(cleaned)
            if entry is not None and entry.is_heading:
                state.store.take(cleaned)
                return self._register_segment(
                    state, rev, new_seq, seg, ordered, bump,
                    a_type=ActionType.RESTORATION,
                    cleaned=cleaned,
                    conversation_id=entry.conversation_id,
                    replyto_id=None,
                    parent_id=entry.last_action_id,
                    indentation=-1,
                    is_heading=True,
                )
            action_id = self._new_action_id(state, rev.revision_id, seg.tok_lo, bump)
            comment = LiveComment(
                comment_id=action_id,
                last_action_id=action_id,
                span=(seg.char_lo, seg.char_hi),
                tok_range=(seg.tok_lo, seg.tok_hi),
                indentation=-1,
                conversation_id=action_id,
                replyto_id=None,
                is_heading=True,
                cleaned_text=cleaned,
            )
            state.live[action_id] = comment
            bisect.insort(ordered, comment, key=lambda c: c.span[0])
            return Action(
                action_id=action_id,
                type=ActionType.CREATION,
                page_id=state.page_id,
                page_title=state.page_title,
                revision_id=rev.revision_id,
                timestamp=rev.timestamp,
                user_text=rev.user_text,
                user_id=rev.user_id,
                content=cleaned,
                raw_markup=seg.raw,
                replyto_id=None,
                parent_id=None,
                indentation=-1,
                conversation_id=action_id,
                char_span=(seg.char_lo, seg.char_hi),
            )

        entry = state.store.match(cleaned)
        if entry is not None and not entry.is_heading:
            state.store.take(cleaned)
            return self._register_segment(
                state, rev, new_seq, seg, ordered, bump,
                a_type=ActionType.RESTORATION,
                cleaned=cleaned,
                conversation_id=entry.conversation_id,
                replyto_id=entry.replyto_id,
                parent_id=entry.last_action_id,
                indentation=seg.indentation,
                is_heading=False,
            )

        thread = self._resolve_thread(ordered, seg.char_lo)
        if thread is None:
            conversation_id = self._ensure_root(state, rev, actions)
        else:
            conversation_id = thread.conversation_id
        replyto = self._resolve_reply(ordered, seg.char_lo, seg.indentation, conversation_id)
        if replyto is None:
            replyto = conversation_id
        return self._register_segment(
            state, rev, new_seq, seg, ordered, bump,
            a_type=ActionType.ADDITION,
            cleaned=cleaned,
            conversation_id=conversation_id,
            replyto_id=replyto,
            parent_id=None,
            indentation=seg.indentation,
            is_heading=False,
        )

    def _register_segment(
        self,
        state: PageState,
        rev: RevisionRecord,
        new_seq: TokenSequence,
        seg: Segment,
        ordered: list[LiveComment],
        bump: int,
        *,
        a_type: ActionType,
        cleaned: str,
        conversation_id: str,
        replyto_id: Optional[str],
        parent_id: Optional[str],
        indentation: int,
        is_heading: bool,
    ) -> Action:
        action_id = self._new_action_id(state, rev.revision_id, seg.tok_lo, bump)
        comment = LiveComment(
            comment_id=action_id,
            last_action_id=action_id,
            span=(seg.char_lo, seg.char_hi),
            tok_range=(seg.tok_lo, seg.tok_hi),
            indentation=indentation,
            conversation_id=conversation_id,
            replyto_id=replyto_id,
            is_heading=is_heading,
            cleaned_text=cleaned,
        )
        state.live[action_id] = comment
        bisect.insort(ordered, comment, key=lambda c: c.span[0])
        return Action(
            action_id=action_id,
            type=a_type,
            page_id=state.page_id,
            page_title=state.page_title,
            revision_id=rev.revision_id,
            timestamp=rev.timestamp,
            user_text=rev.user_text,
            user_id=rev.user_id,
            content=cleaned,
            raw_markup=seg.raw,
            replyto_id=replyto_id,
            parent_id=parent_id,
            indentation=indentation,
            conversation_id=conversation_id,
            char_span=(seg.char_lo, seg.char_hi),
        )

    # ------------------------------------------------------------------

    def _resync(self, state: PageState, rev: RevisionRecord, new_seq: TokenSequence) -> None:
        """Treat the new revision as ground truth: rebuild live comments from
        its full text without emitting actions."""
        state.live = {}
        state.tokens = new_seq
        ordered: list[LiveComment] = []
        current_heading: Optional[LiveComment] = None
        for seg in segment_text(new_seq, 0, len(new_seq)):
            seg_id = self._new_action_id(state, rev.revision_id, seg.tok_lo, len(new_seq) + 1)
            cleaned = clean_markup(seg.raw).text
            if seg.is_heading:
                comment = LiveComment(
                    comment_id=seg_id,
                    last_action_id=seg_id,
                    span=(seg.char_lo, seg.char_hi),
                    tok_range=(seg.tok_lo, seg.tok_hi),
                    indentation=-1,
                    conversation_id=seg_id,
                    replyto_id=None,
                    is_heading=True,
                    cleaned_text=cleaned,
                )
                current_heading = comment
            else:
                conv = current_heading.conversation_id if current_heading else seg_id
                replyto = self._resolve_reply(ordered, seg.char_lo, seg.indentation, conv)
                comment = LiveComment(
                    comment_id=seg_id,
                    last_action_id=seg_id,
                    span=(seg.char_lo, seg.char_hi),
                    tok_range=(seg.tok_lo, seg.tok_hi),
                    indentation=seg.indentation,
                    conversation_id=conv,
                    replyto_id=replyto,
                    is_heading=False,
                    cleaned_text=cleaned,
                )
            state.live[seg_id] = comment
            ordered.append(comment)


def classify_insertion(state: PageState, text: str, char_pos: int) -> ActionType:
    """Classify one inserted segment against the current page state.

    Headings open threads (unless they restore a deleted heading); exact
    store matches are restorations; insertions strictly inside a live
    comment's span are modifications; everything else adds a comment.
    """
    first_line = text.split("\n", 1)[0]
    cleaned = clean_markup(text).text
    if _is_heading_line(first_line):
        entry = state.store.match(cleaned)
        if entry is not None and entry.is_heading:
            return ActionType.RESTORATION
        return ActionType.CREATION
    for c in state.live.values():
        if c.span[0] < char_pos < c.span[1]:
            return ActionType.MODIFICATION
    entry = state.store.match(cleaned)
    if entry is not None and not entry.is_heading:
        return ActionType.RESTORATION
    return ActionType.ADDITION


def detect_restoration(state: PageState, cleaned_text: str) -> Optional[DeletedEntry]:
    """Exact lookup of cleaned text among recently deleted comments."""
    return state.store.match(cleaned_text)


def reconstruct_page(
    revisions: Iterable[RevisionRecord],
    reconstructor: Optional[Reconstructor] = None,
) -> Iterator[Action]:
    """Fold a page's temporally ordered revisions into an action stream."""
    recon = reconstructor if reconstructor is not None else Reconstructor()
    state: Optional[PageState] = None
    for rev in revisions:
        if state is None:
            state = PageState(page_id=rev.page_id, page_title=rev.page_title)
        _, actions = recon.process_revision(state, rev)
        yield from actions
