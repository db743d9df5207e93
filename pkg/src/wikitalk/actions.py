"""The conversational action model: the unit record of the output corpus."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime
from typing import Optional


class ActionType(str, enum.Enum):
    CREATION = "CREATION"
    ADDITION = "ADDITION"
    MODIFICATION = "MODIFICATION"
    DELETION = "DELETION"
    RESTORATION = "RESTORATION"


@dataclass
class Action:
    """One conversational event reconstructed from a revision diff.

    ``replyto_id`` carries conversational structure (who is being answered);
    ``parent_id`` carries history (which earlier action this one alters).
    ``char_span`` locates the action in the revision's text; deletions get a
    zero-width span at the point where the removed text collapsed.
    """

    action_id: str
    type: ActionType
    page_id: str
    page_title: str
    revision_id: str
    timestamp: datetime
    user_text: str
    user_id: Optional[int]
    content: str
    raw_markup: str
    replyto_id: Optional[str]
    parent_id: Optional[str]
    indentation: int
    conversation_id: str
    char_span: tuple[int, int]

    def __post_init__(self):
        if self.indentation < -1:
            raise ValueError("indentation must be >= -1")
        if self.type is ActionType.CREATION:
            if self.replyto_id is not None or self.parent_id is not None:
                raise ValueError("creations carry neither replyto_id nor parent_id")
        if self.type is ActionType.ADDITION and self.parent_id is not None:
            raise ValueError("additions carry no parent_id")
        if self.type in (ActionType.MODIFICATION, ActionType.DELETION, ActionType.RESTORATION):
            if self.parent_id is None:
                raise ValueError(f"{self.type.value} requires a parent_id")

    @property
    def has_content(self) -> bool:
        """False for actions whose cleaned content is empty; such actions are
        kept in the corpus but excluded from summary statistics."""
        return bool(self.content)
