"""Reconstruction of threaded conversations from wiki talk-page revision histories.

The package turns raw MediaWiki revision dumps into a corpus of typed
conversational actions (creations, additions, modifications, deletions,
restorations), plus an evaluation harness and moderation analytics over
the resulting corpus.
"""

from wikitalk.actions import Action, ActionType
from wikitalk.ingest import RevisionRecord

__version__ = "0.1.0"

__all__ = ["Action", "ActionType", "RevisionRecord", "__version__"]
