"""Lossless tokenization of wikitext for token-level diffing.

Tokens are maximal runs of non-whitespace characters, additionally split at
markup-significant punctuation (``=``, ``:``, ``*``, ``[``, ``]``, ``{``,
``}``), where a run of the same punctuation character forms one token
(``==``, ``[[``). Each newline is its own token so that diffs respect line
structure; all other whitespace lives in the gaps between tokens.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field

# One alternative per significant punctuation run, newline on its own,
# then maximal runs of everything else that is not whitespace/punctuation.
_TOKEN_RE = re.compile(r"\n|=+|:+|\*+|\[+|\]+|\{+|\}+|[^\s=:*\[\]{}]+")


@dataclass(frozen=True)
class TokenSequence:
    """A tokenized text with per-token character offsets.

    Invariant: joining ``tokens`` with the inter-token gaps of ``text``
    reproduces ``text`` exactly; offsets are strictly increasing and
    non-overlapping.
    """

    text: str
    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]
    _starts: list[int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_starts", [s for s, _ in self.offsets])

    def __len__(self) -> int:
        return len(self.tokens)

    def char_span(self, lo: int, hi: int) -> tuple[int, int]:
        """Character span covering tokens [lo, hi); zero-width at lo when empty."""
        if lo >= hi:
            pos = self.offsets[lo][0] if lo < len(self.tokens) else len(self.text)
            return pos, pos
        return self.offsets[lo][0], self.offsets[hi - 1][1]

    def slice_text(self, lo: int, hi: int) -> str:
        start, end = self.char_span(lo, hi)
        return self.text[start:end]

    def token_at_or_after(self, char_pos: int) -> int:
        """Index of the first token starting at or after char_pos."""
        return bisect.bisect_left(self._starts, char_pos)

    def token_range_for_span(self, start: int, end: int) -> tuple[int, int]:
        """Token index range [lo, hi) of tokens fully inside chars [start, end)."""
        lo = self.token_at_or_after(start)
        hi = lo
        while hi < len(self.tokens) and self.offsets[hi][1] <= end:
            hi += 1
        return lo, hi


def tokenize(text: str) -> TokenSequence:
    tokens = []
    offsets = []
    for m in _TOKEN_RE.finditer(text):
        tokens.append(m.group())
        offsets.append(m.span())
    return TokenSequence(text=text, tokens=tuple(tokens), offsets=tuple(offsets))


def detokenize(seq: TokenSequence) -> str:
    """Rebuild the source text from tokens plus the gaps recorded in offsets."""
    parts = []
    pos = 0
    for tok, (start, end) in zip(seq.tokens, seq.offsets):
        parts.append(seq.text[pos:start])
        parts.append(tok)
        pos = end
    parts.append(seq.text[pos:])
    return "".join(parts)


def join_fragments(fragments: list[str]) -> str:
    """Concatenate text fragments, padding joins so tokens never merge.

    A single space is interposed whenever the boundary characters are both
    non-whitespace; a space is a gap, so the padding never alters the token
    stream of either side.
    """
    out: list[str] = []
    for frag in fragments:
        if not frag:
            continue
        if out and not out[-1][-1].isspace() and not frag[0].isspace():
            out.append(" ")
        out.append(frag)
    return "".join(out)
