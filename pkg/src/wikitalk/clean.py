"""Wikitext-to-plain-text cleaning with a verbatim fallback.

The cleaner handles a fixed construct subset: internal and external links,
templates, bold/italic quotes, HTML tags and comments, heading markers,
signature tildes, and line-start indentation prefixes. It is total: any
internal parse failure (unbalanced nesting, depth blowout) is reported via
``fallback=True`` with the input passed through verbatim, never an
exception.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_MAX_NESTING = 32

_QUOTES_RE = re.compile(r"''+")
_SIGNATURE_RE = re.compile(r"~{3,5}")
_HTML_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_HTML_TAG_RE = re.compile(r"</?[A-Za-z][^<>\n]*>")
_HEADING_RE = re.compile(r"^(=+)\s*(.*?)\s*(=+)\s*$")
_INDENT_RE = re.compile(r"^[:*#]+\s?")
_EXTERNAL_LINK_RE = re.compile(r"\[(?P<url>(?:https?|ftp)://[^\s\]]+)(?:\s+(?P<label>[^\]]*))?\]")

# Link targets in these namespaces are media/housekeeping, not content.
_DROPPED_LINK_PREFIXES = ("file:", "image:", "category:", "media:")


class _CleanFailure(Exception):
    pass


@dataclass
class CleanResult:
    text: str
    fallback: bool = False
    stripped_constructs: dict[str, int] = field(default_factory=dict)


def _strip_templates(text: str, counts: dict[str, int]) -> str:
    """Remove {{...}} blocks, tracking nesting. Unclosed openers fail."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("{{", i):
            depth = 1
            j = i + 2
            while j < n and depth > 0:
                if text.startswith("{{", j):
                    depth += 1
                    if depth > _MAX_NESTING:
                        raise _CleanFailure("template nesting too deep")
                    j += 2
                elif text.startswith("}}", j):
                    depth -= 1
                    j += 2
                else:
                    j += 1
            if depth > 0:
                raise _CleanFailure("unclosed template")
            counts["templates"] = counts.get("templates", 0) + 1
            i = j
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _replace_internal_links(text: str, counts: dict[str, int], depth: int = 0) -> str:
    """[[target|label]] -> label, [[target]] -> target; media links dropped."""
    if depth > _MAX_NESTING:
        raise _CleanFailure("link nesting too deep")
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("[[", i):
            j = i + 2
            depth_brackets = 1
            while j < n and depth_brackets > 0:
                if text.startswith("[[", j):
                    depth_brackets += 1
                    j += 2
                elif text.startswith("]]", j):
                    depth_brackets -= 1
                    j += 2
                else:
                    j += 1
            if depth_brackets > 0:
                raise _CleanFailure("unclosed internal link")
            inner = text[i + 2 : j - 2]
            counts["links"] = counts.get("links", 0) + 1
            target, _, label = inner.partition("|")
            if target.strip().lower().startswith(_DROPPED_LINK_PREFIXES):
                replacement = ""
            else:
                replacement = label if label else target
            out.append(_replace_internal_links(replacement, counts, depth + 1))
            i = j
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _replace_external_links(text: str, counts: dict[str, int]) -> str:
    def repl(m: re.Match) -> str:
        counts["links"] = counts.get("links", 0) + 1
        label = m.group("label")
        return label if label else m.group("url")

    return _EXTERNAL_LINK_RE.sub(repl, text)


def _clean_line(line: str, counts: dict[str, int]) -> str:
    m = _HEADING_RE.match(line)
    if m:
        counts["formatting"] = counts.get("formatting", 0) + 1
        return m.group(2)
    stripped, n = _INDENT_RE.subn("", line)
    if n:
        counts["formatting"] = counts.get("formatting", 0) + n
    return stripped


def clean_markup(wikitext: str) -> CleanResult:
    counts: dict[str, int] = {}
    try:
        text, n = _HTML_COMMENT_RE.subn("", wikitext)
        if n:
            counts["html"] = counts.get("html", 0) + n
        if "<!--" in text:
            raise _CleanFailure("unclosed html comment")
        text = _strip_templates(text, counts)
        text = _replace_internal_links(text, counts)
        text = _replace_external_links(text, counts)
        text, n = _HTML_TAG_RE.subn("", text)
        if n:
            counts["html"] = counts.get("html", 0) + n
        text, n = _SIGNATURE_RE.subn("", text)
        if n:
            counts["formatting"] = counts.get("formatting", 0) + n
        text, n = _QUOTES_RE.subn("", text)
        if n:
            counts["formatting"] = counts.get("formatting", 0) + n
        lines = [_clean_line(line.rstrip(), counts) for line in text.split("\n")]
        cleaned = "\n".join(line.rstrip() for line in lines).strip()
        return CleanResult(text=cleaned, fallback=False, stripped_constructs=counts)
    except (_CleanFailure, RecursionError):
        return CleanResult(text=wikitext, fallback=True, stripped_constructs={})
