"""Tolerant parsers for the bracketed lists and mappings models emit."""

from __future__ import annotations

import ast
import json
import re


class ParseError(ValueError):
    """A model response did not contain the expected labeled output."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


_QUOTES = "'\"‘’“”`"
_SEP = re.compile(r"[" + _QUOTES + r"]\s*,\s*[" + _QUOTES + r"]")


def parse_list(text: str) -> list[str]:
    """Parse ``['a', "b", 'c's d',]`` style lists.

    Separators are quote-comma-quote, so apostrophes inside items survive.
    Unquoted items are split on commas.
    """
    s = text.strip()
    if s.startswith("["):
        s = s[1:]
        end = s.rfind("]")
        if end >= 0:
            s = s[:end]
    s = s.strip().rstrip(",").strip()
    if not s:
        return []
    if s[0] in _QUOTES:
        parts = _SEP.split(s)
        parts[0] = parts[0][1:]
        if parts[-1] and parts[-1][-1] in _QUOTES:
            parts[-1] = parts[-1][:-1]
    else:
        parts = s.split(",")
    return [p.strip() for p in parts if p.strip()]


def find_labeled(text: str, label: str) -> str | None:
    """Return what follows ``label:`` (case-insensitive), up to the closing bracket if any."""
    m = re.search(re.escape(label) + r"\s*:\s*", text, flags=re.IGNORECASE)
    if not m:
        return None
    rest = text[m.end():]
    if rest.startswith("["):
        end = rest.find("]")
        return rest[: end + 1] if end >= 0 else rest.splitlines()[0]
    return rest.split("\n", 1)[0]


def parse_labeled_list(text: str, label: str) -> list[str]:
    body = find_labeled(text, label)
    if body is None:
        raise ParseError(f"no '{label}:' line in model output", text)
    return parse_list(body)


_MAP_ENTRY = re.compile(r"[" + _QUOTES + r"](.+?)[" + _QUOTES + r"]\s*:\s*(\[[^\]]*\]?)")


def parse_mapping(text: str) -> dict[str, list[str]]:
    """Parse ``"entity": ["H1", "H2"]`` lines, with or without braces."""
    body = text.strip()
    start, end = body.find("{"), body.rfind("}")
    if start >= 0 and end > start:
        chunk = body[start : end + 1]
        for loader in (json.loads, ast.literal_eval):
            try:
                value = loader(chunk)
            except (ValueError, SyntaxError):
                continue
            if isinstance(value, dict):
                return {str(k): [str(v) for v in (vs if isinstance(vs, list) else [vs])] for k, vs in value.items()}
    out: dict[str, list[str]] = {}
    for segment in re.split(r"\]\s*,?", body):
        segment = segment.strip().lstrip("{,").strip()
        m = _MAP_ENTRY.search(segment + "]")
        if m:
            out.setdefault(m.group(1).strip(), parse_list(m.group(2)))
    if not out:
        raise ParseError("no entity mapping found in model output", text)
    return out
