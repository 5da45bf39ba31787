"""Token counting for prompt-size accounting.

``approx-bpe`` (the default) mimics the granularity of GPT-style byte-pair
vocabularies without shipping one: text is cut into maximal runs of one
character class and each run is charged by length. Because a concatenation
can only merge the boundary runs, ``count(a + b) >= max(count(a), count(b))``
always holds.

``whitespace`` counts whitespace-separated words.
"""

from __future__ import annotations

import math
import unicodedata

DEFAULT_TOKENIZER = "approx-bpe"


def _char_class(ch: str) -> str:
    if ch.isspace():
        return "s"
    if ch.isdigit():
        return "d"
    if ch.isalpha() or unicodedata.category(ch) == "Mn":
        return "l"
    return "p"


def _runs(text: str):
    start = 0
    for i in range(1, len(text) + 1):
        if i == len(text) or _char_class(text[i]) != _char_class(text[start]):
            yield _char_class(text[start]), i - start
            start = i


# Cost of a run of a given class and length; each must be non-decreasing.
_RUN_COST = {
    "l": lambda n: math.ceil(n / 6),  # most English words are a single token
    "d": lambda n: math.ceil(n / 3),  # digit groups of up to three
    "s": lambda n: 0 if n == 1 else 1,  # a single space rides on the next word
    "p": lambda n: n,
}


def _approx_bpe(text: str) -> int:
    return sum(_RUN_COST[cls](n) for cls, n in _runs(text))


def _whitespace(text: str) -> int:
    return len(text.split())


TOKENIZERS = {
    "approx-bpe": _approx_bpe,
    "whitespace": _whitespace,
}


def count_tokens(text: str, tokenizer_id: str = DEFAULT_TOKENIZER) -> int:
    try:
        fn = TOKENIZERS[tokenizer_id]
    except KeyError:
        raise ValueError(f"unknown tokenizer {tokenizer_id!r}; known: {sorted(TOKENIZERS)}") from None
    return fn(text)
