"""Sentence segmentation, word tokenization, and subword-length estimation.

Tokenization is deliberately simple: lowercase maximal runs of letters and
digits.  It is the single tokenizer used everywhere (indexing, similarity,
budgets) so that word counts agree across the pipeline.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from .validation import check_non_negative

# Legal prose is dense with abbreviations that end in a period without
# ending the sentence.  The default list covers common citation forms;
# load_abbreviations() swaps in a custom one.
DEFAULT_ABBREVIATIONS = frozenset({
    "v.", "vs.", "no.", "nos.", "mr.", "mrs.", "ms.", "dr.", "prof.",
    "hon.", "inc.", "ltd.", "co.", "corp.", "s.", "ss.", "art.", "arts.",
    "para.", "paras.", "sec.", "secs.", "cl.", "ch.", "pt.", "pp.", "p.",
    "cf.", "e.g.", "i.e.", "etc.", "et.", "al.", "seq.", "fig.", "vol.",
    "r.", "j.", "jj.", "c.j.", "app.", "div.", "dist.", "ed.", "rev.",
})

# Maximal runs of word characters excluding underscore.
_TOKEN_RE = re.compile(r"[^\W_]+")
_TERMINAL_RE = re.compile(r"[.!?]+")

# Subword tokenizers split roughly one word into two pieces on this corpus,
# so sequence budgets are estimated at a fixed factor of two.
SUBWORD_FACTOR = 2.0


@dataclass(frozen=True)
class SentenceSpan:
    """One sentence cut from a source text.

    start/end index the original string, so text[start:end] recovers the
    sentence verbatim; index is the 0-based position in reading order.
    """

    index: int
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class TokenizedText:
    """A token sequence; word_count always equals len(tokens)."""

    tokens: tuple[str, ...]

    @property
    def word_count(self) -> int:
        return len(self.tokens)


def token_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) pairs of every token in the original string."""
    return [m.span() for m in _TOKEN_RE.finditer(text)]


def tokenize_words(text: str) -> TokenizedText:
    return TokenizedText(tuple(m.group(0).lower() for m in _TOKEN_RE.finditer(text)))


def load_abbreviations(path: str | Path) -> frozenset[str]:
    """Read one abbreviation per line; blank lines are ignored."""
    entries = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.strip().lower()
        if entry:
            entries.add(entry)
    return frozenset(entries)


def _trailing_token(text: str, end: int) -> str:
    # Maximal non-whitespace run ending at ``end``, lowercased.
    i = end
    while i > 0 and not text[i - 1].isspace():
        i -= 1
    return text[i:end].lower()


def split_sentences(
    text: str, abbreviations: frozenset[str] | None = None
) -> list[SentenceSpan]:
    """Segment text into sentences.

    A sentence ends at a run of terminal punctuation (. ! ?) that is
    followed by whitespace and then an uppercase letter or a digit.  A
    single period does not end the sentence when the word it closes is in
    the abbreviation list.  Leading and trailing whitespace is trimmed from
    each span, and all-whitespace segments are dropped, so splitting a
    returned sentence again yields the sentence itself.
    """
    abbrevs = DEFAULT_ABBREVIATIONS if abbreviations is None else abbreviations
    n = len(text)
    breaks = []
    for match in _TERMINAL_RE.finditer(text):
        end = match.end()
        if end >= n or not text[end].isspace():
            continue
        j = end
        while j < n and text[j].isspace():
            j += 1
        if j >= n or not (text[j].isupper() or text[j].isdigit()):
            continue
        if match.group(0) == "." and _trailing_token(text, end) in abbrevs:
            continue
        breaks.append(end)

    spans = []
    start = 0
    for cut in breaks + [n]:
        lo, hi = start, cut
        while lo < hi and text[lo].isspace():
            lo += 1
        while hi > lo and text[hi - 1].isspace():
            hi -= 1
        if hi > lo:
            spans.append(SentenceSpan(len(spans), lo, hi, text[lo:hi]))
        start = cut
    return spans


def estimate_subword_count(word_count: int) -> int:
    """Estimated subword length of a text with the given word count."""
    check_non_negative("word_count", word_count)
    return math.ceil(SUBWORD_FACTOR * word_count)
