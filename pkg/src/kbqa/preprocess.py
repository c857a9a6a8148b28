"""Question cleaning: stopword, punctuation, and symbol removal.

Cleaning is deliberately dumb. It lowercases, strips every code point that
is not a letter, number, or whitespace, tokenizes (whitespace for English,
greedy lexicon merge then per-character for Chinese), and drops stop tokens.
No spelling correction, no lemmatization.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Collection, Iterable

from .errors import EmptyInput, FileUnreadable, MalformedLine

StopwordList = frozenset[str]

# Service-level cap on question length, in code points.
MAX_QUESTION_CODEPOINTS = 4096


@dataclass(frozen=True)
class RawQuestion:
    text: str
    lang: str = "en"


@dataclass(frozen=True)
class CleanQuestion:
    """Normalized question: ``text`` is exactly ``tokens`` joined by single
    spaces; tokens are lowercase and free of stopwords and symbols."""

    text: str
    tokens: tuple[str, ...]
    original: RawQuestion


def _keep_char(ch: str) -> str:
    """Map a code point to itself if meaningful, else to a space.

    Letters and numbers (all Unicode categories L* and N*, which includes
    the CJK ranges) survive; whitespace survives as a separator; everything
    else (punctuation, emoji, symbols) becomes a separator.
    """
    if ch.isspace():
        return " "
    cat = unicodedata.category(ch)
    if cat[0] in ("L", "N"):
        return ch
    return " "


def _strip_symbols(text: str) -> str:
    return "".join(_keep_char(ch) for ch in text)


def _tokenize_zh(run: str, surfaces: Collection[str], max_len: int) -> Iterable[str]:
    """Greedy longest-match of lexicon surfaces inside one whitespace-free
    run; characters not covered by any surface become single-char tokens."""
    i = 0
    n = len(run)
    while i < n:
        matched = None
        for k in range(min(max_len, n - i), 1, -1):
            cand = run[i : i + k]
            if cand in surfaces:
                matched = cand
                break
        if matched is not None:
            yield matched
            i += len(matched)
        else:
            yield run[i]
            i += 1


def clean(
    raw: RawQuestion,
    stoplist: StopwordList,
    lexicon: Collection[str] | None = None,
) -> CleanQuestion:
    """Normalize a raw question into tokens.

    ``lexicon`` is the set of known entity surface forms; it is only
    consulted for Chinese, where it drives greedy longest-match merging
    before the per-character fallback.

    Raises EmptyInput if the text is empty or nothing survives cleaning.
    """
    text = unicodedata.normalize("NFC", raw.text)
    if not text.strip():
        raise EmptyInput("question text is empty")
    lowered = _strip_symbols(text.lower())
    runs = lowered.split()

    if raw.lang == "zh":
        surfaces = lexicon or ()
        max_len = max((len(s) for s in surfaces), default=1)
        tokens = [t for run in runs for t in _tokenize_zh(run, surfaces, max_len)]
    else:
        tokens = runs

    kept = tuple(t for t in tokens if t not in stoplist)
    if not kept:
        raise EmptyInput("nothing left after cleaning; please rephrase")
    return CleanQuestion(text=" ".join(kept), tokens=kept, original=raw)


def load_stoplist(path: str | Path) -> StopwordList:
    """Read a stopword file: UTF-8, one token per line, ``#`` comments
    ignored, case-folded, duplicates collapsed."""
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise FileUnreadable(f"cannot read stoplist {p}: {exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedLine(f"stoplist {p} is not valid UTF-8: {exc}") from exc
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return frozenset(words)
