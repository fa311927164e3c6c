"""Answer normalization, tokenization and containment matching.

Normalization lowercases, deletes punctuation in place (``"cat's"`` becomes
``"cats"``), splits on whitespace and drops the standalone tokens ``a``,
``an`` and ``the``. Containment is a contiguous token-subsequence test on the
normalized forms, so ``"heat"`` never matches inside ``"theater"``.

The heavy lifting is done by a compiled kernel when it is available; set
``ANSWERRANK_PURE_PYTHON=1`` to force the pure-Python implementation.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

from . import _pykernel
from .errors import EmptyAnswerError

if os.environ.get("ANSWERRANK_PURE_PYTHON"):
    kernel = _pykernel
else:
    try:
        from . import _ckernel as kernel
    except ImportError:  # extension not built
        kernel = _pykernel

BACKEND = "c" if kernel is not _pykernel else "python"
ARTICLES = _pykernel.ARTICLES


@dataclass(frozen=True)
class NormalizedText:
    tokens: tuple[str, ...]
    joined: str

    def __bool__(self):
        return bool(self.tokens)


def normalize(raw: str) -> NormalizedText:
    joined = kernel.norm_joined(raw)
    return NormalizedText(tuple(joined.split()), joined)


def answer_pattern(answer: str) -> str:
    """Padded normal form used for containment search; raises on empty answers."""
    padded = kernel.norm_padded(answer)
    if padded == " ":
        raise EmptyAnswerError(f"answer {answer!r} is empty after normalization")
    return padded


def answer_patterns(answers: Sequence[str]) -> tuple[list[str], list[int]]:
    """Patterns for the answers that survive normalization, with their original indices."""
    patterns, index = [], []
    for i, answer in enumerate(answers):
        padded = kernel.norm_padded(answer)
        if padded != " ":
            patterns.append(padded)
            index.append(i)
    return patterns, index


def contains_answer(passage_text: str, answer: str) -> bool:
    return answer_pattern(answer) in kernel.norm_padded(passage_text)


def matches_any(passage, answers: Sequence[str], include_title: bool = False) -> int | None:
    """Index of the first answer found in the passage body (and title, if asked)."""
    patterns, index = answer_patterns(answers)
    if not patterns:
        return None
    hit = kernel.match_indices([passage.text], patterns)[0]
    if include_title and passage.title:
        title_hit = kernel.match_indices([passage.title], patterns)[0]
        if title_hit >= 0 and (hit < 0 or title_hit < hit):
            hit = title_hit
    return index[hit] if hit >= 0 else None


def match_many(passages, answers: Sequence[str], include_title: bool = False) -> list[int | None]:
    """``matches_any`` over a whole list in one kernel call."""
    patterns, index = answer_patterns(answers)
    if not patterns:
        return [None] * len(passages)
    hits = kernel.match_indices([p.text for p in passages], patterns)
    if include_title:
        titles = [p.title or "" for p in passages]
        for i, t in enumerate(kernel.match_indices(titles, patterns)):
            if t >= 0 and (hits[i] < 0 or t < hits[i]):
                hits[i] = t
    return [index[h] if h >= 0 else None for h in hits]
