"""Pure-Python normalization and matching kernel.

Mirrors ``_ckernel`` function for function; whichever is importable is
selected by :mod:`answerrank.textnorm`.
"""
from __future__ import annotations

from ._punct import DELETE_PUNCT

ARTICLES = frozenset({"a", "an", "the"})


def norm_tokens(text: str) -> list[str]:
    return [t for t in text.lower().translate(DELETE_PUNCT).split() if t not in ARTICLES]


def norm_joined(text: str) -> str:
    return " ".join(norm_tokens(text))


def norm_padded(text: str) -> str:
    toks = norm_tokens(text)
    if not toks:
        return " "
    return " " + " ".join(toks) + " "


def match_indices(texts: list[str], patterns: list[str]) -> list[int]:
    """Index of the first padded pattern found in each text's padded normal form, else -1."""
    out = []
    for text in texts:
        padded = norm_padded(text)
        hit = -1
        for j, pat in enumerate(patterns):
            if pat in padded:
                hit = j
                break
        out.append(hit)
    return out


def first_hit(texts: list[str], patterns: list[str], limit: int) -> int:
    """Position of the first text (among the first ``limit``) containing any pattern, else -1."""
    if not patterns:
        return -1
    for i, text in enumerate(texts[:limit]):
        padded = norm_padded(text)
        for pat in patterns:
            if pat in padded:
                return i
    return -1
