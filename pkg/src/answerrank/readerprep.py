"""Token-budgeted reader inputs and the seeded passage shuffle used for reader training data."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .types import Question, RankedList

DEFAULT_TOP_M = 10
DEFAULT_BUDGET = 1024
DEFAULT_SEPARATOR = "<p>"


class WhitespaceTokenizer:
    """Default tokenizer: whitespace-delimited units, rejoined with single spaces."""

    def tokenize(self, text: str) -> list[str]:
        return text.split()

    def detokenize(self, tokens: Sequence[str]) -> str:
        return " ".join(tokens)


@dataclass(frozen=True)
class ReaderInput:
    question_id: str
    text: str
    token_count: int
    passages_included: int
    partial_passage: bool

    def to_record(self) -> dict:
        return {
            "question_id": self.question_id,
            "text": self.text,
            "token_count": self.token_count,
            "passages_included": self.passages_included,
            "partial_passage": self.partial_passage,
        }


def assemble_input(
    q: Question,
    r: RankedList,
    top_m: int = DEFAULT_TOP_M,
    budget: int = DEFAULT_BUDGET,
    *,
    separator: str = DEFAULT_SEPARATOR,
    include_title: bool = True,
    whole_passages: bool = False,
    tokenizer=None,
) -> ReaderInput:
    """Concatenate the question and the first ``top_m`` passages, cut at ``budget`` tokens.

    Each passage contributes ``separator``, its title (when present and
    ``include_title``) and its body. The last passage may be cut mid-way
    unless ``whole_passages`` is set; a passage cut down to its separator
    alone is left out. The question itself is never truncated.
    """
    if top_m < 1:
        raise ValueError("top_m must be >= 1")
    tok = tokenizer or WhitespaceTokenizer()
    sep = tok.tokenize(separator)
    tokens = tok.tokenize(q.text)
    if budget < len(tokens):
        raise ValueError(f"budget {budget} is smaller than the question ({len(tokens)} tokens)")

    included, partial = 0, False
    for p in r.passages[:top_m]:
        piece = list(sep)
        if include_title and p.title:
            piece += tok.tokenize(p.title)
        piece += tok.tokenize(p.text)
        room = budget - len(tokens)
        if len(piece) <= room:
            tokens += piece
            included += 1
            continue
        if not whole_passages and room > len(sep):
            tokens += piece[:room]
            partial = True
        break
    return ReaderInput(q.question_id, tok.detokenize(tokens), len(tokens), included, partial)


def shuffle_passages(r: RankedList, top_m: int, seed: int) -> RankedList:
    """Permute the first ``top_m`` passages with a seeded RNG; the tail is untouched."""
    if not 0 <= top_m <= len(r.passages):
        raise ValueError(f"top_m={top_m} outside 0..{len(r.passages)}")
    head = list(r.passages[:top_m])
    random.Random(seed).shuffle(head)
    return RankedList(r.question_id, head + list(r.passages[top_m:]))

