"""Core records: questions, passages, ranked lists and prediction sets."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DataError
from . import textnorm


@dataclass(slots=True)
class Question:
    question_id: str
    text: str
    gold_answers: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)


@dataclass(slots=True)
class Passage:
    id: str
    text: str
    title: str | None = None
    score: float | None = None
    # 1-based position in the initial retrieval list
    original_rank: int = 0
    matched: bool | None = None
    matched_prediction_index: int | None = None
    extra: dict = field(default_factory=dict)


@dataclass(slots=True)
class RankedList:
    question_id: str
    passages: list[Passage]

    @classmethod
    def from_passages(cls, question_id: str, passages: Iterable[Passage]) -> "RankedList":
        """Build an initial list, assigning ``original_rank`` from position."""
        ps = list(passages)
        for rank, p in enumerate(ps, 1):
            p.original_rank = rank
        out = cls(question_id, ps)
        out.validate()
        return out

    def __len__(self):
        return len(self.passages)

    @property
    def ids(self) -> list[str]:
        return [p.id for p in self.passages]

    def validate(self) -> None:
        seen = set()
        for p in self.passages:
            if p.id in seen:
                raise DataError(f"question {self.question_id}: duplicate passage id {p.id!r}")
            seen.add(p.id)
        ranks = sorted(p.original_rank for p in self.passages)
        if ranks != list(range(1, len(ranks) + 1)):
            raise DataError(f"question {self.question_id}: original ranks are not a permutation of 1..{len(ranks)}")


@dataclass(frozen=True, slots=True)
class PredictionSet:
    """Top-N reader predictions for one question, best first, deduplicated by normal form."""

    question_id: str
    predictions: tuple[str, ...] = ()

    @classmethod
    def from_raw(cls, question_id: str, raw: Sequence[str], n: int | None = None) -> "PredictionSet":
        """Truncate to ``n`` then drop predictions whose normal form was already seen."""
        if n is not None:
            raw = raw[:n]
        seen = set()
        kept = []
        for pred in raw:
            key = textnorm.kernel.norm_joined(pred)
            if key not in seen:
                seen.add(key)
                kept.append(pred)
        return cls(question_id, tuple(kept))

    @property
    def n_bar_contribution(self) -> int:
        return len(self.predictions)

    def __len__(self):
        return len(self.predictions)


def mean_prediction_count(preds: Iterable[PredictionSet]) -> float:
    """Mean deduplicated prediction count over questions (0.0 when there are none)."""
    counts = [len(p) for p in preds]
    return sum(counts) / len(counts) if counts else 0.0
