"""Synthetic reader for iterative reranking tests and desk-scale experiments.

With probability ``accuracy`` the top prediction is the question's first
gold answer; every other slot holds a distractor: a short span cut from one
of the passages the reader was shown, or a word list entry. With
``prefer_entities`` passage spans come from runs of capitalized words when the
passage has any, the way real readers answer with names rather than arbitrary
n-grams. Distractors never equal a gold answer after normalization. Output
depends only on the question, the *set* of passages shown and the seed.

Run as ``python -m answerrank.mockreader --golds FILE`` it serves the
command-reader protocol on stdin/stdout.
"""
from __future__ import annotations

import argparse
import json
import random
import string
import sys
from dataclasses import dataclass
from typing import Sequence

from . import textnorm
from .readers import Reader
from .types import Passage, PredictionSet, Question

SOURCES = ("passage-span", "vocabulary")

DEFAULT_VOCABULARY = (
    "london", "paris", "1984", "new york", "john smith", "red", "seven", "river thames",
    "france", "queen victoria", "mount everest", "pacific ocean", "1066", "abraham lincoln",
    "blue whale", "oxygen", "tokyo", "charles dickens", "jupiter", "amazon river",
)


@dataclass(frozen=True)
class MockReaderConfig:
    accuracy: float = 0.5
    n: int = 1
    distractor_source: str = "passage-span"
    seed: int = 0
    max_span: int = 3
    prefer_entities: bool = True
    vocabulary: tuple[str, ...] = DEFAULT_VOCABULARY

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy must be in [0, 1], got {self.accuracy}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.distractor_source not in SOURCES:
            raise ValueError(f"distractor_source must be one of {SOURCES}")
        if self.max_span < 1:
            raise ValueError("max_span must be >= 1")


def entity_runs(text: str) -> list[list[str]]:
    """Maximal runs of capitalized words, punctuation stripped."""
    runs, cur = [], []
    for word in text.split():
        core = word.strip(string.punctuation)
        if core[:1].isupper():
            cur.append(core)
            if core != word.rstrip(string.punctuation) or word[-1:] in ",.;:!?":
                runs.append(cur)
                cur = []
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return runs


def _span(rng: random.Random, tokens: Sequence[str], max_span: int) -> str:
    length = rng.randint(1, min(max_span, len(tokens)))
    start = rng.randrange(len(tokens) - length + 1)
    return " ".join(tokens[start:start + length])


def _distractor(rng: random.Random, pool: list, cfg: MockReaderConfig) -> str | None:
    if cfg.distractor_source == "vocabulary":
        return rng.choice(cfg.vocabulary)
    tokens, entities = pool[rng.randrange(len(pool))]
    if entities:
        return _span(rng, entities[rng.randrange(len(entities))], cfg.max_span)
    if not tokens:
        return None
    return _span(rng, tokens, cfg.max_span)


def mock_predict(q: Question, top_passages: Sequence[Passage], cfg: MockReaderConfig) -> PredictionSet:
    rng = random.Random(f"{cfg.seed}:{q.question_id}")
    golds = [g for g in q.gold_answers if textnorm.kernel.norm_joined(g)]
    gold_forms = {textnorm.kernel.norm_joined(g) for g in q.gold_answers}
    preds = []
    if rng.random() < cfg.accuracy and golds:
        preds.append(golds[0])

    pool = []
    if cfg.distractor_source == "passage-span":
        if not top_passages:
            raise ValueError(f"question {q.question_id}: no passages to draw distractors from")
        pool = [
            (textnorm.kernel.norm_tokens(p.text), entity_runs(p.text) if cfg.prefer_entities else [])
            for p in sorted(top_passages, key=lambda p: p.id)
        ]
    attempts = 0
    while len(preds) < cfg.n and attempts < 20 * cfg.n:
        attempts += 1
        span = _distractor(rng, pool, cfg)
        if span and textnorm.kernel.norm_joined(span) and textnorm.kernel.norm_joined(span) not in gold_forms:
            preds.append(span)
    return PredictionSet.from_raw(q.question_id, preds)


class MockReader(Reader):
    concurrent_safe = True

    def __init__(self, cfg: MockReaderConfig, questions: dict[str, Question] | None = None):
        self.cfg = cfg
        # gold answers for requests that arrive without them (command protocol)
        self.questions = questions or {}

    def predict(self, question, passages, iteration=0):
        if not question.gold_answers and question.question_id in self.questions:
            question = self.questions[question.question_id]
        return mock_predict(question, passages, self.cfg)


def main(argv=None):
    from .ingest import load_golds

    ap = argparse.ArgumentParser(description="Mock reader speaking the command-reader protocol")
    ap.add_argument("--golds", required=True, help="JSONL with question_id and answers")
    ap.add_argument("--accuracy", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--source", choices=SOURCES, default="passage-span")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    cfg = MockReaderConfig(args.accuracy, args.n, args.source, args.seed)
    golds = load_golds(args.golds)

    for line in sys.stdin:
        if not line.strip():
            continue
        req = json.loads(line)
        qid = str(req["question_id"])
        q = Question(qid, req.get("question", ""), tuple(golds.get(qid, ())))
        passages = [Passage(str(p["id"]), p["text"], p.get("title")) for p in req.get("passages", [])]
        try:
            preds = mock_predict(q, passages, cfg)
            out = {"question_id": qid, "predictions": list(preds.predictions)}
        except ValueError as exc:
            out = {"question_id": qid, "error": str(exc)}
        sys.stdout.write(json.dumps(out, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
