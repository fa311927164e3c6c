"""Reader-guided passage reranking.

A list is scanned from the top; every passage containing one of the reader's
predicted answers moves to the front, the rest follow, and both groups keep
their original relative order (a stable partition). Nothing is scored: a
passage either matches or it does not.
"""
from __future__ import annotations

import gc
import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import textnorm
from ._parallel import parallel_map
from .errors import DataError
from .readers import Reader
from .types import Passage, PredictionSet, Question, RankedList

log = logging.getLogger(__name__)

DEFAULT_ITERATIONS = 2


def _check_unique_ids(r: RankedList) -> None:
    ids = r.ids
    if len(set(ids)) != len(ids):
        seen = set()
        dup = next(i for i in ids if i in seen or seen.add(i))
        raise DataError(f"question {r.question_id}: duplicate passage id {dup!r}")


@contextmanager
def _gc_paused():
    # Building a million passages trips many full collections; nothing here makes cycles.
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def _partition(r: RankedList, hits: Sequence[int | None]) -> RankedList:
    front, back = [], []
    for p, h in zip(r.passages, hits):
        q = Passage(p.id, p.text, p.title, p.score, p.original_rank, h is not None, h, p.extra)
        (front if h is not None else back).append(q)
    return RankedList(r.question_id, front + back)


def _hits_job(job):
    texts, titles, patterns, index = job
    hits = textnorm.kernel.match_indices(texts, patterns)
    if titles is not None:
        for i, t in enumerate(textnorm.kernel.match_indices(titles, patterns)):
            if t >= 0 and (hits[i] < 0 or t < hits[i]):
                hits[i] = t
    return [index[h] if h >= 0 else None for h in hits]


def rerank_one(r: RankedList, a: PredictionSet, include_title: bool = False) -> RankedList:
    """Move passages containing any prediction to the front, keeping relative order in both groups.

    Matched passages record which prediction (by position in ``a``) they
    contained first. Predictions that normalize to nothing are ignored.
    """
    if not r.passages:
        raise DataError(f"question {r.question_id}: empty ranked list")
    if a.question_id != r.question_id:
        raise DataError(f"predictions for {a.question_id!r} applied to question {r.question_id!r}")
    _check_unique_ids(r)
    return _partition(r, textnorm.match_many(r.passages, a.predictions, include_title))


def _index_unique(items, what):
    out = {}
    for x in items:
        if x.question_id in out:
            raise DataError(f"duplicate question_id {x.question_id!r} in {what}")
        out[x.question_id] = x
    return out


def rerank_run(
    runs: Sequence[RankedList],
    preds: Iterable[PredictionSet],
    include_title: bool = False,
    workers: int = 1,
) -> list[RankedList]:
    """Rerank every question that has predictions; others pass through unchanged.

    With ``workers > 1`` the matching is spread over worker processes; the
    output order always follows ``runs``.
    """
    _index_unique(runs, "runs")
    by_q = _index_unique(preds, "predictions")
    known = {r.question_id for r in runs}
    for qid in by_q:
        if qid not in known:
            log.warning("predictions for unknown question %s ignored", qid)

    jobs, todo = [], []
    for i, r in enumerate(runs):
        a = by_q.get(r.question_id)
        if a is None:
            continue
        if not r.passages:
            raise DataError(f"question {r.question_id}: empty ranked list")
        _check_unique_ids(r)
        patterns, index = textnorm.answer_patterns(a.predictions)
        if not patterns:
            todo.append((i, [None] * len(r.passages)))
            continue
        titles = [p.title or "" for p in r.passages] if include_title else None
        jobs.append(([p.text for p in r.passages], titles, patterns, index))
        todo.append((i, None))

    with _gc_paused():
        results = iter(parallel_map(_hits_job, jobs, workers))
        out = list(runs)
        for i, hits in todo:
            out[i] = _partition(runs[i], hits if hits is not None else next(results))
    return out


def _union(prev: PredictionSet | None, new: PredictionSet) -> PredictionSet:
    if prev is None:
        return new
    return PredictionSet.from_raw(new.question_id, list(new.predictions) + list(prev.predictions))


def rerank_iterative(
    r: RankedList,
    reader: Reader,
    iterations: int = DEFAULT_ITERATIONS,
    *,
    question: Question,
    top_k: int = 10,
    union: bool = False,
    include_title: bool = False,
    failures: list | None = None,
) -> list[RankedList]:
    """Alternate reading the current top-``top_k`` and reranking; returns one list per iteration.

    If the reader fails, the question keeps its current order for that round
    and the failure is appended to ``failures`` as ``(iteration, question_id, message)``.
    With ``union`` each round also keeps the predictions of earlier rounds.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    out = []
    current, acc = r, None
    for it in range(iterations):
        try:
            preds = reader.predict(question, current.passages[:top_k], it)
        except Exception as exc:
            log.warning("reader failed on %s (iteration %d): %s", r.question_id, it + 1, exc)
            if failures is not None:
                failures.append((it + 1, r.question_id, str(exc)))
            out.append(current)
            continue
        if union:
            preds = acc = _union(acc, preds)
        current = rerank_one(current, preds, include_title)
        out.append(current)
    return out


@dataclass
class IterativeResult:
    rounds: list[list[RankedList]]
    failures: list[tuple[int, str, str]] = field(default_factory=list)
    predictions: list[list[PredictionSet]] = field(default_factory=list)

    @property
    def final(self) -> list[RankedList]:
        return self.rounds[-1]


def rerank_iterative_run(
    runs: Sequence[RankedList],
    questions: Mapping[str, Question],
    reader: Reader,
    iterations: int = DEFAULT_ITERATIONS,
    *,
    top_k: int = 10,
    union: bool = False,
    include_title: bool = False,
    workers: int = 1,
) -> IterativeResult:
    """Dataset-level iterative reranking; the reader is called once per round with the whole batch.

    Readers that declare ``concurrent_safe`` are queried from a thread pool
    when ``workers > 1``; all others are called serially.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    _index_unique(runs, "runs")
    current = list(runs)
    acc: dict[str, PredictionSet] = {}
    result = IterativeResult([])
    for it in range(iterations):
        missing = [r.question_id for r in current if r.question_id not in questions]
        if missing:
            raise DataError(f"no question record for {missing[0]!r}")
        items = [(questions[r.question_id], r.passages[:top_k]) for r in current]
        if reader.concurrent_safe and workers > 1 and len(items) > 1:
            size = -(-len(items) // workers)
            with ThreadPoolExecutor(workers) as ex:
                parts = ex.map(lambda b: reader.predict_batch(b, it), [items[i:i + size] for i in range(0, len(items), size)])
                answers = {}
                for part in parts:
                    answers.update(part)
        else:
            answers = reader.predict_batch(items, it)
        preds = []
        for r in current:
            a = answers.get(r.question_id)
            if a is None or isinstance(a, Exception):
                msg = str(a) if a is not None else "no result"
                log.warning("reader failed on %s (iteration %d): %s", r.question_id, it + 1, msg)
                result.failures.append((it + 1, r.question_id, msg))
                continue
            if union:
                a = acc[r.question_id] = _union(acc.get(r.question_id), a)
            preds.append(a)
        current = rerank_run(current, preds, include_title)
        result.rounds.append(current)
        result.predictions.append(preds)
    return result
