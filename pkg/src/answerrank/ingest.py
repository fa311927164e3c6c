"""Line-delimited JSON readers and writers for retrieval runs, predictions and gold answers.

All files are UTF-8 with one JSON object per line; blank lines are ignored.
Identifiers are read as strings whatever their JSON type. Fields this
package does not know about are carried through to the output unchanged.
"""
from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DataError
from .types import Passage, PredictionSet, Question, RankedList

log = logging.getLogger(__name__)

_QUESTION_KEYS = ("question_id", "question", "answers", "ctxs")
_CTX_KEYS = ("id", "title", "text", "score", "original_rank", "matched", "matched_prediction_index")


def iter_records(path) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, record)`` for every non-blank line."""
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f, 1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise DataError(f"invalid UTF-8 ({exc.reason})", path=path, line=lineno) from None
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except ValueError as exc:
                raise DataError(f"malformed JSON ({exc})", path=path, line=lineno) from None
            if not isinstance(rec, dict):
                raise DataError("record is not a JSON object", path=path, line=lineno)
            yield lineno, rec


def _str_list(value, what, path, lineno) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise DataError(f"{what} must be a list of strings", path=path, line=lineno)
    return value


def _question_id(rec, index) -> str:
    qid = rec.get("question_id")
    return str(index) if qid is None else str(qid)


def _parse_ctx(ctx, qid, path, lineno) -> Passage:
    if not isinstance(ctx, dict):
        raise DataError(f"question {qid}: ctx is not an object", path=path, line=lineno)
    if "id" not in ctx or not isinstance(ctx.get("text"), str):
        raise DataError(f"question {qid}: ctx needs an id and a text", path=path, line=lineno)
    title = ctx.get("title")
    rank = ctx.get("original_rank")
    return Passage(
        id=str(ctx["id"]),
        text=ctx["text"],
        title=None if title is None else str(title),
        score=ctx.get("score"),
        original_rank=rank if isinstance(rank, int) and not isinstance(rank, bool) else 0,
        matched=ctx.get("matched"),
        matched_prediction_index=ctx.get("matched_prediction_index"),
        extra={k: v for k, v in ctx.items() if k not in _CTX_KEYS},
    )


def load_retrieval(path) -> list[tuple[Question, RankedList]]:
    """Read a retrieval run: ``{question_id?, question, answers, ctxs: [{id, title?, text, score?}]}``.

    The order of ``ctxs`` is the ranking. ``original_rank`` is taken from the
    file when every passage carries a consistent one (a previously written
    reranked run), otherwise from position. ``question_id`` defaults to the
    0-based line index.
    """
    out = []
    seen = set()
    for lineno, rec in iter_records(path):
        qid = _question_id(rec, lineno - 1)
        if qid in seen:
            raise DataError(f"duplicate question_id {qid!r}", path=path, line=lineno)
        seen.add(qid)
        ctxs = rec.get("ctxs")
        if not isinstance(ctxs, list):
            raise DataError(f"question {qid}: ctxs must be a list", path=path, line=lineno)
        if not ctxs:
            log.warning("%s:%d: question %s has no passages; skipped", path, lineno, qid)
            continue
        question = Question(
            qid,
            str(rec.get("question", "")),
            tuple(_str_list(rec.get("answers", []), "answers", path, lineno)),
            {k: v for k, v in rec.items() if k not in _QUESTION_KEYS},
        )
        passages = [_parse_ctx(c, qid, path, lineno) for c in ctxs]
        ranks = [p.original_rank for p in passages]
        if sorted(ranks) != list(range(1, len(ranks) + 1)):
            for i, p in enumerate(passages, 1):
                p.original_rank = i
        r = RankedList(qid, passages)
        try:
            r.validate()
        except DataError as exc:
            raise DataError(str(exc), path=path, line=lineno) from None
        out.append((question, r))
    return out


def load_predictions(path, n: int | None = None) -> list[PredictionSet]:
    """Read ``{question_id, predictions: [...]}`` lines; truncate to ``n`` then dedupe by normal form."""
    out, seen = [], set()
    for lineno, rec in iter_records(path):
        if rec.get("question_id") is None:
            raise DataError("missing question_id", path=path, line=lineno)
        qid = str(rec["question_id"])
        if qid in seen:
            raise DataError(f"duplicate question_id {qid!r}", path=path, line=lineno)
        seen.add(qid)
        preds = _str_list(rec.get("predictions", []), "predictions", path, lineno)
        out.append(PredictionSet.from_raw(qid, preds, n))
    return out


def load_golds(path) -> dict[str, list[str]]:
    """Gold answers from ``{question_id, answers}`` lines (retrieval runs qualify too)."""
    out = {}
    for lineno, rec in iter_records(path):
        qid = _question_id(rec, lineno - 1)
        if qid in out:
            raise DataError(f"duplicate question_id {qid!r}", path=path, line=lineno)
        out[qid] = list(_str_list(rec.get("answers", []), "answers", path, lineno))
    return out


def atomic_write_lines(path, lines: Iterable[str]) -> None:
    """Write to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            for line in lines:
                f.write(line)
                f.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise OSError(f"cannot write {path}: {exc}") from exc


def _dumps(rec) -> str:
    return json.dumps(rec, ensure_ascii=False)


def passage_record(p: Passage) -> dict:
    rec = {"id": p.id}
    if p.title is not None:
        rec["title"] = p.title
    rec["text"] = p.text
    if p.score is not None:
        rec["score"] = p.score
    rec["original_rank"] = p.original_rank
    rec["matched"] = p.matched
    rec["matched_prediction_index"] = p.matched_prediction_index
    rec.update(p.extra)
    return rec


def run_record(r: RankedList, q: Question | None) -> dict:
    rec = {"question_id": r.question_id}
    if q is not None:
        rec["question"] = q.text
        rec["answers"] = list(q.gold_answers)
        rec.update(q.extra)
    rec["ctxs"] = [passage_record(p) for p in r.passages]
    return rec


def write_run(path, runs: Iterable[RankedList], questions: Mapping[str, Question] | Sequence[Question] | None = None) -> None:
    """Write ranked lists in the retrieval schema, plus per-passage rank and match fields."""
    if questions is None:
        qmap = {}
    elif isinstance(questions, Mapping):
        qmap = questions
    else:
        qmap = {q.question_id: q for q in questions}
    atomic_write_lines(path, (_dumps(run_record(r, qmap.get(r.question_id))) for r in runs))


def write_predictions(path, preds: Iterable[PredictionSet]) -> None:
    atomic_write_lines(path, (_dumps({"question_id": p.question_id, "predictions": list(p.predictions)}) for p in preds))


def write_records(path, records: Iterable[dict]) -> None:
    atomic_write_lines(path, (_dumps(rec) for rec in records))
