"""Reader bindings used by the iterative reranking driver.

A reader turns a question plus the top passages of the current list into a
:class:`PredictionSet`. Two bindings ship: per-iteration prediction files and
an external command speaking line-delimited JSON over stdin/stdout.
"""
from __future__ import annotations

import json
import logging
import shlex
import subprocess
from typing import Sequence

from .errors import DataError, ReaderError
from .types import Passage, PredictionSet, Question

log = logging.getLogger(__name__)


class Reader:
    """Base reader. Subclasses implement :meth:`predict`; ``predict_batch`` may be overridden."""

    #: whether ``predict`` may be called from several threads at once
    concurrent_safe = False

    def predict(self, question: Question, passages: Sequence[Passage], iteration: int = 0) -> PredictionSet:
        raise NotImplementedError

    def predict_batch(self, items, iteration: int = 0) -> dict:
        """Map question_id to a PredictionSet, or to the exception raised for that question."""
        out = {}
        for question, passages in items:
            try:
                out[question.question_id] = self.predict(question, passages, iteration)
            except Exception as exc:
                out[question.question_id] = exc
        return out


class PredictionFileReader(Reader):
    """Serves predictions from one loaded prediction collection per iteration."""

    concurrent_safe = True

    def __init__(self, rounds: Sequence[Sequence[PredictionSet]]):
        if not rounds:
            raise ValueError("at least one prediction collection is required")
        self.rounds = [{p.question_id: p for p in preds} for preds in rounds]

    @classmethod
    def from_paths(cls, paths, n: int | None = None) -> "PredictionFileReader":
        from .ingest import load_predictions

        return cls([load_predictions(p, n) for p in paths])

    def predict(self, question, passages, iteration=0):
        if iteration >= len(self.rounds):
            raise ReaderError(f"no prediction file for iteration {iteration + 1}")
        try:
            return self.rounds[iteration][question.question_id]
        except KeyError:
            raise ReaderError(f"no predictions for question {question.question_id}") from None


def request_record(question: Question, passages: Sequence[Passage], iteration: int) -> dict:
    return {
        "question_id": question.question_id,
        "question": question.text,
        "iteration": iteration + 1,
        "passages": [{"id": p.id, "title": p.title, "text": p.text} for p in passages],
    }


class CommandReader(Reader):
    """Runs ``command`` once per batch.

    The command reads one request record per stdin line::

        {"question_id", "question", "iteration", "passages": [{"id", "title", "text"}, ...]}

    and writes one ``{"question_id", "predictions": [...]}`` line per answered
    question to stdout. A line may instead carry ``{"question_id", "error": msg}``.
    Questions missing from the output count as reader failures.
    """

    def __init__(self, command: str | Sequence[str], n: int | None = None, timeout: float | None = None):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.n = n
        self.timeout = timeout

    def predict(self, question, passages, iteration=0):
        result = self.predict_batch([(question, passages)], iteration)[question.question_id]
        if isinstance(result, Exception):
            raise result
        return result

    def predict_batch(self, items, iteration=0):
        payload = "".join(
            json.dumps(request_record(q, ps, iteration), ensure_ascii=False) + "\n" for q, ps in items
        )
        try:
            proc = subprocess.run(
                self.argv, input=payload, capture_output=True, text=True, encoding="utf-8", timeout=self.timeout
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            err = ReaderError(f"reader command failed: {exc}")
            return {q.question_id: err for q, _ in items}
        if proc.returncode != 0:
            err = ReaderError(f"reader command exited {proc.returncode}: {proc.stderr.strip()[-500:]}")
            return {q.question_id: err for q, _ in items}

        out = {}
        for lineno, line in enumerate(proc.stdout.splitlines(), 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                qid = str(rec["question_id"])
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"bad reader output ({exc})", path="<reader stdout>", line=lineno) from None
            if "error" in rec:
                out[qid] = ReaderError(str(rec["error"]))
            else:
                out[qid] = PredictionSet.from_raw(qid, [str(x) for x in rec.get("predictions", [])], self.n)
        for q, _ in items:
            out.setdefault(q.question_id, ReaderError(f"reader returned nothing for {q.question_id}"))
        return out
