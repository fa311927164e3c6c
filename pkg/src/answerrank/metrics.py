"""Top-k retrieval accuracy, Exact Match, top-N EM and before/after reports.

Accuracy uses the same containment predicate as reranking, so a gold answer
counts as "in" a passage exactly when reranking on that answer would match it.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from . import textnorm
from .errors import DataError, EmptyAnswerError
from .types import PredictionSet, RankedList, mean_prediction_count

DEFAULT_KS = (1, 5, 10, 20, 100)
DEFAULT_NS = (1, 3, 5, 10)
REPORT_FORMAT = "answerrank.eval/1"


def _texts(r: RankedList, include_title: bool) -> tuple[list[str], list[str] | None]:
    texts = [p.text for p in r.passages]
    titles = [p.title or "" for p in r.passages] if include_title else None
    return texts, titles


def _first_hit(r: RankedList, patterns: list[str], limit: int, include_title: bool) -> int:
    texts, titles = _texts(r, include_title)
    pos = textnorm.kernel.first_hit(texts, patterns, limit)
    if titles is not None:
        t = textnorm.kernel.first_hit(titles, patterns, pos if pos >= 0 else limit)
        if t >= 0:
            pos = t
    return pos


def hit_at_k(r: RankedList, golds: Sequence[str], k: int, include_title: bool = False) -> bool:
    """Whether any of the first ``k`` passages contains any gold answer."""
    if k < 1:
        raise ValueError("k must be >= 1")
    patterns, _ = textnorm.answer_patterns(golds)
    if not patterns:
        raise EmptyAnswerError(f"question {r.question_id}: no gold answer survives normalization")
    return _first_hit(r, patterns, k, include_title) >= 0


def first_hit_ranks(
    runs: Iterable[RankedList], golds: Mapping[str, Sequence[str]], include_title: bool = False
) -> tuple[dict[str, int | None], list[str]]:
    """1-based rank of the first gold-containing passage per question (None if absent).

    Questions without a usable gold answer are returned separately as skipped.
    """
    ranks, skipped = {}, []
    for r in runs:
        patterns, _ = textnorm.answer_patterns(golds.get(r.question_id, ()))
        if not patterns:
            skipped.append(r.question_id)
            continue
        pos = _first_hit(r, patterns, len(r.passages), include_title)
        ranks[r.question_id] = pos + 1 if pos >= 0 else None
    return ranks, skipped


def accuracy_from_ranks(ranks: Mapping[str, int | None], ks: Sequence[int]) -> dict[int, float]:
    if not ranks:
        raise DataError("no evaluable questions")
    n = len(ranks)
    return {k: sum(1 for x in ranks.values() if x is not None and x <= k) / n for k in sorted(ks)}


def topk_accuracy(
    runs: Iterable[RankedList],
    golds: Mapping[str, Sequence[str]],
    ks: Sequence[int] = DEFAULT_KS,
    include_title: bool = False,
) -> dict[int, float]:
    """Fraction of questions whose top-k passages contain a gold answer, per k."""
    if any(k < 1 for k in ks):
        raise ValueError("k must be >= 1")
    ranks, _ = first_hit_ranks(runs, golds, include_title)
    return accuracy_from_ranks(ranks, ks)


def exact_match(prediction: str, golds: Sequence[str]) -> bool:
    norm = textnorm.kernel.norm_joined(prediction)
    return any(norm == textnorm.kernel.norm_joined(g) for g in golds)


def evaluable(golds: Mapping[str, Sequence[str]]) -> list[str]:
    """Question ids with at least one gold answer that survives normalization."""
    return [qid for qid, gs in golds.items() if textnorm.answer_patterns(gs)[0]]


def top_n_em(
    preds: Iterable[PredictionSet],
    golds: Mapping[str, Sequence[str]],
    n: int,
    question_ids: Iterable[str] | None = None,
) -> float:
    """Fraction of questions where any of the first ``n`` predictions exactly matches a gold answer.

    The question set defaults to every evaluable question in ``golds``; a
    question without predictions counts as unanswered.
    """
    if n < 1:
        raise ValueError("N must be >= 1")
    qids = list(question_ids) if question_ids is not None else evaluable(golds)
    if not qids:
        raise DataError("no evaluable questions")
    by_q = {p.question_id: p for p in preds}
    correct = 0
    for qid in qids:
        p = by_q.get(qid)
        if p is not None and any(exact_match(x, golds[qid]) for x in p.predictions[:n]):
            correct += 1
    return correct / len(qids)


def question_digest(qids: Iterable[str]) -> str:
    h = hashlib.sha1()
    for q in sorted(qids):
        h.update(q.encode("utf-8") + b"\0")
    return h.hexdigest()[:16]


@dataclass
class EvalReport:
    per_k_accuracy: dict[int, float]
    n_questions: int
    em: float | None = None
    top_n_em: dict[int, float] = field(default_factory=dict)
    n_bar: float | None = None
    n_skipped: int = 0
    question_set: str | None = None
    deltas: dict[str, tuple[float, float, float]] | None = None

    def __post_init__(self):
        if self.n_questions <= 0:
            raise DataError("a report needs at least one question")

    def metrics(self) -> dict[str, float]:
        """Flat metric map: ``top1``..``topK``, ``em``, ``em@N``."""
        out = {f"top{k}": v for k, v in sorted(self.per_k_accuracy.items())}
        if self.em is not None:
            out["em"] = self.em
        for n, v in sorted(self.top_n_em.items()):
            out[f"em@{n}"] = v
        return out

    def to_record(self) -> dict:
        rec = {
            "format": REPORT_FORMAT,
            "n_questions": self.n_questions,
            "n_skipped": self.n_skipped,
            "question_set": self.question_set,
            "per_k_accuracy": {str(k): v for k, v in sorted(self.per_k_accuracy.items())},
            "em": self.em,
            "top_n_em": {str(n): v for n, v in sorted(self.top_n_em.items())},
            "n_bar": self.n_bar,
        }
        if self.deltas is not None:
            rec["deltas"] = {m: {"before": b, "after": a, "gain": g} for m, (b, a, g) in self.deltas.items()}
        return rec

    @classmethod
    def from_record(cls, rec: Mapping) -> "EvalReport":
        if rec.get("format") != REPORT_FORMAT:
            raise DataError(f"not an evaluation report (format={rec.get('format')!r})")
        deltas = rec.get("deltas")
        return cls(
            per_k_accuracy={int(k): float(v) for k, v in rec["per_k_accuracy"].items()},
            n_questions=int(rec["n_questions"]),
            em=rec.get("em"),
            top_n_em={int(k): float(v) for k, v in rec.get("top_n_em", {}).items()},
            n_bar=rec.get("n_bar"),
            n_skipped=int(rec.get("n_skipped", 0)),
            question_set=rec.get("question_set"),
            deltas=None if deltas is None else {m: (d["before"], d["after"], d["gain"]) for m, d in deltas.items()},
        )


def evaluate(
    runs: Sequence[RankedList],
    golds: Mapping[str, Sequence[str]],
    ks: Sequence[int] = DEFAULT_KS,
    preds: Sequence[PredictionSet] | None = None,
    ns: Sequence[int] = DEFAULT_NS,
    include_title: bool = False,
) -> EvalReport:
    """Accuracy for ``runs`` and, given predictions, EM and top-N EM over the same questions."""
    ranks, skipped = first_hit_ranks(runs, golds, include_title)
    acc = accuracy_from_ranks(ranks, ks)
    em, tne, n_bar = None, {}, None
    if preds is not None:
        qids = list(ranks)
        tne = {n: top_n_em(preds, golds, n, qids) for n in sorted(ns)}
        em = tne[1] if 1 in tne else top_n_em(preds, golds, 1, qids)
        wanted = set(qids)
        n_bar = mean_prediction_count(p for p in preds if p.question_id in wanted)
    return EvalReport(acc, len(ranks), em, tne, n_bar, len(skipped), question_digest(ranks))


def compare(before: EvalReport, after: EvalReport) -> EvalReport:
    """``after`` with per-metric ``(before, after, gain)`` deltas attached."""
    if before.n_questions != after.n_questions:
        raise DataError(f"question counts differ: {before.n_questions} vs {after.n_questions}")
    if before.question_set and after.question_set and before.question_set != after.question_set:
        raise DataError("reports were computed over different question sets")
    b, a = before.metrics(), after.metrics()
    deltas = {m: (b[m], a[m], a[m] - b[m]) for m in a if m in b}
    return replace(after, deltas=deltas)


def _pct(x: float | None) -> str:
    return "-" if x is None else f"{100 * x:.1f}"


def render_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    fmt = lambda r: "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
    lines = [fmt(header), "  ".join("-" * w for w in widths)]
    lines += [fmt(r) for r in rows]
    return "\n".join(lines)


def _columns(report: EvalReport) -> list[str]:
    return list(report.metrics())


def _label(metric: str) -> str:
    if metric.startswith("top"):
        return "Top-" + metric[3:]
    return metric.upper()


def render_report(report: EvalReport, label: str = "run") -> str:
    """Aligned table, percentages with one decimal."""
    cols = _columns(report)
    m = report.metrics()
    header = ["Input"] + [_label(c) for c in cols] + ["Questions"]
    row = [label] + [_pct(m[c]) for c in cols] + [str(report.n_questions)]
    if report.n_bar is not None:
        header.append("N-bar")
        row.append(f"{report.n_bar:.2f}")
    return render_table(header, [row])


def render_comparison(report: EvalReport, labels: tuple[str, str] = ("R", "R'")) -> str:
    """Before / after / gain rows for a report carrying deltas."""
    if not report.deltas:
        raise ValueError("report has no deltas; use compare() first")
    cols = list(report.deltas)
    header = ["Input"] + [_label(c) for c in cols]
    rows = [
        [labels[0]] + [_pct(report.deltas[c][0]) for c in cols],
        [labels[1]] + [_pct(report.deltas[c][1]) for c in cols],
        ["gain"] + [f"{100 * report.deltas[c][2]:+.1f}" for c in cols],
    ]
    return render_table(header, rows)
