"""Acceptance criteria 1-10. Each test records one PASS/FAIL/SKIP line.

The lines are printed as they happen (visible with ``-s``) and again in the
terminal summary. Run just these with ``pytest tests/test_acceptance.py``.
"""
import json
import os
import random
import time

import pytest

from answerrank import textnorm
from answerrank._parallel import default_workers
from answerrank.cli import main as cli_main
from answerrank.metrics import exact_match, hit_at_k, top_n_em, topk_accuracy
from answerrank.readerprep import assemble_input
from answerrank.rerank import rerank_one, rerank_run
from answerrank.simulate import baseline, bulk_corpus, run_grid, synthetic_corpus
from answerrank.textnorm import contains_answer, normalize
from answerrank.types import Passage, PredictionSet, Question, RankedList
from oracle import naive_contains, naive_em, naive_tokens, naive_top_n_em, naive_topk
from vectors import CONTAINS, EXACT_MATCH, NORMALIZE

RESULTS = []

WORDS = ["paris", "london", "the", "a", "an", "obama", "hawaii", "x", "y", "z", "new", "york",
         "U.S.", "1961", "born", "in", "Café", "it's", "theater", "heat", "—", "!"]


def report(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def skip(n, reason):
    line = f"[SKIP] criterion {n}: {reason}"
    RESULTS.append(line)
    print(line)
    pytest.skip(reason)


def _phrase(rng, lo=1, hi=3):
    return " ".join(rng.choices(WORDS, k=rng.randint(lo, hi)))


def random_instances(count, seed, max_passages=50):
    """(RankedList, PredictionSet, golds) triples over a small vocabulary, so matches are common."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        qid = f"q{i}"
        n = rng.randint(1, max_passages)
        texts = [" ".join(rng.choices(WORDS, k=rng.randint(0, 30))) for _ in range(n)]
        r = RankedList.from_passages(qid, [Passage(f"{qid}p{j}", t) for j, t in enumerate(texts)])
        preds = PredictionSet.from_raw(qid, [_phrase(rng) for _ in range(rng.randint(0, 5))])
        golds = [g for g in (_phrase(rng) for _ in range(rng.randint(1, 3))) if naive_tokens(g)] or ["paris"]
        out.append((r, preds, golds))
    return out


INSTANCES = random_instances(1200, seed=1)


def test_criterion_1_permutation_and_stability():
    start = time.perf_counter()
    outs = [rerank_one(r, a) for r, a, _ in INSTANCES]
    bad = 0
    for (r, _, _), out in zip(INSTANCES, outs):
        flags = [p.matched for p in out.passages]
        matched_ranks = [p.original_rank for p in out.passages if p.matched]
        other_ranks = [p.original_rank for p in out.passages if not p.matched]
        ok = (
            sorted(out.ids) == sorted(r.ids)
            and len(out.ids) == len(r.ids)
            and flags == sorted(flags, reverse=True)
            and matched_ranks == sorted(matched_ranks)
            and other_ranks == sorted(other_ranks)
        )
        bad += not ok
    elapsed = time.perf_counter() - start
    # matched flags cross-checked against the naive oracle, outside the timed region
    for (r, a, _), out in zip(INSTANCES, outs):
        answers = [x for x in a.predictions if naive_tokens(x)]
        for p in out.passages:
            if p.matched != any(naive_contains(p.text, x) for x in answers):
                bad += 1
    report(1, bad == 0 and elapsed < 1.0,
           f"{len(INSTANCES)} instances, {bad} failures, {elapsed:.3f}s (limit 1s), backend={textnorm.BACKEND}")


def test_criterion_2_oracle_monotonicity():
    rng = random.Random(2)
    checks = bad = 0
    for r, _, golds in INSTANCES:
        subset = rng.sample(golds, rng.randint(1, len(golds)))
        after = rerank_one(r, PredictionSet.from_raw(r.question_id, subset))
        for k in range(1, len(r) + 1):
            checks += 1
            bad += hit_at_k(after, golds, k) < hit_at_k(r, golds, k)
    report(2, bad == 0, f"{len(INSTANCES)} instances, {checks} (instance, k) checks, {bad} violations")


def test_criterion_3_full_depth_invariance():
    bad = 0
    for r, a, golds in INSTANCES:
        after = rerank_one(r, a)
        n = len(r)
        bad += topk_accuracy([after], {r.question_id: golds}, [n]) != topk_accuracy([r], {r.question_id: golds}, [n])
    report(3, bad == 0, f"{len(INSTANCES)} instances, exact equality at k=len, {bad} differences")


def test_criterion_4_brute_force_equivalence():
    rng = random.Random(4)
    bad = 0
    for inst in range(200):
        nq = rng.randint(1, 10)
        runs, golds, preds = [], {}, []
        for q in range(nq):
            qid = f"q{q}"
            texts = [" ".join(rng.choices(WORDS, k=rng.randint(0, 12))) for _ in range(rng.randint(1, 20))]
            runs.append(RankedList.from_passages(qid, [Passage(str(j), t) for j, t in enumerate(texts)]))
            golds[qid] = [_phrase(rng) for _ in range(rng.randint(1, 3))]
            preds.append(PredictionSet.from_raw(qid, [_phrase(rng, 1, 2) for _ in range(rng.randint(0, 5))]))
        if not any(naive_tokens(g) for gs in golds.values() for g in gs):
            golds["q0"] = ["paris"]
        ks = sorted(rng.sample(range(1, 22), 4))
        want = naive_topk([([p.text for p in r.passages], golds[r.question_id]) for r in runs], ks)
        bad += topk_accuracy(runs, golds, ks) != want
        by_q = {p.question_id: list(p.predictions) for p in preds}
        for n in (1, 2, 3, 5):
            bad += top_n_em(preds, golds, n) != naive_top_n_em(by_q, golds, n)
    report(4, bad == 0, f"200 instances (<=10 questions, <=20 passages, <=5 predictions), {bad} mismatches")


def test_criterion_5_normalization_vectors():
    total = len(NORMALIZE) + len(CONTAINS) + len(EXACT_MATCH)
    bad = sum(normalize(s).joined != want for s, want in NORMALIZE)
    bad += sum(contains_answer(p, a) != want for p, a, want in CONTAINS)
    bad += sum(exact_match(p, g) != want for p, g, want in EXACT_MATCH)
    # the vectors were derived by hand; the oracle must agree with them too
    bad += sum(" ".join(naive_tokens(s)) != want for s, want in NORMALIZE)
    bad += sum(naive_contains(p, a) != want for p, a, want in CONTAINS)
    bad += sum(naive_em(p, g) != want for p, g, want in EXACT_MATCH)
    report(5, total >= 20 and bad == 0, f"{total} hand-derived vectors, {bad} failures")


def test_criterion_6_idempotence():
    bad = 0
    for r, a, _ in INSTANCES:
        once = rerank_one(r, a)
        bad += rerank_one(once, a) != once
    report(6, bad == 0, f"{len(INSTANCES)} instances, {bad} differences after a second pass")


def test_criterion_7_desk_scale_trend():
    start = time.perf_counter()
    corpus = synthetic_corpus(500, 100, 100, seed=0)
    ks = (1, 10, 100)
    base = baseline(corpus, ks)
    sweep = (1, 2, 5, 10)
    cells = {c.n: c.per_k_accuracy for c in run_grid(corpus, [0.45], sweep, ks=ks, seed=0)}
    elapsed = time.perf_counter() - start

    gain = cells[1][1] - base[1]
    top100_same = all(cells[n][100] == base[100] for n in sweep)
    top1 = [cells[n][1] for n in sweep]
    top10 = [cells[n][10] for n in sweep]
    top1_down = top1[-1] < top1[0] and max(top1[1:]) <= top1[0]
    top10_up = all(b >= a for a, b in zip(top10, top10[1:]))
    ok = gain >= 0.05 and top100_same and top1_down and top10_up and elapsed < 10
    fmt = lambda xs: "/".join(f"{100 * x:.1f}" for x in xs)
    report(7, ok, (
        f"top-1 {100 * base[1]:.1f} -> {100 * cells[1][1]:.1f} (+{100 * gain:.1f}, need +5.0); "
        f"top-100 {'unchanged' if top100_same else 'CHANGED'}; N={sweep}: top-1 {fmt(top1)}, top-10 {fmt(top10)}; "
        f"{elapsed:.1f}s (limit 10s)"
    ))


def test_criterion_8_budget_safety():
    rng = random.Random(8)
    bad = 0
    for i in range(10_000):
        q = Question("q", " ".join(rng.choices(WORDS, k=rng.randint(1, 12))), ())
        qlen = len(q.text.split())
        passages = [
            Passage(str(j), " ".join(rng.choices(WORDS, k=rng.randint(0, 40))), title=_phrase(rng) if rng.random() < 0.5 else None)
            for j in range(rng.randint(1, 15))
        ]
        r = RankedList.from_passages("q", passages)
        budget = qlen + rng.randint(0, 300)
        out = assemble_input(q, r, rng.randint(1, 12), budget, whole_passages=rng.random() < 0.3)
        bad += out.token_count > budget or out.token_count != len(out.text.split())
        edge = assemble_input(q, r, 10, qlen)
        bad += edge.passages_included != 0 or edge.token_count != qlen or edge.partial_passage
    report(8, bad == 0, f"10000 random calls plus the budget=question-length boundary each time, {bad} violations")


def test_criterion_9_throughput():
    runs, preds = bulk_corpus(10_000, 100, 100, seed=9)
    workers = default_workers()
    start = time.perf_counter()
    out = rerank_run(runs, preds, workers=workers)
    elapsed = time.perf_counter() - start
    moved = sum(1 for r in out if r.passages[0].original_rank != 1)
    report(9, elapsed < 10 and len(out) == len(runs), (
        f"10000 questions x 100 passages (~100 tokens) in {elapsed:.2f}s (limit 10s); "
        f"{workers} worker(s) on {os.cpu_count()} visible core(s); backend={textnorm.BACKEND}; {moved} lists changed order"
    ))


def test_criterion_10_reference_run_files(tmp_path, capsys):
    run = os.environ.get("ANSWERRANK_NQ_RUN")
    preds = os.environ.get("ANSWERRANK_NQ_PREDS")
    if not (run and preds and os.path.isfile(run) and os.path.isfile(preds)):
        skip(10, "set ANSWERRANK_NQ_RUN (NQ test retrieval dump) and ANSWERRANK_NQ_PREDS (extractive predictions) to run")
    after = tmp_path / "after.jsonl"
    report_path = tmp_path / "report.jsonl"
    assert cli_main(["rerank", "--retrieval", run, "--predictions", preds, "--n", "5", "--output", str(after)]) == 0
    assert cli_main(["eval", "--run", run, "--run", str(after), "--json", str(report_path)]) == 0
    rec = json.loads(report_path.read_text().splitlines()[0])
    top5, top10 = rec["per_k_accuracy"]["5"], rec["per_k_accuracy"]["10"]
    ok = abs(100 * top5 - 75.2) <= 0.1 and abs(100 * top10 - 80.0) <= 0.1
    report(10, ok, f"top-5 {100 * top5:.2f} (want 75.2), top-10 {100 * top10:.2f} (want 80.0), tolerance 0.1")
