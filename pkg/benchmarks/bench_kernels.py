"""Compare the compiled and pure-Python kernels.

Times normalization alone, normalization plus matching, and a full
``rerank_run`` for each available kernel on the same random corpus, e.g.::

    python benchmarks/bench_kernels.py --questions 2000 --workers 1,4
"""
from __future__ import annotations

import argparse
import os
import time

from answerrank import _pykernel, textnorm
from answerrank.rerank import rerank_run
from answerrank.simulate import bulk_corpus

try:
    from answerrank import _ckernel
except ImportError:
    _ckernel = None


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--questions", type=int, default=1000)
    ap.add_argument("--passages", type=int, default=100)
    ap.add_argument("--tokens", type=int, default=100, help="approximate tokens per passage")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workers", default="1", help="comma-separated worker counts for rerank_run")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    worker_counts = [int(w) for w in args.workers.split(",")]

    runs, preds = bulk_corpus(args.questions, args.passages, args.tokens, seed=args.seed)
    texts = [[p.text for p in r.passages] for r in runs]
    patterns = [textnorm.answer_patterns(a.predictions)[0] for a in preds]
    n_passages = sum(len(t) for t in texts)
    mean_chars = sum(len(t) for ts in texts for t in ts) / n_passages
    print(f"{args.questions} questions x {args.passages} passages, {mean_chars:.0f} chars/passage, "
          f"{os.cpu_count()} visible core(s), best of {args.repeat}")

    kernels = [("python", _pykernel)] + ([("c", _ckernel)] if _ckernel is not None else [])
    if _ckernel is None:
        print("compiled kernel not built; showing the Python kernel only")

    rows = []
    for name, k in kernels:
        norm = best_of(args.repeat, lambda: [[k.norm_padded(t) for t in ts] for ts in texts])
        match = best_of(args.repeat, lambda: [k.match_indices(ts, p) for ts, p in zip(texts, patterns)])
        saved = textnorm.kernel
        textnorm.kernel = k
        try:
            full = {w: best_of(args.repeat, lambda: rerank_run(runs, preds, workers=w)) for w in worker_counts}
        finally:
            textnorm.kernel = saved
        rows.append((name, norm, match, full))

    header = f"{'kernel':8s} {'normalize us/p':>15s} {'match us/p':>11s}" + "".join(
        f" {'rerank_run w=' + str(w) + ' (s)':>19s}" for w in worker_counts
    )
    print(header)
    for name, norm, match, full in rows:
        line = f"{name:8s} {1e6 * norm / n_passages:15.2f} {1e6 * match / n_passages:11.2f}"
        line += "".join(f" {full[w]:19.2f}" for w in worker_counts)
        print(line)
    if len(rows) == 2:
        (_, pn, pm, pf), (_, cn, cm, cf) = rows
        print(f"speedup: normalize x{pn / cn:.1f}, match x{pm / cm:.1f}, rerank_run x{pf[worker_counts[0]] / cf[worker_counts[0]]:.1f}")


if __name__ == "__main__":
    main()
