"""Command-line frontend: rerank, eval, compare, prep-input, simulate.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import zlib
from pathlib import Path

from . import ingest, metrics, readerprep, simulate
from ._parallel import default_workers
from .errors import DataError, EmptyAnswerError
from .mockreader import SOURCES
from .readers import CommandReader, PredictionFileReader
from .rerank import DEFAULT_ITERATIONS, rerank_iterative_run, rerank_run
from .types import mean_prediction_count

log = logging.getLogger("answerrank")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        values = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or values[0] < 1:
        raise argparse.ArgumentTypeError(f"values must be positive integers, got {text!r}")
    return values


def _float_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _require_files(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise UsageError(f"no such file: {p}")


def _workers(args) -> int:
    if getattr(args, "serial", False):
        return 1
    return args.workers or default_workers()


# ---------------------------------------------------------------- rerank

def cmd_rerank(args) -> int:
    preds_paths = args.predictions or []
    if bool(preds_paths) == bool(args.reader_cmd):
        raise UsageError("give either --predictions (one file per iteration) or --reader-cmd")
    _require_files(args.retrieval, *preds_paths)
    iterations = args.iterations or (len(preds_paths) if preds_paths else DEFAULT_ITERATIONS)
    if preds_paths and iterations > len(preds_paths):
        raise UsageError(f"{iterations} iterations need {iterations} prediction files, got {len(preds_paths)}")

    pairs = ingest.load_retrieval(args.retrieval)
    questions = {q.question_id: q for q, _ in pairs}
    runs = [r for _, r in pairs]
    workers = _workers(args)

    if preds_paths and iterations == 1:
        preds = ingest.load_predictions(preds_paths[0], args.n)
        final = rerank_run(runs, preds, args.include_title, workers)
        rounds_preds = [preds]
        failures = []
    else:
        if preds_paths:
            reader = PredictionFileReader.from_paths(preds_paths[:iterations], args.n)
        else:
            reader = CommandReader(args.reader_cmd, args.n)
        res = rerank_iterative_run(
            runs, questions, reader, iterations,
            top_k=args.top_k, union=args.union, include_title=args.include_title, workers=workers,
        )
        final, rounds_preds, failures = res.final, res.predictions, res.failures

    have = {p.question_id for p in rounds_preds[-1]}
    missing = [r.question_id for r in runs if r.question_id not in have]
    if missing:
        log.warning("%d question(s) without predictions passed through unchanged (e.g. %s)", len(missing), missing[0])
    for it, qid, msg in failures:
        log.warning("reader failure, iteration %d, question %s: %s", it, qid, msg)

    ingest.write_run(args.output, final, questions)

    matched = [sum(1 for p in r.passages if p.matched) for r in final if r.question_id in have]
    if args.per_question:
        for r in final:
            n = sum(1 for p in r.passages if p.matched)
            first = next((p.original_rank for p in r.passages if p.matched), None)
            print(f"{r.question_id}\tmatched={n}/{len(r.passages)}\tfirst_matched_original_rank={first}")
    print(f"questions: {len(final)}  reranked: {len(have & questions.keys())}  passed through: {len(missing)}")
    if matched:
        print(
            f"passages matched per reranked question: mean {sum(matched) / len(matched):.2f}, "
            f"questions with >=1 match: {sum(1 for m in matched if m)}/{len(matched)}"
        )
    print(f"N-bar (mean distinct predictions): {mean_prediction_count(rounds_preds[-1]):.2f}")
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------- eval / compare

def _report(run_path, golds, ks, preds_path, n, ns, include_title):
    pairs = ingest.load_retrieval(run_path)
    runs = [r for _, r in pairs]
    preds = ingest.load_predictions(preds_path, n) if preds_path else None
    return runs, metrics.evaluate(runs, golds, ks, preds, ns, include_title)


def cmd_eval(args) -> int:
    runs_paths = args.run
    if len(runs_paths) > 2:
        raise UsageError("at most two runs (before, after)")
    preds_paths = args.predictions or []
    if len(preds_paths) > len(runs_paths):
        raise UsageError("at most one --predictions per --run")
    _require_files(*runs_paths, *preds_paths, args.golds)
    preds_paths = preds_paths + [None] * (len(runs_paths) - len(preds_paths))

    golds = ingest.load_golds(args.golds or runs_paths[0])
    reports, id_sets = [], []
    for path, pp in zip(runs_paths, preds_paths):
        runs, rep = _report(path, golds, args.ks, pp, args.n, args.ns, args.include_title)
        reports.append(rep)
        id_sets.append({r.question_id for r in runs})

    labels = args.labels.split(",") if args.labels else (["R", "R'"] if len(reports) == 2 else ["run"])
    if len(reports) == 1:
        out = reports[0]
        print(metrics.render_report(out, labels[0]))
    else:
        if id_sets[0] != id_sets[1]:
            raise DataError(f"runs cover different questions ({len(id_sets[0] ^ id_sets[1])} differ)")
        out = metrics.compare(*reports)
        print(metrics.render_comparison(out, tuple(labels[:2])))
    if out.n_skipped:
        print(f"skipped {out.n_skipped} question(s) without a usable gold answer")
    if args.json:
        ingest.write_records(args.json, [out.to_record()])
    return 0


def _load_report(path) -> metrics.EvalReport:
    recs = [rec for _, rec in ingest.iter_records(path)]
    if len(recs) != 1:
        raise DataError(f"expected one report record, found {len(recs)}", path=path)
    return metrics.EvalReport.from_record(recs[0])


def cmd_compare(args) -> int:
    _require_files(args.before, args.after)
    out = metrics.compare(_load_report(args.before), _load_report(args.after))
    labels = args.labels.split(",") if args.labels else ["R", "R'"]
    print(metrics.render_comparison(out, tuple(labels[:2])))
    if args.json:
        ingest.write_records(args.json, [out.to_record()])
    return 0


# ---------------------------------------------------------------- prep-input

def cmd_prep_input(args) -> int:
    _require_files(args.retrieval)
    if args.top_m < 1 or args.budget < 1:
        raise UsageError("--top-m and --budget must be positive")
    pairs = ingest.load_retrieval(args.retrieval)
    inputs = []
    for q, r in pairs:
        if args.shuffle_seed is not None:
            seed = zlib.crc32(f"{args.shuffle_seed}:{q.question_id}".encode("utf-8"))
            r = readerprep.shuffle_passages(r, min(args.top_m, len(r)), seed)
        try:
            inputs.append(readerprep.assemble_input(
                q, r, args.top_m, args.budget, separator=args.separator,
                include_title=not args.no_title, whole_passages=args.whole_passages,
            ))
        except ValueError as exc:
            raise DataError(f"question {q.question_id}: {exc}") from None
    ingest.write_records(args.output, (x.to_record() for x in inputs))
    if inputs:
        mean_inc = sum(x.passages_included for x in inputs) / len(inputs)
        partial = sum(1 for x in inputs if x.partial_passage)
        print(f"inputs: {len(inputs)}  mean full passages: {mean_inc:.2f}  with a cut passage: {partial}")
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    if any(not 0.0 <= a <= 1.0 for a in args.accuracy):
        raise UsageError("accuracies must lie in [0, 1]")
    if args.retrieval:
        _require_files(args.retrieval)
        pairs = ingest.load_retrieval(args.retrieval)
        corpus = simulate.Corpus([q for q, _ in pairs], [r for _, r in pairs])
    else:
        if args.questions < 1 or args.passages < 1:
            raise UsageError("--questions and --passages must be positive")
        corpus = simulate.synthetic_corpus(args.questions, args.passages, args.passage_tokens, seed=args.seed)

    base = simulate.baseline(corpus, args.ks)
    cells = simulate.run_grid(
        corpus, args.accuracy, args.n, args.iterations,
        ks=args.ks, top_k=args.top_k, distractor_source=args.source, seed=args.seed,
    )
    header = ["Input"] + [f"Top-{k}" for k in args.ks] + ["N-bar"]
    rows = [["R"] + [f"{100 * base[k]:.1f}" for k in args.ks] + ["-"]]
    for c in cells:
        label = f"acc={c.accuracy:g} N={c.n} it={c.iterations}"
        rows.append([label] + [f"{100 * c.per_k_accuracy[k]:.1f}" for k in args.ks] + [f"{c.n_bar:.2f}"])
    print(metrics.render_table(header, rows))
    if args.json:
        recs = [{"accuracy": None, "n": None, "iterations": 0, "per_k_accuracy": {str(k): v for k, v in base.items()}}]
        recs += [
            {"accuracy": c.accuracy, "n": c.n, "iterations": c.iterations, "n_bar": c.n_bar,
             "per_k_accuracy": {str(k): v for k, v in c.per_k_accuracy.items()}}
            for c in cells
        ]
        ingest.write_records(args.json, recs)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="answerrank", description="Rerank retrieved passages by reader predictions and evaluate.")
    ap.add_argument("--config", help="JSON object of option values; explicit flags win")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def parallel(p):
        p.add_argument("--workers", type=int, default=None, help="worker processes (default: available cores)")
        p.add_argument("--serial", action="store_true", help="single process; deterministic warning order")

    p = sub.add_parser("rerank", help="rerank a retrieval run by reader predictions")
    p.add_argument("--retrieval", required=True)
    p.add_argument("--predictions", action="append", help="predictions JSONL; repeat once per iteration")
    p.add_argument("--reader-cmd", help="external reader command (line-delimited JSON on stdin/stdout)")
    p.add_argument("--iterations", type=int)
    p.add_argument("--top-k", type=int, default=10, help="passages shown to the reader per iteration")
    p.add_argument("--n", type=int, help="use only the first N predictions")
    p.add_argument("--union", action="store_true", help="keep predictions from earlier iterations")
    p.add_argument("--include-title", action="store_true")
    p.add_argument("--per-question", action="store_true")
    p.add_argument("--output", required=True)
    parallel(p)
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("eval", help="top-k accuracy and EM for one run, or before/after for two")
    p.add_argument("--run", action="append", required=True)
    p.add_argument("--golds", help="JSONL with question_id and answers (default: answers in the first run)")
    p.add_argument("--predictions", action="append", help="predictions for the matching --run, for EM")
    p.add_argument("--n", type=int)
    p.add_argument("--ks", type=_int_list, default=list(metrics.DEFAULT_KS))
    p.add_argument("--ns", type=_int_list, default=list(metrics.DEFAULT_NS))
    p.add_argument("--include-title", action="store_true")
    p.add_argument("--labels")
    p.add_argument("--json", help="write the machine-readable report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="before/after table from two saved reports")
    p.add_argument("before")
    p.add_argument("after")
    p.add_argument("--labels")
    p.add_argument("--json")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("prep-input", help="token-budgeted reader inputs")
    p.add_argument("--retrieval", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--top-m", type=int, default=readerprep.DEFAULT_TOP_M)
    p.add_argument("--budget", type=int, default=readerprep.DEFAULT_BUDGET)
    p.add_argument("--separator", default=readerprep.DEFAULT_SEPARATOR)
    p.add_argument("--no-title", action="store_true")
    p.add_argument("--whole-passages", action="store_true")
    p.add_argument("--shuffle-seed", type=int, help="shuffle the top-m passages (reader training data)")
    p.set_defaults(func=cmd_prep_input)

    p = sub.add_parser("simulate", help="mock-reader grid over a synthetic or given corpus")
    p.add_argument("--retrieval", help="use this run instead of a synthetic corpus")
    p.add_argument("--questions", type=int, default=500)
    p.add_argument("--passages", type=int, default=100)
    p.add_argument("--passage-tokens", type=int, default=100)
    p.add_argument("--accuracy", type=_float_list, default=[0.45])
    p.add_argument("--n", type=_int_list, default=[1, 5, 10])
    p.add_argument("--iterations", type=_int_list, default=[1])
    p.add_argument("--source", choices=SOURCES, default="passage-span")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--ks", type=_int_list, default=list(metrics.DEFAULT_KS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json")
    p.set_defaults(func=cmd_simulate)
    return ap


def _apply_config(ap, argv):
    argv = sys.argv[1:] if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    choices = ap._subparsers._group_actions[0].choices
    command = next((a for a in rest if a in choices), None)
    if not known.config or command is None:
        return ap.parse_args(argv)
    try:
        cfg = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        ap.error(f"cannot read config {known.config}: {exc}")
    if not isinstance(cfg, dict):
        ap.error("config must be a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    sub = choices[command]
    for action in sub._actions:
        if action.dest not in cfg:
            continue
        value = cfg[action.dest]
        if action.type in (_int_list, _float_list):
            text = ",".join(map(str, value)) if isinstance(value, list) else str(value)
            try:
                value = action.type(text)
            except argparse.ArgumentTypeError as exc:
                ap.error(f"config {action.dest}: {exc}")
        elif action.dest in ("predictions", "run") and isinstance(value, str):
            value = [value]
        cfg[action.dest] = value
        action.required = False
    sub.set_defaults(**cfg)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    ap = build_parser()
    args = _apply_config(ap, argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"answerrank: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, EmptyAnswerError) as exc:
        print(f"answerrank: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"answerrank: I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
