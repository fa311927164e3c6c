"""Synthetic corpora with planted answers, and the (accuracy, N, iterations) simulation grid."""
from __future__ import annotations

import itertools
import math
import random
import string
from dataclasses import dataclass
from typing import Sequence

from .metrics import DEFAULT_KS, accuracy_from_ranks, first_hit_ranks
from .mockreader import MockReader, MockReaderConfig
from .rerank import rerank_iterative_run
from .types import Passage, PredictionSet, Question, RankedList, mean_prediction_count

_ARTICLES = ["the", "the", "a", "an"]


def _word(rng: random.Random, lo=3, hi=9) -> str:
    return "".join(rng.choices(string.ascii_lowercase, k=rng.randint(lo, hi)))


def _poisson(rng: random.Random, lam: float) -> int:
    # Knuth; lam is small here
    limit, k, p = math.exp(-lam), 0, rng.random()
    while p > limit:
        k += 1
        p *= rng.random()
    return k


@dataclass
class Corpus:
    questions: list[Question]
    runs: list[RankedList]

    @property
    def golds(self) -> dict[str, tuple[str, ...]]:
        return {q.question_id: q.gold_answers for q in self.questions}

    @property
    def question_map(self) -> dict[str, Question]:
        return {q.question_id: q for q in self.questions}


def synthetic_corpus(
    n_questions: int = 500,
    n_passages: int = 100,
    passage_tokens: int = 100,
    *,
    answer_rate: float = 0.9,
    rank_decay: float = 0.9,
    topic_words: int = 3,
    topic_mentions: int = 3,
    topic_rate: float = 0.1,
    entity_rate: float = 2.0,
    vocab_size: int = 200_000,
    seed: int = 0,
) -> Corpus:
    """Questions with ranked passages of filler text and planted gold answers.

    For a fraction ``answer_rate`` of questions the answer is inserted into
    one to a few passages whose ranks are drawn with weight ``rank**-rank_decay``,
    so gold passages cluster near, but not always at, the top. Answers are
    written with capitals, articles and punctuation that normalization removes.

    Each question also gets ``topic_words`` words of its own that every gold
    passage mentions ``topic_mentions`` times each and other passages mention
    with probability ``topic_rate``, so spans a reader lifts from relevant
    passages can co-occur with the answer. Answers and topic words are
    capitalized like names; every passage also carries on average
    ``entity_rate`` unrelated capitalized names.
    """
    rng = random.Random(seed)
    vocab = list({_word(rng) for _ in range(vocab_size)} - {"a", "an", "the"})
    vocab.sort()
    filler = vocab + _ARTICLES * max(1, vocab_size // 2000)
    frag_len = 10
    names = [fresh_name.title() for fresh_name in {_word(rng, 4, 9) for _ in range(vocab_size // 10)} - set(vocab)]
    names.sort()
    pool = [" ".join(rng.choices(filler, k=frag_len)) for _ in range(max(2000, n_questions * n_passages))]
    n_frags = max(1, passage_tokens // frag_len)
    weights = [r ** -rank_decay for r in range(1, n_passages + 1)]
    used = set(vocab)

    def fresh(lo, hi):
        while True:
            w = _word(rng, lo, hi)
            if w not in used:
                used.add(w)
                return w

    questions, runs = [], []
    for qi in range(n_questions):
        qid = f"q{qi}"
        answer = " ".join(fresh(5, 10) for _ in range(rng.randint(1, 2)))
        topic = [fresh(4, 9).title() for _ in range(topic_words)]
        golds = (answer.title(), f"the {answer}")
        frags = [rng.choices(pool, k=n_frags) for _ in range(n_passages)]
        for f in frags:
            for _ in range(_poisson(rng, entity_rate)):
                f.insert(rng.randrange(len(f) + 1), rng.choice(names))
            if topic and rng.random() < topic_rate:
                f.insert(rng.randrange(len(f) + 1), rng.choice(topic))
        if rng.random() < answer_rate:
            m = rng.choice((1, 1, 1, 2, 2, 3, 4))
            ranks = set()
            while len(ranks) < m:
                ranks.add(rng.choices(range(n_passages), weights)[0])
            for r in ranks:
                frags[r].insert(rng.randrange(len(frags[r]) + 1), f"The {answer.title()},")
                for w in topic * topic_mentions:
                    frags[r].insert(rng.randrange(len(frags[r]) + 1), w)
        passages = [Passage(f"{qid}p{i}", " ".join(f), title=None) for i, f in enumerate(frags)]
        questions.append(Question(qid, f"what is the answer to question {qi}?", golds))
        runs.append(RankedList.from_passages(qid, passages))
    return Corpus(questions, runs)


def bulk_corpus(
    n_questions: int = 10_000,
    n_passages: int = 100,
    passage_tokens: int = 100,
    *,
    n_predictions: int = 5,
    pool_size: int = 200_000,
    seed: int = 0,
) -> tuple[list[RankedList], list[PredictionSet]]:
    """Large random runs and predictions for timing, with no planted answers.

    Passage texts come from a pool of ``pool_size`` distinct strings so that
    building a million passages stays cheap; nothing downstream caches by
    text, so every passage still costs a full normalization and search.
    About one word in seven is capitalized with a trailing comma.
    """
    rng = random.Random(seed)
    words = [_word(rng, 2, 9) for _ in range(50_000)]
    shown = [w.title() + "," if i % 7 == 0 else w for i, w in enumerate(words)]
    frags = [" ".join(rng.choices(shown, k=10)) for _ in range(20_000)]
    n_frags = max(1, passage_tokens // 10)
    pool = [" ".join(rng.choices(frags, k=n_frags)) for _ in range(pool_size)]
    runs, preds = [], []
    for q in range(n_questions):
        qid = str(q)
        ps = [Passage(f"{qid}:{i}", rng.choice(pool), original_rank=i + 1) for i in range(n_passages)]
        runs.append(RankedList(qid, ps))
        raw = [" ".join(rng.choices(words, k=rng.randint(1, 2))) for _ in range(n_predictions)]
        preds.append(PredictionSet.from_raw(qid, raw))
    return runs, preds


def oracle_ceiling(corpus: Corpus) -> float:
    """Fraction of questions with at least one gold-containing passage anywhere in the list."""
    ranks, _ = first_hit_ranks(corpus.runs, corpus.golds)
    return sum(1 for r in ranks.values() if r is not None) / len(ranks)


@dataclass
class GridCell:
    accuracy: float
    n: int
    iterations: int
    per_k_accuracy: dict[int, float]
    n_bar: float
    failures: int = 0


def baseline(corpus: Corpus, ks: Sequence[int] = DEFAULT_KS) -> dict[int, float]:
    ranks, _ = first_hit_ranks(corpus.runs, corpus.golds)
    return accuracy_from_ranks(ranks, ks)


def run_grid(
    corpus: Corpus,
    accuracies: Sequence[float],
    ns: Sequence[int],
    iterations: Sequence[int] = (1,),
    *,
    ks: Sequence[int] = DEFAULT_KS,
    top_k: int = 10,
    distractor_source: str = "passage-span",
    seed: int = 0,
) -> list[GridCell]:
    """Top-k accuracy after mock-reader reranking for every grid cell.

    Iteration counts share one run per (accuracy, N): the cell for ``i``
    iterations reads round ``i`` of a run as deep as ``max(iterations)``.
    """
    if not accuracies or not ns or not iterations or min(iterations) < 1:
        raise ValueError("grid needs at least one accuracy, one N and iteration counts >= 1")
    qmap = corpus.question_map
    cells = []
    for acc, n in itertools.product(accuracies, ns):
        cfg = MockReaderConfig(accuracy=acc, n=n, distractor_source=distractor_source, seed=seed)
        reader = MockReader(cfg)
        res = rerank_iterative_run(corpus.runs, qmap, reader, max(iterations), top_k=top_k)
        for it in sorted(set(iterations)):
            ranks, _ = first_hit_ranks(res.rounds[it - 1], corpus.golds)
            n_bar = mean_prediction_count(res.predictions[it - 1])
            cells.append(GridCell(acc, n, it, accuracy_from_ranks(ranks, ks), n_bar, len(res.failures)))
    return cells
