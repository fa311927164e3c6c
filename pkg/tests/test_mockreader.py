import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from answerrank.errors import ReaderError
from answerrank.ingest import load_retrieval
from answerrank.metrics import exact_match, hit_at_k
from answerrank.mockreader import MockReader, MockReaderConfig, entity_runs, mock_predict
from answerrank.readers import CommandReader
from answerrank.rerank import rerank_iterative_run, rerank_one
from answerrank.types import Passage, Question
from conftest import make_list
from oracle import naive_em, naive_tokens
from strategies import passage_text, phrase, ranked_lists

Q = Question("q7", "where was he born", ("Honolulu, Hawaii", "Hawaii"))
PASSAGES = [
    Passage("a", "Barack Obama was born in Honolulu, Hawaii in 1961."),
    Passage("b", "He later moved to Chicago where he met Michelle Robinson."),
    Passage("c", "no capitals at all here"),
]


def test_oracle_mode():
    p = mock_predict(Q, PASSAGES, MockReaderConfig(accuracy=1.0, n=1))
    assert p.predictions == ("Honolulu, Hawaii",)


@pytest.mark.parametrize("source", ["passage-span", "vocabulary"])
@pytest.mark.parametrize("seed", range(10))
def test_noise_mode_never_matches(source, seed):
    p = mock_predict(Q, PASSAGES, MockReaderConfig(accuracy=0.0, n=5, distractor_source=source, seed=seed))
    assert p.predictions
    assert not any(exact_match(x, Q.gold_answers) for x in p.predictions)


def test_deterministic_and_order_independent():
    cfg = MockReaderConfig(accuracy=0.5, n=4, seed=11)
    a = mock_predict(Q, PASSAGES, cfg)
    assert a == mock_predict(Q, PASSAGES, cfg)
    assert a == mock_predict(Q, PASSAGES[::-1], cfg)


def test_seed_changes_output():
    outs = {mock_predict(Q, PASSAGES, MockReaderConfig(accuracy=0.0, n=3, seed=s)).predictions for s in range(20)}
    assert len(outs) > 1


def test_accuracy_rate():
    cfg = MockReaderConfig(accuracy=0.3, n=1, distractor_source="vocabulary", seed=5)
    qs = [Question(f"q{i}", "", ("zanzibar",)) for i in range(2000)]
    rate = sum(mock_predict(q, [], cfg).predictions[:1] == ("zanzibar",) for q in qs) / len(qs)
    assert 0.26 < rate < 0.34


def test_entity_spans_preferred():
    cfg = MockReaderConfig(accuracy=0.0, n=3, seed=1)
    p = mock_predict(Question("x", "", ("nothing",)), PASSAGES[:2], cfg)
    caps = {w for run in entity_runs(PASSAGES[0].text) + entity_runs(PASSAGES[1].text) for w in run}
    assert all(set(x.split()) <= caps for x in p.predictions)


def test_entity_runs():
    assert entity_runs("Barack Obama was born in Honolulu, Hawaii.") == [["Barack", "Obama"], ["Honolulu"], ["Hawaii"]]
    assert entity_runs("nothing") == []


def test_config_validation():
    for kw in ({"accuracy": 1.5}, {"accuracy": -0.1}, {"n": 0}, {"distractor_source": "x"}, {"max_span": 0}):
        with pytest.raises(ValueError):
            MockReaderConfig(**kw)
    with pytest.raises(ValueError):
        mock_predict(Q, [], MockReaderConfig())


@given(ranked_lists(min_size=1), st.lists(phrase.filter(lambda s: naive_tokens(s)), min_size=1, max_size=3), st.integers(1, 25), st.integers(0, 5))
def test_oracle_mode_monotone(r, golds, k, seed):
    q = Question("q", "", tuple(golds))
    preds = mock_predict(q, r.passages[:10], MockReaderConfig(accuracy=1.0, n=1, seed=seed))
    after = rerank_one(r, preds)
    assert hit_at_k(after, golds, k) >= hit_at_k(r, golds, k)


@given(st.lists(passage_text, min_size=1, max_size=5), st.integers(0, 50), st.integers(1, 6))
def test_noise_property(texts, seed, n):
    q = Question("q", "", ("x y", "paris"))
    ps = [Passage(str(i), t) for i, t in enumerate(texts)]
    p = mock_predict(q, ps, MockReaderConfig(accuracy=0.0, n=n, seed=seed))
    assert len(p) <= n
    assert not any(naive_em(x, q.gold_answers) for x in p.predictions)


def test_mock_reader_fills_golds():
    reader = MockReader(MockReaderConfig(accuracy=1.0), {"q7": Q})
    assert reader.predict(Question("q7", "", ()), PASSAGES).predictions == ("Honolulu, Hawaii",)


def test_command_binding(fixtures_dir):
    data = load_retrieval(fixtures_dir / "run.jsonl")
    runs = [r for _, r in data]
    qs = {q.question_id: q for q, _ in data}
    golds = str(fixtures_dir / "run.jsonl")
    cmd = [sys.executable, "-m", "answerrank.mockreader", "--golds", golds, "--accuracy", "1", "--n", "2", "--seed", "3"]
    via_cmd = rerank_iterative_run(runs, {k: Question(k, q.text, ()) for k, q in qs.items()}, CommandReader(cmd), 2, top_k=3)
    direct = rerank_iterative_run(runs, qs, MockReader(MockReaderConfig(accuracy=1.0, n=2, seed=3)), 2, top_k=3)
    assert via_cmd.rounds == direct.rounds
    assert via_cmd.predictions == direct.predictions
    assert not via_cmd.failures
    assert via_cmd.final[0].ids == ["102", "103", "101"]


def test_command_failures():
    r = make_list("q", ["x"])
    bad = CommandReader([sys.executable, "-c", "import sys; sys.exit(3)"])
    with pytest.raises(ReaderError, match="exited 3"):
        bad.predict(Question("q", "", ()), r.passages)
    silent = CommandReader([sys.executable, "-c", "import sys; sys.stdin.read()"])
    with pytest.raises(ReaderError, match="nothing"):
        silent.predict(Question("q", "", ()), r.passages)
    missing = CommandReader(["/nonexistent/reader"])
    with pytest.raises(ReaderError):
        missing.predict(Question("q", "", ()), r.passages)
