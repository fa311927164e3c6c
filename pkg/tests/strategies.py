"""Hypothesis strategies for small ranked lists over a tiny vocabulary, so matches are common."""
from hypothesis import strategies as st

from answerrank.types import Passage, PredictionSet, RankedList

VOCAB = ["paris", "london", "the", "a", "Obama", "hawaii", "x", "y", "z", "U.S.", "1961", "born", "in"]

phrase = st.lists(st.sampled_from(VOCAB), min_size=0, max_size=3).map(" ".join)
passage_text = st.lists(st.sampled_from(VOCAB), min_size=0, max_size=12).map(" ".join)


@st.composite
def ranked_lists(draw, qid="q", min_size=1, max_size=20):
    texts = draw(st.lists(passage_text, min_size=min_size, max_size=max_size))
    ps = [Passage(f"{qid}p{i}", t) for i, t in enumerate(texts)]
    return RankedList.from_passages(qid, ps)


@st.composite
def prediction_sets(draw, qid="q", max_size=5):
    return PredictionSet.from_raw(qid, draw(st.lists(phrase, max_size=max_size)))
