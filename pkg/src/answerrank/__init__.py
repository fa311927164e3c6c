"""Training-free passage reranking driven by reader predictions.

Passages that contain one of the reader's top predicted answers move to the
front of the retrieved list; everything else keeps its order behind them.
The package also scores retrieval accuracy and Exact Match before and after
reranking and builds token-budgeted reader inputs.
"""
from . import ingest
from .errors import AnswerRankError, DataError, EmptyAnswerError, ReaderError
from .metrics import (
    EvalReport,
    compare,
    evaluate,
    exact_match,
    hit_at_k,
    render_comparison,
    render_report,
    top_n_em,
    topk_accuracy,
)
from .readerprep import ReaderInput, assemble_input, shuffle_passages
from .readers import CommandReader, PredictionFileReader, Reader
from .rerank import rerank_iterative, rerank_iterative_run, rerank_one, rerank_run
from .textnorm import BACKEND, NormalizedText, contains_answer, matches_any, normalize
from .types import Passage, PredictionSet, Question, RankedList, mean_prediction_count

__version__ = "0.1.0"
