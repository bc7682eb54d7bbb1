"""Keyword-driven caption generation over corpus n-gram graphs."""
from .corpus import NGramIndex, build_index, tokenize
from .estimator import GraphCaptioner
from .exceptions import (AlignmentError, DataError, EmptyCorpusError, EmptyKeywordSetError,
                         GraphEmptyError, IDFDegenerateError)
from .graph import NGramGraph, build_graph
from .gridsearch import grid_search
from .keywords import KeywordSet, PosLexicon, human_keywords, load_lexicon, load_stoplist
from .metrics import EvalInstance, EvalReport, bleu, cider, evaluate, rouge_l
from .search import CandidatePath, CostFunction, SearchBudget, traverse

__version__ = "0.1.0"

__all__ = [
    "AlignmentError", "CandidatePath", "CostFunction", "DataError", "EmptyCorpusError",
    "EmptyKeywordSetError", "EvalInstance", "EvalReport", "GraphCaptioner", "GraphEmptyError",
    "IDFDegenerateError", "KeywordSet", "NGramGraph", "NGramIndex", "PosLexicon",
    "SearchBudget", "bleu", "build_graph", "build_index", "cider", "evaluate",
    "grid_search", "human_keywords", "load_lexicon", "load_stoplist", "rouge_l", "tokenize", "traverse",
]
