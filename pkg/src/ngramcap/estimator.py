"""scikit-learn style wrapper around index building, graph search and scoring."""
from __future__ import annotations

import logging
import time

from joblib import Parallel, delayed
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import NGramIndex, build_index, tokenize
from .exceptions import GraphEmptyError
from .graph import build_graph
from .keywords import KeywordSet, load_lexicon
from .metrics import EvalInstance, cider
from .search import CandidatePath, CostFunction, SearchBudget, SearchStats, traverse
from .validation import check_corpus, check_keyword_set, check_keyword_sets, check_params

logger = logging.getLogger(__name__)


class GraphCaptioner(BaseEstimator):
    """Generate captions from keyword sets by searching corpus n-gram graphs.

    ``fit`` indexes a caption corpus; ``predict`` maps keyword sets to their
    best caption. Parameters mirror the method's hyper-parameters:

    n : order of the n-grams used to build graphs
    n2 : order of the n-grams used to score fluency
    h : extra bottom-up hops beyond the keywords' own parents
    k : parents attached per vertex
    x : minimum corpus count for a top-down link
    y : beam width
    q_n : total number of paths the search may build
    fn : cost function, 1..4 (F, F+M, F+M+L, F+M+L+N)
    max_len : maximum caption length in tokens
    nouns : noun vocabulary for the extra-noun penalty; None uses the
        bundled lexicon
    bidirectional : extend paths backwards through parents as well
    n_jobs : joblib workers for ``predict``
    """

    def __init__(self, n=3, n2=3, h=1, k=5, x=5, y=5, q_n=150, fn=4, max_len=20,
                 nouns=None, bidirectional=True, n_jobs=None):
        self.n = n
        self.n2 = n2
        self.h = h
        self.k = k
        self.x = x
        self.y = y
        self.q_n = q_n
        self.fn = fn
        self.max_len = max_len
        self.nouns = nouns
        self.bidirectional = bidirectional
        self.n_jobs = n_jobs

    @property
    def max_order(self):
        return max(self.n, self.n2)

    def fit(self, X, y=None):
        """Index the corpus ``X`` (caption lines), or adopt a prebuilt index."""
        check_params(self.get_params())
        X = check_corpus(X)
        if isinstance(X, NGramIndex):
            if X.max_order != self.max_order:
                raise ValueError(f"index has max order {X.max_order}, "
                                 f"parameters need {self.max_order}")
            self.index_ = X
        else:
            self.index_ = build_index(X, self.n, self.n2)
        self.nouns_ = frozenset(load_lexicon().nouns if self.nouns is None else self.nouns)
        return self

    def generate(self, keywords, stats: SearchStats | None = None) -> list[CandidatePath]:
        """Ranked candidate captions for one keyword set.

        Raises :class:`GraphEmptyError` when no keyword occurs in the corpus.
        """
        check_is_fitted(self, "index_")
        kws = check_keyword_set(keywords)
        graph = build_graph(self.index_, kws.items, self.n, self.h, self.k, self.x)
        return traverse(graph, kws.items, CostFunction.parse(self.fn),
                        SearchBudget(self.q_n, self.y), self.index_, self.nouns_,
                        self.n2, self.max_len, self.bidirectional, stats=stats)

    def _predict_one(self, kws: KeywordSet) -> str:
        stats = SearchStats()
        try:
            ranked = self.generate(kws, stats)
        except GraphEmptyError as exc:
            logger.warning("%s", exc)
            return ""
        logger.debug("%s: %d expansions", kws.as_strings(), stats.expansions)
        return ranked[0].caption

    def predict(self, X) -> list[str]:
        """Best caption per keyword set; an empty string when none can be built."""
        check_is_fitted(self, "index_")
        sets = check_keyword_sets(X)
        start = time.perf_counter()
        if self.n_jobs in (None, 1):
            out = [self._predict_one(kws) for kws in sets]
        else:
            out = Parallel(n_jobs=self.n_jobs)(delayed(self._predict_one)(kws) for kws in sets)
        elapsed = time.perf_counter() - start
        logger.info("generated %d captions in %.2fs", len(out), elapsed)
        return out

    def score(self, X, y) -> float:
        """Corpus CIDEr-D of ``predict(X)`` against reference lists ``y``."""
        captions = self.predict(X)
        instances = [EvalInstance(i, tuple(tokenize(c)), tuple(tuple(tokenize(r)) for r in refs))
                     for i, (c, refs) in enumerate(zip(captions, y))]
        return cider(instances)[0]
