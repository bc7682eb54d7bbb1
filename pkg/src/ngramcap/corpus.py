"""Corpus tokenization and the padded n-gram frequency index.

The index is the generator's whole knowledge of language: counts of every
padded n-gram up to ``max_order`` plus the tokenized sentences, so that
phrases longer than ``max_order`` can still be counted exactly.
"""
from __future__ import annotations

import logging
import math
import pickle
import re
import threading
from collections import defaultdict
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .exceptions import EmptyCorpusError

logger = logging.getLogger(__name__)

START = "<t>"
END = "</t>"
PADS = frozenset({START, END})

LOG_FLOOR = 1e-8

Gram = tuple[str, ...]

_EDGE_PUNCT = ".,!?;:\"()[]{}"
_COMMA = re.compile(r",")


def tokenize(text: str) -> list[str]:
    """Lowercase, drop commas and edge punctuation, split on whitespace.

    >>> tokenize("A person on a boat.")
    ['a', 'person', 'on', 'a', 'boat']
    """
    tokens = []
    for raw in _COMMA.sub(" ", text.lower()).split():
        tok = raw.strip(_EDGE_PUNCT)
        if tok and tok not in PADS:
            tokens.append(tok)
    return tokens


def pad(tokens: Sequence[str], width: int) -> list[str]:
    return [START] * width + list(tokens) + [END] * width


def ngrams(tokens: Sequence[str], order: int) -> Iterable[Gram]:
    return (tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1))


def is_pad(token: str) -> bool:
    return token in PADS


def strip_pads(tokens: Iterable[str]) -> list[str]:
    return [t for t in tokens if t not in PADS]


class NGramIndex:
    """Padded n-gram counts for orders ``1..max_order`` over a sentence list.

    Build with :func:`build_index`. Every sentence is padded on both sides
    with ``max_order - 1`` pad tokens. After construction the index is
    read-only; the only mutable state is a lazily built position index used
    for phrases longer than ``max_order``.
    """

    def __init__(self, max_order: int, tables: dict[int, dict[Gram, int]],
                 sentences: list[tuple[str, ...]]):
        self.max_order = max_order
        self._tables = tables
        self._sentences = sentences
        self._totals = {j: sum(t.values()) for j, t in tables.items()}
        self._parents = {j: self._group_by_last(t) for j, t in tables.items()}
        self._positions: dict[Gram, list[tuple[int, int]]] | None = None
        self._lock = threading.Lock()

    @staticmethod
    def _group_by_last(table: Mapping[Gram, int]) -> dict[str, list[tuple[Gram, int]]]:
        groups: dict[str, list[tuple[Gram, int]]] = defaultdict(list)
        for gram, count in table.items():
            if gram[-1] not in PADS:
                groups[gram[-1]].append((gram, count))
        for items in groups.values():
            items.sort(key=lambda gc: (-gc[1], gc[0]))
        return dict(groups)

    @property
    def pad_width(self) -> int:
        return self.max_order - 1

    @property
    def sentences(self) -> Sequence[tuple[str, ...]]:
        """Padded sentences, in corpus order."""
        return tuple(self._sentences)

    def table(self, order: int) -> Mapping[Gram, int]:
        return MappingProxyType(self._tables[order])

    def total(self, order: int) -> int:
        return self._totals[order]

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(g[0] for g in self._tables[1] if g[0] not in PADS)

    def count(self, gram: Sequence[str]) -> int:
        return self.phrase_count(gram)

    def phrase_count(self, phrase: Sequence[str]) -> int:
        """Number of contiguous occurrences of ``phrase`` in the padded corpus."""
        phrase = tuple(phrase)
        size = len(phrase)
        if size == 0:
            raise ValueError("phrase must contain at least one token")
        if size <= self.max_order:
            return self._tables[size].get(phrase, 0)
        head = phrase[:self.max_order]
        # every max_order-window must itself be attested
        for i in range(1, size - self.max_order + 1):
            if phrase[i:i + self.max_order] not in self._tables[self.max_order]:
                return 0
        if head not in self._tables[self.max_order]:
            return 0
        total = 0
        for sid, pos in self._position_index()[head]:
            sent = self._sentences[sid]
            if sent[pos:pos + size] == phrase:
                total += 1
        return total

    def _position_index(self) -> dict[Gram, list[tuple[int, int]]]:
        if self._positions is None:
            with self._lock:
                if self._positions is None:
                    positions: dict[Gram, list[tuple[int, int]]] = defaultdict(list)
                    m = self.max_order
                    for sid, sent in enumerate(self._sentences):
                        for pos in range(len(sent) - m + 1):
                            positions[sent[pos:pos + m]].append((sid, pos))
                    self._positions = dict(positions)
        return self._positions

    def top_parents(self, word: str, n: int, k: int) -> list[tuple[Gram, int]]:
        """The ``k`` most frequent order-``n`` grams whose last token is ``word``.

        Ties are broken lexicographically on the gram so results are
        reproducible. Unseen words give an empty list.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        if not 1 <= n <= self.max_order:
            raise ValueError(f"order {n} not available (index max order {self.max_order})")
        return list(self._parents[n].get(word, ())[:k])

    def log_prob(self, gram: Sequence[str]) -> float:
        """Log conditional probability of the last token given the rest.

        Unseen grams (or unseen prefixes) are floored at ``log(1e-8)``.
        """
        gram = tuple(gram)
        count = self.phrase_count(gram)
        if len(gram) == 1:
            denom = self._totals[1]
        else:
            denom = self.phrase_count(gram[:-1])
        if count == 0 or denom == 0:
            return math.log(LOG_FLOOR)
        return math.log(count / denom)

    def __getstate__(self):
        return {"max_order": self.max_order, "tables": self._tables,
                "sentences": self._sentences}

    def __setstate__(self, state):
        self.__init__(state["max_order"], state["tables"], state["sentences"])

    def __eq__(self, other):
        if not isinstance(other, NGramIndex):
            return NotImplemented
        return (self.max_order == other.max_order and self._tables == other._tables
                and self._sentences == other._sentences)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self.__getstate__(), fh, protocol=4)

    @classmethod
    def load(cls, path) -> "NGramIndex":
        with open(path, "rb") as fh:
            state = pickle.load(fh)
        index = cls.__new__(cls)
        index.__setstate__(state)
        return index

    def __repr__(self):
        return (f"NGramIndex(max_order={self.max_order}, sentences={len(self._sentences)}, "
                f"unigrams={len(self._tables[1])})")


def build_index(corpus: Iterable[str], n: int = 3, n2: int = 3) -> NGramIndex:
    """Tokenize ``corpus`` (one caption per item) and count padded n-grams.

    The index holds orders ``1..max(n, n2)``; empty lines are skipped.
    """
    if n < 2 or n2 < 2:
        raise ValueError("n and n2 must both be >= 2")
    max_order = max(n, n2)
    width = max_order - 1
    tables: dict[int, dict[Gram, int]] = {j: {} for j in range(1, max_order + 1)}
    sentences: list[tuple[str, ...]] = []
    for line in corpus:
        tokens = tokenize(line)
        if not tokens:
            continue
        padded = tuple(pad(tokens, width))
        sentences.append(padded)
        for j in range(1, max_order + 1):
            table = tables[j]
            for i in range(len(padded) - j + 1):
                gram = padded[i:i + j]
                table[gram] = table.get(gram, 0) + 1
    if not sentences:
        raise EmptyCorpusError("corpus contains no tokenizable lines")
    logger.debug("indexed %d sentences, %d unigram types", len(sentences), len(tables[1]))
    return NGramIndex(max_order, tables, sentences)


def read_corpus(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]
