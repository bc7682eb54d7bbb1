"""Breadth-first caption search over an n-gram graph.

Paths start at the keyword vertices and grow one vertex at a time, forward
through children of the tail and (by default) backward through parents of
the head. After every round the working set is cut back to the ``y`` best
paths; the search stops once ``q_n`` new paths have been considered.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Collection, Iterable, Sequence

from .corpus import END, START, NGramIndex, ngrams, pad, strip_pads
from .graph import NGramGraph

logger = logging.getLogger(__name__)


class CostFunction(enum.IntEnum):
    """Path scoring variants, higher is better.

    ``F`` is the summed n2-gram log probability (fluency), ``m`` the number
    of distinct keywords mentioned, ``l`` the caption length and ``N`` the
    number of extra nouns.
    """

    F = 1
    F_M = 2
    F_M_L = 3
    F_M_L_N = 4

    @property
    def label(self) -> str:
        return self.name.replace("_", "+")

    @classmethod
    def parse(cls, value) -> "CostFunction":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().upper().replace("+", "_")
            if key in cls.__members__:
                return cls[key]
            if key.startswith("FN"):
                key = key[2:]
            value = int(key)
        return cls(int(value))


@dataclass(frozen=True)
class SearchBudget:
    q_n: int = 150
    y: int = 5

    def __post_init__(self):
        if self.y < 1:
            raise ValueError("beam width y must be >= 1")
        if self.q_n < 0:
            raise ValueError("q_n must be >= 0")


@dataclass
class SearchStats:
    """Counters filled in by :func:`traverse`."""

    expansions: int = 0
    rounds: int = 0
    max_beam: int = 0
    beam_sizes: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class CandidatePath:
    vertex_ids: tuple[int, ...]
    tokens: tuple[str, ...]
    score: float
    fluency: float
    m: int
    l: int
    extra_nouns: int

    @property
    def caption(self) -> str:
        return " ".join(self.tokens)

    def sort_key(self):
        return (-self.score, self.tokens, self.vertex_ids)


def fluency(tokens: Sequence[str], index: NGramIndex, n2: int) -> float:
    """Summed log probability of every order-``n2`` gram of the padded tokens."""
    padded = pad(tokens, n2 - 1)
    return sum(index.log_prob(g) for g in ngrams(padded, n2))


def contains_phrase(tokens: Sequence[str], phrase: Sequence[str]) -> bool:
    size = len(phrase)
    phrase = tuple(phrase)
    return any(tuple(tokens[i:i + size]) == phrase for i in range(len(tokens) - size + 1))


def mentioned_keywords(tokens: Sequence[str], keywords: Iterable[Sequence[str]]) -> int:
    return sum(1 for kw in set(map(tuple, keywords)) if contains_phrase(tokens, kw))


def count_extra_nouns(tokens: Sequence[str], keywords: Iterable[Sequence[str]],
                      nouns: Collection[str]) -> int:
    """Distinct lexicon nouns in ``tokens`` that are not part of any keyword."""
    keyword_tokens = {t for kw in keywords for t in kw}
    return len({t for t in tokens if t in nouns and t not in keyword_tokens})


def combine(fn: CostFunction, f: float, m: int, l: int, extra: int) -> float:
    fn = CostFunction.parse(fn)
    if fn is CostFunction.F:
        return f
    if m < 1:
        raise ValueError(f"cost function {fn.label} needs at least one mentioned keyword")
    if fn is CostFunction.F_M:
        return f / m
    if fn is CostFunction.F_M_L:
        return f / (m * l)
    # N + 1 keeps zero-extra-noun captions sensitive to fluency
    return f * (extra + 1) / (m * l)


def score_tokens(tokens: Sequence[str], fn, index: NGramIndex,
                 keywords: Sequence[Sequence[str]], nouns: Collection[str] = (),
                 n2: int = 3) -> tuple[float, float, int, int, int]:
    """Return ``(score, F, m, l, N)`` for a pad-free token sequence."""
    if not tokens:
        raise ValueError("cannot score an empty token sequence")
    f = fluency(tokens, index, n2)
    m = mentioned_keywords(tokens, keywords)
    l = len(tokens)
    extra = count_extra_nouns(tokens, keywords, nouns)
    return combine(fn, f, m, l, extra), f, m, l, extra


def score_path(path: CandidatePath | Sequence[str], fn, index: NGramIndex,
               keywords: Sequence[Sequence[str]], nouns: Collection[str] = (),
               n2: int = 3) -> float:
    tokens = path.tokens if isinstance(path, CandidatePath) else strip_pads(path)
    return score_tokens(tokens, fn, index, keywords, nouns, n2)[0]


def assemble_tokens(graph: NGramGraph, vertex_ids: Iterable[int]) -> tuple[str, ...]:
    return tuple(strip_pads(t for vid in vertex_ids for t in graph.label(vid)))


def assemble_caption(labels: Iterable[Sequence[str]]) -> str:
    """Join vertex labels head to tail, dropping pad tokens."""
    return " ".join(strip_pads(t for label in labels for t in label))


def _extensions(graph: NGramGraph, path: tuple[int, ...], bidirectional: bool,
                max_visits: int):
    tail, head = path[-1], path[0]
    if graph.label(tail)[-1] != END:
        for c in graph.children(tail):
            if graph.label(c)[0] == START or path.count(c) >= max_visits:
                continue
            yield path + (c,)
    if bidirectional and graph.label(head)[0] != START:
        for p in graph.parents(head):
            if graph.label(p)[-1] == END or path.count(p) >= max_visits:
                continue
            yield (p,) + path


def traverse(graph: NGramGraph, keywords: Sequence[Sequence[str]], fn,
             budget: SearchBudget, index: NGramIndex, nouns: Collection[str] = (),
             n2: int = 3, max_len: int = 20, bidirectional: bool = True,
             max_visits: int = 2, stats: SearchStats | None = None) -> list[CandidatePath]:
    """Search ``graph`` for high-scoring captions.

    Every path ever built is a candidate; the result holds one path per
    distinct caption, best first.
    """
    fn = CostFunction.parse(fn)
    keywords = [tuple(kw) for kw in keywords]
    if stats is None:
        stats = SearchStats()
    cache: dict[tuple[str, ...], tuple] = {}

    def make(vids: tuple[int, ...]) -> CandidatePath:
        tokens = assemble_tokens(graph, vids)
        if tokens not in cache:
            cache[tokens] = score_tokens(tokens, fn, index, keywords, nouns, n2)
        score, f, m, l, extra = cache[tokens]
        return CandidatePath(vids, tokens, score, f, m, l, extra)

    best: dict[tuple[str, ...], CandidatePath] = {}

    def keep(path: CandidatePath):
        old = best.get(path.tokens)
        if old is None or path.sort_key() < old.sort_key():
            best[path.tokens] = path

    beam = [make((vid,)) for vid in sorted(graph.keyword_ids)]
    seen = {p.vertex_ids for p in beam}
    for p in beam:
        keep(p)

    while beam and stats.expansions < budget.q_n:
        grown = []
        for q in beam:
            for vids in _extensions(graph, q.vertex_ids, bidirectional, max_visits):
                if vids in seen:
                    continue
                if len(assemble_tokens(graph, vids)) > max_len:
                    continue
                if stats.expansions >= budget.q_n:
                    break
                seen.add(vids)
                stats.expansions += 1
                path = make(vids)
                grown.append(path)
                keep(path)
        grown.sort(key=CandidatePath.sort_key)
        beam = grown[:budget.y]
        stats.rounds += 1
        stats.beam_sizes.append(len(beam))
        stats.max_beam = max(stats.max_beam, len(beam))
    logger.debug("search: %d expansions over %d rounds, %d captions",
                 stats.expansions, stats.rounds, len(best))
    return sorted(best.values(), key=CandidatePath.sort_key)
