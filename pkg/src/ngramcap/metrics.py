"""BLEU-1..4, ROUGE-L and CIDEr(-D) for candidate captions against references.

Scores follow the conventions of the COCO caption evaluation toolkit:
corpus-level BLEU with clipped counts and a corpus brevity penalty,
ROUGE-L from the best LCS precision and recall over the references, and
CIDEr-D with document frequencies taken from the evaluated references,
clipped term frequencies, a Gaussian length penalty and the x10 scaling.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import tokenize
from .exceptions import AlignmentError, DataError, IDFDegenerateError

Tokens = tuple[str, ...]


@dataclass(frozen=True)
class EvalInstance:
    id: object
    candidate: Tokens
    references: tuple[Tokens, ...]

    def __post_init__(self):
        if not self.references:
            raise DataError(f"instance {self.id!r} has no references")

    @classmethod
    def from_text(cls, id, candidate: str, references: Iterable[str]) -> "EvalInstance":
        return cls(id, tuple(tokenize(candidate)), tuple(tuple(tokenize(r)) for r in references))


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


# BLEU

def _closest_ref_length(candidate_len: int, refs: Sequence[Tokens]) -> int:
    return min((abs(len(r) - candidate_len), len(r)) for r in refs)[1]


def _bleu_stats(inst: EvalInstance, max_n: int):
    """Per-order (clipped matches, candidate n-gram total), candidate and reference lengths."""
    stats = []
    for n in range(1, max_n + 1):
        cand = ngram_counts(inst.candidate, n)
        max_ref: Counter = Counter()
        for ref in inst.references:
            for gram, c in ngram_counts(ref, n).items():
                if c > max_ref[gram]:
                    max_ref[gram] = c
        matches = sum(min(c, max_ref[g]) for g, c in cand.items())
        stats.append((matches, max(len(inst.candidate) - n + 1, 0)))
    return stats, len(inst.candidate), _closest_ref_length(len(inst.candidate), inst.references)


def _bleu_from_stats(stats, c: int, r: int, smoothing: float) -> list[float]:
    if c == 0:
        return [0.0] * len(stats)
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    scores, log_sum = [], 0.0
    for j, (matches, total) in enumerate(stats, 1):
        if smoothing > 0:
            p = (matches + smoothing) / (total + smoothing)
        else:
            p = matches / total if total else 0.0
        if p == 0.0 or log_sum == -math.inf:
            log_sum = -math.inf
            scores.append(0.0)
            continue
        log_sum += math.log(p)
        scores.append(bp * math.exp(log_sum / j))
    return scores


def bleu(instances: Sequence[EvalInstance], max_n: int = 4, smoothing: float = 0.0):
    """Corpus BLEU-1..``max_n`` plus per-instance scores.

    Returns ``(corpus_scores, per_instance_scores)``; each is a list of
    ``max_n`` floats. Without smoothing, an order with no candidate n-grams
    has zero precision, so captions shorter than ``max_n`` get BLEU-``max_n`` 0.
    """
    if not instances:
        raise DataError("no instances to score")
    totals = [[0, 0] for _ in range(max_n)]
    c_sum = r_sum = 0
    per_instance = []
    for inst in instances:
        stats, c, r = _bleu_stats(inst, max_n)
        per_instance.append(_bleu_from_stats(stats, c, r, smoothing))
        for j, (m, t) in enumerate(stats):
            totals[j][0] += m
            totals[j][1] += t
        c_sum += c
        r_sum += r
    corpus = _bleu_from_stats([tuple(t) for t in totals], c_sum, r_sum, smoothing)
    return corpus, per_instance


# ROUGE-L

def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l_instance(inst: EvalInstance, beta: float = 1.2) -> float:
    if not inst.candidate:
        return 0.0
    precs, recs = [], []
    for ref in inst.references:
        lcs = lcs_length(inst.candidate, ref)
        precs.append(lcs / len(inst.candidate))
        recs.append(lcs / len(ref) if ref else 0.0)
    p, r = max(precs), max(recs)
    if p == 0 or r == 0:
        return 0.0
    return (1 + beta ** 2) * p * r / (r + beta ** 2 * p)


def rouge_l(instances: Sequence[EvalInstance], beta: float = 1.2):
    """Mean LCS F-measure; returns ``(corpus, per_instance)``."""
    if not instances:
        raise DataError("no instances to score")
    scores = [rouge_l_instance(inst, beta) for inst in instances]
    return sum(scores) / len(scores), scores


# CIDEr

def _tfidf(counts_by_order, df, log_docs):
    vec, norms = [], []
    for counts in counts_by_order:
        v = {g: tf * (log_docs - math.log(max(1.0, df.get(g, 0)))) for g, tf in counts.items()}
        vec.append(v)
        norms.append(math.sqrt(sum(w * w for w in v.values())))
    return vec, norms


def cider(instances: Sequence[EvalInstance], max_n: int = 4, sigma: float = 6.0,
          variant: str = "D"):
    """Corpus CIDEr and per-instance scores, ``(corpus, per_instance)``.

    ``variant="D"`` (default) clips candidate weights by the reference's and
    applies ``exp(-(len_c - len_r)**2 / (2 sigma**2))``; ``variant="plain"``
    does neither.
    """
    if variant not in ("D", "plain"):
        raise ValueError("variant must be 'D' or 'plain'")
    if len(instances) < 2:
        raise IDFDegenerateError("CIDEr needs at least two instances")
    ref_counts = [[[ngram_counts(ref, n) for n in range(1, max_n + 1)] for ref in inst.references]
                  for inst in instances]
    df: Counter = Counter()
    for refs in ref_counts:
        df.update({g for ref in refs for counts in ref for g in counts})
    log_docs = math.log(float(len(instances)))

    scores = []
    for inst, refs in zip(instances, ref_counts):
        cand_vec, cand_norm = _tfidf([ngram_counts(inst.candidate, n) for n in range(1, max_n + 1)],
                                     df, log_docs)
        total = 0.0
        for ref_tokens, counts in zip(inst.references, refs):
            ref_vec, ref_norm = _tfidf(counts, df, log_docs)
            delta = len(inst.candidate) - len(ref_tokens)
            per_order = []
            for n in range(max_n):
                if variant == "D":
                    dot = sum(min(w, ref_vec[n].get(g, 0.0)) * ref_vec[n].get(g, 0.0)
                              for g, w in cand_vec[n].items())
                else:
                    dot = sum(w * ref_vec[n].get(g, 0.0) for g, w in cand_vec[n].items())
                if cand_norm[n] != 0 and ref_norm[n] != 0:
                    dot /= cand_norm[n] * ref_norm[n]
                if variant == "D":
                    dot *= math.exp(-(delta ** 2) / (2 * sigma ** 2))
                per_order.append(dot)
            total += sum(per_order) / max_n
        scores.append(10.0 * total / len(refs))
    return sum(scores) / len(scores), scores


# Reports

METRIC_NAMES = ("BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4", "ROUGE-L", "CIDEr")


@dataclass
class EvalReport:
    corpus: dict[str, float]
    instances: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"corpus": self.corpus,
                "instances": [{"id": k, **v} for k, v in self.instances.items()]}

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=False)
            fh.write("\n")


def align(candidates: Mapping, references: Mapping) -> list[EvalInstance]:
    """Pair ``{id: caption}`` with ``{id: [captions]}``; raise on any id mismatch."""
    if not candidates:
        raise DataError("no candidates to evaluate")
    missing_c = set(references) - set(candidates)
    missing_r = set(candidates) - set(references)
    if missing_c or missing_r:
        raise AlignmentError(missing_c, missing_r)
    return [EvalInstance.from_text(key, candidates[key], references[key]) for key in candidates]


def evaluate(candidates: Mapping, references: Mapping, smoothing: float = 0.0,
             cider_variant: str = "D") -> EvalReport:
    instances = align(candidates, references)
    b_corpus, b_inst = bleu(instances, 4, smoothing)
    r_corpus, r_inst = rouge_l(instances)
    c_corpus, c_inst = cider(instances, variant=cider_variant)
    corpus = {f"BLEU-{j}": b_corpus[j - 1] for j in range(1, 5)}
    corpus["ROUGE-L"] = r_corpus
    corpus["CIDEr"] = c_corpus
    per = {}
    for i, inst in enumerate(instances):
        row = {f"BLEU-{j}": b_inst[i][j - 1] for j in range(1, 5)}
        row["ROUGE-L"] = r_inst[i]
        row["CIDEr"] = c_inst[i]
        per[inst.id] = row
    return EvalReport(corpus, per)


def read_jsonl(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise DataError(f"{path}:{lineno}: {exc}") from exc
    return records


def read_candidates(path) -> dict:
    try:
        return {r["id"]: r["caption"] for r in read_jsonl(path)}
    except KeyError as exc:
        raise DataError(f"{path}: candidate record missing {exc}") from exc


def read_references(path) -> dict:
    try:
        return {r["id"]: list(r["captions"]) for r in read_jsonl(path)}
    except KeyError as exc:
        raise DataError(f"{path}: reference record missing {exc}") from exc


def evaluate_files(candidates_path, references_path, **kwargs) -> EvalReport:
    return evaluate(read_candidates(candidates_path), read_references(references_path), **kwargs)
