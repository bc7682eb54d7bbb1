"""Exhaustive hyper-parameter search ranked by CIDEr on a seeded sample."""
from __future__ import annotations

import logging
import random
from typing import Iterable, Mapping

from joblib import Parallel, delayed
from sklearn.model_selection import ParameterGrid

from .corpus import NGramIndex, build_index
from .estimator import GraphCaptioner
from .exceptions import DataError, GraphEmptyError
from .metrics import evaluate
from .search import SearchStats

logger = logging.getLogger(__name__)

PARAM_GRID = {"n": [3, 4], "n2": [3, 4], "h": [1, 2], "fn": [1, 2, 3, 4]}
DEFAULT_SEED = 0


def sample_ids(ids: Iterable, sample_size: int | None, seed: int = DEFAULT_SEED) -> list:
    """A reproducible sample of ``ids`` (all of them when ``sample_size`` is None or too big)."""
    ids = sorted(ids, key=str)
    if sample_size is None or sample_size >= len(ids):
        return ids
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    return sorted(random.Random(seed).sample(ids, sample_size), key=str)


def run_config(params: dict, index: NGramIndex, keyword_sets: Mapping, references: Mapping,
               ids: list) -> dict:
    est = GraphCaptioner(**params).fit(index)
    captions, expansions, beams, failures = {}, [], [], 0
    for key in ids:
        stats = SearchStats()
        try:
            captions[key] = est.generate(keyword_sets[key], stats)[0].caption
        except GraphEmptyError:
            captions[key] = ""
            failures += 1
        expansions.append(stats.expansions)
        beams.append(stats.max_beam)
    report = evaluate(captions, {key: references[key] for key in ids})
    row = {name: params[name] for name in PARAM_GRID}
    row.update(report.corpus)
    row.update(max_expansions=max(expansions), max_beam=max(beams), failures=failures,
               q_n=params["q_n"], y=params["y"])
    return row


def grid_search(corpus, keyword_sets: Mapping, references: Mapping,
                sample_size: int | None = 500, seed: int = DEFAULT_SEED,
                base_params: dict | None = None, param_grid: dict | None = None,
                n_jobs: int | None = None) -> list[dict]:
    """Evaluate every configuration of ``param_grid`` and rank them by CIDEr.

    ``corpus`` is a list of caption lines, or a dict ``{max_order: NGramIndex}``
    of prebuilt indexes. Each returned row holds the configuration, its
    corpus metrics and the largest expansion count / beam size seen.
    """
    param_grid = PARAM_GRID if param_grid is None else param_grid
    base = GraphCaptioner().get_params()
    base.update(base_params or {})
    base["n_jobs"] = None
    ids = sample_ids(set(keyword_sets) & set(references), sample_size, seed)
    if len(ids) < 2:
        raise DataError("grid search needs at least two ids with both keywords and references")

    configs = [{**base, **cfg} for cfg in ParameterGrid(param_grid)]
    if isinstance(corpus, Mapping):
        indexes = dict(corpus)
    else:
        lines = list(corpus)
        indexes = {}
        for cfg in configs:
            order = max(cfg["n"], cfg["n2"])
            if order not in indexes:
                indexes[order] = build_index(lines, order, order)
    logger.info("grid search: %d configurations on %d ids", len(configs), len(ids))

    jobs = (delayed(run_config)(cfg, indexes[max(cfg["n"], cfg["n2"])], keyword_sets,
                                references, ids) for cfg in configs)
    if n_jobs in (None, 1):
        rows = [job[0](*job[1], **job[2]) for job in jobs]
    else:
        rows = Parallel(n_jobs=n_jobs)(jobs)
    # stable sort keeps grid order among ties
    return sorted(rows, key=lambda r: -r["CIDEr"])
