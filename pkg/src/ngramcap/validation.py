"""Input checking shared by the estimator and the CLI."""
from __future__ import annotations

from numbers import Integral

from .corpus import NGramIndex
from .exceptions import DataError
from .keywords import KeywordSet
from .search import CostFunction


def check_keyword_set(kws) -> KeywordSet:
    """Coerce a KeywordSet, a whitespace-separated string, or a list of keywords."""
    if isinstance(kws, KeywordSet):
        return kws
    if isinstance(kws, str):
        return KeywordSet.from_strings(kws.split())
    kws = list(kws)
    if all(isinstance(kw, str) for kw in kws):
        return KeywordSet.from_strings(kws)
    return KeywordSet(tuple(tuple(kw) for kw in kws))


def check_keyword_sets(X) -> list[KeywordSet]:
    if isinstance(X, (str, KeywordSet)):
        raise TypeError("expected a sequence of keyword sets, got a single one")
    out = [check_keyword_set(kws) for kws in X]
    if not out:
        raise DataError("no keyword sets given")
    return out


def check_corpus(X) -> list[str] | NGramIndex:
    if isinstance(X, NGramIndex):
        return X
    if isinstance(X, str):
        raise TypeError("corpus must be a sequence of caption lines, not a single string")
    lines = [str(line) for line in X]
    if not lines:
        raise DataError("empty corpus")
    return lines


def _check_int(name, value, low, choices=None):
    if not isinstance(value, Integral) or isinstance(value, bool):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < low:
        raise ValueError(f"{name} must be >= {low}, got {value}")
    if choices is not None and value not in choices:
        raise ValueError(f"{name} must be one of {sorted(choices)}, got {value}")


def check_params(params: dict) -> None:
    """Validate a captioner parameter dict (as from ``get_params``)."""
    _check_int("n", params["n"], 2)
    _check_int("n2", params["n2"], 2)
    _check_int("h", params["h"], 0)
    for name in ("k", "x", "y", "max_len"):
        _check_int(name, params[name], 1)
    _check_int("q_n", params["q_n"], 0)
    CostFunction.parse(params["fn"])
