import pytest

from ngramcap import build_index
from ngramcap.exceptions import DataError
from ngramcap.gridsearch import PARAM_GRID, grid_search, sample_ids
from ngramcap.keywords import KeywordSet

from conftest import synthetic_corpus


@pytest.fixture(scope="module")
def setup():
    corpus = synthetic_corpus(150, seed=11)
    refs = {i: [line] for i, line in enumerate(corpus[:12])}
    kws = {i: KeywordSet.from_strings([line.split()[-1]]) for i, line in enumerate(corpus[:12])}
    return corpus, kws, refs


def test_sample_ids_seeded():
    ids = list(range(100))
    assert sample_ids(ids, 10, 0) == sample_ids(ids, 10, 0)
    assert sample_ids(ids, 10, 0) != sample_ids(ids, 10, 1)
    assert sorted(sample_ids(ids, None)) == ids
    assert sorted(sample_ids(ids, 1000)) == ids


def test_full_grid(setup):
    corpus, kws, refs = setup
    indexes = {3: build_index(corpus, 3, 3), 4: build_index(corpus, 4, 4)}
    base = {"x": 1, "q_n": 40}
    rows = grid_search(indexes, kws, refs, sample_size=6, base_params=base)
    assert len(rows) == 32
    assert {(r["n"], r["n2"], r["h"], r["fn"]) for r in rows} == {
        (n, n2, h, fn) for n in PARAM_GRID["n"] for n2 in PARAM_GRID["n2"]
        for h in PARAM_GRID["h"] for fn in PARAM_GRID["fn"]}
    cider = [r["CIDEr"] for r in rows]
    assert cider == sorted(cider, reverse=True)
    assert all(r["max_expansions"] <= r["q_n"] and r["max_beam"] <= r["y"] for r in rows)
    again = grid_search(list(corpus), kws, refs, sample_size=6, base_params=base)
    assert [r["CIDEr"] for r in again] == pytest.approx(cider)


def test_needs_two_ids(setup):
    corpus, kws, refs = setup
    with pytest.raises(DataError):
        grid_search(corpus, {0: kws[0]}, refs, sample_size=None)
