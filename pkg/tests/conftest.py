import random

import pytest

from ngramcap import build_index
from ngramcap.keywords import PosLexicon

T0 = [
    "a person on a boat",
    "a man sitting on a boat",
    "a man sitting on a bench",
    "a boat on the water",
    "a person sitting on a bench",
    "a man on a boat",
]


@pytest.fixture(scope="session")
def t0():
    return list(T0)


@pytest.fixture(scope="session")
def t0_index():
    return build_index(T0, 3, 3)


@pytest.fixture(scope="session")
def t0_index4():
    return build_index(T0, 4, 4)


@pytest.fixture(scope="session")
def lexicon():
    return PosLexicon({
        "large": ["attribute"], "small": ["attribute"], "red": ["attribute"],
        "boat": ["noun"], "dock": ["noun"], "man": ["noun"], "bench": ["noun"],
        "water": ["noun"], "person": ["noun"], "dog": ["noun"],
        "near": ["preposition"], "on": ["preposition", "stopword"],
        "navigating": ["verb"], "sitting": ["verb"], "running": ["verb"],
        "a": ["stopword"], "the": ["stopword"],
    })


NOUNS = ["man", "woman", "dog", "cat", "boat", "bench", "horse", "car", "tree", "table"]
ADJS = ["small", "large", "red", "white", "old", "young"]
VERBS = ["sitting", "standing", "riding", "walking", "eating", "looking"]
PREPS = ["on", "near", "next to", "in front of", "under", "behind"]


def synthetic_corpus(size, seed=0):
    """Template captions: det [adj] noun verb prep det [adj] noun."""
    rng = random.Random(seed)
    lines = []
    for _ in range(size):
        parts = ["a"]
        if rng.random() < 0.4:
            parts.append(rng.choice(ADJS))
        parts += [rng.choice(NOUNS), rng.choice(VERBS), rng.choice(PREPS),
                  rng.choice(["a", "the"])]
        if rng.random() < 0.3:
            parts.append(rng.choice(ADJS))
        parts.append(rng.choice(NOUNS))
        lines.append(" ".join(parts))
    return lines


@pytest.fixture(scope="session")
def corpus1000():
    return synthetic_corpus(1000, seed=7)


# one line per acceptance criterion, shown after the test run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
