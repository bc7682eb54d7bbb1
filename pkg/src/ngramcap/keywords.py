"""Query keyword sets built from reference captions.

Part-of-speech classes come from a word -> classes lexicon file rather
than a statistical tagger. A small lexicon and an English stoplist ship
with the package; pass your own files for larger vocabularies.
"""
from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Iterator, Mapping, Sequence

from .corpus import tokenize
from .exceptions import DataError, EmptyKeywordSetError

NOUN = "noun"
ATTRIBUTE = "attribute"
PREPOSITION = "preposition"
VERB = "verb"
STOPWORD = "stopword"
OTHER = "other"
POS_CLASSES = frozenset({NOUN, ATTRIBUTE, PREPOSITION, VERB, STOPWORD, OTHER})

_LETTER_CLASSES = {"n": NOUN, "a": ATTRIBUTE, "p": PREPOSITION, "v": VERB}
COMPOSITE_PATTERNS = {
    "attribute+noun": (ATTRIBUTE, NOUN),
    "noun+verb": (NOUN, VERB),
}
_DIGIT = re.compile(r"\d")


class PosLexicon(Mapping):
    """Read-only ``word -> frozenset(classes)`` map; unknown words map to the empty set."""

    def __init__(self, entries: Mapping[str, Iterable[str]] = ()):
        self._entries = {}
        for word, classes in dict(entries).items():
            classes = frozenset(classes)
            unknown = classes - POS_CLASSES
            if unknown:
                raise DataError(f"unknown POS classes {sorted(unknown)} for {word!r}")
            if not classes:
                raise DataError(f"lexicon entry {word!r} has no class")
            self._entries[word.lower()] = classes

    def __getitem__(self, word):
        return self._entries[word]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def classes(self, word: str) -> frozenset:
        return self._entries.get(word, frozenset())

    def words_of(self, cls: str) -> frozenset:
        return frozenset(w for w, c in self._entries.items() if cls in c)

    @property
    def nouns(self) -> frozenset:
        return self.words_of(NOUN)

    @classmethod
    def read(cls, lines: Iterable[str]) -> "PosLexicon":
        entries = {}
        for lineno, line in enumerate(lines, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                word, classes = line.split("\t")
            except ValueError:
                raise DataError(f"lexicon line {lineno}: expected 'word<TAB>class[,class]'") from None
            entries[word] = [c.strip() for c in classes.split(",") if c.strip()]
        return cls(entries)


def load_lexicon(path=None) -> PosLexicon:
    """Load a lexicon file, or the bundled one when ``path`` is None."""
    if path is None:
        text = resources.files(__package__).joinpath("data/lexicon.tsv").read_text("utf-8")
        return PosLexicon.read(text.splitlines())
    with open(path, encoding="utf-8") as fh:
        return PosLexicon.read(fh)


def load_stoplist(path=None) -> frozenset:
    if path is None:
        text = resources.files(__package__).joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


@dataclass(frozen=True)
class KeywordSet:
    """Ordered, de-duplicated keywords; multi-token items are composite keywords."""

    items: tuple[tuple[str, ...], ...]
    source_tag: str = "external"

    def __post_init__(self):
        items = []
        for kw in self.items:
            kw = tuple(kw.split()) if isinstance(kw, str) else tuple(kw)
            if not kw:
                continue
            if kw not in items:
                items.append(kw)
        if not items:
            raise EmptyKeywordSetError("keyword set is empty")
        object.__setattr__(self, "items", tuple(items))

    @classmethod
    def from_strings(cls, words: Iterable[str], source_tag: str = "external") -> "KeywordSet":
        return cls(tuple(tuple(tokenize(w)) for w in words), source_tag)

    def __iter__(self) -> Iterator[tuple[str, ...]]:
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __contains__(self, kw):
        kw = tuple(kw.split()) if isinstance(kw, str) else tuple(kw)
        return kw in self.items

    def as_strings(self) -> list[str]:
        return [" ".join(kw) for kw in self.items]

    @property
    def composite(self) -> tuple[tuple[str, ...], ...]:
        return tuple(kw for kw in self.items if len(kw) > 1)

    def caption(self) -> str:
        """Keywords joined into a keyword-only "caption"."""
        return " ".join(self.as_strings())


def parse_classes(spec) -> frozenset:
    """``"na"`` -> {noun, attribute}; also accepts an iterable of class names."""
    if isinstance(spec, str):
        try:
            return frozenset(_LETTER_CLASSES[c] for c in spec)
        except KeyError as exc:
            raise ValueError(f"unknown class letter {exc.args[0]!r}") from None
    return frozenset(spec)


def extract_pos_keywords(caption: str, classes, lexicon: PosLexicon,
                         source_tag: str | None = None) -> KeywordSet:
    """Caption tokens whose lexicon classes intersect ``classes``, first-seen order."""
    classes = parse_classes(classes)
    if not classes:
        raise EmptyKeywordSetError("no POS classes requested")
    picked = [(tok,) for tok in tokenize(caption) if lexicon.classes(tok) & classes]
    if not picked:
        raise EmptyKeywordSetError(f"no token of {caption!r} is in classes {sorted(classes)}")
    return KeywordSet(tuple(picked), source_tag or "HK-" + _tag(classes))


def _tag(classes) -> str:
    letters = {v: k for k, v in _LETTER_CLASSES.items()}
    return "".join(letters[c] for c in (NOUN, ATTRIBUTE, PREPOSITION, VERB) if c in classes)


def extract_composite(caption: str, pattern: str, lexicon: PosLexicon,
                      source_tag: str | None = None) -> KeywordSet:
    """Pair adjacent tokens matching ``pattern`` into composite keywords.

    Pairing is greedy left to right. Tokens that match either side of the
    pattern but end up unpaired are kept as single keywords.
    """
    try:
        first, second = COMPOSITE_PATTERNS[pattern]
    except KeyError:
        raise ValueError(f"pattern must be one of {sorted(COMPOSITE_PATTERNS)}") from None
    tokens = tokenize(caption)
    items = []
    i = 0
    while i < len(tokens):
        here = lexicon.classes(tokens[i])
        if i + 1 < len(tokens) and first in here and second in lexicon.classes(tokens[i + 1]):
            items.append((tokens[i], tokens[i + 1]))
            i += 2
            continue
        if here & {first, second}:
            items.append((tokens[i],))
        i += 1
    tag = source_tag or "HK-(" + ("na" if first == ATTRIBUTE else "nv") + ")"
    if not items:
        raise EmptyKeywordSetError(f"no token of {caption!r} matches {pattern}")
    return KeywordSet(tuple(items), tag)


def frequent_words(references: Sequence[str], stoplist: Iterable[str] = ()) -> Counter:
    stop = frozenset(stoplist)
    counts: Counter = Counter()
    for ref in references:
        counts.update(t for t in tokenize(ref) if t not in stop)
    return counts


def extract_frequent(references: Sequence[str], min_freq: int,
                     stoplist: Iterable[str] | None = None) -> KeywordSet:
    """Words occurring at least ``min_freq`` times across all references.

    Occurrences are summed over every reference. ``stoplist=None`` uses the
    bundled stoplist; pass ``()`` to keep stopwords.
    """
    if not 1 <= min_freq:
        raise ValueError("min_freq must be >= 1")
    if stoplist is None:
        stoplist = load_stoplist()
    counts = frequent_words(references, stoplist)
    words = [(w,) for w, c in counts.items() if c >= min_freq]
    if not words:
        raise EmptyKeywordSetError(f"no word occurs {min_freq}+ times")
    return KeywordSet(tuple(words), f"HK-f{min_freq}")


def clean_vocab(captions: Iterable[str], top_w: int, stoplist: Iterable[str] | None = None) -> list[str]:
    """The ``top_w`` most frequent words that are not stopwords and contain no digit."""
    if top_w < 1:
        raise ValueError("top_w must be >= 1")
    if stoplist is None:
        stoplist = load_stoplist()
    stop = frozenset(stoplist)
    counts: Counter = Counter()
    for caption in captions:
        counts.update(t for t in tokenize(caption) if t not in stop and not _DIGIT.search(t))
    ranked = sorted(counts.items(), key=lambda wc: (-wc[1], wc[0]))
    return [w for w, _ in ranked[:top_w]]


def human_keywords(references: Sequence[str], mode: str, lexicon: PosLexicon,
                   stoplist: Iterable[str] | None = None, caption_index: int = 0) -> KeywordSet:
    """Build one of the human keyword sets from an image's reference captions.

    ``mode`` is ``n``/``na``/``nap``/``napv`` (POS sets of one caption),
    ``(na)``/``(nv)`` (composites of one caption) or ``f1``..``f5``
    (cumulative frequency over all captions).
    """
    mode = mode.strip().lower()
    if mode.startswith("hk-"):
        mode = mode[3:]
    if mode.startswith("f") and mode[1:].isdigit():
        return extract_frequent(references, int(mode[1:]), stoplist)
    caption = references[caption_index]
    if mode == "(na)":
        return extract_composite(caption, "attribute+noun", lexicon)
    if mode == "(nv)":
        return extract_composite(caption, "noun+verb", lexicon)
    return extract_pos_keywords(caption, mode, lexicon)


def read_keyword_file(path) -> dict:
    """Read ``{"id": ..., "keywords": [...]}`` JSON lines into ``{id: KeywordSet}``."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                out[rec["id"]] = KeywordSet.from_strings(rec["keywords"], rec.get("source", "external"))
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: bad keyword record ({exc})") from exc
    return out


def write_keyword_file(path, keyword_sets: Mapping) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, kws in keyword_sets.items():
            fh.write(json.dumps({"id": key, "keywords": kws.as_strings(),
                                 "source": kws.source_tag}) + "\n")
