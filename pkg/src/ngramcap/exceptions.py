"""Exception hierarchy.

Everything a caller can reasonably recover from derives from
:class:`DataError`; the CLI maps it to exit code 2.
"""


class DataError(ValueError):
    """Bad or inconsistent input data."""


class EmptyCorpusError(DataError):
    pass


class GraphEmptyError(DataError):
    """None of the query keywords has a parent n-gram in the corpus."""


class EmptyKeywordSetError(DataError):
    pass


class IDFDegenerateError(DataError):
    """CIDEr needs at least two instances to compute document frequencies."""


class AlignmentError(DataError):
    def __init__(self, missing_candidates=(), missing_references=()):
        self.missing_candidates = sorted(missing_candidates, key=str)
        self.missing_references = sorted(missing_references, key=str)
        parts = []
        if self.missing_candidates:
            parts.append(f"no candidate for ids {self.missing_candidates}")
        if self.missing_references:
            parts.append(f"no references for ids {self.missing_references}")
        super().__init__("; ".join(parts) or "id mismatch")
