"""Common imputer interface: fit on a training dataset, then answer
(language, target feature) queries with a value and a confidence."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional

from ..kb import BLANKED, OBSERVED, UNKNOWN, Dataset, Language

__all__ = [
    "NoPredictionError",
    "ImputerQuery",
    "Prediction",
    "Imputer",
    "mode_with_confidence",
    "fill_dataset",
]


class NoPredictionError(Exception):
    """The imputer cannot answer this query; callers may back off."""


@dataclass(frozen=True)
class ImputerQuery:
    """One cell to fill: the language, its visible features, the target."""

    language: Language
    observed: Mapping[str, str]
    target: str

    def __post_init__(self):
        if self.target in self.observed:
            raise ValueError(f"target {self.target!r} is already observed")


@dataclass(frozen=True)
class Prediction:
    value: str
    confidence: float  # in [0, 1]
    source: str  # label of the deciding rule or back-off level

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


class Imputer:
    """Base class; fitted models are immutable and predict is pure."""

    name = "imputer"

    def fit(self, train: Dataset, context: Dataset | None = None) -> "Imputer":
        raise NotImplementedError

    def predict(self, query: ImputerQuery) -> Prediction:
        raise NotImplementedError


def mode_with_confidence(counts: Counter) -> Optional[tuple[str, float]]:
    """Most frequent value with its share of the counts.

    Ties break on the lexicographically smaller value; None for empty
    counts.
    """
    total = sum(counts.values())
    if total <= 0:
        return None
    value, n = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return value, n / total


def fill_dataset(imputer: Imputer, test: Dataset) -> dict[tuple[str, str], Prediction]:
    """Predict every blanked and unknown cell of ``test``.

    Queries see only the language's observed cells.  Iteration order is
    fixed (dataset order, then feature name), so results are
    deterministic.  NoPredictionError propagates; wrap the imputer in an
    ensemble ending in a global-frequency member for total coverage.
    """
    out: dict[tuple[str, str], Prediction] = {}
    for lang in test.languages:
        observed = test.observed_of(lang.code)
        for feature, cell in sorted(test.cells_of(lang.code).items()):
            if cell.state == OBSERVED:
                continue
            query = ImputerQuery(language=lang, observed=observed, target=feature)
            out[(lang.code, feature)] = imputer.predict(query)
    return out
