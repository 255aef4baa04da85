"""Counting imputers: global value frequencies and their back-off chains.

Three related predictors, each a strict extension of the previous:

* global frequency: most frequent training value of the target feature;
* genus/family back-off: genus-level mode, then family, then global;
* geographic back-off: genus, family, then the mode over languages
  within a near radius, then the family of the nearest language that
  has the target within a far radius, then global.

Confidence is the winning value's share of the counts at the deciding
level.
"""

from __future__ import annotations

from collections import Counter

from ..geo import GeoPoint, haversine_km
from ..kb import OBSERVED, Dataset
from .base import Imputer, ImputerQuery, NoPredictionError, Prediction, mode_with_confidence

__all__ = ["GlobalFrequencyImputer", "GenusFamilyBackoffImputer", "GeoBackoffImputer"]


def _observed_counts(train: Dataset) -> dict[str, Counter]:
    counts: dict[str, Counter] = {}
    for (_, feature), cell in train.cells.items():
        if cell.state == OBSERVED:
            counts.setdefault(feature, Counter())[cell.value] += 1
    return counts


class GlobalFrequencyImputer(Imputer):
    """Predict the most frequent training value of the target feature."""

    name = "frequency"

    def __init__(self):
        self._counts: dict[str, Counter] = {}

    def fit(self, train: Dataset, context: Dataset | None = None) -> "GlobalFrequencyImputer":
        self._counts = _observed_counts(train)
        return self

    def predict(self, query: ImputerQuery) -> Prediction:
        counts = self._counts.get(query.target)
        if not counts:
            raise NoPredictionError(f"unknown feature {query.target!r}")
        value, confidence = mode_with_confidence(counts)
        return Prediction(value, confidence, source="global")


class GenusFamilyBackoffImputer(Imputer):
    """Genus-level mode, backing off to family, then global frequency."""

    name = "genus_family"

    def __init__(self):
        self._genus: dict[tuple[str, str], Counter] = {}
        self._family: dict[tuple[str, str], Counter] = {}
        self._global: dict[str, Counter] = {}

    def fit(self, train: Dataset, context: Dataset | None = None) -> "GenusFamilyBackoffImputer":
        self._genus = {}
        self._family = {}
        self._global = _observed_counts(train)
        by_code = {lang.code: lang for lang in train.languages}
        for (code, feature), cell in train.cells.items():
            if cell.state != OBSERVED:
                continue
            lang = by_code[code]
            self._genus.setdefault((lang.genus, feature), Counter())[cell.value] += 1
            self._family.setdefault((lang.family, feature), Counter())[cell.value] += 1
        return self

    def predict(self, query: ImputerQuery) -> Prediction:
        lang = query.language
        for source, counts in (
            ("genus", self._genus.get((lang.genus, query.target))),
            ("family", self._family.get((lang.family, query.target))),
        ):
            mode = mode_with_confidence(counts) if counts else None
            if mode is not None:
                return Prediction(mode[0], mode[1], source=source)
        counts = self._global.get(query.target)
        if not counts:
            raise NoPredictionError(f"unknown feature {query.target!r}")
        value, confidence = mode_with_confidence(counts)
        return Prediction(value, confidence, source="global")


class GeoBackoffImputer(Imputer):
    """Genus/family back-off extended with two geographic levels.

    When neither genus nor family has seen the target, take the mode
    over training languages within ``near_km`` that have it.  Failing
    that, find the nearest training language with the target inside
    ``far_km`` and use its family's mode.  Global frequency terminates
    the chain.
    """

    name = "geo_backoff"

    def __init__(self, near_km: float = 1000.0, far_km: float = 2000.0):
        self.near_km = near_km
        self.far_km = far_km
        self._backoff = GenusFamilyBackoffImputer()
        self._languages = []
        self._observed: dict[str, dict[str, str]] = {}

    def fit(self, train: Dataset, context: Dataset | None = None) -> "GeoBackoffImputer":
        self._backoff.fit(train)
        self._languages = list(train.languages)
        self._observed = {lang.code: train.observed_of(lang.code) for lang in train.languages}
        return self

    def _holders(self, target: str, exclude: str):
        """Training languages observing the target, with their values."""
        for lang in self._languages:
            if lang.code == exclude:
                continue
            value = self._observed[lang.code].get(target)
            if value is not None:
                yield lang, value

    def predict(self, query: ImputerQuery) -> Prediction:
        pred = self._backoff.predict(query)  # may raise NoPredictionError
        if pred.source in ("genus", "family"):
            return pred

        here = GeoPoint(query.language.latitude, query.language.longitude)
        holders = [
            (lang, value, haversine_km(here, GeoPoint(lang.latitude, lang.longitude)))
            for lang, value in self._holders(query.target, query.language.code)
        ]

        near = Counter(v for _, v, dist in holders if dist <= self.near_km)
        mode = mode_with_confidence(near)
        if mode is not None:
            return Prediction(mode[0], mode[1], source="neighborhood")

        in_far = [(dist, lang.code, lang.family) for lang, _, dist in holders if dist <= self.far_km]
        if in_far:
            _, _, family = min(in_far)
            family_counts = Counter(v for lang, v, _ in holders if lang.family == family)
            mode = mode_with_confidence(family_counts)
            if mode is not None:
                return Prediction(mode[0], mode[1], source="nearest-family")

        return pred  # global frequency from the underlying chain
